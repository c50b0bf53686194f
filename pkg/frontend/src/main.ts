// Bootstrap: wire the API client, session driver, and view together and
// run the shared-clock animation loop.

import { ApiClient } from "./api.js";
import { SessionDriver } from "./session.js";
import { AppView } from "./view.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const driver = new SessionDriver(new ApiClient(""));
const view = new AppView(root, driver);
view.render();

driver
  .start()
  .then(() => view.render())
  .catch((err) => {
    driver.phase = "error";
    driver.lastError = (err as Error).message;
    view.render();
  });

let last = performance.now();
function loop(now: number): void {
  view.frame((now - last) / 1000);
  last = now;
  requestAnimationFrame(loop);
}
requestAnimationFrame(loop);
