// DOM rendering: header with progress, the side-by-side pair panels
// (lane animation above position/speed charts), choice and replay
// controls, the retry banner for failed submissions, the malformed-
// payload error card, and the completion screen with the export link.

import { PayloadError } from "./api.js";
import {
  laneLayout,
  LaneLayout,
  linePath,
  presenceWindows,
  seriesBounds,
  thresholdY,
} from "./charts.js";
import { PlaybackClock } from "./playback.js";
import { SessionDriver } from "./session.js";
import type { PairPayload, Side, SignalPayload } from "./types.js";

const SVG = "http://www.w3.org/2000/svg";
const CHART_W = 320;
const CHART_H = 96;
const LANE_H = 70;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

interface PanelRefs {
  car: SVGElement;
  cursors: SVGElement[];
  speedLabel: HTMLElement;
  lane: LaneLayout;
  signal: SignalPayload;
}

export class AppView {
  clock: PlaybackClock | null = null;
  private panels: PanelRefs[] = [];
  private busy = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly driver: SessionDriver,
  ) {}

  render(): void {
    this.root.textContent = "";
    this.panels = [];
    this.root.appendChild(this.header());
    const d = this.driver;
    if (d.phase === "loading") {
      this.root.appendChild(el("p", "status", "Loading session..."));
      return;
    }
    if (d.phase === "complete") {
      this.root.appendChild(this.completionCard());
      return;
    }
    if (d.phase === "error" || !d.pair) {
      this.root.appendChild(
        this.errorCard(d.lastError ?? "The session is in an inconsistent state."),
      );
      return;
    }
    try {
      this.root.appendChild(this.pairView(d.pair));
    } catch (err) {
      if (err instanceof PayloadError) {
        this.root.appendChild(this.errorCard(`Cannot display this pair: ${err.message}`));
        return;
      }
      throw err;
    }
    if (d.pending) {
      this.root.appendChild(this.retryBanner());
    }
  }

  /** Advance the shared clock and move both cars; call once per frame. */
  frame(wallDelta: number): void {
    if (!this.clock || this.panels.length === 0) return;
    this.clock.tick(wallDelta);
    for (const panel of this.panels) {
      const { signal, lane } = panel;
      const i = this.clock.index(signal.dt, signal.x.length);
      const fraction = lane.carFraction(signal.x[i]);
      panel.car.setAttribute("cx", String(12 + fraction * (CHART_W - 24)));
      const cursorX = (i / Math.max(signal.x.length - 1, 1)) * CHART_W;
      for (const cursor of panel.cursors) {
        cursor.setAttribute("x1", String(cursorX));
        cursor.setAttribute("x2", String(cursorX));
      }
      panel.speedLabel.textContent = `t=${(i * signal.dt).toFixed(1)}s  v=${signal.v[i].toFixed(1)} m/s`;
    }
  }

  private header(): HTMLElement {
    const info = this.driver.info;
    const head = el("header", "header");
    head.appendChild(el("h1", "", "Which behavior do you prefer?"));
    if (info) {
      const scenario = info.scenario ? ` - ${info.scenario} scenario` : "";
      head.appendChild(
        el("p", "progress-text", `${info.answered} of ${info.total} answered${scenario}`),
      );
      const bar = el("div", "progress-bar");
      const fill = el("div", "progress-fill");
      fill.style.width = `${(100 * info.answered) / Math.max(info.total, 1)}%`;
      bar.appendChild(fill);
      head.appendChild(bar);
    }
    return head;
  }

  private pairView(pair: PairPayload): HTMLElement {
    const container = el("section", "pair");
    const lane = laneLayout([pair.left, pair.right], pair.markers);
    this.clock = new PlaybackClock(
      (pair.left.x.length - 1) * pair.left.dt,
      2.0,
    );
    const sides = el("div", "panels");
    for (const side of ["left", "right"] as Side[]) {
      sides.appendChild(this.panel(pair, side, lane));
    }
    container.appendChild(sides);

    const controls = el("div", "controls");
    const replay = el("button", "replay", "Replay");
    replay.addEventListener("click", () => this.clock?.restart());
    controls.appendChild(replay);
    container.appendChild(controls);
    return container;
  }

  private panel(pair: PairPayload, side: Side, lane: LaneLayout): HTMLElement {
    const signal = pair[side];
    const panel = el("div", `panel panel-${side}`);
    panel.appendChild(el("h2", "", side === "left" ? "Left" : "Right"));

    const laneSvg = svgEl("svg", {
      viewBox: `0 0 ${CHART_W} ${LANE_H}`,
      class: "lane",
    });
    laneSvg.appendChild(
      svgEl("line", { x1: 0, y1: LANE_H / 2, x2: CHART_W, y2: LANE_H / 2, class: "road" }),
    );
    const markerX = 12 + lane.markerFraction * (CHART_W - 24);
    laneSvg.appendChild(
      svgEl("line", {
        x1: markerX, y1: 8, x2: markerX, y2: LANE_H - 8, class: "marker",
      }),
    );
    const label = svgEl("text", { x: markerX + 4, y: 16, class: "marker-label" });
    label.textContent = lane.markerLabel;
    laneSvg.appendChild(label);
    const car = svgEl("circle", {
      cx: 12, cy: LANE_H / 2, r: 7, class: "car",
    });
    laneSvg.appendChild(car);
    panel.appendChild(laneSvg);

    const speedLabel = el("div", "speed-label", "t=0.0s");
    panel.appendChild(speedLabel);

    const cursors: SVGElement[] = [];
    panel.appendChild(
      this.chart("position x(t)", signal, signal.x, cursors, pair, "x"),
    );
    panel.appendChild(
      this.chart("speed v(t)", signal, signal.v, cursors, pair, "v"),
    );

    const pick = el("button", "choose", `Prefer ${side}`);
    pick.addEventListener("click", () => void this.submit(side));
    panel.appendChild(pick);
    this.panels.push({ car, cursors, speedLabel, lane, signal });
    return panel;
  }

  private chart(
    title: string,
    signal: SignalPayload,
    values: number[],
    cursors: SVGElement[],
    pair: PairPayload,
    kind: "x" | "v",
  ): HTMLElement {
    const wrap = el("div", "chart");
    wrap.appendChild(el("h3", "", title));
    const bounds =
      kind === "x"
        ? seriesBounds([pair.left.x, pair.right.x, markerLevels(pair, "x")])
        : seriesBounds([pair.left.v, pair.right.v, markerLevels(pair, "v")]);
    const svg = svgEl("svg", { viewBox: `0 0 ${CHART_W} ${CHART_H}`, class: "plot" });

    if (kind === "x" && signal.p) {
      // shade the steps where the pedestrian is on the crossing
      for (const [a, b] of presenceWindows(signal.p)) {
        const x0 = (a / Math.max(values.length - 1, 1)) * CHART_W;
        const x1 = (b / Math.max(values.length - 1, 1)) * CHART_W;
        svg.appendChild(
          svgEl("rect", {
            x: x0, y: 0, width: Math.max(x1 - x0, 1), height: CHART_H,
            class: "presence",
          }),
        );
      }
    }
    for (const level of markerLevels(pair, kind)) {
      const y = thresholdY(level, bounds, CHART_H);
      if (y !== null) {
        svg.appendChild(
          svgEl("line", { x1: 0, y1: y, x2: CHART_W, y2: y, class: "threshold" }),
        );
      }
    }
    svg.appendChild(
      svgEl("path", { d: linePath(values, bounds, CHART_W, CHART_H), class: "series" }),
    );
    const cursor = svgEl("line", { x1: 0, y1: 0, x2: 0, y2: CHART_H, class: "cursor" });
    svg.appendChild(cursor);
    cursors.push(cursor);
    wrap.appendChild(svg);
    return wrap;
  }

  private retryBanner(): HTMLElement {
    const banner = el("div", "banner error-banner");
    banner.appendChild(
      el("span", "", `Could not reach the service (${this.driver.lastError}). ` +
        "Your choice is saved locally."),
    );
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => void this.retrySubmit());
    banner.appendChild(retry);
    return banner;
  }

  private errorCard(message: string): HTMLElement {
    const card = el("div", "card error-card");
    card.appendChild(el("h2", "", "Something went wrong"));
    card.appendChild(el("p", "", message));
    return card;
  }

  private completionCard(): HTMLElement {
    const info = this.driver.info;
    const card = el("div", "card done-card");
    card.appendChild(el("h2", "", "All done - thank you!"));
    card.appendChild(
      el("p", "", `You answered all ${info ? info.total : ""} comparisons.`),
    );
    const link = el("a", "export-link", "Download your preferences");
    link.setAttribute("href", "/api/export");
    link.setAttribute("download", "preferences.json");
    card.appendChild(link);
    return card;
  }

  private async submit(side: Side): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await this.driver.choose(side);
    } finally {
      this.busy = false;
    }
    this.render();
  }

  private async retrySubmit(): Promise<void> {
    await this.driver.retry();
    this.render();
  }
}

function markerLevels(pair: PairPayload, kind: "x" | "v"): number[] {
  const m = pair.markers;
  if (kind === "x") {
    return [m.x_stop, m.x_cross].filter((v): v is number => v !== undefined);
  }
  return [m.v_lim, 0].filter((v): v is number => v !== undefined);
}
