import { describe, expect, it } from "vitest";

import {
  laneLayout,
  linePath,
  presenceWindows,
  seriesBounds,
  thresholdY,
} from "../src/charts.js";
import { PlaybackClock } from "../src/playback.js";
import { signal } from "./fakes.js";

describe("seriesBounds", () => {
  it("pads the min/max span", () => {
    const b = seriesBounds([[0, 10]], 0.1);
    expect(b.min).toBeCloseTo(-1);
    expect(b.max).toBeCloseTo(11);
  });

  it("handles constant series", () => {
    const b = seriesBounds([[2, 2, 2]]);
    expect(b.min).toBeLessThan(2);
    expect(b.max).toBeGreaterThan(2);
  });
});

describe("linePath", () => {
  it("spans the box corners for a linear ramp", () => {
    const path = linePath([0, 1], { min: 0, max: 1 }, 100, 50);
    expect(path).toBe("M0.00 50.00 L100.00 0.00");
  });

  it("emits one segment per sample", () => {
    const path = linePath([1, 2, 3, 4], { min: 0, max: 5 }, 90, 30);
    expect(path.split("L")).toHaveLength(4);
  });
});

describe("thresholdY", () => {
  it("maps values inside the bounds", () => {
    expect(thresholdY(0, { min: -1, max: 1 }, 100)).toBe(50);
  });

  it("returns null outside", () => {
    expect(thresholdY(9, { min: -1, max: 1 }, 100)).toBeNull();
  });
});

describe("laneLayout", () => {
  it("stop scenario: decreasing distance drives the car rightwards", () => {
    // remaining distance 45 -> 2; stop line at x_stop = 1
    const lane = laneLayout([signal("a", [45, 20, 2])], { x_stop: 1 });
    expect(lane.markerLabel).toBe("stop line");
    expect(lane.carFraction(45)).toBe(0);
    expect(lane.carFraction(20)).toBeGreaterThan(0);
    expect(lane.carFraction(2)).toBeGreaterThan(lane.carFraction(20));
    // the car never reaches the marker while still before the line
    expect(lane.carFraction(2)).toBeLessThan(lane.markerFraction);
    expect(lane.carFraction(1)).toBeCloseTo(lane.markerFraction);
  });

  it("pedestrian scenario: increasing position, crosswalk marker", () => {
    const lane = laneLayout([signal("a", [0, 10, 30])], { x_cross: 35 });
    expect(lane.markerLabel).toBe("crosswalk");
    expect(lane.carFraction(0)).toBe(0);
    expect(lane.carFraction(30)).toBeLessThan(lane.markerFraction);
    expect(lane.carFraction(35)).toBeCloseTo(lane.markerFraction);
  });

  it("identical trajectories produce identical fractions", () => {
    const a = laneLayout([signal("a", [5, 3, 2])], { x_stop: 1 });
    const b = laneLayout([signal("b", [5, 3, 2])], { x_stop: 1 });
    for (const x of [5, 3, 2]) {
      expect(a.carFraction(x)).toBe(b.carFraction(x));
    }
  });
});

describe("presenceWindows", () => {
  it("finds contiguous runs", () => {
    expect(presenceWindows([false, true, true, false, true])).toEqual([
      [1, 3],
      [4, 5],
    ]);
  });

  it("handles empty and trailing runs", () => {
    expect(presenceWindows([])).toEqual([]);
    expect(presenceWindows([true, true])).toEqual([[0, 2]]);
  });
});

describe("PlaybackClock", () => {
  it("drives both panels off one time", () => {
    const clock = new PlaybackClock(2.0, 1.0);
    clock.tick(0.5);
    expect(clock.index(0.1, 60)).toBe(5);
    expect(clock.index(0.2, 60)).toBe(2); // coarser series, same instant
  });

  it("stops at the end and restarts", () => {
    const clock = new PlaybackClock(1.0, 1.0);
    clock.tick(5);
    expect(clock.t).toBe(1.0);
    expect(clock.playing).toBe(false);
    clock.restart();
    expect(clock.t).toBe(0);
    expect(clock.playing).toBe(true);
  });

  it("clamps the sample index to the series end", () => {
    const clock = new PlaybackClock(10, 1);
    clock.tick(10);
    expect(clock.index(0.1, 60)).toBe(59);
  });
});
