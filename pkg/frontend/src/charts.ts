// Pure geometry for the SVG charts and the lane animation.
//
// Charts are simple polylines over sample index * dt; the lane maps a
// trajectory's position channel onto a horizontal 0..1 fraction with
// the stop line / crosswalk as a fixed marker.  The stop scenario
// measures x as the *remaining* distance (decreasing), the pedestrian
// scenario as the forward position (increasing); `laneLayout` folds
// both into "car drives left to right, marker near the right edge".

import type { Markers, SignalPayload } from "./types.js";

export interface Bounds {
  min: number;
  max: number;
}

export function seriesBounds(series: number[][], pad = 0.05): Bounds {
  let min = Infinity;
  let max = -Infinity;
  for (const s of series) {
    for (const v of s) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (!isFinite(min)) return { min: 0, max: 1 };
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

/** SVG path ("M x y L x y ...") for a series inside a width x height box. */
export function linePath(
  values: number[],
  bounds: Bounds,
  width: number,
  height: number,
): string {
  const n = values.length;
  const sx = n > 1 ? width / (n - 1) : 0;
  const span = bounds.max - bounds.min;
  const parts: string[] = [];
  for (let i = 0; i < n; i++) {
    const x = i * sx;
    const y = height - ((values[i] - bounds.min) / span) * height;
    parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)} ${y.toFixed(2)}`);
  }
  return parts.join(" ");
}

/** Vertical pixel of a horizontal threshold line, or null if outside. */
export function thresholdY(
  value: number,
  bounds: Bounds,
  height: number,
): number | null {
  if (value < bounds.min || value > bounds.max) return null;
  return height - ((value - bounds.min) / (bounds.max - bounds.min)) * height;
}

export interface LaneLayout {
  /** 0..1 horizontal fraction of the rule marker (stop line / crosswalk). */
  markerFraction: number;
  /** Car's 0..1 fraction at sample i. */
  carFraction(xValue: number): number;
  markerLabel: string;
}

export function laneLayout(signals: SignalPayload[], markers: Markers): LaneLayout {
  const xs = signals.flatMap((s) => s.x);
  const lo = Math.min(...xs);
  const hi = Math.max(...xs);
  if (markers.x_stop !== undefined) {
    // remaining distance: hi (far away) maps to the left edge, the stop
    // line sits at x_stop; leave room to show overshoot past the line
    const start = hi;
    const end = Math.min(lo, markers.x_stop - 2);
    const span = start - end || 1;
    const marker = (start - markers.x_stop) / span;
    return {
      markerFraction: clamp01(marker),
      carFraction: (x) => clamp01((start - x) / span),
      markerLabel: "stop line",
    };
  }
  const cross = markers.x_cross ?? hi;
  const start = lo;
  const end = Math.max(hi, cross + 2);
  const span = end - start || 1;
  return {
    markerFraction: clamp01((cross - start) / span),
    carFraction: (x) => clamp01((x - start) / span),
    markerLabel: "crosswalk",
  };
}

function clamp01(v: number): number {
  return Math.max(0, Math.min(1, v));
}

/** Contiguous true-runs of a boolean series, as [startIndex, endIndex). */
export function presenceWindows(p: boolean[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  let start: number | null = null;
  for (let i = 0; i < p.length; i++) {
    if (p[i] && start === null) start = i;
    if (!p[i] && start !== null) {
      out.push([start, i]);
      start = null;
    }
  }
  if (start !== null) out.push([start, p.length]);
  return out;
}
