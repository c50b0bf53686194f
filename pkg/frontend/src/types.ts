// Payload shapes of the elicitation service's JSON API.

export type Side = "left" | "right";

export interface Markers {
  scenario?: string;
  x_stop?: number;
  x_cross?: number;
  v_lim?: number;
}

export interface SessionInfo {
  id: string;
  scenario: string;
  total: number;
  answered: number;
  progress: number;
  markers: Markers;
}

export interface SignalPayload {
  id: string;
  dt: number;
  length: number;
  x: number[];
  v: number[];
  p?: boolean[]; // pedestrian presence, when the scenario has one
  [channel: string]: unknown;
}

export interface PairPayload {
  index: number;
  total: number;
  left: SignalPayload;
  right: SignalPayload;
  answered: Side | null;
  markers: Markers;
}

export interface PreferenceExport {
  format: string;
  version: number;
  pairs: { preferred: string; non_preferred: string }[];
  signals_file?: string;
  meta?: Record<string, unknown>;
}
