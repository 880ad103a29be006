/** Wire types for the session stream (ws://host:6081/session/{id}). */

export const SCREEN_W = 360;
export const SCREEN_H = 640;
export const FRAME_RATE = 30;
export const FRAME_PERIOD_S = 1 / FRAME_RATE;

export interface ScreenState {
  device: string;
  screen_on: boolean;
  app: string | null;
  page: number;
  scroll: number;
  loading: boolean;
  video_frame: number;
  overlay: number;
}

export interface FrameMsg {
  type: "FRAME";
  seq: number;
  t: number;
  digest: string;
  dirty: boolean;
  screen: ScreenState;
  ma: number;
}

export interface AckMsg {
  type: "ACK";
  id: number;
  ack?: boolean;
  t_server?: number;
  result?: unknown;
}

export interface ErrorMsg {
  type: "ERROR";
  id?: number | null;
  code: string;
  detail?: string;
}

export type ServerMsg = FrameMsg | AckMsg | ErrorMsg;

export interface InputMsg {
  type: "INPUT";
  id: number;
  kind: "tap" | "scroll" | "key";
  x: number;
  y: number;
  code?: string;
}

export interface ToolbarMsg {
  type: "TOOLBAR";
  id: number;
  action: ToolbarAction;
  args?: Record<string, unknown>;
}

export type ClientMsg = InputMsg | ToolbarMsg;

export const TOOLBAR_ACTIONS = [
  "list_devices",
  "device_mirroring",
  "power_monitor",
  "set_voltage",
  "start_monitor",
  "stop_monitor",
  "batt_switch",
] as const;

export type ToolbarAction = (typeof TOOLBAR_ACTIONS)[number];

export function parseServerMsg(raw: string): ServerMsg {
  const msg = JSON.parse(raw) as ServerMsg;
  if (msg.type !== "FRAME" && msg.type !== "ACK" && msg.type !== "ERROR") {
    throw new Error(`unknown message type ${(msg as { type: string }).type}`);
  }
  return msg;
}
