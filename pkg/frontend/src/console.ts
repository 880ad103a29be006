/** Console view model: wires the socket, screen, toolbar, chart and overlay.
 *
 * Framework-free so the whole view is testable headless; the browser entry
 * point binds this model to real DOM elements and a real WebSocket.
 */

import { LiveChart } from "./chart.js";
import { LatencyTracker } from "./latency.js";
import {
  AckMsg,
  ErrorMsg,
  FrameMsg,
  SCREEN_H,
  SCREEN_W,
  ToolbarAction,
  TOOLBAR_ACTIONS,
  ScreenState,
} from "./protocol.js";
import { DrawSurface, renderScreen } from "./screen.js";
import { SessionSocket, SocketFactory } from "./transport.js";

export interface StatusStrip {
  session: string;
  connected: boolean;
  banner: string | null;
  relaySource: "BATTERY" | "VOUT";
  meterOn: boolean;
  monitoring: boolean;
  voltage: number | null;
  lastError: string | null;
}

export interface ConsoleOptions {
  sessionId: string;
  toolbarEnabled?: boolean;
}

export class ConsoleView {
  readonly socket: SessionSocket;
  readonly chart = new LiveChart();
  readonly latency = new LatencyTracker();
  readonly status: StatusStrip;
  readonly toolbarEnabled: boolean;
  renderedSeqs: number[] = [];
  private lastScreen: ScreenState | null = null;

  constructor(factory: SocketFactory, opts: ConsoleOptions) {
    this.toolbarEnabled = opts.toolbarEnabled ?? true;
    this.status = {
      session: opts.sessionId,
      connected: false,
      banner: null,
      relaySource: "BATTERY",
      meterOn: false,
      monitoring: false,
      voltage: null,
      lastError: null,
    };
    this.socket = new SessionSocket(factory, {
      onFrame: (frame) => this.handleFrame(frame),
      onError: (err) => this.handleError(err),
      onClose: () => {
        this.status.connected = false;
        if (this.status.banner === null) {
          this.status.banner = "session closed";
        }
      },
    });
  }

  connect(): void {
    this.socket.connect();
    this.status.connected = true;
  }

  get inputEnabled(): boolean {
    return this.status.connected && this.socket.isOpen;
  }

  /** Toolbar buttons visible to the user; empty when the session hides it. */
  get toolbarButtons(): readonly ToolbarAction[] {
    return this.toolbarEnabled ? TOOLBAR_ACTIONS : [];
  }

  private handleFrame(frame: FrameMsg): void {
    this.renderedSeqs.push(frame.seq);
    this.lastScreen = frame.screen;
    this.latency.onFrame(frame.t, frame.dirty);
    if (this.status.monitoring) {
      this.chart.push(frame.t, frame.ma);
    }
  }

  private handleError(err: ErrorMsg): void {
    this.status.lastError = err.code;
    if (err.code === "AuthFailed" || err.code === "SessionClosed") {
      this.status.banner = err.code;
    }
  }

  paint(surface: DrawSurface): void {
    if (this.lastScreen !== null) {
      renderScreen(surface, this.lastScreen);
    }
  }

  /** Map a pointer gesture into the interactive area; outside taps are
   *  ignored silently and no event is sent. */
  async tap(x: number, y: number): Promise<AckMsg | null> {
    if (!this.inputEnabled) {
      return null;
    }
    if (x < 0 || x >= SCREEN_W || y < 0 || y >= SCREEN_H) {
      return null;
    }
    const ack = await this.socket.request({ type: "INPUT", kind: "tap", x, y });
    if (typeof ack.t_server === "number") {
      this.latency.recordInput(ack.id, ack.t_server);
    }
    return ack;
  }

  async toolbar(
    action: ToolbarAction,
    args: Record<string, unknown> = {},
  ): Promise<unknown> {
    if (!this.toolbarEnabled) {
      return null; // hidden toolbar: no event leaves the client
    }
    try {
      const ack = await this.socket.request({ type: "TOOLBAR", action, args });
      this.applyToolbarResult(action, args, ack);
      this.status.lastError = null;
      return ack.result;
    } catch (err) {
      this.status.lastError = (err as ErrorMsg).code ?? "BadMessage";
      throw err;
    }
  }

  private applyToolbarResult(
    action: ToolbarAction,
    args: Record<string, unknown>,
    ack: AckMsg,
  ): void {
    switch (action) {
      case "set_voltage":
        this.status.voltage = Number(args["voltage"]);
        break;
      case "power_monitor":
        this.status.meterOn = Boolean(
          (ack.result as { powered?: boolean } | undefined)?.powered ??
            !this.status.meterOn,
        );
        break;
      case "batt_switch": {
        const source = (ack.result as { source?: string } | undefined)?.source;
        if (source === "BATTERY" || source === "VOUT") {
          this.status.relaySource = source;
        } else {
          this.status.relaySource =
            this.status.relaySource === "BATTERY" ? "VOUT" : "BATTERY";
        }
        break;
      }
      case "start_monitor":
        this.status.monitoring = true;
        this.chart.clear();
        break;
      case "stop_monitor":
        this.status.monitoring = false;
        break;
    }
  }
}
