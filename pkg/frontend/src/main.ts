/** Browser entry point: binds the console model to the DOM and a WebSocket. */

import { ConsoleView } from "./console.js";
import { SCREEN_H, SCREEN_W, ToolbarAction } from "./protocol.js";
import { DrawSurface } from "./screen.js";
import { SocketLike } from "./transport.js";

function wrapWebSocket(ws: WebSocket): SocketLike {
  const wrapper: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onmessage: null,
    onclose: null,
    onopen: null,
  };
  ws.onmessage = (ev) => wrapper.onmessage?.({ data: String(ev.data) });
  ws.onclose = () => wrapper.onclose?.();
  ws.onopen = () => wrapper.onopen?.();
  return wrapper;
}

function canvasSurface(ctx: CanvasRenderingContext2D): DrawSurface {
  return {
    clear(color) {
      ctx.fillStyle = color;
      ctx.fillRect(0, 0, SCREEN_W, SCREEN_H);
    },
    rect(x, y, w, h, color) {
      ctx.fillStyle = color;
      ctx.fillRect(x, y, w, h);
    },
    text(x, y, s, color) {
      ctx.fillStyle = color;
      ctx.font = "12px monospace";
      ctx.fillText(s, x, y);
    },
  };
}

export function mount(root: HTMLElement, sessionId: string): ConsoleView {
  const canvas = document.createElement("canvas");
  canvas.width = SCREEN_W;
  canvas.height = SCREEN_H;
  root.appendChild(canvas);
  const strip = document.createElement("div");
  strip.className = "status-strip";
  root.appendChild(strip);
  const bar = document.createElement("div");
  bar.className = "toolbar";
  root.appendChild(bar);

  const view = new ConsoleView(
    (resumeFrom) => {
      const cursor = resumeFrom === null ? "" : `?resume=${resumeFrom}`;
      return wrapWebSocket(
        new WebSocket(
          `ws://${location.hostname}:6081/session/${sessionId}${cursor}`,
        ),
      );
    },
    { sessionId },
  );

  for (const action of view.toolbarButtons) {
    const button = document.createElement("button");
    button.textContent = action;
    button.onclick = () => {
      void view.toolbar(action as ToolbarAction, promptArgs(action)).catch(() => {
        // error code already rendered on the status strip
      });
    };
    bar.appendChild(button);
  }

  canvas.onclick = (ev) => {
    if (!view.inputEnabled) {
      return;
    }
    const bounds = canvas.getBoundingClientRect();
    void view.tap(
      Math.floor(ev.clientX - bounds.left),
      Math.floor(ev.clientY - bounds.top),
    );
  };

  const ctx = canvas.getContext("2d");
  const surface = ctx === null ? null : canvasSurface(ctx);
  const repaint = () => {
    if (surface !== null) {
      view.paint(surface);
    }
    view.chart.drain();
    const s = view.status;
    strip.textContent = [
      `session ${s.session}`,
      s.connected ? "live" : "disconnected",
      `relay ${s.relaySource}`,
      s.meterOn ? "meter on" : "meter off",
      s.voltage === null ? "" : `${s.voltage.toFixed(1)} V`,
      `latency ${view.latency.label}`,
      s.banner ?? s.lastError ?? "",
    ]
      .filter((part) => part !== "")
      .join(" | ");
    requestAnimationFrame(repaint);
  };

  view.connect();
  requestAnimationFrame(repaint);
  return view;
}

function promptArgs(action: string): Record<string, unknown> {
  switch (action) {
    case "set_voltage":
      return { voltage: Number(window.prompt("voltage (V)", "4.0") ?? "4.0") };
    case "device_mirroring":
    case "start_monitor":
    case "batt_switch": {
      const device = window.prompt("device id", "") ?? "";
      return action === "start_monitor"
        ? { device_id: device, duration: 30.0 }
        : { device_id: device };
    }
    default:
      return {};
  }
}
