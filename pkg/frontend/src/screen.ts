/** Draws the interactive area from declarative screen state.
 *
 * The stream carries screen state, not pixels; the console synthesizes the
 * device screen locally. Rendering goes through a small drawing surface so
 * tests can assert on the command list and the browser build can wrap a
 * CanvasRenderingContext2D.
 */

import { SCREEN_H, SCREEN_W, ScreenState } from "./protocol.js";

export interface DrawSurface {
  clear(color: string): void;
  rect(x: number, y: number, w: number, h: number, color: string): void;
  text(x: number, y: number, s: string, color: string): void;
}

const TOOLBAR_H = 24;

export function renderScreen(surface: DrawSurface, screen: ScreenState): void {
  if (!screen.screen_on) {
    surface.clear("#000");
    return;
  }
  surface.clear("#1c1c28");
  surface.rect(0, 0, SCREEN_W, TOOLBAR_H, "#2a2a3a");
  surface.text(8, 16, screen.app ?? "home", "#e8e8f0");
  if (screen.loading) {
    surface.rect(0, TOOLBAR_H, SCREEN_W, 2, "#ffaa00");
  }
  if (screen.app !== null) {
    const bodyY = TOOLBAR_H + 4 - (screen.scroll % 100);
    surface.text(8, bodyY + 20, `page ${screen.page}`, "#b0b0c0");
    if (screen.video_frame > 0) {
      surface.rect(20, 120, SCREEN_W - 40, 200, "#10202f");
      surface.text(28, 140, `frame ${screen.video_frame}`, "#70c0ff");
    }
  }
  if (screen.overlay > 0) {
    surface.rect(SCREEN_W / 2 - 12, SCREEN_H / 2 - 12, 24, 24, "#ffffff40");
  }
}

export class RecordingSurface implements DrawSurface {
  ops: string[] = [];

  clear(color: string): void {
    this.ops = [`clear ${color}`];
  }

  rect(x: number, y: number, w: number, h: number, color: string): void {
    this.ops.push(`rect ${x},${y} ${w}x${h} ${color}`);
  }

  text(x: number, y: number, s: string, color: string): void {
    this.ops.push(`text ${x},${y} "${s}" ${color}`);
  }
}
