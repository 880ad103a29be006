import { describe, expect, it } from "vitest";

import { ScreenState } from "../src/protocol.js";
import { RecordingSurface, renderScreen } from "../src/screen.js";

function screen(patch: Partial<ScreenState> = {}): ScreenState {
  return {
    device: "j7duo",
    screen_on: true,
    app: null,
    page: 0,
    scroll: 0,
    loading: false,
    video_frame: 0,
    overlay: 0,
    ...patch,
  };
}

describe("renderScreen", () => {
  it("paints black when the screen is off", () => {
    const surface = new RecordingSurface();
    renderScreen(surface, screen({ screen_on: false }));
    expect(surface.ops).toEqual(["clear #000"]);
  });

  it("shows the app name in the top bar", () => {
    const surface = new RecordingSurface();
    renderScreen(surface, screen({ app: "brave" }));
    expect(surface.ops.some((op) => op.includes('"brave"'))).toBe(true);
  });

  it("draws a video region only while video frames advance", () => {
    const still = new RecordingSurface();
    renderScreen(still, screen({ app: "videoplayer" }));
    expect(still.ops.some((op) => op.includes("frame "))).toBe(false);

    const playing = new RecordingSurface();
    renderScreen(playing, screen({ app: "videoplayer", video_frame: 12 }));
    expect(playing.ops.some((op) => op.includes('"frame 12"'))).toBe(true);
  });

  it("is a pure function of the screen state", () => {
    const a = new RecordingSurface();
    const b = new RecordingSurface();
    const state = screen({ app: "chrome", page: 3, scroll: 250, loading: true });
    renderScreen(a, state);
    renderScreen(b, { ...state });
    expect(a.ops).toEqual(b.ops);
  });

  it("differs when the state differs", () => {
    const a = new RecordingSurface();
    const b = new RecordingSurface();
    renderScreen(a, screen({ app: "chrome", page: 1 }));
    renderScreen(b, screen({ app: "chrome", page: 2 }));
    expect(a.ops).not.toEqual(b.ops);
  });
});
