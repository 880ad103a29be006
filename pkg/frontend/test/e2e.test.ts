/** End-to-end console flow against the protocol-faithful fake server:
 * connect, a 10-tap burst, toolbar start/stop monitor, latency overlay,
 * and the mirroring step on the live chart.
 */

import { describe, expect, it } from "vitest";

import { ConsoleView } from "../src/console.js";
import { FRAME_PERIOD_S } from "../src/protocol.js";
import { FakeSessionServer } from "./fakes.js";

function makeView(server: FakeSessionServer): ConsoleView {
  const view = new ConsoleView(() => server.connect(), { sessionId: "live1" });
  view.connect();
  return view;
}

describe("console e2e", () => {
  it("renders frames strictly in order across the whole flow", async () => {
    const server = new FakeSessionServer();
    const view = makeView(server);
    server.run(1.0);
    await view.tap(100, 100);
    server.run(1.0);
    await view.toolbar("power_monitor");
    await view.toolbar("start_monitor", { device_id: "j7duo", duration: 5 });
    server.run(1.0);
    await view.toolbar("stop_monitor");
    server.run(0.5);
    const seqs = view.renderedSeqs;
    expect(seqs.length).toBeGreaterThanOrEqual(100);
    for (let i = 1; i < seqs.length; i++) {
      expect(seqs[i]!).toBe(seqs[i - 1]! + 1);
    }
  });

  it("sends a 10-tap burst with acks matched by id", async () => {
    const server = new FakeSessionServer();
    const view = makeView(server);
    server.tick();
    const acks = await Promise.all(
      Array.from({ length: 10 }, (_, i) => view.tap(10 + i, 20 + i)),
    );
    expect(server.receivedInputs.length).toBe(10);
    const ids = acks.map((a) => a!.id);
    expect(new Set(ids).size).toBe(10);
    expect(ids).toEqual([...ids].sort((a, b) => a - b));
  });

  it("shows input latency within one frame period of the channel delay", async () => {
    const server = new FakeSessionServer();
    server.inputDelayS = 0.5;
    const view = makeView(server);
    server.run(1.0); // settle: first frames, overlay quiet
    for (let probe = 0; probe < 5; probe++) {
      await view.tap(180, 320);
      server.run(1.0);
    }
    const measured = view.latency.entries.filter((e) => e.latencyS !== null);
    expect(measured.length).toBe(5);
    for (const entry of measured) {
      expect(entry.latencyS!).toBeGreaterThanOrEqual(server.inputDelayS - 1e-9);
      expect(entry.latencyS!).toBeLessThanOrEqual(
        server.inputDelayS + FRAME_PERIOD_S + 1e-9,
      );
    }
    expect(view.latency.label).toMatch(/^0\.5\d s$/);
  });

  it("chart shows the mirroring current step when device_mirroring toggles", async () => {
    const server = new FakeSessionServer();
    const view = makeView(server);
    await view.toolbar("power_monitor");
    await view.toolbar("start_monitor", { device_id: "j7duo", duration: 10 });
    server.run(1.0);
    const toggleT = server.now;
    await view.toolbar("device_mirroring", { device_id: "j7duo" });
    server.run(1.0);
    await view.toolbar("stop_monitor");

    const points = view.chart.drain();
    const before = points.filter((p) => p.t <= toggleT).map((p) => p.ma);
    const after = points.filter((p) => p.t > toggleT).map((p) => p.ma);
    expect(before.length).toBeGreaterThan(10);
    expect(after.length).toBeGreaterThan(10);
    const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
    expect(mean(after) - mean(before)).toBeCloseTo(server.mirroringStepMa, 5);
  });

  it("stops charting after stop_monitor", async () => {
    const server = new FakeSessionServer();
    const view = makeView(server);
    await view.toolbar("power_monitor");
    await view.toolbar("start_monitor", { device_id: "j7duo", duration: 10 });
    server.run(0.5);
    await view.toolbar("stop_monitor");
    view.chart.drain();
    const frozen = view.chart.points.length;
    server.run(0.5);
    view.chart.drain();
    expect(view.chart.points.length).toBe(frozen);
  });

  it("recovers from a server-side queue drop by resubscribing", async () => {
    const server = new FakeSessionServer();
    const view = makeView(server);
    server.run(0.5);
    server.dropSeqs.add(server.seq + 1); // the next frame never reaches us
    server.run(0.5);
    const seqs = view.renderedSeqs;
    for (let i = 1; i < seqs.length; i++) {
      expect(seqs[i]!).toBeGreaterThan(seqs[i - 1]!);
    }
    expect(seqs[seqs.length - 1]!).toBe(server.seq);
  });
});
