import { describe, expect, it } from "vitest";

import { FrameMsg } from "../src/protocol.js";
import { SessionSocket } from "../src/transport.js";
import { FakeSessionServer, FakeSocket } from "./fakes.js";

function frameMsg(seq: number, t = seq / 30): FrameMsg {
  return {
    type: "FRAME",
    seq,
    t,
    digest: `d${seq}`,
    dirty: false,
    screen: {
      device: "j7duo",
      screen_on: true,
      app: null,
      page: 0,
      scroll: 0,
      loading: false,
      video_frame: 0,
      overlay: 0,
    },
    ma: 120,
  };
}

describe("SessionSocket", () => {
  it("delivers frames in seq order and drops stale duplicates", () => {
    const sock = new FakeSocket(null);
    const seen: number[] = [];
    const transport = new SessionSocket(() => sock, {
      onFrame: (f) => seen.push(f.seq),
    });
    transport.connect();
    sock.deliver(frameMsg(1));
    sock.deliver(frameMsg(2));
    sock.deliver(frameMsg(2));
    sock.deliver(frameMsg(1));
    sock.deliver(frameMsg(3));
    expect(seen).toEqual([1, 2, 3]);
  });

  it("resubscribes on a seq gap instead of painting out of order", () => {
    const sockets: FakeSocket[] = [];
    const resumes: Array<number | null> = [];
    const seen: number[] = [];
    const transport = new SessionSocket(
      (resumeFrom) => {
        resumes.push(resumeFrom);
        const sock = new FakeSocket(null);
        sockets.push(sock);
        return sock;
      },
      {
        onFrame: (f) => seen.push(f.seq),
        onResubscribe: () => {},
      },
    );
    transport.connect();
    sockets[0]!.deliver(frameMsg(1));
    sockets[0]!.deliver(frameMsg(2));
    sockets[0]!.deliver(frameMsg(5)); // gap: 3 and 4 lost server-side
    expect(sockets.length).toBe(2);
    expect(sockets[0]!.closedByClient).toBe(true);
    expect(resumes).toEqual([null, 2]); // resume cursor carries the last seq
    sockets[1]!.deliver(frameMsg(6));
    sockets[1]!.deliver(frameMsg(7));
    expect(seen).toEqual([1, 2, 6, 7]);
    for (let i = 1; i < seen.length; i++) {
      expect(seen[i]!).toBeGreaterThan(seen[i - 1]!);
    }
  });

  it("matches acks to requests by id", async () => {
    const server = new FakeSessionServer();
    const transport = new SessionSocket(() => server.connect());
    transport.connect();
    const acks = await Promise.all([
      transport.request({ type: "INPUT", kind: "tap", x: 1, y: 1 }),
      transport.request({ type: "INPUT", kind: "tap", x: 2, y: 2 }),
      transport.request({ type: "TOOLBAR", action: "list_devices" }),
    ]);
    expect(acks.map((a) => a.id)).toEqual([1, 2, 3]);
    expect(acks[2]!.result).toEqual(["j7duo"]);
  });

  it("rejects a request when the server answers with an error", async () => {
    const server = new FakeSessionServer();
    const transport = new SessionSocket(() => server.connect());
    transport.connect();
    await expect(
      transport.request({ type: "INPUT", kind: "tap", x: -5, y: 10 }),
    ).rejects.toMatchObject({ code: "OutOfBounds" });
  });

  it("fails pending requests and reports close when the server drops", async () => {
    const server = new FakeSessionServer();
    let closed = false;
    const transport = new SessionSocket(() => server.connect(), {
      onClose: () => {
        closed = true;
      },
    });
    transport.connect();
    server.closeSession();
    expect(closed).toBe(true);
    expect(transport.isOpen).toBe(false);
    await expect(
      transport.request({ type: "INPUT", kind: "tap", x: 1, y: 1 }),
    ).rejects.toMatchObject({ code: "SessionClosed" });
  });
});
