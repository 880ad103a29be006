/** Session socket: frame subscription, request/ack matching, gap recovery.
 *
 * Frames are delivered to the frame handler strictly in seq order. A missed
 * seq means the server dropped this client's queue; the only safe recovery
 * is to tear the socket down and resubscribe, never to paint out of order.
 */

import {
  AckMsg,
  ErrorMsg,
  FrameMsg,
  InputMsg,
  parseServerMsg,
  ToolbarMsg,
} from "./protocol.js";

export type ClientMsgBody = Omit<InputMsg, "id"> | Omit<ToolbarMsg, "id">;

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export type SocketFactory = (resumeFrom: number | null) => SocketLike;

export interface TransportEvents {
  onFrame?: (frame: FrameMsg) => void;
  onError?: (err: ErrorMsg) => void;
  onClose?: () => void;
  onResubscribe?: (lastSeq: number | null) => void;
}

interface Pending {
  resolve: (msg: AckMsg) => void;
  reject: (err: ErrorMsg) => void;
}

export class SessionSocket {
  private sock: SocketLike | null = null;
  private nextId = 1;
  private pending = new Map<number, Pending>();
  private lastSeq: number | null = null;
  private fresh = true;
  private closed = false;

  constructor(
    private factory: SocketFactory,
    private events: TransportEvents = {},
  ) {}

  connect(): void {
    this.sock = this.factory(this.lastSeq);
    this.sock.onmessage = (ev) => this.dispatch(ev.data);
    this.sock.onclose = () => {
      if (!this.closed) {
        this.closed = true;
        this.failPending({ type: "ERROR", code: "SessionClosed" });
        this.events.onClose?.();
      }
    };
  }

  close(): void {
    this.closed = true;
    this.sock?.close();
  }

  get isOpen(): boolean {
    return !this.closed;
  }

  /** Send an INPUT or TOOLBAR message; resolves with the matching ACK. */
  request(msg: ClientMsgBody): Promise<AckMsg> {
    if (this.closed || this.sock === null) {
      return Promise.reject<AckMsg>({ type: "ERROR", code: "SessionClosed" });
    }
    const id = this.nextId++;
    const promise = new Promise<AckMsg>((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
    });
    this.sock.send(JSON.stringify({ ...msg, id }));
    return promise;
  }

  private dispatch(raw: string): void {
    const msg = parseServerMsg(raw);
    if (msg.type === "FRAME") {
      this.onFrame(msg);
      return;
    }
    const pending = msg.id != null ? this.pending.get(msg.id) : undefined;
    if (pending !== undefined) {
      this.pending.delete(msg.id as number);
      if (msg.type === "ACK") {
        pending.resolve(msg);
      } else {
        pending.reject(msg);
      }
      return;
    }
    if (msg.type === "ERROR") {
      this.events.onError?.(msg);
      if (msg.code === "SessionClosed" || msg.code === "AuthFailed") {
        this.closed = true;
        this.failPending(msg);
        this.events.onClose?.();
      }
    }
  }

  private onFrame(frame: FrameMsg): void {
    if (this.lastSeq !== null && frame.seq <= this.lastSeq) {
      return; // stale duplicate, never repaint backwards
    }
    if (!this.fresh && this.lastSeq !== null && frame.seq > this.lastSeq + 1) {
      this.resubscribe();
      return;
    }
    this.fresh = false;
    this.lastSeq = frame.seq;
    this.events.onFrame?.(frame);
  }

  private resubscribe(): void {
    const sock = this.sock;
    this.sock = null;
    if (sock !== null) {
      sock.onclose = null;
      sock.close();
    }
    this.events.onResubscribe?.(this.lastSeq);
    // The server numbers frames per session, so the first frame after a
    // fresh subscription may legitimately jump ahead of the cursor.
    this.fresh = true;
    this.connect();
  }

  private failPending(err: ErrorMsg): void {
    for (const p of this.pending.values()) {
      p.reject(err);
    }
    this.pending.clear();
  }
}
