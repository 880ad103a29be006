/** Per-input round-trip latency: first dirty frame at or after the tap.
 *
 * All times are server-side stream times (ACK t_server, FRAME t), so the
 * overlay measures the injection channel rather than browser jitter.
 */

export interface LatencyEntry {
  inputId: number;
  tInput: number;
  latencyS: number | null;
}

export class LatencyTracker {
  readonly entries: LatencyEntry[] = [];
  private waiting: LatencyEntry[] = [];

  recordInput(inputId: number, tServer: number): void {
    const entry: LatencyEntry = { inputId, tInput: tServer, latencyS: null };
    this.entries.push(entry);
    this.waiting.push(entry);
  }

  onFrame(tFrame: number, dirty: boolean): void {
    if (!dirty || this.waiting.length === 0) {
      return;
    }
    const matched = this.waiting.filter((e) => tFrame >= e.tInput);
    for (const entry of matched) {
      entry.latencyS = tFrame - entry.tInput;
    }
    this.waiting = this.waiting.filter((e) => e.latencyS === null);
  }

  get latest(): LatencyEntry | null {
    return this.entries.length > 0
      ? (this.entries[this.entries.length - 1] as LatencyEntry)
      : null;
  }

  /** Overlay label for the status strip, e.g. "1.44 s". */
  get label(): string {
    const last = [...this.entries].reverse().find((e) => e.latencyS !== null);
    return last ? `${(last.latencyS as number).toFixed(2)} s` : "--";
  }
}
