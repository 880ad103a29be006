/** Rolling current chart buffer, decoupled from the socket reader.
 *
 * The reader pushes raw samples into an unbounded-per-tick intake queue and
 * returns immediately; drain() runs on the animation frame and decimates to
 * at most maxPointsPerSecond kept points, so a fast sample stream can never
 * stall frame handling.
 */

export interface ChartPoint {
  t: number;
  ma: number;
}

export class LiveChart {
  private intake: ChartPoint[] = [];
  private kept: ChartPoint[] = [];
  private lastKeptT = -Infinity;
  readonly minSpacingS: number;

  constructor(
    public maxPointsPerSecond = 60,
    public windowS = 60,
  ) {
    this.minSpacingS = 1 / maxPointsPerSecond;
  }

  /** Called from the socket reader; must stay O(1). */
  push(t: number, ma: number): void {
    this.intake.push({ t, ma });
  }

  /** Called on the render tick; folds the intake into the decimated window. */
  drain(): ChartPoint[] {
    for (const p of this.intake) {
      if (p.t - this.lastKeptT >= this.minSpacingS - 1e-9) {
        this.kept.push(p);
        this.lastKeptT = p.t;
      }
    }
    this.intake.length = 0;
    const horizon = this.lastKeptT - this.windowS;
    while (this.kept.length > 0 && (this.kept[0] as ChartPoint).t < horizon) {
      this.kept.shift();
    }
    return this.kept;
  }

  get points(): readonly ChartPoint[] {
    return this.kept;
  }

  clear(): void {
    this.intake.length = 0;
    this.kept.length = 0;
    this.lastKeptT = -Infinity;
  }
}
