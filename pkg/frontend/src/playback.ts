// One clock drives both candidate animations so stopping behavior is
// visually comparable: at every wall-clock instant the two panels show
// the same trajectory time.

export class PlaybackClock {
  t = 0;
  playing = true;

  constructor(
    readonly duration: number,
    readonly speed = 1.0,
  ) {}

  /** Advance by a wall-clock delta (seconds); returns current time. */
  tick(wallDelta: number): number {
    if (this.playing) {
      this.t = Math.min(this.t + wallDelta * this.speed, this.duration);
      if (this.t >= this.duration) this.playing = false;
    }
    return this.t;
  }

  restart(): void {
    this.t = 0;
    this.playing = true;
  }

  /** Sample index for a series with time step dt and n samples. */
  index(dt: number, n: number): number {
    return Math.min(Math.floor(this.t / dt), n - 1);
  }
}
