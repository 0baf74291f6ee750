/**
 * Replay scrubbing: play/pause/step commands plus tick bookkeeping so the
 * panel can assert it rendered every tick of a trajectory.
 */

import { controlMessage, StateFrame } from "./protocol.js";

export class ReplayController {
  ticksSeen: number[] = [];

  constructor(private send: (text: string) => void) {}

  play(): void {
    this.send(controlMessage("play"));
  }

  pause(): void {
    this.send(controlMessage("pause"));
  }

  stepForward(): void {
    this.send(controlMessage("step_fwd"));
  }

  restart(): void {
    this.send(controlMessage("reset"));
    this.ticksSeen = [];
  }

  observe(frame: StateFrame): void {
    this.ticksSeen.push(frame.tick);
  }

  /** True when ticks 0..n were all observed in order (duplicates allowed). */
  coveredContiguously(lastTick: number): boolean {
    let expect = 0;
    for (const t of this.ticksSeen) {
      if (t === expect) expect += 1;
      else if (t > expect) return false;
    }
    return expect >= lastTick + 1;
  }
}
