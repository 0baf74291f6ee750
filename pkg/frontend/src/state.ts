/**
 * Session view state: connection, latest frame, recording indicator,
 * episode/step counters, accumulated reward.  Frames apply in arrival order;
 * stale frames (lower tick within the same episode) are discarded.  No
 * client-side physics: the only state transitions are server frames.
 */

import { HelloMsg, ServerMsg, StateFrame, versionNotice } from "./protocol.js";

export type ConnectionState =
  | "disconnected"
  | "connecting"
  | "live"
  | "incompatible";

export interface SessionCounters {
  episode: number;
  step: number;
  accumulatedReward: number;
}

export class SessionView {
  connection: ConnectionState = "disconnected";
  mode = "";
  notice: string | null = null;
  frame: StateFrame | null = null;
  recording = false;
  episode = 0;
  accumulatedReward = 0;
  lastError: string | null = null;
  lastSaved: { path: string; episodes: number; records: number } | null = null;
  framesSeen = 0;
  framesDiscarded = 0;

  get step(): number {
    return this.frame ? this.frame.tick : 0;
  }

  onConnecting(): void {
    this.connection = "connecting";
  }

  onDisconnect(): void {
    this.connection = "disconnected";
  }

  /** Returns true when the message changed the rendered state. */
  apply(msg: ServerMsg): boolean {
    switch (msg.type) {
      case "hello":
        return this.applyHello(msg);
      case "state":
        return this.applyFrame(msg);
      case "error":
        this.lastError = msg.message;
        return true;
      case "saved":
        this.lastSaved = {
          path: msg.path,
          episodes: msg.episodes,
          records: msg.records,
        };
        return true;
    }
  }

  private applyHello(msg: HelloMsg): boolean {
    const notice = versionNotice(msg);
    if (notice !== null) {
      this.connection = "incompatible";
      this.notice = notice;
      return true;
    }
    this.connection = "live";
    this.mode = msg.mode;
    return true;
  }

  private applyFrame(frame: StateFrame): boolean {
    if (this.connection === "incompatible") {
      return false; // no partial sessions across a version mismatch
    }
    if (this.frame !== null) {
      if (frame.tick === 0 && this.frame.tick !== 0) {
        this.episode += 1;
        this.accumulatedReward = 0;
      } else if (frame.tick < this.frame.tick) {
        this.framesDiscarded += 1;
        return false; // stale; equal ticks are control acknowledgments
      }
    }
    for (const v of Object.values(frame.last_reward)) {
      this.accumulatedReward += v;
    }
    this.frame = frame;
    this.recording = frame.recording;
    this.framesSeen += 1;
    return true;
  }

  /** Action buttons are enabled only for a live pilot session. */
  get pilotingEnabled(): boolean {
    return (
      this.connection === "live" &&
      this.mode === "pilot" &&
      this.frame !== null &&
      !this.frame.done
    );
  }

  counters(): SessionCounters {
    return {
      episode: this.episode,
      step: this.step,
      accumulatedReward: this.accumulatedReward,
    };
  }
}
