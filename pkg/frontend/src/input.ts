/**
 * Keyboard piloting: arrow-up -> forward, arrow-left/right -> rotations,
 * mapped 1:1 to protocol action messages.  The server advances exactly one
 * tick per action (turn-based), so human reaction time never corrupts the
 * recorded demo.
 */

import { ActionId, actionMessage } from "./protocol.js";

export function keyToAction(key: string): ActionId | null {
  switch (key) {
    case "ArrowUp":
      return 0;
    case "ArrowLeft":
      return 1;
    case "ArrowRight":
      return 2;
    default:
      return null;
  }
}

export interface PilotHooks {
  send(text: string): void;
  enabled(): boolean;
  onIgnored?(): void; // keypress while not pilotable: indicator flash
}

export class PilotControls {
  constructor(
    private hooks: PilotHooks,
    private agentId = 0,
  ) {}

  handleKey(key: string): boolean {
    const action = keyToAction(key);
    if (action === null) return false;
    if (!this.hooks.enabled()) {
      this.hooks.onIgnored?.();
      return false;
    }
    this.hooks.send(actionMessage(this.agentId, action));
    return true;
  }

  attach(target: { addEventListener(t: string, fn: (e: any) => void): void }): void {
    target.addEventListener("keydown", (e: KeyboardEvent) => {
      if (this.handleKey(e.key)) e.preventDefault?.();
    });
  }
}
