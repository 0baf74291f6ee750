/**
 * Glue between a message socket and the view state.  Socket implementations
 * are injected (browser WebSocket in app.ts, a raw TCP client in tests).
 */

import {
  controlMessage,
  parseServerMessage,
  helloMessage,
  ProtocolError,
  ServerMsg,
} from "./protocol.js";
import { SessionView } from "./state.js";

export interface WireSocket {
  send(text: string): void;
  close(): void;
  onMessage(fn: (text: string) => void): void;
  onClose(fn: () => void): void;
}

export class Session {
  readonly view = new SessionView();
  private listeners: Array<(msg: ServerMsg) => void> = [];

  constructor(private socket: WireSocket) {
    this.view.onConnecting();
    socket.onMessage((text) => this.receive(text));
    socket.onClose(() => this.view.onDisconnect());
    socket.send(helloMessage());
  }

  private receive(text: string): void {
    let msg: ServerMsg;
    try {
      msg = parseServerMessage(text);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.view.lastError = err.message;
        return;
      }
      throw err;
    }
    this.view.apply(msg);
    for (const fn of this.listeners) fn(msg);
  }

  onMessage(fn: (msg: ServerMsg) => void): void {
    this.listeners.push(fn);
  }

  send(text: string): void {
    this.socket.send(text);
  }

  control(cmd: Parameters<typeof controlMessage>[0], path?: string): void {
    this.socket.send(controlMessage(cmd, path));
  }

  close(): void {
    this.socket.close();
  }
}
