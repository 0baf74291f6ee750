"""Live-serve endpoint hosting the piloting/replay/watch sessions.

HTTP server with a WebSocket upgrade at /ws; static client assets are served
from a directory when one is available.  Modes:

  pilot  - turn-based: the environment advances exactly one tick per received
           action message; demo recording on command.  One pilot at a time
           (later connections get a busy error).
  replay - streams a saved JSON-lines trajectory with play/pause/step.
  watch  - runs a checkpoint policy live at a fixed tick rate.
"""

from __future__ import annotations

import json
import os
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import wsproto
from .demos import DemoFile, DemoRecord, save_demos, _quantize
from .digests import env_digest, observation_digest
from .geom import scene_from_world
from .sense import CoordinateSensorConfig, cast_all, observe, observe_coordinates
from .sim import Environment, N_ACTIONS
from .wire import (ProtocolError, decode, encode, error_frame, hello_frame,
                   state_frame, validate_client_message)

WATCH_TICK_HZ = 20.0


class PilotRecorder:
    """Captures (observation, action) pairs for the piloted agent."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.obs_cfg = cfg.observation_config()
        self.episodes = []       # finalized: list of list[(obs, action)]
        self.current = None      # in-flight episode or None
        self.recording = False

    def observe(self, world, agent_id):
        if isinstance(self.obs_cfg, CoordinateSensorConfig):
            return observe_coordinates(world, agent_id, self.obs_cfg)
        return observe(world, agent_id, self.obs_cfg)

    def start(self):
        self.recording = True
        self.current = []

    def capture(self, world, agent_id, action):
        if self.recording:
            self.current.append((_quantize(self.observe(world, agent_id)),
                                 int(action)))

    def finalize(self):
        """Close the in-flight episode (episode ended or record_stop)."""
        if self.current:
            self.episodes.append(self.current)
        self.current = None
        self.recording = False

    def discard_unsaved(self):
        self.current = None
        self.recording = False

    def to_demofile(self):
        records = []
        for ep_idx, ep in enumerate(self.episodes):
            for st, (obs, act) in enumerate(ep):
                records.append(DemoRecord(episode=ep_idx, step=st,
                                          observation=obs, action=act))
        return DemoFile(
            version=1,
            obs_digest=observation_digest(self.obs_cfg),
            env_digest=env_digest(self.cfg.env_config()),
            obs_dim=self.obs_cfg.obs_dim(),
            n_actions=N_ACTIONS,
            source="human",
            n_episodes=len(self.episodes),
            records=tuple(records),
        )


class ServeApp:
    """Session logic shared by all connections of one server process."""

    def __init__(self, cfg, mode, checkpoint=None, trajectory=None,
                 demo_out="pilot.racildemo", static_dir=None):
        if mode not in ("pilot", "replay", "watch"):
            raise ValueError(f"unknown serve mode {mode!r}")
        self.cfg = cfg
        self.mode = mode
        self.demo_out = demo_out
        self.static_dir = static_dir
        self.pilot_lock = threading.Lock()
        self.policy = None
        self.frames = None
        if mode == "watch":
            from .evaluate import policy_from_checkpoint
            if checkpoint is None:
                raise ValueError("watch mode needs a checkpoint")
            self.policy = policy_from_checkpoint(checkpoint, cfg)
        if mode == "replay":
            if trajectory is None:
                raise ValueError("replay mode needs a trajectory file")
            with open(trajectory, encoding="utf-8") as fh:
                self.frames = [json.loads(line) for line in fh if line.strip()]
            if not self.frames:
                raise ValueError(f"{trajectory}: empty trajectory")

    # ---- per-connection session loops ----

    def run_session(self, sock):
        wsproto.send_text(sock, encode(hello_frame(self.mode, "server")))
        first = decode(wsproto.read_text(sock))
        validate_client_message(first)
        if first.get("type") != "hello":
            raise ProtocolError("expected hello message first")
        if self.mode == "pilot":
            if not self.pilot_lock.acquire(blocking=False):
                wsproto.send_text(sock, encode(error_frame(
                    "busy: another pilot session is active")))
                return
            try:
                self._pilot_loop(sock)
            finally:
                self.pilot_lock.release()
        elif self.mode == "replay":
            self._replay_loop(sock)
        else:
            self._watch_loop(sock)

    def _send_state(self, sock, env, rewards, recording=False):
        sensor = self.cfg.sensor_config()
        rays = {u.id: cast_all(env.state, u.id, sensor)
                for u in env.state.uavs if u.alive}
        wsproto.send_text(sock, encode(state_frame(
            env.state, rays=rays, last_reward=rewards, done=env.episode_done,
            recording=recording)))

    def _pilot_loop(self, sock):
        env = Environment(self.cfg.env_config())
        recorder = PilotRecorder(self.cfg)
        episode_counter = 0
        env.reset(np.random.SeedSequence(entropy=[self.cfg.seed, 5000,
                                                  episode_counter]))
        self._send_state(sock, env, {}, recorder.recording)
        try:
            while True:
                try:
                    msg = validate_client_message(decode(wsproto.read_text(sock)))
                except ProtocolError as exc:
                    wsproto.send_text(sock, encode(error_frame(str(exc))))
                    continue
                if msg["type"] == "action":
                    aid = int(msg.get("agent_id", 0))
                    if env.episode_done or env.finished.get(aid, True):
                        wsproto.send_text(sock, encode(error_frame(
                            "episode finished; send control reset")))
                        continue
                    recorder.capture(env.state, aid, msg["action"])
                    actions = {aid: int(msg["action"])}
                    # peers (if any) hold position via the scripted default:
                    # a pilot session drives one agent; others idle-rotate
                    for u in env.state.uavs:
                        if u.alive and not env.finished[u.id] and u.id != aid:
                            actions[u.id] = 1
                    res = env.step(actions)
                    if env.episode_done and recorder.recording:
                        recorder.finalize()
                    self._send_state(sock, env, res.rewards, recorder.recording)
                elif msg["type"] == "control":
                    cmd = msg["cmd"]
                    if cmd == "reset":
                        recorder.discard_unsaved()
                        episode_counter += 1
                        env.reset(np.random.SeedSequence(
                            entropy=[self.cfg.seed, 5000, episode_counter]))
                        self._send_state(sock, env, {}, recorder.recording)
                    elif cmd == "record_start":
                        recorder.start()
                        self._send_state(sock, env, {}, recorder.recording)
                    elif cmd == "record_stop":
                        recorder.finalize()
                        self._send_state(sock, env, {}, recorder.recording)
                    elif cmd == "save":
                        path = msg.get("path", self.demo_out)
                        demo = recorder.to_demofile()
                        save_demos(demo, path)
                        wsproto.send_text(sock, encode(
                            {"type": "saved", "path": path,
                             "episodes": demo.n_episodes,
                             "records": len(demo.records)}))
                    else:
                        wsproto.send_text(sock, encode(error_frame(
                            f"control {cmd!r} not available in pilot mode")))
        except wsproto.WsClosed:
            recorder.discard_unsaved()

    def _replay_loop(self, sock):
        idx = 0
        playing = False
        n = len(self.frames)

        def send_frame(i):
            wsproto.send_text(sock, encode(self.frames[i]))

        send_frame(0)
        sock.settimeout(1.0 / WATCH_TICK_HZ)
        try:
            while True:
                try:
                    raw = wsproto.read_text(sock)
                except TimeoutError:
                    raw = None
                except OSError as exc:
                    if "timed out" in str(exc).lower():
                        raw = None
                    else:
                        raise
                if raw is not None:
                    try:
                        msg = validate_client_message(decode(raw))
                    except ProtocolError as exc:
                        wsproto.send_text(sock, encode(error_frame(str(exc))))
                        continue
                    if msg["type"] != "control":
                        wsproto.send_text(sock, encode(error_frame(
                            "replay accepts control messages only")))
                        continue
                    cmd = msg["cmd"]
                    if cmd == "play":
                        playing = True
                    elif cmd == "pause":
                        playing = False
                    elif cmd == "step_fwd":
                        playing = False
                        if idx < n - 1:
                            idx += 1
                        send_frame(idx)
                    elif cmd == "reset":
                        playing = False
                        idx = 0
                        send_frame(idx)
                    else:
                        wsproto.send_text(sock, encode(error_frame(
                            f"control {cmd!r} not available in replay mode")))
                elif playing:
                    if idx < n - 1:
                        idx += 1
                        send_frame(idx)
                    else:
                        playing = False
        except wsproto.WsClosed:
            pass

    def _watch_loop(self, sock):
        env = Environment(self.cfg.env_config())
        episode_counter = 0
        env.reset(np.random.SeedSequence(entropy=[self.cfg.seed, 6000,
                                                  episode_counter]))
        self._send_state(sock, env, {})
        sock.settimeout(0.001)
        try:
            while True:
                start = time.monotonic()
                try:
                    raw = wsproto.read_text(sock)
                    msg = validate_client_message(decode(raw))
                    if msg["type"] == "control" and msg["cmd"] == "reset":
                        episode_counter += 1
                        env.reset(np.random.SeedSequence(
                            entropy=[self.cfg.seed, 6000, episode_counter]))
                except (TimeoutError, ProtocolError):
                    pass
                except OSError as exc:
                    if "timed out" not in str(exc).lower():
                        raise
                if env.episode_done:
                    episode_counter += 1
                    env.reset(np.random.SeedSequence(
                        entropy=[self.cfg.seed, 6000, episode_counter]))
                    self._send_state(sock, env, {})
                else:
                    scene = scene_from_world(env.state)
                    actions = {u.id: self.policy(env.state, u.id, scene=scene)
                               for u in env.state.uavs
                               if u.alive and not env.finished[u.id]}
                    res = env.step(actions)
                    self._send_state(sock, env, res.rewards)
                elapsed = time.monotonic() - start
                time.sleep(max(0.0, 1.0 / WATCH_TICK_HZ - elapsed))
        except wsproto.WsClosed:
            pass


class _WsConn:
    """Socket-like adapter reading through the handler's buffered rfile.

    The HTTP handler parses headers via a buffered reader, which may already
    hold WebSocket bytes that arrived with the upgrade; reading the raw
    socket afterwards would strand them.
    """

    def __init__(self, rfile, sock):
        self._rfile = rfile
        self._sock = sock

    def recv(self, n):
        return self._rfile.read1(n)

    def sendall(self, data):
        self._sock.sendall(data)

    def settimeout(self, t):
        self._sock.settimeout(t)


def make_handler(app: ServeApp):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet
            pass

        def do_GET(self):
            if self.path == "/ws":
                self._upgrade()
                return
            self._static()

        def _upgrade(self):
            key = self.headers.get("Sec-WebSocket-Key")
            if (self.headers.get("Upgrade", "").lower() != "websocket"
                    or not key):
                self.send_error(400, "websocket upgrade required")
                return
            self.send_response(101, "Switching Protocols")
            self.send_header("Upgrade", "websocket")
            self.send_header("Connection", "Upgrade")
            self.send_header("Sec-WebSocket-Accept", wsproto.accept_key(key))
            self.end_headers()
            sock = _WsConn(self.rfile, self.connection)
            try:
                app.run_session(sock)
            except (wsproto.WsClosed, ProtocolError, OSError):
                pass
            finally:
                wsproto.send_close(sock)
                self.close_connection = True

        def _static(self):
            path = self.path.split("?", 1)[0]
            if path in ("", "/"):
                path = "/index.html"
            if app.static_dir:
                full = os.path.realpath(os.path.join(app.static_dir,
                                                     path.lstrip("/")))
                root = os.path.realpath(app.static_dir)
                if full.startswith(root) and os.path.isfile(full):
                    ctype = {"html": "text/html", "js": "text/javascript",
                             "css": "text/css", "map": "application/json",
                             "json": "application/json"}.get(
                                 full.rsplit(".", 1)[-1],
                                 "application/octet-stream")
                    with open(full, "rb") as fh:
                        body = fh.read()
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            body = (b"<html><body><h1>racil serve</h1>"
                    b"<p>No client assets found; the WebSocket endpoint is at "
                    b"/ws.</p></body></html>")
            self.send_response(200 if path == "/index.html" else 404)
            self.send_header("Content-Type", "text/html")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def serve(cfg, mode, port, checkpoint=None, trajectory=None,
          demo_out="pilot.racildemo", static_dir=None, ready_event=None):
    """Run the endpoint until interrupted.  ready_event (threading.Event) is
    set once the socket is bound (used by tests)."""
    app = ServeApp(cfg, mode, checkpoint=checkpoint, trajectory=trajectory,
                   demo_out=demo_out, static_dir=static_dir)
    httpd = ThreadingHTTPServer(("127.0.0.1", port), make_handler(app))
    httpd.daemon_threads = True
    if ready_event is not None:
        ready_event.httpd = httpd
        ready_event.set()
    try:
        httpd.serve_forever(poll_interval=0.1)
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return httpd
