"""Wire protocol message schema shared by the serve endpoint, trajectory
files, and the browser client.

Server -> client state frame:
    {type:"state", tick, uavs:[{id,x,y,heading,alive}], goals:[{owner,x,y}],
     obstacles:[{cx,cy,rot,hl,hw}], rays:{agent_id: [[hit,dist,tag,nx,ny,collider],...]},
     last_reward:{agent_id: float}, done:bool, recording:bool}
Client -> server:
    {type:"action", agent_id, action:0|1|2}
    {type:"control", cmd:"reset"|"record_start"|"record_stop"|"save"|"play"|
                         "pause"|"step_fwd"}
Both directions open with {type:"hello", schema_version, ...}.
"""

from __future__ import annotations

import json

SCHEMA_VERSION = 1


class ProtocolError(ValueError):
    pass


def hello_frame(mode, role):
    return {"type": "hello", "schema_version": SCHEMA_VERSION, "mode": mode,
            "role": role}


def state_frame(world, rays=None, last_reward=None, done=False, recording=False):
    return {
        "type": "state",
        "tick": world.tick,
        "uavs": [{"id": u.id, "x": u.x, "y": u.y, "heading": u.heading,
                  "alive": u.alive} for u in world.uavs],
        "goals": [{"owner": g.owner_id, "x": g.x, "y": g.y}
                  for g in world.goals if g.active],
        "obstacles": [{"cx": ob.cx, "cy": ob.cy, "rot": ob.rotation_degrees,
                       "hl": ob.half_length, "hw": ob.half_width}
                      for ob in world.obstacles],
        "rays": {} if rays is None else {
            str(aid): [[int(h.hit), h.distance, h.tag, h.normal[0], h.normal[1],
                        h.collider_id] for h in hits]
            for aid, hits in rays.items()},
        "last_reward": {} if last_reward is None else
            {str(k): v for k, v in last_reward.items()},
        "done": bool(done),
        "recording": bool(recording),
        "arena": [world.x_min, world.x_max, world.y_min, world.y_max],
    }


def error_frame(message):
    return {"type": "error", "message": message}


def encode(msg) -> str:
    return json.dumps(msg, separators=(",", ":"))


def decode(text):
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(msg, dict) or "type" not in msg:
        raise ProtocolError("message must be an object with a 'type' field")
    return msg


def validate_client_message(msg):
    kind = msg.get("type")
    if kind == "hello":
        if msg.get("schema_version") != SCHEMA_VERSION:
            raise ProtocolError(
                f"schema version {msg.get('schema_version')} != {SCHEMA_VERSION}")
        return msg
    if kind == "action":
        if msg.get("action") not in (0, 1, 2):
            raise ProtocolError(f"action must be 0|1|2, got {msg.get('action')!r}")
        msg.setdefault("agent_id", 0)
        return msg
    if kind == "control":
        if msg.get("cmd") not in ("reset", "record_start", "record_stop", "save",
                                  "play", "pause", "step_fwd"):
            raise ProtocolError(f"unknown control cmd {msg.get('cmd')!r}")
        return msg
    raise ProtocolError(f"unknown message type {kind!r}")
