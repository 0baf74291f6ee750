"""Command-line surface: train / eval / gen-demos / serve / replay."""

from __future__ import annotations

import argparse
import os
import sys

from .config import TrainConfig, load_config


def _config_from(args) -> TrainConfig:
    cfg = load_config(args.config) if args.config else TrainConfig()
    if getattr(args, "seed", None) is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_train(args):
    from .train import train

    cfg = _config_from(args)
    out = args.out or "run"
    final = train(cfg, demo_path=args.demos, out_dir=out)
    print(f"final checkpoint: {final}")
    print(f"metrics: {os.path.join(out, 'metrics.csv')}")
    return 0


def cmd_eval(args):
    from .evaluate import evaluate, policy_from_checkpoint

    if args.config:
        cfg = _config_from(args)
    else:
        # checkpoints embed the config they were trained under
        from .checkpoint import CheckpointError, load_checkpoint
        from .config import parse_config_text

        ck = load_checkpoint(args.checkpoint)
        text = ck["extra"].get("config")
        if not text:
            raise CheckpointError(
                f"{args.checkpoint} embeds no config; pass --config")
        cfg = parse_config_text(text)
    policy = policy_from_checkpoint(args.checkpoint, cfg)
    report = evaluate(policy, cfg, args.episodes, args.seed or 0,
                      policy_name=os.path.basename(args.checkpoint),
                      trajectory_path=args.save_trajectory)
    sys.stdout.write(report.table())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.csv())
    return 0


def cmd_gen_demos(args):
    from .demos import generate_demos, save_demos

    cfg = _config_from(args)
    demo = generate_demos(cfg.env_config(), cfg.sensor_config(), args.episodes,
                          seed=cfg.seed, obs_cfg=cfg.observation_config())
    save_demos(demo, args.out)
    print(f"wrote {len(demo.records)} records / {demo.n_episodes} episodes "
          f"to {args.out}")
    return 0


def cmd_serve(args):
    from .serve import serve

    cfg = _config_from(args)
    static_dir = args.static_dir
    if static_dir is None:
        guess = os.path.join(os.path.dirname(os.path.dirname(
            os.path.dirname(os.path.abspath(__file__)))), "frontend", "dist")
        static_dir = guess if os.path.isdir(guess) else None
    print(f"serving mode={args.mode} on http://127.0.0.1:{args.port}/ "
          f"(ws at /ws)")
    serve(cfg, args.mode, args.port, checkpoint=args.checkpoint,
          trajectory=args.trajectory, demo_out=args.demo_out,
          static_dir=static_dir)
    return 0


def cmd_replay(args):
    args.mode = "replay"
    args.checkpoint = None
    args.demo_out = "pilot.racildemo"
    return cmd_serve(args)


def build_parser():
    p = argparse.ArgumentParser(prog="racil",
                                description="ray-cast composite imitation "
                                            "learning for multi-UAV avoidance")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="run the composite training loop")
    t.add_argument("--config", help="key = value config file")
    t.add_argument("--demos", help="expert demo file (.racildemo)")
    t.add_argument("--seed", type=int)
    t.add_argument("--out", help="output directory (default: run)")
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--config", help="config file (must match the checkpoint)")
    e.add_argument("--episodes", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--csv", help="also write a machine-readable row here")
    e.add_argument("--save-trajectory",
                   help="dump episode 0 as JSON-lines frames")
    e.set_defaults(fn=cmd_eval)

    g = sub.add_parser("gen-demos", help="record scripted-expert demos")
    g.add_argument("--config")
    g.add_argument("--episodes", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int)
    g.set_defaults(fn=cmd_gen_demos)

    s = sub.add_parser("serve", help="host the pilot/replay/watch endpoint")
    s.add_argument("--config")
    s.add_argument("--mode", choices=("pilot", "replay", "watch"),
                   default="pilot")
    s.add_argument("--checkpoint", help="for watch mode")
    s.add_argument("--trajectory", help="for replay mode")
    s.add_argument("--port", type=int, default=8701)
    s.add_argument("--demo-out", default="pilot.racildemo",
                   help="where the save command writes demos")
    s.add_argument("--static-dir", help="client asset directory")
    s.add_argument("--seed", type=int)
    s.set_defaults(fn=cmd_serve)

    r = sub.add_parser("replay", help="serve a saved trajectory")
    r.add_argument("--trajectory", required=True)
    r.add_argument("--config")
    r.add_argument("--port", type=int, default=8701)
    r.add_argument("--static-dir")
    r.add_argument("--seed", type=int)
    r.set_defaults(fn=cmd_replay)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
