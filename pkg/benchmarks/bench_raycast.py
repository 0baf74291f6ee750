#!/usr/bin/env python3
"""Throughput benchmark: compiled ray-cast kernel vs pure-Python fallback.

Also asserts the two backends return bit-identical results on the benchmark
scenes (the fallback is an operation-for-operation twin).

Usage: python3 benchmarks/bench_raycast.py [n_scenes] [rays_per_cast]
"""

import sys
import time

import numpy as np

from racil import geom
from racil.geom import build_scene
from racil.sense import SensorConfig, observe
from racil.sim import EnvConfig, spawn_episode


def bench_kernel(cast_fn, scenes, rays, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for scene, ox, oy, dx, dy in scenes:
            cast_fn(scene, -1, ox, oy, dx, dy, 20.0)
        best = min(best, time.perf_counter() - t0)
    total_rays = len(scenes) * rays
    return total_rays / best, best


def main():
    n_scenes = int(sys.argv[1]) if len(sys.argv) > 1 else 300
    n_rays = int(sys.argv[2]) if len(sys.argv) > 2 else 15

    if not geom.compiled_available():
        print("note: compiled kernel unavailable; benchmarking pure only")

    rng = np.random.default_rng(0)
    scenes = []
    for _ in range(n_scenes):
        circles = [(rng.uniform(-12, 12), rng.uniform(-12, 12),
                    rng.uniform(0.2, 2.0), geom.KIND_UAV, 10 + i, 10 + i)
                   for i in range(3)]
        boxes = [(rng.uniform(-12, 12), rng.uniform(-12, 12),
                  rng.uniform(0, 180), 2.0, 0.25, 50 + i) for i in range(4)]
        segs = [(-15, -15, 15, -15, 90), (15, -15, 15, 15, 91),
                (15, 15, -15, 15, 92), (-15, 15, -15, -15, 93)]
        ang = rng.uniform(0, 2 * np.pi, size=n_rays)
        scenes.append((build_scene(circles, boxes, segs),
                       rng.uniform(-13, 13), rng.uniform(-13, 13),
                       np.cos(ang), np.sin(ang)))

    from racil.geom import cast_rays_pure
    pure_rps, pure_t = bench_kernel(cast_rays_pure, scenes, n_rays)
    print(f"pure     : {pure_rps:>12,.0f} rays/s  ({pure_t * 1e3:.1f} ms "
          f"for {n_scenes} casts x {n_rays} rays)")

    if geom.compiled_available():
        from racil.geom import _kernel
        comp_rps, comp_t = bench_kernel(_kernel.cast_rays, scenes, n_rays)
        print(f"compiled : {comp_rps:>12,.0f} rays/s  ({comp_t * 1e3:.1f} ms)")
        print(f"speedup  : {comp_rps / pure_rps:.1f}x")

        mismatches = 0
        for scene, ox, oy, dx, dy in scenes:
            a = _kernel.cast_rays(scene, -1, ox, oy, dx, dy, 20.0)
            b = cast_rays_pure(scene, -1, ox, oy, dx, dy, 20.0)
            if not all(np.array_equal(x, y) for x, y in zip(a, b)):
                mismatches += 1
        print(f"parity   : {'bit-identical' if mismatches == 0 else f'{mismatches} MISMATCHED CASTS'}")

    # end-to-end observation assembly (the consumer of the kernel)
    cfg = EnvConfig()
    sensor = SensorConfig()
    world = spawn_episode(cfg, 0)
    t0 = time.perf_counter()
    n_obs = 2000
    for _ in range(n_obs):
        observe(world, 0, sensor)
    dt = time.perf_counter() - t0
    print(f"observe  : {n_obs / dt:>12,.0f} obs/s  (15-ray observation vectors, "
          f"backend: {geom.BACKEND})")


if __name__ == "__main__":
    main()
