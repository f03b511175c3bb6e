"""Acceleration benchmark: per-stage timings and naive-vs-fast clearance.

The headline comparison times the naive jaw-clearance check (measure
every point) against the prefiltered one on a large cluttered scene,
verifying verdict equality alongside the speedup. When the compiled
kernel backend is present, both kernel backends are compared too.
"""

import statistics
import time
from dataclasses import replace

import numpy as np

from . import kernels
from .cloud import PointCloud, estimate_normals
from .completion import sample_completions
from .decision import lcb_stats, z_schedule
from .filters import filter_pipeline, jaw_segments
from .generation import generate_grasps
from .occlusion import apply_leaf, generate_strawberry, place_leaf
from .quality import sample_epsilon

__all__ = ["build_bench_scene", "run_bench"]


def build_bench_scene(n_points, seed=0):
    """Deterministic cluttered scene: one target fruit among decoys and
    uniform clutter spanning a 0.5 m workspace."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 23)))
    n_target = n_points // 10
    n_decoy = (3 * n_points) // 10
    n_clutter = n_points - n_target - n_decoy
    parts = []
    target = generate_strawberry(int(seed) + 1, n_target, scale=0.015)
    parts.append(target.points)
    n_fruits = 9
    for i in range(n_fruits):
        count = n_decoy // n_fruits + (1 if i < n_decoy % n_fruits else 0)
        decoy = generate_strawberry(int(seed) + 2 + i, count, scale=0.015)
        offset = rng.uniform(-0.2, 0.2, size=3)
        offset[2] = abs(offset[2])
        # keep decoys away from the target's grasp envelope
        offset[:2] += np.sign(offset[:2] + 1e-9) * 0.05
        parts.append(decoy.points + offset)
    clutter = rng.uniform(-0.25, 0.25, size=(n_clutter, 3))
    parts.append(clutter)
    scene = PointCloud(np.vstack(parts)) if n_points else PointCloud(np.empty((0, 3)))
    return scene, target


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _time_jaw_backend(impl, segments, points, tau, repeats):
    def naive():
        for a0, a1, b0, b1 in segments:
            impl.min_jaw_distance_sq(points, a0, a1, b0, b1)

    def fast():
        for a0, a1, b0, b1 in segments:
            impl.jaw_clearance_check(points, a0, a1, b0, b1, tau)

    naive_t = _median_time(naive, repeats)
    fast_t = _median_time(fast, repeats)
    verdicts_equal = True
    n_exact = 0
    for a0, a1, b0, b1 in segments:
        d2 = impl.min_jaw_distance_sq(points, a0, a1, b0, b1)
        passed, count = impl.jaw_clearance_check(points, a0, a1, b0, b1, tau)
        n_exact += count
        if passed != (d2 > tau * tau):
            verdicts_equal = False
    return {
        "naive_median_s": naive_t,
        "fast_median_s": fast_t,
        "speedup": (naive_t / fast_t) if fast_t > 0.0 else None,
        "verdicts_equal": verdicts_equal,
        "exact_evals": n_exact,
    }


def run_bench(cfg, printer=None):
    """Time each pipeline stage and the naive/fast clearance comparison.

    Returns a dict; timings are wall-clock medians over cfg.bench_repeats
    and are not deterministic (the verdict-equality fields are).
    """
    say = printer if printer is not None else (lambda *_: None)
    repeats = cfg.bench_repeats
    dec = cfg.decision_config()
    fcfg = dec.filter
    table = {"repeats": repeats, "backend": kernels.BACKEND, "stages": {}}

    scene, target = build_bench_scene(cfg.bench_points, seed=cfg.base_seed)
    leaf = place_leaf(target, 0.2, cfg.leaf_aspect, cfg.leaf_thickness,
                      seed=cfg.base_seed)
    partial = apply_leaf(target, leaf).occluded_cloud

    sampler = replace(dec.sampler, seed=int(cfg.base_seed))
    table["stages"]["ensemble_sampling"] = _median_time(
        lambda: sample_completions(partial, target, sampler, cfg.K), repeats
    )
    ens = sample_completions(partial, target, sampler, cfg.K)
    completed = estimate_normals(ens.samples[0], cfg.normals_k)

    table["stages"]["generation"] = _median_time(
        lambda: generate_grasps(completed, cfg.M, w_max=cfg.w_max, mu=cfg.mu,
                                seed=int(cfg.base_seed), front=fcfg.front,
                                t_back=cfg.t_back),
        repeats,
    )
    grasps = generate_grasps(completed, cfg.M, w_max=cfg.w_max, mu=cfg.mu,
                             seed=int(cfg.base_seed), front=fcfg.front,
                             t_back=cfg.t_back)
    probe = grasps[: min(len(grasps), 32)]
    segments = [jaw_segments(g, fcfg) for g in probe]

    jaw = {}
    for name in kernels.available_backends():
        jaw[name] = _time_jaw_backend(
            kernels.get_impl(name), segments, scene.points, fcfg.tau, repeats
        )
    empty = np.empty((0, 3))
    empty_naive = all(
        kernels.min_jaw_distance_sq(empty, a0, a1, b0, b1) > fcfg.tau**2
        for a0, a1, b0, b1 in segments[:1]
    )
    empty_fast = all(
        kernels.jaw_clearance_check(empty, a0, a1, b0, b1, fcfg.tau)[0]
        for a0, a1, b0, b1 in segments[:1]
    )
    table["jaw_filter"] = {
        "n_points": len(scene),
        "n_grasps": len(probe),
        "per_backend": jaw,
        "active": jaw[kernels.BACKEND],
        "empty_cloud_passes": bool(empty_naive and empty_fast),
    }

    survivors, _ = filter_pipeline(probe, ens, completed, fcfg)
    table["stages"]["filtering"] = _median_time(
        lambda: filter_pipeline(probe, ens, completed, fcfg), repeats
    )
    table["stages"]["epsilon_per_sample"] = _median_time(
        lambda: sample_epsilon(survivors, completed, fcfg, cfg.mu, cfg.n_dir,
                               mode=cfg.epsilon_mode, step=cfg.contact_step,
                               contact_radius=cfg.contact_radius),
        repeats,
    )
    eps = [
        sample_epsilon(survivors, completed, fcfg, cfg.mu, cfg.n_dir,
                       mode=cfg.epsilon_mode) + 0.001 * k
        for k in range(max(2, cfg.K // 4))
    ]
    table["stages"]["aggregation"] = _median_time(
        lambda: lcb_stats(eps, z_schedule(0.2)), repeats
    )

    say(f"kernel backend: {table['backend']}")
    say(f"scene points: {len(scene)}, probe grasps: {len(probe)}")
    for stage, seconds in table["stages"].items():
        say(f"  {stage:<22} {seconds * 1e3:10.3f} ms (median of {repeats})")
    for name, row in jaw.items():
        speed = f"{row['speedup']:.2f}x" if row["speedup"] else "n/a"
        say(
            f"  jaw filter [{name}]: naive {row['naive_median_s'] * 1e3:.3f} ms, "
            f"fast {row['fast_median_s'] * 1e3:.3f} ms, speedup {speed}, "
            f"verdicts_equal={row['verdicts_equal']}"
        )
    return table
