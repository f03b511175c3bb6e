"""Occlusion-sweep orchestration and report emission.

A sweep decides every (mode, alpha, trial) cell: generate a fruit,
occlude it with a seeded leaf, clean and crop the scene, and run the
decision pipeline. Per-trial randomness is keyed by (base seed, mode
index, trial) so rows are stable when modes or alphas are added, and so
the same physical fruit and noise stream is observed across the alpha
grid (paired trials; only the leaf size and the confidence factor vary
with alpha).

Result files are byte-deterministic under a fixed config: rows are
sorted, floats use repr round-tripping, and wall-clock timings go to a
separate file excluded from determinism comparisons.
"""

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cloud import centroid, clean, crop
from .decision import Mode, ObjectInput, decide
from .occlusion import apply_leaf, centroid_shift, generate_strawberry, place_leaf

__all__ = ["SweepReport", "TrialRow", "run_sweep", "thread_count"]

# fixed mode indices: adding or removing modes never reseeds other rows
_MODE_INDEX = {Mode.BASELINE: 0, Mode.NO_DROPOUT: 1, Mode.DROPOUT: 2}

# stream tags keep the per-trial seed families disjoint
_TAG_FRUIT, _TAG_SCALE, _TAG_LEAF, _TAG_DECIDE = 11, 13, 17, 19


def thread_count():
    """Worker count for trial execution, from GRASPUQ_THREADS if set."""
    env = os.environ.get("GRASPUQ_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError(f"GRASPUQ_THREADS must be an integer: {env!r}") from exc
        if n >= 1:
            return n
    return min(8, os.cpu_count() or 1)


def _stream_seed(base_seed, mode, trial, tag):
    entropy = (int(base_seed), _MODE_INDEX[mode], int(trial), tag)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


@dataclass
class TrialRow:
    mode: Mode
    alpha_index: int
    alpha: float
    trial: int
    seed: int
    n_full: int
    n_occluded: int
    removed_fraction: float
    centroid_shift: float
    centroid_shift_radius: float
    report: object


@dataclass
class SweepReport:
    rows: list
    aggregates: dict
    config: dict
    timings: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "config": self.config,
            "aggregates": self.aggregates,
            "rows": [r.report.to_json_dict() for r in self.rows],
        }


def run_trial(cfg, mode, alpha_index, trial):
    """One sweep cell: synthesize, occlude, observe, decide."""
    alpha = cfg.alpha_grid[alpha_index]
    fruit_seed = _stream_seed(cfg.base_seed, mode, trial, _TAG_FRUIT)
    scale_rng = np.random.default_rng(
        _stream_seed(cfg.base_seed, mode, trial, _TAG_SCALE)
    )
    scale = float(scale_rng.uniform(cfg.fruit_scale_min, cfg.fruit_scale_max))
    fruit = generate_strawberry(fruit_seed, cfg.fruit_points, scale)
    leaf_seed = _stream_seed(cfg.base_seed, mode, trial, _TAG_LEAF)
    leaf = place_leaf(fruit, alpha, cfg.leaf_aspect, cfg.leaf_thickness, leaf_seed)
    outcome = apply_leaf(fruit, leaf)
    occluded = outcome.occluded_cloud
    partial = occluded
    if cfg.clean_scene:
        partial = clean(partial)
    # segmentation stand-in: crop to the object's padded bounding box
    partial = crop(partial, fruit.aabb().expanded(0.005))
    if len(occluded):
        shift = centroid_shift(fruit, occluded)
        radius = float(
            np.linalg.norm(fruit.points - centroid(fruit), axis=1).max()
        )
        delta = float(np.linalg.norm(centroid(fruit) - centroid(occluded)))
        shift_radius = delta / radius if radius > 0.0 else 0.0
    else:
        shift = float("nan")
        shift_radius = float("nan")
    obj = ObjectInput(
        object_id=f"{mode.value}-a{alpha_index}-t{trial}",
        partial=partial,
        alpha=alpha,
        ground_shape=fruit,
    )
    decision_seed = _stream_seed(cfg.base_seed, mode, trial, _TAG_DECIDE)
    report = decide(obj, mode, cfg.decision_config(), decision_seed)
    return TrialRow(
        mode=mode,
        alpha_index=alpha_index,
        alpha=alpha,
        trial=trial,
        seed=fruit_seed,
        n_full=len(fruit),
        n_occluded=len(occluded),
        removed_fraction=outcome.removed_fraction,
        centroid_shift=shift,
        centroid_shift_radius=shift_radius,
        report=report,
    )


def _aggregate(rows):
    out = {}
    keys = sorted({(r.mode.value, r.alpha_index) for r in rows})
    for mode_name, a_idx in keys:
        cell = [
            r for r in rows
            if r.mode.value == mode_name and r.alpha_index == a_idx
        ]
        n = len(cell)
        attempts = sum(1 for r in cell if r.report.verdict == "Attempt")
        reasons = {}
        for r in cell:
            if r.report.reason is not None:
                key = r.report.reason.value
                reasons[key] = reasons.get(key, 0) + 1
        gus = [
            r.report.global_uncertainty
            for r in cell
            if r.report.global_uncertainty is not None
        ]
        out[f"{mode_name}/alpha={cell[0].alpha!r}"] = {
            "mode": mode_name,
            "alpha": cell[0].alpha,
            "trials": n,
            "attempt_rate": attempts / n,
            "abstain_reasons": reasons,
            "mean_global_uncertainty": float(np.mean(gus)) if gus else None,
            "mean_removed_fraction": float(
                np.mean([r.removed_fraction for r in cell])
            ),
            "mean_centroid_shift": float(np.mean([r.centroid_shift for r in cell])),
            "mean_centroid_shift_radius": float(
                np.mean([r.centroid_shift_radius for r in cell])
            ),
        }
    return out


def run_sweep(cfg, out_dir=None):
    """Execute every (mode, alpha, trial) cell and optionally emit files.

    Emits occlusion.csv, decisions.csv, report.json (all deterministic)
    and timings.json (wall-clock, excluded from determinism checks).
    """
    t0 = time.perf_counter()
    modes = cfg.mode_list()
    cells = [
        (mode, a_idx, trial)
        for mode in modes
        for a_idx in range(len(cfg.alpha_grid))
        for trial in range(cfg.trials_per_alpha)
    ]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(lambda c: run_trial(cfg, *c), cells))
    rows.sort(key=lambda r: (_MODE_INDEX[r.mode], r.alpha_index, r.trial))
    report = SweepReport(
        rows=rows,
        aggregates=_aggregate(rows),
        config=cfg.to_json_dict(),
        timings={"sweep_wall_s": time.perf_counter() - t0, "n_rows": len(rows)},
    )
    target = out_dir if out_dir is not None else cfg.out_dir
    if target is not None:
        write_sweep_files(report, target)
    return report


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_sweep_files(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    occ_path = os.path.join(out_dir, "occlusion.csv")
    with open(occ_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("seed,alpha,n_full,n_occluded,removed_fraction,centroid_shift\n")
        for r in report.rows:
            fh.write(
                f"{r.seed},{_fmt(r.alpha)},{r.n_full},{r.n_occluded},"
                f"{_fmt(r.removed_fraction)},{_fmt(r.centroid_shift)}\n"
            )
    dec_path = os.path.join(out_dir, "decisions.csv")
    with open(dec_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(
            "mode,alpha,trial,object_id,verdict,reason,global_uncertainty,"
            "eps_mean,eps_std,z,lcb,m_total,m_prime_total\n"
        )
        for r in report.rows:
            rep = r.report
            reason = rep.reason.value if rep.reason else ""
            m_total = sum(p.M for p in rep.per_sample)
            m_prime = sum(p.M_prime for p in rep.per_sample)
            fh.write(
                f"{rep.mode.value},{_fmt(r.alpha)},{r.trial},{rep.object_id},"
                f"{rep.verdict},{reason},{_fmt(rep.global_uncertainty)},"
                f"{_fmt(rep.mean)},{_fmt(rep.std)},{_fmt(rep.z)},{_fmt(rep.lcb)},"
                f"{m_total},{m_prime}\n"
            )
    with open(os.path.join(out_dir, "report.json"), "w", encoding="ascii",
              newline="\n") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "timings.json"), "w", encoding="ascii",
              newline="\n") as fh:
        json.dump(report.timings, fh, indent=2, sort_keys=True)
        fh.write("\n")
