"""Seeded Monte Carlo harness: parameter sweeps, per-trial records,
aggregation, CSV emission.

Determinism contract: the trial seed is derive_seed(master_seed,
point_index, trial_index), every trial is a pure function of its seed,
and records are sorted by (point, trial) before any output -- so results
are byte-identical at any thread count.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

from .estimators import ml_exhaustive, misclassification_error, spectral_recover
from .hypergraph import Hypergraph, Labeling, ValidationError
from .mechanisms import (
    PrivacyBudget,
    mech_bayes_sampling,
    mech_exponential_sampling,
    mech_randomized_response,
    mech_stability,
)
from .model import ModelParams, derive_seed, sample_ground_truth, sample_hypergraph

MECHANISMS = ("none", "rr", "stability", "bayes", "expo")
ESTIMATORS = ("ml", "spectral")
SAMPLING_CAP = 16

TRIAL_HEADER = "mechanism,estimator,n,h,a,b,eps,t,trial,seed,error,exact_success"
SUMMARY_HEADER = "sweep_param,sweep_value,mean_error,success_rate,stderr,trials"


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    h: int
    b: float
    mechanism: str = "none"
    estimator: str = "spectral"
    trials: int = 100
    master_seed: int = 0
    a_values: tuple[float, ...] | None = None
    eps_values: tuple[float, ...] | None = None
    fixed_a: float | None = None
    fixed_eps: float | None = None
    t: float | None = None
    label_space: str = "balanced"
    acknowledge_noncertified: bool = False

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise ValidationError(f"unknown mechanism {self.mechanism!r}")
        if self.estimator not in ESTIMATORS:
            raise ValidationError(f"unknown estimator {self.estimator!r}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        has_a = self.a_values is not None
        has_eps = self.eps_values is not None
        if has_a == has_eps:
            raise ValidationError("exactly one of a_values / eps_values must be set")
        if has_eps and self.fixed_a is None:
            raise ValidationError("an eps sweep needs fixed_a")
        if self.mechanism in ("rr", "stability", "expo") and has_a and self.fixed_eps is None:
            raise ValidationError(f"an a sweep with {self.mechanism} needs fixed_eps")
        if self.mechanism == "stability" and self.t is None:
            raise ValidationError("stability mechanism needs t (delta = n^-t)")
        if self.mechanism in ("bayes", "expo") and self.n > SAMPLING_CAP:
            raise ValidationError(
                f"sampling mechanisms need n <= {SAMPLING_CAP}, got n={self.n}"
            )
        if self.estimator == "ml" and self.n > 20:
            raise ValidationError("ml estimator needs n <= 20")

    @property
    def sweep_param(self) -> str:
        return "a" if self.a_values is not None else "eps"

    @property
    def sweep_values(self) -> tuple[float, ...]:
        return self.a_values if self.a_values is not None else self.eps_values

    def point(self, index: int) -> tuple[float, float | None]:
        """(a, eps) at one sweep point; eps is None for mechanism 'none'/'bayes'."""
        if self.sweep_param == "a":
            return self.sweep_values[index], self.fixed_eps
        return self.fixed_a, self.sweep_values[index]

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        kwargs = dict(obj)
        for key in ("a_values", "eps_values"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(float(v) for v in kwargs[key])
        unknown = set(kwargs) - {f.name for f in cls.__dataclass_fields__.values()}
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kwargs)

    def to_json_dict(self) -> dict:
        d = asdict(self)
        for key in ("a_values", "eps_values"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d


@dataclass(frozen=True)
class TrialRecord:
    mechanism: str
    estimator: str
    n: int
    h: int
    a: float
    b: float
    eps: float | None
    t: float | None
    point_index: int
    trial: int
    seed: int
    error: float
    exact_success: bool
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PointSummary:
    sweep_param: str
    sweep_value: float
    mean_error: float
    success_rate: float
    stderr: float
    trials: int


def _estimate(config: ExperimentConfig, H: Hypergraph, params: ModelParams) -> Labeling:
    if config.estimator == "ml":
        return ml_exhaustive(H, params, label_space=config.label_space).labeling
    return spectral_recover(H).labeling


def run_single_trial(config: ExperimentConfig, point_index: int, trial: int) -> TrialRecord:
    a, eps = config.point(point_index)
    seed = derive_seed(config.master_seed, point_index, trial)
    params = ModelParams.from_coefficients(config.n, config.h, a, config.b)
    truth = sample_ground_truth(config.n, "balanced", derive_seed(seed, 0))
    H = sample_hypergraph(params, truth, derive_seed(seed, 1))
    mech_seed = derive_seed(seed, 2)
    diagnostics: dict = {}

    if config.mechanism == "none":
        est = _estimate(config, H, params)
    elif config.mechanism == "rr":
        out = mech_randomized_response(H, eps, mech_seed)
        est = _estimate(config, out.perturbed_graph, params)
    elif config.mechanism == "stability":
        budget = PrivacyBudget.with_exponent(eps, config.t, config.n)
        d_mode = "exact" if config.n <= 6 else "surrogate"
        out = mech_stability(
            H,
            params,
            budget,
            mech_seed,
            estimator=config.estimator,
            label_space=config.label_space,
            d_mode=d_mode,
            acknowledge_noncertified=config.acknowledge_noncertified,
        )
        est = out.labeling
        diagnostics = {
            "released_bottom": out.released_bottom,
            "certified": out.diagnostics["certified"],
            "d_mode": d_mode,
        }
    elif config.mechanism == "bayes":
        out = mech_bayes_sampling(H, params, mech_seed, label_space=config.label_space)
        est = out.labeling
    else:  # expo
        out = mech_exponential_sampling(H, eps, mech_seed, label_space=config.label_space)
        est = out.labeling

    error = misclassification_error(est, truth)
    return TrialRecord(
        mechanism=config.mechanism,
        estimator=config.estimator,
        n=config.n,
        h=config.h,
        a=a,
        b=config.b,
        eps=eps,
        t=config.t,
        point_index=point_index,
        trial=trial,
        seed=seed,
        error=error,
        exact_success=error == 0.0,
        diagnostics=diagnostics,
    )


def run_experiment(
    config: ExperimentConfig, threads: int = 1
) -> tuple[list[TrialRecord], list[PointSummary]]:
    """All (sweep point, trial) cells, any execution order, sorted output."""
    cells = [
        (pi, ti)
        for pi in range(len(config.sweep_values))
        for ti in range(config.trials)
    ]
    if threads <= 1:
        records = [run_single_trial(config, pi, ti) for pi, ti in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: run_single_trial(config, *c), cells))
    records.sort(key=lambda r: (r.point_index, r.trial))
    return records, aggregate(records, config)


def aggregate(records: list[TrialRecord], config: ExperimentConfig) -> list[PointSummary]:
    if not records:
        raise ValidationError("no records to aggregate")
    out = []
    for pi, value in enumerate(config.sweep_values):
        errs = [r.error for r in records if r.point_index == pi]
        k = len(errs)
        if k == 0:
            raise ValidationError(f"no records for sweep point {pi}")
        mean = sum(errs) / k
        success = sum(1 for e in errs if e == 0.0) / k
        if k > 1:
            var = sum((e - mean) ** 2 for e in errs) / (k - 1)
            stderr = (var / k) ** 0.5
        else:
            stderr = 0.0
        out.append(
            PointSummary(
                sweep_param=config.sweep_param,
                sweep_value=float(value),
                mean_error=mean,
                success_rate=success,
                stderr=stderr,
                trials=k,
            )
        )
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trials_csv_text(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRIAL_HEADER.split(","))
    for r in records:
        writer.writerow(
            [
                r.mechanism,
                r.estimator,
                _fmt(r.n),
                _fmt(r.h),
                _fmt(float(r.a)),
                _fmt(float(r.b)),
                _fmt(float(r.eps)) if r.eps is not None else "",
                _fmt(float(r.t)) if r.t is not None else "",
                _fmt(r.trial),
                _fmt(r.seed),
                _fmt(float(r.error)),
                _fmt(r.exact_success),
            ]
        )
    return buf.getvalue()


def summary_csv_text(summaries: list[PointSummary]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER.split(","))
    for s in summaries:
        writer.writerow(
            [
                s.sweep_param,
                _fmt(float(s.sweep_value)),
                _fmt(float(s.mean_error)),
                _fmt(float(s.success_rate)),
                _fmt(float(s.stderr)),
                _fmt(s.trials),
            ]
        )
    return buf.getvalue()


def parse_trials_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != TRIAL_HEADER.split(","):
        raise ValidationError(f"unexpected trial CSV header: {reader.fieldnames}")
    return list(reader)


def atomic_write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def emit_csv(records_or_summaries, path: str) -> None:
    """Write trial records or point summaries as CSV (schema inferred
    from the element type)."""
    items = list(records_or_summaries)
    if items and isinstance(items[0], PointSummary):
        text = summary_csv_text(items)
    else:
        text = trials_csv_text(items)
    atomic_write_text(path, text)


def write_run_manifest(
    path: str, config: ExperimentConfig, wall_time_s: float, extra: dict | None = None
) -> None:
    from . import __version__

    manifest = {
        "config": config.to_json_dict(),
        "artifact_version": __version__,
        "wall_time_s": wall_time_s,
        "rng": "PCG64 seeded by splitmix64(master, point, trial)",
    }
    if extra:
        manifest.update(extra)
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def run_to_files(
    config: ExperimentConfig, out_dir: str, threads: int = 1
) -> tuple[str, str, str]:
    os.makedirs(out_dir, exist_ok=True)
    start = time.time()
    records, summaries = run_experiment(config, threads=threads)
    wall = time.time() - start
    trials_path = os.path.join(out_dir, "trials.csv")
    summary_path = os.path.join(out_dir, "summary.csv")
    manifest_path = os.path.join(out_dir, "manifest.json")
    emit_csv(records, trials_path)
    emit_csv(summaries, summary_path)
    noncert = any(not r.diagnostics.get("certified", True) for r in records)
    write_run_manifest(
        manifest_path, config, wall, extra={"noncertified_privacy": noncert}
    )
    return trials_path, summary_path, manifest_path
