"""Command-line interface.

Exit codes: 0 success, 1 validation/config error, 2 runtime/numeric
failure, 3 privacy-soundness refusal.  All structured output is JSON,
tabular output is CSV; every file write goes through a temp file and an
atomic rename.  Numeric output prints at full float precision (well past
the documented 6-significant-digit minimum).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .audit import dp_audit
from .estimators import misclassification_error, ml_exhaustive, spectral_recover
from .experiments import ExperimentConfig, atomic_write_text, run_to_files
from .hypergraph import Hypergraph, Labeling, ValidationError
from .mechanisms import (
    PrivacyBudget,
    PrivacySoundnessError,
    mech_bayes_sampling,
    mech_exponential_sampling,
    mech_randomized_response,
    mech_stability,
)
from .model import ModelParams, derive_seed, sample_ground_truth, sample_hypergraph
from .thresholds import (
    bayes_threshold,
    exponential_threshold,
    nonprivate_threshold,
    region_grid,
    rr_threshold,
    stability_threshold,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PRIVACY = 3


def _threads_from(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("HYPERDP_THREADS")
    return int(env) if env else 1


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_params(path: str) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return ModelParams.from_coefficients(obj["n"], obj["h"], obj["a"], obj["b"])


def _cmd_gen(args) -> int:
    params = ModelParams.from_coefficients(args.n, args.h, args.a, args.b)
    mode = "balanced" if args.balanced else "uniform_iid"
    truth = sample_ground_truth(args.n, mode, derive_seed(args.seed, 0))
    H = sample_hypergraph(params, truth, derive_seed(args.seed, 1))
    atomic_write_text(args.out, H.to_json_str())
    truth_path = args.out.removesuffix(".json") + ".truth.json"
    atomic_write_text(truth_path, _dump_json(truth.to_json_dict()))
    print(_dump_json({"hypergraph": args.out, "truth": truth_path, "edges": H.num_edges}), end="")
    return EXIT_OK


def _cmd_recover(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        H = Hypergraph.from_json_str(fh.read())
    if args.alg == "ml":
        if args.params is None:
            raise ValidationError("ml recovery needs --params")
        params = _load_params(args.params)
        result = ml_exhaustive(H, params, label_space=args.label_space)
    else:
        result = spectral_recover(H)
    out = {
        "method": result.method,
        "labels": list(result.labeling.canonical().labels),
        "score": result.score,
        "flags": result.flags,
    }
    if args.truth:
        with open(args.truth, encoding="utf-8") as fh:
            truth = Labeling.from_json_dict(json.load(fh))
        out["error"] = misclassification_error(result.labeling, truth)
        out["exact_success"] = out["error"] == 0.0
    print(_dump_json(out), end="")
    return EXIT_OK


def _budget_from(args, n: int) -> PrivacyBudget:
    if args.t is not None:
        return PrivacyBudget.with_exponent(args.eps, args.t, n)
    if args.delta is not None:
        return PrivacyBudget(args.eps, args.delta)
    raise ValidationError("stability mechanism needs --t or --delta")


def _cmd_privatize(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        H = Hypergraph.from_json_str(fh.read())
    if args.mech == "rr":
        out = mech_randomized_response(H, args.eps, args.seed)
    elif args.mech == "stability":
        params = _load_params(args.params) if args.params else None
        if params is None:
            raise ValidationError("stability mechanism needs --params")
        out = mech_stability(
            H,
            params,
            _budget_from(args, H.n),
            args.seed,
            estimator=args.estimator,
            label_space=args.label_space,
            d_mode=args.d_mode,
            acknowledge_noncertified=args.acknowledge_noncertified,
        )
    elif args.mech == "bayes":
        if args.params is None:
            raise ValidationError("bayes mechanism needs --params")
        out = mech_bayes_sampling(H, _load_params(args.params), args.seed, args.label_space)
    else:
        out = mech_exponential_sampling(H, args.eps, args.seed, args.label_space)

    result = {
        "mechanism": out.mechanism,
        "released_bottom": out.released_bottom,
        "labels": list(out.labeling.labels) if out.mechanism != "rr" else None,
        "diagnostics": out.diagnostics,
    }
    if out.perturbed_graph is not None and args.out:
        atomic_write_text(args.out, out.perturbed_graph.to_json_str())
        result["perturbed_graph"] = args.out
    print(_dump_json(result), end="")
    return EXIT_OK


def _cmd_threshold(args) -> int:
    if args.mech == "nonprivate":
        res = nonprivate_threshold(args.a, args.b, args.h)
    elif args.mech == "rr":
        res = rr_threshold(args.a, args.b, args.h, args.eps, args.n)
    elif args.mech == "stability":
        res = stability_threshold(args.a, args.b, args.h, args.eps, args.t)
    elif args.mech == "bayes":
        res = bayes_threshold(args.a, args.b, args.h)
    else:
        res = exponential_threshold(args.a, args.b, args.h, args.eps)
    payload = res.to_json_dict()
    payload["inputs"] = {
        "a": args.a, "b": args.b, "h": args.h,
        "eps": args.eps, "t": args.t, "n": args.n,
    }
    print(_dump_json(payload), end="")
    return EXIT_OK


def _cmd_regions(args) -> int:
    rows = region_grid(
        (args.a_min, args.a_max),
        (args.eps_min, args.eps_max),
        b=args.b,
        h=args.h,
        t=args.t,
        steps=args.steps,
    )
    lines = ["a,eps,region"]
    lines += [f"{a!r},{e!r},{region}" for a, e, region in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    if args.trials is not None:
        obj["trials"] = args.trials
    if args.master_seed is not None:
        obj["master_seed"] = args.master_seed
    config = ExperimentConfig.from_json_dict(obj)
    paths = run_to_files(config, args.out_dir, threads=_threads_from(args))
    print(_dump_json({"trials": paths[0], "summary": paths[1], "manifest": paths[2]}), end="")
    return EXIT_OK


def _cmd_audit(args) -> int:
    if args.mech == "stability":
        params = ModelParams.from_coefficients(args.n, args.h, args.a, args.b)
        budget = _budget_from(args, args.n)
        report = dp_audit(
            "stability", [], args.eps,
            params=params, budget=budget, label_space=args.label_space, mode=args.mode,
        )
    else:
        params = ModelParams.from_coefficients(args.n, args.h, args.a, args.b)
        family = []
        for i in range(args.samples):
            truth = sample_ground_truth(
                args.n, "balanced" if args.n % 2 == 0 else "uniform_iid",
                derive_seed(args.seed, i, 0),
            )
            family.append(sample_hypergraph(params, truth, derive_seed(args.seed, i, 1)))
        report = dp_audit(
            args.mech, family, args.eps,
            delta=args.delta or 0.0,
            params=params, label_space=args.label_space, mode=args.mode,
        )
    print(_dump_json(report.to_json_dict()), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdp",
        description="Differentially private community detection on h-uniform hypergraphs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a model instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--out", default="hypergraph.json")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("recover", help="run a non-private estimator")
    p.add_argument("--alg", choices=("ml", "spectral"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--truth")
    p.add_argument("--params", help="JSON file with n, h, a, b")
    p.add_argument("--label-space", choices=("balanced", "all"), default="balanced")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("privatize", help="run a privacy mechanism")
    p.add_argument("--mech", choices=("rr", "stability", "bayes", "expo"), required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="output path for the perturbed graph (rr)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", help="JSON file with n, h, a, b")
    p.add_argument("--estimator", choices=("ml", "spectral"), default="ml")
    p.add_argument("--label-space", choices=("balanced", "all"), default="balanced")
    p.add_argument("--d-mode", choices=("exact", "surrogate"), default="exact")
    p.add_argument("--acknowledge-noncertified", action="store_true")
    p.set_defaults(func=_cmd_privatize)

    p = sub.add_parser("threshold", help="evaluate a recovery threshold")
    p.add_argument("--mech", choices=("nonprivate", "rr", "stability", "bayes", "expo"), required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("regions", help="emit the (a, eps) region grid CSV")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--a-min", type=float, default=1.5)
    p.add_argument("--a-max", type=float, default=40.0)
    p.add_argument("--eps-min", type=float, default=0.25)
    p.add_argument("--eps-max", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_regions)

    p = sub.add_parser("experiment", help="run a Monte Carlo sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default="runs")
    p.add_argument("--threads", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--master-seed", type=int)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("audit", help="exact privacy audit")
    p.add_argument("--mech", choices=("rr", "stability", "bayes", "expo"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--a", type=float, default=4.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--label-space", choices=("balanced", "all"), default="balanced")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrivacySoundnessError as exc:
        print(f"privacy refusal: {exc}", file=sys.stderr)
        return EXIT_PRIVACY
    except (ValidationError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # numeric/runtime failures
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
