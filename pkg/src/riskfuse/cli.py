"""Command-line interface.

    fuse run   --config c.json [--stage NAME] [--seed N] [--out DIR]
    fuse synth --out DIR [--seed N] [--n 800] [--copula gaussian] [--tau 0.43 | --rho R] ...
    fuse gof   --scores scores.csv --family gaussian [--B 1000] [--m M] [--seed N]

Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
The environment variable FUSE_THREADS caps bootstrap worker threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .copulas import FAMILIES, kendall_tau, pseudo_observations
from .errors import ConfigError, DataError, FuseError, NumericError
from .gof import parametric_bootstrap
from .pipeline import PipelineConfig, STAGES, run_pipeline
from .synth import SynthParams, write_synth


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuse", description="copula-based fusion of two ML risk scores")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the pipeline from a JSON config")
    run.add_argument("--config", required=True, help="path to the pipeline config JSON")
    run.add_argument("--stage", default=None, choices=STAGES, help="stop after this stage")
    run.add_argument("--seed", type=int, default=None, help="override cv and copula seeds")
    run.add_argument("--out", default=None, help="override the output directory")

    synth = sub.add_parser("synth", help="generate a synthetic cohort plus a matching config")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--n", type=int, default=800)
    synth.add_argument("--copula", default="gaussian", choices=FAMILIES)
    synth.add_argument("--tau", type=float, default=None, help="dependence strength as Kendall tau")
    synth.add_argument("--rho", type=float, default=None, help="gaussian correlation (alternative to --tau)")
    synth.add_argument("--genes", type=int, default=40)
    synth.add_argument("--hazard-ratio", type=float, default=4.0, help="joint-high vs joint-low hazard ratio")
    synth.add_argument("--single-ratio", type=float, default=2.0, help="single-high vs joint-low hazard ratio")

    gof = sub.add_parser("gof", help="bootstrap goodness-of-fit for a score table")
    gof.add_argument("--scores", required=True, help="CSV with p_clin and p_gen columns")
    gof.add_argument("--family", required=True, choices=FAMILIES)
    gof.add_argument("--B", type=int, default=1000)
    gof.add_argument("--m", type=int, default=None)
    gof.add_argument("--seed", type=int, default=0)
    gof.add_argument("--out", default=None, help="optional path for the JSON result")
    return parser


def _cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if args.seed is not None:
            raw.setdefault("cv", {})["seed"] = args.seed
            raw.setdefault("copula", {})["seed"] = args.seed + 1
        if args.out is not None:
            raw["output_dir"] = args.out
        config = PipelineConfig.from_dict(raw)
    except OSError as exc:
        raise ConfigError(f"[stage config] cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"[stage config] config is not valid JSON: {exc}") from exc
    except ConfigError as exc:
        raise ConfigError(f"[stage config] {exc}") from exc
    bundle = run_pipeline(config, stop_after=args.stage)
    print(f"wrote {len(bundle.written_files)} files to {config.output_dir}")
    if bundle.best_copula is not None:
        print(f"selected copula: {bundle.best_copula.family} (p={bundle.best_copula.p_value:.4f})")
    return 0


def _cmd_synth(args) -> int:
    tau = args.tau
    if tau is None and args.rho is not None:
        tau = float(2.0 / np.pi * np.arcsin(args.rho))
    if tau is None:
        tau = 0.43
    params = SynthParams(
        n=args.n,
        copula=args.copula,
        tau=tau,
        seed=args.seed,
        n_genes=args.genes,
        hazard_ratio_both=args.hazard_ratio,
        hazard_ratio_single=args.single_ratio,
    )
    write_synth(args.out, params)
    print(f"wrote cohort.csv, config.json, params.json to {args.out}")
    return 0


def _cmd_gof(args) -> int:
    try:
        with open(args.scores, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"p_clin", "p_gen"} <= set(reader.fieldnames):
                raise DataError(f"{args.scores}: needs columns p_clin and p_gen")
            p_clin, p_gen = [], []
            for row in reader:
                p_clin.append(float(row["p_clin"]))
                p_gen.append(float(row["p_gen"]))
    except OSError as exc:
        raise DataError(f"cannot read scores: {exc}") from exc
    u = pseudo_observations(np.asarray(p_clin))
    v = pseudo_observations(np.asarray(p_gen))
    result = parametric_bootstrap(u, v, args.family, n_boot=args.B, replicate_size=args.m, seed=args.seed)
    payload = dict(result.to_dict(), tau=kendall_tau(u, v))
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_gof(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except FuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
