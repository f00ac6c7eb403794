"""Command line front end.

Subcommands::

    taghort synth    --out DIR             write the two-region fixture and a manifest
    taghort explain  --manifest FILE       solve for one k
    taghort sweep    --manifest FILE       cross-validate k, then solve at the chosen k
    taghort baseline --manifest FILE       tree baseline at one k

Exit status is 0 on success (including a time limit reached with a usable
partition, flagged in report.json), 1 on unreadable or invalid input, 2 when
the solver times out without any feasible partition.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import pandas as pd

from . import __version__
from .core import CohortModel, ImportanceMatrix, TagMatrix
from .exceptions import SolverTimeoutError, TaghortError
from .io import (
    align,
    read_descriptors,
    read_importances,
    tags_frame,
    write_assignments,
    write_cohort_plot_data,
    write_cohorts,
    write_descriptors,
    write_importances,
    write_json,
    write_sweep,
    write_sweep_summary,
)
from .metrics import evaluate_model, squared_errors
from .model_selection import SweepConfig, sweep
from .preprocess import FeatureTable, TagDerivationConfig, TagEncoder
from .repid import fit_tree, tree_predict_importance
from .solver import SolverOptions, solve
from .synthetic import TwoRegionSpec, generate, region_tag_config

logger = logging.getLogger("taghort")


@dataclass
class RunManifest:
    importances: str
    descriptors: str
    tags: dict
    k: int | None = None
    solver: dict = field(default_factory=dict)
    sweep: dict | None = None
    baseline: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "taghort-out"
    base_dir: str = "."

    @classmethod
    def load(cls, path) -> "RunManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise TaghortError(f"cannot read manifest {path}: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)} - {"base_dir"}
        unknown = set(raw) - known
        if unknown:
            raise TaghortError(f"unknown manifest fields: {sorted(unknown)}")
        for required in ("importances", "descriptors", "tags"):
            if required not in raw:
                raise TaghortError(f"manifest is missing {required!r}")
        return cls(**raw, base_dir=str(path.parent))

    def resolve(self, p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def solver_options(self) -> SolverOptions:
        opts = dict(self.solver)
        opts.setdefault("rng_seed", self.seed)
        return SolverOptions(**opts)

    def sweep_config(self) -> SweepConfig:
        cfg = dict(self.sweep or {})
        return SweepConfig(
            k_values=cfg.get("k_values", (1, 2, 3, 4)),
            folds=cfg.get("folds", 5),
            rng_seed=cfg.get("seed", self.seed),
            solver=self.solver_options(),
            min_samples_leaf=self.baseline.get("min_samples_leaf", 1),
        )

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        return out


def _load_inputs(manifest: RunManifest):
    ids, W = read_importances(manifest.resolve(manifest.importances))
    desc_ids, data = read_descriptors(manifest.resolve(manifest.descriptors))
    data = align(ids, desc_ids, data)
    config = TagDerivationConfig.from_dict(manifest.tags)
    D = TagEncoder(config).fit_transform(FeatureTable(data))
    return ids, W, D


def _baseline_section(W: ImportanceMatrix, D: TagMatrix, k: int, min_samples_leaf: int) -> tuple:
    tree = fit_tree(W, D, k, min_samples_leaf)
    errors = squared_errors(W.values, tree_predict_importance(tree, D))
    section = {
        "method": "tree on tag columns (REPID-style approximation)",
        "k_requested": k,
        "k": tree.k,
        "early_stopped": tree.early_stopped,
        "leaf_sizes": tree.leaf_sizes.tolist(),
        "leaf_paths": {str(t): p for t, p in tree.leaf_paths().items()},
        "train_prediction_error": float(errors.sum()),
        "train_mean_prediction_error": float(errors.mean()),
    }
    return tree, section


def run(manifest: RunManifest, command: str) -> int:
    started = time.monotonic()
    out = Path(manifest.output_dir)
    if not out.is_absolute():
        out = Path.cwd() / out
    out.mkdir(parents=True, exist_ok=True)

    ids, W, D = _load_inputs(manifest)
    tags_frame(D, ids).to_csv(out / "tags.csv", index=False)
    report: dict = {"tool_version": __version__, "command": command, "manifest": manifest.as_dict()}

    if command == "baseline":
        k = manifest.k
        if k is None:
            raise TaghortError("baseline needs k (manifest field or --k)")
        tree, section = _baseline_section(W, D, k, manifest.baseline.get("min_samples_leaf", 1))
        write_assignments(out / "baseline_assignments.csv", ids, tree.partition)
        model = CohortModel.from_partition(W, D, tree.partition)
        write_cohorts(out / "baseline_cohorts.json", model, W,
                      {"leaf_paths": section["leaf_paths"]})
        report["baseline"] = section
        _finish(report, out, started)
        return 0

    sweep_report = None
    if command == "sweep" or (manifest.k is None and manifest.sweep is not None):
        config = manifest.sweep_config()
        sweep_report = sweep(W, D, config)
        write_sweep(out / "sweep.csv", sweep_report)
        write_sweep_summary(out / "sweep_summary.csv", sweep_report)
        report["sweep"] = {
            "k_values": list(config.k_values),
            "folds": config.folds,
            "summaries": [s.__dict__ for s in sweep_report.summaries],
        }
        k = sweep_report.selected_k
        report["selected_k"] = k
    else:
        k = manifest.k
        if k is None:
            raise TaghortError("explain needs k (manifest field or --k) or a sweep section")
        report["selected_k"] = k

    result = solve(W, D, k, manifest.solver_options())
    model = result.model
    write_assignments(out / "assignments.csv", ids, model.partition)
    write_cohorts(out / "cohorts.json", model, W)
    write_cohort_plot_data(out / "cohort_importance.csv", model, W)
    evaluation = evaluate_model(model, W, D)
    report.update({
        "k": k,
        "objectives": {
            "descriptiveness": model.descriptiveness,
            "phase1_descriptiveness": result.phase1_descriptiveness,
            "compactness": model.compactness,
        },
        "proven_optimal": result.proven_optimal,
        "solver_mode": result.mode,
        "nodes_explored": result.nodes_explored,
        "timed_out": result.timed_out,
        "coverage": {
            "train_fallback_rate": evaluation.fallback_rate,
            "train_prediction_error": evaluation.prediction_error,
            "train_mean_prediction_error": evaluation.mean_prediction_error,
        },
    })
    if result.timed_out:
        report["warning"] = "time limit reached; partition is the best found, not proven optimal"

    if manifest.baseline.get("enabled"):
        tree, section = _baseline_section(W, D, k, manifest.baseline.get("min_samples_leaf", 1))
        write_assignments(out / "baseline_assignments.csv", ids, tree.partition)
        if sweep_report is not None:
            repid_report = sweep(W, D, manifest.sweep_config(), method="repid")
            write_sweep(out / "baseline_sweep.csv", repid_report)
            section["cross_validated"] = [
                {"k": a.k, "taghort_mean_error": a.mean_error, "baseline_mean_error": b.mean_error}
                for a, b in zip(sweep_report.summaries, repid_report.summaries)
            ]
        report["baseline"] = section

    _finish(report, out, started)
    return 0


def _finish(report: dict, out: Path, started: float) -> None:
    report["timing"] = {
        "wall_time_seconds": time.monotonic() - started,
        "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    write_json(out / "report.json", report)


def run_synth(args) -> int:
    spec = TwoRegionSpec(
        n_per_region=args.n_per_region,
        noise=args.noise,
        explainer=args.explainer,
        rng_seed=args.seed,
    )
    table, W, regions = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = [f"s{i:04d}" for i in range(len(regions))]
    write_importances(out / "importances.csv", ids, W)
    write_descriptors(out / "descriptors.csv", ids, table.data)
    write_descriptors(out / "regions.csv", ids, pd.DataFrame({"region": regions}))
    manifest = {
        "importances": "importances.csv",
        "descriptors": "descriptors.csv",
        "tags": region_tag_config(spec).to_dict(),
        "k": 2,
        "solver": {"mode": "auto"},
        "sweep": {"k_values": [1, 2, 3, 4], "folds": 5},
        "baseline": {"enabled": False},
        "seed": args.seed,
        "output_dir": "results",
    }
    write_json(out / "manifest.json", manifest)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taghort", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("explain", "solve for a single number of cohorts"),
        ("sweep", "choose k by cross-validation, then solve"),
        ("baseline", "fit the decision-tree baseline"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--manifest", required=True)
        p.add_argument("--k", help="number of cohorts; for sweep a comma-separated list of candidates")
        p.add_argument("--folds", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--time-limit", type=float)
        p.add_argument("--mode", choices=["exact", "heuristic", "auto"])
        p.add_argument("--out")

    p = sub.add_parser("synth", help="write the two-region fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--n-per-region", type=int, default=100)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--explainer", choices=["shapley", "gradient"], default="shapley")
    p.add_argument("--seed", type=int, default=0)
    return parser


def apply_overrides(manifest: RunManifest, args) -> RunManifest:
    if args.k is not None:
        values = [int(v) for v in str(args.k).split(",")]
        if args.command == "sweep":
            manifest.sweep = {**(manifest.sweep or {}), "k_values": values}
        else:
            manifest.k = values[0]
    if args.folds is not None:
        manifest.sweep = {**(manifest.sweep or {}), "folds": args.folds}
    if args.seed is not None:
        manifest.seed = args.seed
    if args.time_limit is not None:
        manifest.solver = {**manifest.solver, "time_limit": args.time_limit}
    if args.mode is not None:
        manifest.solver = {**manifest.solver, "mode": args.mode}
    if args.out is not None:
        manifest.output_dir = str(Path(args.out).resolve())
    elif not Path(manifest.output_dir).is_absolute():
        manifest.output_dir = str(manifest.resolve(manifest.output_dir).resolve())
    return manifest


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "synth":
            return run_synth(args)
        manifest = apply_overrides(RunManifest.load(args.manifest), args)
        return run(manifest, args.command)
    except SolverTimeoutError as exc:
        logger.error("%s", exc)
        return 2
    except (TaghortError, ValueError, TypeError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
