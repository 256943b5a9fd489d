"""Command-line surface.

Subcommands: ``discover`` (data -> graph), ``simulate`` (sweep -> records +
aggregate), ``oracle`` (true DAG + tiers -> reference graph) and
``enumerate`` (class size / extendability of a graph).  Every run that
writes files also writes a manifest capturing the command, configuration,
seed, library version and input digests, which is enough to reproduce the
output byte for byte on one platform.

Exit codes: 2 malformed input, 3 tier/label mismatch, 4 CI degeneracy,
5 node count too large for enumeration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .citest import (
    CIDegeneracyError,
    CountingBackend,
    DataFormatError,
    Dataset,
    GaussBackend,
    SuffStat,
)
from .discovery import DiscoveryConfig, run_state
from .enumeration import (
    EnumerationLimitError,
    class_size,
    extendable,
    reference_tiered_mpdag,
)
from .graph import Dag, GraphFormatError, MixedGraph
from .simulate import LEVELS, SimConfig, aggregate_records, run_study
from .tiers import TieredOrdering, TierFileError, parse_tier_file

EXIT_BAD_INPUT = 2
EXIT_TIER_MISMATCH = 3
EXIT_CI_DEGENERATE = 4
EXIT_ENUM_LIMIT = 5


def _pkg_version() -> str:
    try:
        return version("tpcd")
    except PackageNotFoundError:
        return "unknown"


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_manifest(path: Path, command: str, config: dict, seed, inputs: dict[str, Path]) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": _pkg_version(),
        "inputs": {name: {"path": str(p), "sha256": _digest(p)} for name, p in inputs.items()},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_tiers(tier_path: str | None, labels, allow_missing: bool) -> TieredOrdering:
    if tier_path is None:
        return TieredOrdering.single_tier(len(labels))
    text = Path(tier_path).read_text(encoding="utf-8")
    return parse_tier_file(text, labels, allow_missing=allow_missing)


def _cmd_discover(args) -> int:
    data_path = Path(args.data)
    try:
        data = Dataset.from_csv_text(data_path.read_text(encoding="utf-8"))
        config = DiscoveryConfig(alpha=args.alpha, variant=args.variant,
                                 max_cond_size=args.max_cond_size)
    except (OSError, DataFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        tau = _load_tiers(args.tiers, data.labels, args.allow_missing_tiers)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except TierFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIER_MISMATCH
    try:
        suff = SuffStat.from_dataset(data)
        backend = CountingBackend(GaussBackend(suff, args.alpha))
        state = run_state(config, data.p, tau, backend)
    except CIDegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CI_DEGENERATE
    state.graph.labels = data.labels
    out = Path(args.out)
    out.write_text(state.graph.to_csv_text())
    if args.log:
        Path(args.log).write_text(json.dumps({
            "n_tests_by_round": state.test_log or {},
            "n_tests_total": backend.total(),
            "ambiguous": sorted(set(map(tuple, state.ambiguous))),
        }, indent=2, sort_keys=True) + "\n")
    inputs = {"data": data_path}
    if args.tiers:
        inputs["tiers"] = Path(args.tiers)
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"), "discover", {
        "alpha": args.alpha,
        "variant": args.variant,
        "max_cond_size": args.max_cond_size,
        "out": str(out),
        "log": args.log,
    }, None, inputs)
    return 0


def _cmd_simulate(args) -> int:
    try:
        config = SimConfig(
            p=args.p,
            density=args.density,
            n=args.n,
            alpha=args.alpha,
            reps=args.reps,
            seed=args.seed,
            levels=tuple(LEVELS) if args.scheme == "all" else (args.scheme,),
            algorithm=args.algorithm,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    jobs = args.jobs
    env_jobs = os.environ.get("TIERED_CD_JOBS")
    if env_jobs is not None:
        jobs = int(env_jobs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = list(run_study(config, jobs=jobs))
    with (out_dir / "records.jsonl").open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    agg = aggregate_records(records)
    with (out_dir / "aggregate.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "metric", "mean", "se", "count"])
        for level in sorted(agg):
            for metric in sorted(agg[level]):
                cell = agg[level][metric]
                writer.writerow([level, metric, cell["mean"], cell["se"], cell["count"]])
    _write_manifest(out_dir / "manifest.json", "simulate", {
        "p": config.p, "density": config.density, "n": config.n,
        "alpha": config.alpha, "reps": config.reps,
        "levels": list(config.levels), "algorithm": config.algorithm,
        "out": str(out_dir),
    }, config.seed, {})
    return 0


def _cmd_oracle(args) -> int:
    try:
        g = MixedGraph.from_csv_text(Path(args.dag).read_text(encoding="utf-8"))
        dag = Dag.from_graph(g)
    except (OSError, GraphFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        tau = _load_tiers(args.tiers, dag.labels, args.allow_missing_tiers)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except TierFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIER_MISMATCH
    try:
        ref = reference_tiered_mpdag(dag, tau, mode="rule")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    out = Path(args.out)
    out.write_text(ref.to_csv_text())
    inputs = {"dag": Path(args.dag)}
    if args.tiers:
        inputs["tiers"] = Path(args.tiers)
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"), "oracle",
                    {"out": str(out)}, None, inputs)
    return 0


def _cmd_enumerate(args) -> int:
    try:
        g = MixedGraph.from_csv_text(Path(args.graph).read_text(encoding="utf-8"))
    except (OSError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    tau = None
    if args.tiers:
        try:
            tau = _load_tiers(args.tiers, g.labels, args.allow_missing_tiers)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        except TierFileError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_TIER_MISMATCH
    try:
        size = class_size(g, tau)
        ext = extendable(g, tau)
    except EnumerationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUM_LIMIT
    print(json.dumps({"class_size": size, "extendable": ext, "version": _pkg_version()},
                     sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpcd", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_disc = sub.add_parser("discover", help="estimate a graph from a dataset CSV")
    p_disc.add_argument("data", help="dataset CSV (header row of labels)")
    p_disc.add_argument("--tiers", default=None, help="tier file: 'label,tier' lines")
    p_disc.add_argument("--alpha", type=float, default=0.01)
    p_disc.add_argument("--variant", default="tpc_stable",
                        choices=["tpc_stable", "pc_stable", "pc_basic", "naive_tpc"])
    p_disc.add_argument("--max-cond-size", type=int, default=None)
    p_disc.add_argument("--out", required=True, help="output graph CSV")
    p_disc.add_argument("--log", default=None, help="test-count log JSON")
    p_disc.add_argument("--allow-missing-tiers", action="store_true",
                        help="nodes absent from the tier file default to tier 1")
    p_disc.set_defaults(func=_cmd_discover)

    p_sim = sub.add_parser("simulate", help="run a simulation sweep")
    p_sim.add_argument("--p", type=int, required=True)
    p_sim.add_argument("--density", type=float, required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--alpha", type=float, default=0.01)
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True,
                       help="master seed (mandatory: no silent nondeterminism)")
    p_sim.add_argument("--scheme", default="all",
                       choices=["all", "t1", "t2", "t5", "t2a", "t2b", "t2c", "t2d"])
    p_sim.add_argument("--algorithm", default="tpc_stable",
                       choices=["tpc_stable", "naive_tpc"])
    p_sim.add_argument("--jobs", type=int, default=1,
                       help="worker count; never affects output content")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_orc = sub.add_parser("oracle", help="reference graph for a true DAG and tiers")
    p_orc.add_argument("--dag", required=True, help="true DAG as graph CSV")
    p_orc.add_argument("--tiers", default=None)
    p_orc.add_argument("--out", required=True)
    p_orc.add_argument("--allow-missing-tiers", action="store_true")
    p_orc.set_defaults(func=_cmd_oracle)

    p_enum = sub.add_parser("enumerate", help="class size and extendability of a graph")
    p_enum.add_argument("--graph", required=True, help="graph CSV")
    p_enum.add_argument("--tiers", default=None)
    p_enum.add_argument("--allow-missing-tiers", action="store_true")
    p_enum.set_defaults(func=_cmd_enumerate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
