"""
Command-line entry point: ``nisqsvm <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric or degenerate
failure.  ``QSVM_SEED`` in the environment replaces the seed of every run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import circuits, classify, data, kernelgen, metrics, pipeline, preprocess
from .qcore import DEFAULT_NOISE, NoiseModel, run_noisy
from .svg import scatter_svg

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SWEEP_LEVELS = (0.0, 0.01, 0.03, 0.1)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def dump_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _seed(args) -> int:
    env = os.environ.get("QSVM_SEED")
    if env is None:
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QSVM_SEED must be an integer, got {env!r}") from None


def _noise(args, seed: int) -> NoiseModel | None:
    if args.noise == "none":
        return None
    base = DEFAULT_NOISE
    try:
        return NoiseModel(
            base.depolarizing_prob_1q if args.p1q is None else args.p1q,
            base.depolarizing_prob_2q if args.p2q is None else args.p2q,
            base.readout_flip_prob if args.readout is None else args.readout,
            seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run_config(args) -> pipeline.RunConfig:
    seed = _seed(args)
    cd = None
    if args.c is not None or args.d is not None:
        if args.c is None or args.d is None:
            raise UsageError("--c and --d must be given together")
        cd = (args.c, args.d)
    try:
        return pipeline.RunConfig(
            dataset=args.dataset,
            angle_mode=args.angle_mode,
            circuit=getattr(args, "circuit", "hhl_optimized"),
            oracle=getattr(args, "oracle", "new"),
            shots=args.shots,
            noise=_noise(args, seed),
            gamma=args.gamma,
            seed=seed,
            cd=cd,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_preprocess(args) -> int:
    cfg = run_config(args)
    ds, train = pipeline.load_dataset(cfg.dataset)
    prep = pipeline.prepare(ds, train, cfg.angle_mode, cfg.cd)
    out = Path(args.output_dir)
    ids = ds.ids or tuple(str(i) for i in range(len(ds)))
    stages = {
        "raw": (ds.points, ds.feature_names, np.stack(train)),
        "mapped": (prep.mapped, ("v1", "v2"), prep.coefficients.apply(np.stack(train))),
        "normalized": (prep.unit, ("x1", "x2"), prep.train_unit),
    }
    for i, (name, (pts, cols, stars)) in enumerate(stages.items(), start=1):
        _write_csv(out / f"{i}_{name}.csv", ["id", *cols, "label"],
                   [(n, p[0], p[1], lab) for n, p, lab in zip(ids, pts, ds.labels)])
        _write(out / f"{i}_{name}.svg",
               scatter_svg(pts, ds.labels, title=f"{ds.name}: {name}", stars=stars,
                           unit_circle=(name == "normalized")))
    _write_csv(out / "4_angles.csv", ["id", "theta", "label"],
               [(n, t, lab) for n, t, lab in zip(ids, prep.angles, ds.labels)])
    shown = preprocess.unit_from_angle(prep.angles)
    _write(out / "4_angles.svg",
           scatter_svg(shown, ds.labels, title=f"{ds.name}: angles ({cfg.angle_mode})",
                       stars=preprocess.unit_from_angle(prep.train_angles), unit_circle=True))
    summary = {
        "dataset": ds.name,
        "n_points": len(ds),
        "coefficients": prep.coefficients.as_dict(),
        "train_angles": prep.train_angles,
        "files": sorted(p.name for p in out.iterdir()),
    }
    sys.stdout.write(dump_json(summary))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = run_config(args)
    result = pipeline.run(cfg)
    report = result.report()
    text = dump_json(report)
    if args.output_dir:
        out = Path(args.output_dir)
        _write(out / "report.json", text)
        prep = result.prepared
        _write(out / "predictions.csv",
               classify.report_csv(prep.unit, prep.dataset.labels, result.predicted))
        _write(out / "summary.json",
               dump_json(classify.report_summary(result.model, prep.dataset.labels, result.predicted)))
        _, direction = classify.decision_boundary(result.model)
        _write(out / "classification.svg",
               scatter_svg(preprocess.unit_from_angle(prep.angles), result.predicted,
                           title=f"{prep.dataset.name}: accuracy {result.accuracy:.3f}",
                           wrong=result.predicted != prep.dataset.labels,
                           lines=[(-1.2 * direction, 1.2 * direction)],
                           stars=prep.train_unit, unit_circle=True))
    sys.stdout.write(text)
    return EXIT_OK


def divergence_table(noise: NoiseModel, shots: int, runs: int, levels=SWEEP_LEVELS) -> dict:
    """JS(ideal, noisy) for both classification circuits plus a depolarizing sweep."""
    circs = {name: pipeline.solver_circuit(name) for name in pipeline.CIRCUITS}
    ideal = {name: pipeline.ideal_distribution(c) for name, c in circs.items()}

    def median_js(name, model):
        vals = []
        for r in range(runs):
            m = NoiseModel(model.depolarizing_prob_1q, model.depolarizing_prob_2q,
                           model.readout_flip_prob, seed=model.seed * 1000 + r)
            counts = run_noisy(circs[name], None, m, shots)
            vals.append(metrics.js_divergence(ideal[name], metrics.dist_from_counts(counts)))
        return float(np.median(vals))

    reports = {}
    for name, c in circs.items():
        m = NoiseModel(noise.depolarizing_prob_1q, noise.depolarizing_prob_2q,
                       noise.readout_flip_prob, seed=noise.seed * 1000)
        counts = run_noisy(c, None, m, shots)
        rep = metrics.divergence_report(c.label, shots, noise.as_dict(), ideal[name],
                                        metrics.dist_from_counts(counts))
        rep["js_median"] = median_js(name, noise)
        rep["depth"] = circuits.depth(c)
        reports[name] = rep
    sweep = []
    for level in levels:
        row = {"level": level}
        for name in circs:
            row[name] = median_js(name, NoiseModel.uniform(level, 0.0, noise.seed))
        sweep.append(row)
    return {"circuits": reports, "sweep": sweep, "runs": runs, "shots": shots}


def cmd_divergence(args) -> int:
    seed = _seed(args)
    noise = _noise(args, seed) or NoiseModel.ideal(seed)
    table = divergence_table(noise, args.shots, args.runs)
    sys.stdout.write(dump_json(table))
    if args.output_dir:
        _write(Path(args.output_dir) / "divergence.json", dump_json(table))
    js = {k: v["js_median"] for k, v in table["circuits"].items()}
    if not noise.is_ideal and not js["hhl_optimized"] < js["baseline"]:
        print("error: optimized circuit is not closer to ideal than the baseline", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def depth_rows(ms=(2, 4, 8)) -> list[dict]:
    rows = []
    for m in ms:
        built = circuits.depth(circuits.build_oracle_original([0.1] * m)) if m <= 4 else None
        q_orig, q_new = circuits.oracle_qubit_formula(m)
        rows.append({
            "M": m,
            "original_depth_formula": circuits.oracle_depth_formula(m),
            "original_depth_built": built,
            "original_qubits": q_orig,
            "new_depth": circuits.depth(circuits.build_oracle_new([0.1] * m)),
            "new_qubits": q_new,
        })
    return rows


def cmd_depth_table(args) -> int:
    rows = depth_rows()
    solvers = {name: circuits.depth(pipeline.solver_circuit(name)) for name in pipeline.CIRCUITS}
    if args.format == "json":
        sys.stdout.write(dump_json({"oracles": rows, "solvers": solvers}))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow(["" if v is None else v for v in r.values()])
        for name, d in solvers.items():
            sys.stdout.write(f"# {name} depth {d}\n")
    return EXIT_OK


def _dump_target(name: str, angles) -> circuits.Circuit:
    if name in pipeline.CIRCUITS:
        return pipeline.solver_circuit(name)
    if not angles:
        angles = [math.atan2(0.159, 0.987), math.atan2(0.935, 0.345)]
    if name == "oracle-original":
        return circuits.build_oracle_original(angles)
    return circuits.build_oracle_new(angles)


def cmd_circuit_dump(args) -> int:
    try:
        circ = _dump_target(args.circuit, args.angles)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        text = circuits.circuit_to_json(circ) + "\n"
    else:
        lines = [f"# {circ.label}: {circ.num_qubits} qubits, depth {circuits.depth(circ)}"]
        for i, layer in enumerate(circuits.layers(circ), start=1):
            ops = ", ".join(
                f"{g.tag}{tuple(g.targets)}" + (f"[{', '.join(f'{p:.6g}' for p in g.params)}]" if g.params else "")
                for g in layer)
            lines.append(f"{i:3d}: {ops}")
        if args.coupling:
            try:
                issues = circuits.validate_coupling(circ, circuits.IBMQX2.with_layout(circuits.IBMQX2_LAYOUT))
            except ValueError as exc:
                raise UsageError(f"no IBMQX2 layout for this circuit: {exc}") from None
            lines.append("# coupling: " + ("ok" if not issues else "; ".join(issues)))
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_run_flags(p, *, solver: bool = True) -> None:
    p.add_argument("--dataset", default="iris", help="iris, ocr, an Iris-format CSV or an OCR directory")
    p.add_argument("--angle-mode", default="quadrant_aware", choices=sorted(preprocess.ANGLE_MODES))
    if solver:
        p.add_argument("--circuit", default="hhl_optimized", choices=pipeline.CIRCUITS)
        p.add_argument("--oracle", default="new", choices=pipeline.ORACLES)
    p.add_argument("--c", type=float, help="fix the mapping coefficient c (needs --d)")
    p.add_argument("--d", type=float, help="fix the mapping coefficient d (needs --c)")
    p.add_argument("--gamma", type=float, default=kernelgen.DEFAULT_GAMMA)
    _add_noise_flags(p, default="none")


def _add_noise_flags(p, default: str) -> None:
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--noise", choices=("none", "default"), default=default)
    p.add_argument("--p1q", type=float, help="one-qubit depolarizing probability")
    p.add_argument("--p2q", type=float, help="two-qubit depolarizing probability")
    p.add_argument("--readout", type=float, help="readout flip probability")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nisqsvm", description="Two-point quantum LS-SVM on a statevector simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="write per-stage CSV and SVG files")
    _add_run_flags(p, solver=False)
    p.add_argument("--output-dir", default="preprocess_out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("run", help="end-to-end classification, JSON report on stdout")
    _add_run_flags(p)
    p.add_argument("--output-dir", help="also write report, predictions and plot here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("divergence", help="JS divergence from ideal for both circuits")
    _add_noise_flags(p, default="default")
    p.add_argument("--runs", type=int, default=5, help="runs per median")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("depth-table", help="oracle and solver depths")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_depth_table)

    p = sub.add_parser("circuit-dump", help="print a circuit as JSON or layered text")
    p.add_argument("circuit", choices=(*pipeline.CIRCUITS, "oracle-original", "oracle-new"))
    p.add_argument("--angles", type=float, nargs="*", help="oracle training angles")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--coupling", action="store_true", help="check against the IBMQX2 coupling map")
    p.set_defaults(func=cmd_circuit_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "shots", 1) <= 0:
        parser.error("--shots must be positive")
    if getattr(args, "runs", 1) <= 0:
        parser.error("--runs must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (data.DataError, preprocess.PreprocessError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (pipeline.PipelineError, kernelgen.KernelError, classify.DegenerateReadout, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
