"""Pipeline orchestration and the smi command line.

`smi run` drives the whole chain: load, validate, rescale, correlate,
eigendecompose, select, weight, score, rank, categorize, cross-tabulate,
and dump every stage artifact plus report.json. The normalize/pca/score
subcommands run single stages against earlier stages' dump files, and
chaining them reproduces the single-run outputs byte for byte (stage
handoff files carry full float precision; presentation dumps are rounded
to 6 decimals).

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    InequalityClass,
    inequality_classes,
    pillar_scores,
    pillar_weight_totals,
    scatter_data,
    scenario_table,
)
from .dataset import (
    DataMatrix,
    GiniTable,
    IndicatorRegistry,
    ValidationReport,
    load_gini,
    load_indicator_metadata,
    load_observations,
    validate_matrix,
    write_observations,
)
from .errors import DegenerateColumnError, InputError, NumericalError
from .normalize import NormalizedMatrix, load_normalized, normalize_matrix
from .pca import (
    Basis,
    ComponentSelection,
    LoadingConvention,
    Spectrum,
    correlation_matrix,
    eigendecompose,
    loading_matrix,
    select_components,
)
from .scoring import (
    CategoryThresholds,
    PercentileMethod,
    StateScore,
    composite_index,
    compute_weights,
    state_scores,
    thresholds_from_scores,
)

PRESENTATION_DECIMALS = 6
BOUNDARY_WARNING_MARGIN = 1e-3


@dataclass
class RunConfig:
    """Everything a run needs: file paths plus every methodological knob."""

    data: str
    meta: str
    out_dir: str
    gini: str | None = None
    eigen_threshold: float = 1.0
    variance_target: float = 0.85
    percentile_method: PercentileMethod = PercentileMethod.EXCLUSIVE
    low_percentile: float = 25.0
    high_percentile: float = 75.0
    gini_threshold: float = 0.30
    pca_basis: Basis = Basis.CORRELATION
    loading_convention: LoadingConvention = LoadingConvention.UNIT_EIGENVECTOR

    def validate(self) -> None:
        problems = []
        if not (0.0 < self.low_percentile < self.high_percentile < 100.0):
            problems.append(
                "percentiles must satisfy 0 < low < high < 100, got "
                f"low={self.low_percentile} high={self.high_percentile}")
        if self.eigen_threshold < 0.0:
            problems.append(f"eigen threshold must be non-negative, got {self.eigen_threshold}")
        if not (0.0 < self.variance_target <= 1.0):
            problems.append(f"variance target must lie in (0, 1], got {self.variance_target}")
        if not (0.0 <= self.gini_threshold <= 1.0):
            problems.append(f"gini threshold must lie in [0, 1], got {self.gini_threshold}")
        if problems:
            raise InputError(problems)

    def as_dict(self) -> dict:
        return {
            "data": self.data,
            "meta": self.meta,
            "gini": self.gini,
            "out_dir": self.out_dir,
            "eigen_threshold": self.eigen_threshold,
            "variance_target": self.variance_target,
            "percentile_method": self.percentile_method.value,
            "low_percentile": self.low_percentile,
            "high_percentile": self.high_percentile,
            "gini_threshold": self.gini_threshold,
            "pca_basis": self.pca_basis.value,
            "loading_convention": self.loading_convention.value,
        }


def _fixed(value: float) -> str:
    return f"{value:.{PRESENTATION_DECIMALS}f}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_correlation(path: Path, matrix: np.ndarray, ids) -> None:
    ids = list(ids)
    rows = [[ids[i], *(_fixed(float(v)) for v in matrix[i])] for i in range(len(ids))]
    _write_csv(path, ["indicator_id", *ids], rows)


def write_spectrum(path: Path, spectrum: Spectrum, selection: ComponentSelection) -> None:
    total = spectrum.total_variance
    chosen = set(selection.selected)
    rows = []
    for j, value in enumerate(spectrum.eigenvalues):
        rows.append([j + 1, repr(float(value)), repr(float(value) / total), int(j in chosen)])
    _write_csv(path, ["component", "eigenvalue", "explained_variance_ratio", "selected"], rows)


def read_spectrum(path: Path) -> tuple[list[float], list[int]]:
    """Recover (all eigenvalues, selected component indices) from spectrum.csv."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["component", "eigenvalue"]:
        raise InputError(f"{path}: not a spectrum.csv file")
    eigenvalues = []
    selected = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            eigenvalues.append(float(row[1]))
            if int(row[3]):
                selected.append(int(row[0]) - 1)
        except (ValueError, IndexError):
            raise InputError(f"{path}: malformed row {lineno}") from None
    return eigenvalues, selected


def write_loadings(path: Path, loadings: np.ndarray, ids) -> None:
    header = ["indicator_id", *(f"PC{j + 1}" for j in range(loadings.shape[1]))]
    rows = [[ind_id, *(repr(float(v)) for v in loadings[i])] for i, ind_id in enumerate(ids)]
    _write_csv(path, header, rows)


def read_loadings(path: Path, registry: IndicatorRegistry) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "indicator_id":
        raise InputError(f"{path}: not a loadings.csv file")
    body = [row for row in rows[1:] if row]
    if tuple(row[0] for row in body) != registry.ids:
        raise InputError(f"{path}: indicator rows do not match the registry")
    try:
        return np.array([[float(cell) for cell in row[1:]] for row in body], dtype=np.float64)
    except ValueError:
        raise InputError(f"{path}: non-numeric loading value") from None


def write_weights(path: Path, weights: np.ndarray, ids) -> None:
    _write_csv(path, ["indicator_id", "weight"],
               [[ind_id, _fixed(float(w))] for ind_id, w in zip(ids, weights)])


def write_scores(path: Path, scores: list[StateScore]) -> None:
    _write_csv(path, ["state", "smi", "rank", "category"],
               [[s.state, _fixed(s.smi), s.rank, s.category.value] for s in scores])


def scenario_dict(table, gini_threshold: float) -> dict:
    grid = {}
    for category in ("High", "Medium", "Low"):
        grid[category] = {}
        for ineq in (InequalityClass.LOW, InequalityClass.HIGH):
            key = next(k for k in table.cells if k[0].value == category and k[1] is ineq)
            grid[category][ineq.value] = list(table.cells[key])
    return {
        "gini_threshold": gini_threshold,
        "grid": grid,
        "unclassified": list(table.unclassified),
    }


def _validation_dict(report: ValidationReport) -> dict:
    return {
        "columns": [
            {"indicator_id": c.indicator_id, "min": c.min, "max": c.max, "constant": c.constant}
            for c in report.columns
        ],
        "fatal": report.fatal_ids,
    }


def run(config: RunConfig) -> dict:
    """Execute the full pipeline, write all stage dumps plus report.json, return the report."""
    started = time.monotonic()
    started_at = datetime.now(timezone.utc).isoformat()
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    registry = load_indicator_metadata(config.meta)
    matrix = load_observations(config.data, registry)
    gini: GiniTable = load_gini(config.gini) if config.gini else {}

    validation = validate_matrix(matrix)
    if not validation.ok:
        raise InputError([
            f"indicator {ind_id!r} is constant, min-max rescaling is undefined"
            for ind_id in validation.fatal_ids
        ])

    warnings: list[str] = []
    norm = normalize_matrix(matrix)
    corr = correlation_matrix(norm, basis=config.pca_basis)
    spectrum = eigendecompose(corr)
    selection = select_components(spectrum, config.eigen_threshold, config.variance_target)
    if selection.extended:
        warnings.append(
            f"variance target {config.variance_target} not met by the "
            f"{selection.threshold_count} components above eigenvalue "
            f"{config.eigen_threshold}; extended to {len(selection.selected)} components")
    loadings = loading_matrix(spectrum, selection, config.loading_convention)
    selected_eigenvalues = [float(spectrum.eigenvalues[j]) for j in selection.selected]
    weights = compute_weights(loadings, selected_eigenvalues)
    scores = composite_index(norm, weights)
    thresholds = thresholds_from_scores(
        scores, config.low_percentile, config.high_percentile, config.percentile_method)
    ranked = state_scores(scores, thresholds)

    for entry in ranked:
        for name, cut in (("low", thresholds.t_low), ("high", thresholds.t_high)):
            if abs(entry.smi - cut) < BOUNDARY_WARNING_MARGIN:
                warnings.append(
                    f"{entry.state} scores within {BOUNDARY_WARNING_MARGIN} of the "
                    f"{name} threshold ({entry.smi:.6f} vs {cut:.6f}); its category is sensitive "
                    "to score rounding")

    if not config.gini:
        warnings.append("no gini file given; every state is unclassified in the scenario table")
    ineq = inequality_classes(matrix.states, gini, config.gini_threshold)
    categories = {s.state: s.category for s in ranked}
    table = scenario_table(categories, ineq)
    if config.gini and table.unclassified:
        warnings.append(
            "no gini value for: " + ", ".join(table.unclassified))
    scatter = scatter_data(scores, gini)
    pillars = pillar_scores(norm, weights, registry)
    for pillar, total in pillar_weight_totals(weights, registry).items():
        if total <= 0.0:
            warnings.append(f"pillar {pillar!r} has zero total weight; no sub-scores emitted")

    write_observations(norm, out_dir / "normalized.csv")
    write_correlation(out_dir / "correlation.csv", corr, registry.ids)
    write_spectrum(out_dir / "spectrum.csv", spectrum, selection)
    write_loadings(out_dir / "loadings.csv", loadings, registry.ids)
    write_weights(out_dir / "weights.csv", weights, registry.ids)
    write_scores(out_dir / "scores.csv", ranked)
    scenarios = scenario_dict(table, config.gini_threshold)
    with open(out_dir / "scenarios.json", "w", encoding="utf-8") as fh:
        json.dump(scenarios, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    _write_csv(out_dir / "scatter.csv", ["state", "gini", "smi"],
               [[s, _fixed(g), _fixed(v)] for s, g, v in scatter.records])
    _write_csv(out_dir / "pillars.csv", ["state", "pillar", "score", "is_best"],
               [[p.state, p.pillar, _fixed(p.value), str(p.is_best).lower()] for p in pillars])

    total_variance = spectrum.total_variance
    report = {
        "config": config.as_dict(),
        "validation": _validation_dict(validation),
        "spectrum": {
            "components": [
                {
                    "component": j + 1,
                    "eigenvalue": float(value),
                    "explained_variance_ratio": float(value) / total_variance,
                    "selected": j in set(selection.selected),
                }
                for j, value in enumerate(spectrum.eigenvalues)
            ],
            "trace": total_variance,
            "sweeps": spectrum.sweeps,
            "off_diagonal_norm": spectrum.off_diagonal_norm,
        },
        "selection": {
            "eigen_threshold": config.eigen_threshold,
            "variance_target": config.variance_target,
            "threshold_count": selection.threshold_count,
            "selected_count": len(selection.selected),
            "explained_variance_ratio": selection.explained_variance_ratio,
            "extended": selection.extended,
        },
        "weights": {ind_id: float(w) for ind_id, w in zip(registry.ids, weights)},
        "thresholds": {
            "t_low": thresholds.t_low,
            "t_high": thresholds.t_high,
            "low_percentile": config.low_percentile,
            "high_percentile": config.high_percentile,
            "percentile_method": config.percentile_method.value,
        },
        "scores": [
            {"state": s.state, "smi": s.smi, "rank": s.rank, "category": s.category.value}
            for s in ranked
        ],
        "scenarios": scenarios,
        "warnings": warnings,
        "meta": {
            "engine": f"smi {__version__}",
            "started_at": started_at,
            "elapsed_seconds": time.monotonic() - started,
        },
    }
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return report


def _style(text: str, code: str) -> str:
    if os.environ.get("SMI_NO_COLOR") or not sys.stderr.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _print_errors(label: str, exc: Exception) -> None:
    messages = getattr(exc, "errors", None) or [str(exc)]
    for message in messages:
        print(_style(f"{label}: {message}", "31"), file=sys.stderr)


def cmd_run(args) -> int:
    config = RunConfig(
        data=args.data, meta=args.meta, gini=args.gini, out_dir=args.out,
        eigen_threshold=args.eigen_threshold, variance_target=args.variance_target,
        percentile_method=PercentileMethod(args.percentile_method),
        low_percentile=args.low_percentile, high_percentile=args.high_percentile,
        gini_threshold=args.gini_threshold, pca_basis=Basis(args.pca_basis),
        loading_convention=LoadingConvention(args.loading_convention),
    )
    report = run(config)
    n_scores = len(report["scores"])
    sel = report["selection"]
    print(f"scored {n_scores} states; "
          f"{sel['selected_count']} components keep "
          f"{sel['explained_variance_ratio']:.1%} of variance")
    print(f"thresholds: low {report['thresholds']['t_low']:.6f} / "
          f"high {report['thresholds']['t_high']:.6f}")
    for warning in report["warnings"]:
        print(_style(f"warning: {warning}", "33"), file=sys.stderr)
    print(f"wrote {Path(args.out) / 'report.json'}")
    return 0


def cmd_normalize(args) -> int:
    registry = load_indicator_metadata(args.meta)
    matrix = load_observations(args.data, registry)
    validation = validate_matrix(matrix)
    if not validation.ok:
        raise InputError([
            f"indicator {ind_id!r} is constant, min-max rescaling is undefined"
            for ind_id in validation.fatal_ids
        ])
    norm = normalize_matrix(matrix)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_observations(norm, out_dir / "normalized.csv")
    print(f"wrote {out_dir / 'normalized.csv'} "
          f"({norm.n_states} states x {norm.n_indicators} indicators)")
    return 0


def cmd_pca(args) -> int:
    registry = load_indicator_metadata(args.meta)
    norm = load_normalized(args.normalized, registry)
    corr = correlation_matrix(norm, basis=Basis(args.pca_basis))
    spectrum = eigendecompose(corr)
    selection = select_components(spectrum, args.eigen_threshold, args.variance_target)
    loadings = loading_matrix(spectrum, selection, LoadingConvention(args.loading_convention))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_correlation(out_dir / "correlation.csv", corr, registry.ids)
    write_spectrum(out_dir / "spectrum.csv", spectrum, selection)
    write_loadings(out_dir / "loadings.csv", loadings, registry.ids)
    print(f"selected {len(selection.selected)} of {len(spectrum.eigenvalues)} components "
          f"({selection.explained_variance_ratio:.1%} of variance)")
    return 0


def cmd_score(args) -> int:
    registry = load_indicator_metadata(args.meta)
    norm = load_normalized(args.normalized, registry)
    loadings = read_loadings(Path(args.loadings), registry)
    eigenvalues, selected = read_spectrum(Path(args.spectrum))
    if len(selected) != loadings.shape[1]:
        raise InputError(
            f"{loadings.shape[1]} loading columns but {len(selected)} selected components")
    weights = compute_weights(loadings, [eigenvalues[j] for j in selected])
    scores = composite_index(norm, weights)
    thresholds = thresholds_from_scores(
        scores, args.low_percentile, args.high_percentile,
        PercentileMethod(args.percentile_method))
    ranked = state_scores(scores, thresholds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_weights(out_dir / "weights.csv", weights, registry.ids)
    write_scores(out_dir / "scores.csv", ranked)
    print(f"scored {len(ranked)} states; thresholds low {thresholds.t_low:.6f} / "
          f"high {thresholds.t_high:.6f}")
    return 0


def _add_pca_flags(parser) -> None:
    parser.add_argument("--pca-basis", choices=[b.value for b in Basis],
                        default=Basis.CORRELATION.value,
                        help="matrix handed to the eigensolver (default correlation)")
    parser.add_argument("--eigen-threshold", type=float, default=1.0,
                        help="keep components with eigenvalue above this (default 1.0)")
    parser.add_argument("--variance-target", type=float, default=0.85,
                        help="minimum explained-variance ratio; extends the selection if unmet")
    parser.add_argument("--loading-convention",
                        choices=[c.value for c in LoadingConvention],
                        default=LoadingConvention.UNIT_EIGENVECTOR.value,
                        help="unit eigenvector entries or sqrt-eigenvalue scaled columns")


def _add_score_flags(parser) -> None:
    parser.add_argument("--percentile-method",
                        choices=[m.value for m in PercentileMethod],
                        default=PercentileMethod.EXCLUSIVE.value,
                        help="sample percentile estimator for the category cutoffs")
    parser.add_argument("--low-percentile", type=float, default=25.0)
    parser.add_argument("--high-percentile", type=float, default=75.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smi",
        description="Composite social-mobility index: rescale indicators, weight them by "
                    "principal components, score and categorize states, cross-tabulate "
                    "against inequality.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="full pipeline from raw observations to report.json")
    p_run.add_argument("--data", required=True, help="observations.csv")
    p_run.add_argument("--meta", required=True, help="indicators.csv")
    p_run.add_argument("--gini", default=None, help="gini.csv (optional)")
    p_run.add_argument("--out", required=True, help="output directory")
    _add_pca_flags(p_run)
    _add_score_flags(p_run)
    p_run.add_argument("--gini-threshold", type=float, default=0.30,
                       help="gini at or above this counts as high inequality (default 0.30)")
    p_run.set_defaults(func=cmd_run)

    p_norm = sub.add_parser("normalize", help="validate and min-max rescale observations")
    p_norm.add_argument("--data", required=True)
    p_norm.add_argument("--meta", required=True)
    p_norm.add_argument("--out", required=True)
    p_norm.set_defaults(func=cmd_normalize)

    p_pca = sub.add_parser("pca", help="correlation, eigendecomposition, component selection")
    p_pca.add_argument("--normalized", required=True, help="normalized.csv from the normalize stage")
    p_pca.add_argument("--meta", required=True)
    p_pca.add_argument("--out", required=True)
    _add_pca_flags(p_pca)
    p_pca.set_defaults(func=cmd_pca)

    p_score = sub.add_parser("score", help="weights, composite index, ranks, categories")
    p_score.add_argument("--normalized", required=True)
    p_score.add_argument("--meta", required=True)
    p_score.add_argument("--loadings", required=True, help="loadings.csv from the pca stage")
    p_score.add_argument("--spectrum", required=True, help="spectrum.csv from the pca stage")
    p_score.add_argument("--out", required=True)
    _add_score_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DegenerateColumnError) as exc:
        _print_errors("error", exc)
        return 1
    except NumericalError as exc:
        _print_errors("numerical failure", exc)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())
