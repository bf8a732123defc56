"""
Sweep commands: exact grid, shot sweep, noisy-solver benchmark and the
analysis reports. Every sweep point becomes one CSV row; a point that raises
a CanoeLabError becomes a row carrying the error message.
"""

from dataclasses import asdict, dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import json
import logging
import math
import warnings

import numpy as np
import pandas as pd

from canoe_lab.analysis.complexity import ComplexityInputs, ComplexityMethod, complexity
from canoe_lab.analysis.error_rate import error_rate_bound
from canoe_lab.analysis.extrapolation import ShotCurve, extrapolate_shots
from canoe_lab.analysis.noise import NoiseKind, NoiseSpec, hamiltonian_cq_error, overlap_frobenius_error
from canoe_lab.analysis.perturbation import perturbative_energy_error
from canoe_lab.analysis.unresolved import unresolved_weight
from canoe_lab.estimators.bounds import amplitude_error_bound, hoeffding_epsilon
from canoe_lab.estimators.estimated_block import EstimatedBlock, inject_qq
from canoe_lab.estimators.implementations.histogram_estimator import HistogramEstimator
from canoe_lab.estimators.implementations.shadow_estimator import ShadowEstimator
from canoe_lab.exceptions import (
    CanoeLabError,
    DataError,
    ExtrapolationError,
    MissingDependencyError,
    ThresholdOrderingWarning,
)
from canoe_lab.experiments.config import ExperimentConfig
from canoe_lab.experiments.pool import run_tasks
from canoe_lab.experiments.records import provenance, read_csv, write_csv, write_manifest
from canoe_lab.experiments.system import DEFAULT_LIMIT_QUBITS, PreparedSystem, infinite_shot_block, prepare_system
from canoe_lab.operators.pauli import Determinant
from canoe_lab.solvers.dense_oracle import conditioning_metric, dense_ground_energy, dense_ground_state
from canoe_lab.solvers.hybrid_solver import SolverMode, SolverOutcome, solve

EXACT_GRID_CSV = "exact_grid.csv"
EXACT_MARGINAL_CSV = "exact_marginal.csv"
EXACT_WEIGHT_CSV = "exact_classical_weight.csv"
SAMPLE_CSV = "sample.csv"
BLOCKS_DIR = "blocks"
BENCH_CSV = "solver_bench.csv"
BENCH_SUMMARY_CSV = "solver_bench_summary.csv"
CURVE_COLUMNS = ("system", "n_qubit", "N_q", "shots", "abs_error")


# *****************************************************************************
@dataclass(frozen=True)
class RunOptions:
    # *****************************************************************************
    """
    Command-line options shared by every command.
    :param out_dir: Output directory; None uses the configured one.
    :param seed_base: Added to every configured seed.
    :param workers: Pool size; None means the available parallelism.
    """
    out_dir: Optional[Path] = None
    seed_base: int = 0
    workers: Optional[int] = None
    limit_qubits: int = DEFAULT_LIMIT_QUBITS

    def output_dir(self, cfg: ExperimentConfig) -> Path:
        return Path(self.out_dir) if self.out_dir is not None else Path(cfg.output_directory)

    def run_seed(self, seed: int) -> int:
        return (self.seed_base + seed) % (1 << 64)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "out_dir": None if self.out_dir is None else str(self.out_dir),
            "seed_base": self.seed_base,
            "workers": self.workers,
            "limit_qubits": self.limit_qubits,
        }


@dataclass
class CommandResult:
    command: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    outputs: List[Path] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def _outcome_columns(outcome: SolverOutcome) -> Dict[str, Any]:
    return {
        "E0": outcome.energy,
        "classical_weight": outcome.classical_weight,
        "classical_span_weight": outcome.classical_span_weight,
        "n_discarded": outcome.n_discarded,
        "converged": outcome.converged,
        "all_truncated": outcome.all_truncated,
        "failed": outcome.failed,
        "iterations": outcome.iterations,
        "residual": outcome.residual,
    }


def _failure(row: Dict[str, Any], err: CanoeLabError) -> Dict[str, Any]:
    logging.error(f"{row.get('system')} point failed: {err.message}")
    row.update({"converged": False, "failed": True, "message": err.message})
    return row


# ---------------------------------------------------------------------------- exact


def _exact_point(task: Tuple[ExperimentConfig, int, int, int, int]) -> Dict[str, Any]:
    cfg, limit_qubits, n_c, n_q, seed = task
    system = prepare_system(cfg, limit_qubits)
    solver_cfg = cfg.solver_config()
    row: Dict[str, Any] = {
        "system": system.name,
        "n_qubit": system.n_qubit,
        "N_c": n_c,
        "N_q": n_q,
        "mode": solver_cfg.mode.value,
        "rank_tol": solver_cfg.rank_tol,
        "E_space": system.space_energy,
    }
    try:
        blocks = system.blocks_for(n_c, n_q)
        outcome = solve(blocks, solver_cfg, seed)
        row.update(_outcome_columns(outcome))
        row["E_oracle"] = dense_ground_energy(blocks)
        row["energy_error"] = outcome.energy - system.space_energy
    except CanoeLabError as err:
        _failure(row, err)
    row.update(provenance(cfg, seed))
    return row


def _contour_crossing(n_classical: np.ndarray, errors: np.ndarray, threshold: float) -> float:
    """
    N_c at which the running-minimum error first reaches the threshold,
    interpolating log(error) linearly in N_c.
    """
    env = np.minimum.accumulate(np.abs(errors))
    below = np.flatnonzero(env <= threshold)
    if below.size == 0:
        return math.nan
    i = int(below[0])
    if i == 0:
        return float(n_classical[0])
    log_e = np.log(np.maximum(env, np.finfo(float).tiny))
    t = (math.log(threshold) - log_e[i - 1]) / (log_e[i] - log_e[i - 1])
    return float(n_classical[i - 1] + t * (n_classical[i] - n_classical[i - 1]))


def marginal_replacement(grid: pd.DataFrame, threshold: float) -> pd.DataFrame:
    """
    Per N_q, the classical-space size on the error contour at ``threshold``
    and the number of determinants each added quantum state replaces.
    :param grid: Rows with N_c, N_q and energy_error columns.
    :param threshold: Contour level (chemical accuracy by default).
    :return: Columns N_q, N_c_contour, delta_N_c_per_quantum_state.
    """
    rows: List[Dict[str, Any]] = []
    if "energy_error" not in grid.columns:
        return pd.DataFrame(rows, columns=["N_q", "N_c_contour", "delta_N_c_per_quantum_state"])
    usable = grid.dropna(subset=["energy_error"])
    previous: Optional[Tuple[int, float]] = None
    for n_q, group in usable.groupby("N_q", sort=True):
        ordered = group.sort_values("N_c")
        contour = _contour_crossing(ordered["N_c"].to_numpy(float), ordered["energy_error"].to_numpy(float), threshold)
        delta = math.nan
        if previous is not None and not (math.isnan(previous[1]) or math.isnan(contour)):
            delta = (previous[1] - contour) / (int(n_q) - previous[0])
        rows.append({"N_q": int(n_q), "N_c_contour": contour, "delta_N_c_per_quantum_state": delta})
        previous = (int(n_q), contour)
    return pd.DataFrame(rows, columns=["N_q", "N_c_contour", "delta_N_c_per_quantum_state"])


def classical_weight_grid(grid: pd.DataFrame) -> pd.DataFrame:
    """
    Sum of squared classical coefficients, one row per N_c and one column per N_q.
    """
    if "classical_weight" not in grid.columns:
        return pd.DataFrame()
    table = grid.pivot_table(index="N_c", columns="N_q", values="classical_weight", aggfunc="first")
    table.columns = [f"N_q={int(c)}" for c in table.columns]
    return table.reset_index()


def cmd_exact(cfg: ExperimentConfig, opts: RunOptions = RunOptions()) -> CommandResult:
    """
    Infinite-shot energies over the (N_c, N_q) grid with exact matrices, the
    marginal-replacement table and the classical-weight grid.
    """
    prepare_system(cfg, opts.limit_qubits)
    seed = opts.run_seed(cfg.seeds[0])
    grid_points = sorted(product(sorted(set(cfg.n_classical)), sorted(set(cfg.n_quantum))))
    tasks = [(cfg, opts.limit_qubits, n_c, n_q, seed) for n_c, n_q in grid_points]
    logging.info(f"Exact grid: {len(tasks)} points")
    rows = run_tasks(_exact_point, tasks, opts.workers)

    out = opts.output_dir(cfg)
    result = CommandResult("exact")
    grid = write_csv(rows, out / EXACT_GRID_CSV)
    marginal = marginal_replacement(grid, cfg.epsilon)
    write_csv(marginal, out / EXACT_MARGINAL_CSV)
    weights = classical_weight_grid(grid)
    write_csv(weights, out / EXACT_WEIGHT_CSV)
    result.tables = {"grid": grid, "marginal": marginal, "classical_weight": weights}
    result.outputs = [out / EXACT_GRID_CSV, out / EXACT_MARGINAL_CSV, out / EXACT_WEIGHT_CSV]
    return result


# ---------------------------------------------------------------------------- sample


def _estimate(cfg: ExperimentConfig, system: PreparedSystem, n_c: int, n_q: int, shots: int, seed: int) -> EstimatedBlock:
    basis = system.basis_for(n_c, n_q)
    if cfg.method == "shadow":
        reference = Determinant.from_string(cfg.shadow_reference) if cfg.shadow_reference else None
        return ShadowEstimator(shots, reference, cfg.shadow_groups).estimate(system.hamiltonian, basis, seed)
    return HistogramEstimator(shots, cfg.batch_size).estimate(system.hamiltonian, basis, seed)


def _block_path(blocks_dir: Path, system: str, n_c: int, n_q: int, shots: int, seed: int) -> Path:
    return blocks_dir / f"{system}_nc{n_c}_nq{n_q}_shots{shots}_seed{seed}.json"


def _sample_point(task: Tuple[ExperimentConfig, int, int, int, int, int, str]) -> Dict[str, Any]:
    cfg, limit_qubits, n_c, n_q, shots, seed, blocks_dir = task
    system = prepare_system(cfg, limit_qubits)
    solver_cfg = cfg.solver_config()
    row: Dict[str, Any] = {
        "system": system.name,
        "n_qubit": system.n_qubit,
        "N_c": n_c,
        "N_q": n_q,
        "method": cfg.method,
        "shots": shots,
        "mode": solver_cfg.mode.value,
        "rank_tol": solver_cfg.rank_tol,
    }
    try:
        exact = system.blocks_for(n_c, n_q)
        reference = infinite_shot_block(cfg, n_c, n_q, limit_qubits)
        block = reference if shots == 0 else _estimate(cfg, system, n_c, n_q, shots, seed)
        block = replace(block, metadata={**block.metadata, "system": system.name, "config_hash": cfg.config_hash})
        noisy = inject_qq(block, exact)
        outcome = solve(noisy, solver_cfg, seed)
        e_inf = solve(inject_qq(reference, exact), solver_cfg, seed).energy
        e_ref = dense_ground_energy(exact)
        row.update({
            "total_shots": block.total_shots,
            "dH_cq": hamiltonian_cq_error(block.H_cq_hat, reference.H_cq_hat),
            "dH_cq_exact": hamiltonian_cq_error(block.H_cq_hat, exact.H_cq),
            "dS_cq": float(np.linalg.norm(block.S_cq_hat - reference.S_cq_hat)),
            "dS_F": overlap_frobenius_error(noisy, exact),
            "E_ref": e_ref,
            "E_inf": e_inf,
            "abs_error": abs(outcome.energy - e_ref),
            "abs_error_inf": abs(outcome.energy - e_inf),
            "conditioning": conditioning_metric(noisy),
            "conditioning_exact": conditioning_metric(exact),
        })
        row.update(_outcome_columns(outcome))
        block.save(str(_block_path(Path(blocks_dir), system.name, n_c, n_q, shots, seed)))
    except CanoeLabError as err:
        _failure(row, err)
    row.update(provenance(cfg, seed))
    return row


def cmd_sample(cfg: ExperimentConfig, opts: RunOptions = RunOptions()) -> CommandResult:
    """
    Shot sweep at the largest configured basis: one row per (shots, seed)
    with the cq-block errors, the energy and the conditioning. Estimated
    blocks are kept as JSON for the analysis command.
    """
    system = prepare_system(cfg, opts.limit_qubits)
    n_c, n_q = system.basis.n_classical, system.basis.n_quantum
    out = opts.output_dir(cfg)
    blocks_dir = out / BLOCKS_DIR
    blocks_dir.mkdir(parents=True, exist_ok=True)
    tasks = [
        (cfg, opts.limit_qubits, n_c, n_q, shots, opts.run_seed(seed), str(blocks_dir))
        for shots in cfg.shots
        for seed in cfg.seeds
    ]
    logging.info(f"Shot sweep: {len(cfg.shots)} shot counts x {len(cfg.seeds)} seeds at N_c={n_c}, N_q={n_q}")
    rows = run_tasks(_sample_point, tasks, opts.workers)
    frame = write_csv(rows, out / SAMPLE_CSV)
    return CommandResult("sample", {"sample": frame}, [out / SAMPLE_CSV, blocks_dir])


# ---------------------------------------------------------------------------- solver bench


def _bench_point(task: Tuple[ExperimentConfig, int, str, float, int]) -> List[Dict[str, Any]]:
    cfg, limit_qubits, kind, value, seed = task
    system = prepare_system(cfg, limit_qubits)
    kind = NoiseKind(kind)
    if kind is NoiseKind.SAMPLED:
        spec = NoiseSpec.sampled(int(value), seed)
    else:
        spec = NoiseSpec.synthetic(float(value), seed, cfg.reference_shots)
    base: Dict[str, Any] = {
        "system": system.name,
        "n_qubit": system.n_qubit,
        "N_c": system.basis.n_classical,
        "N_q": system.basis.n_quantum,
        "noise_kind": kind.value,
        "noise": spec.label,
        "shots": spec.shots if kind is NoiseKind.SAMPLED else spec.reference_shots,
        "alpha": spec.alpha if kind is NoiseKind.SYNTHETIC_ALPHA else math.nan,
    }
    try:
        noisy, frob = spec.realize(system.hamiltonian, system.basis, system.exact, cfg.batch_size)
        e_true = dense_ground_energy(system.exact)
    except CanoeLabError as err:
        return [{**_failure(dict(base), err), **provenance(cfg, seed)}]

    rows: List[Dict[str, Any]] = []
    for mode in cfg.modes:
        rank_tols = cfg.rank_tols[:1] if SolverMode(mode) is SolverMode.PLAIN else cfg.rank_tols
        for rank_tol in rank_tols:
            row = {**base, "mode": mode, "rank_tol": rank_tol, "dS_F": frob, "E_true": e_true}
            try:
                outcome = solve(noisy, cfg.solver_config(mode, rank_tol), seed)
                row.update(_outcome_columns(outcome))
                row["abs_error"] = abs(outcome.energy - e_true) if not outcome.failed else math.nan
            except CanoeLabError as err:
                _failure(row, err)
            row["pseudo_inverse_failure"] = bool(mode == SolverMode.PSEUDO_INVERSE.value and row.get("failed"))
            row.update(provenance(cfg, seed))
            rows.append(row)
    return rows


def summarize_bench(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Median |E - E_true| over seeds per (noise point, mode, rank_tol) with
    failure and truncation rates.
    """
    keys = ["system", "noise_kind", "noise", "shots", "alpha", "mode", "rank_tol"]
    frame = frame.copy()
    for column in ("abs_error", "failed", "all_truncated", "converged", "pseudo_inverse_failure"):
        if column not in frame.columns:
            frame[column] = math.nan
    grouped = frame.groupby(keys, dropna=False, sort=True)
    summary = grouped.agg(
        median_abs_error=("abs_error", "median"),
        n_seeds=("abs_error", "size"),
        failed_fraction=("failed", lambda s: float(s.eq(True).mean())),
        all_truncated_fraction=("all_truncated", lambda s: float(s.eq(True).mean())),
        converged_fraction=("converged", lambda s: float(s.eq(True).mean())),
        pseudo_inverse_failure=("pseudo_inverse_failure", lambda s: bool(s.eq(True).any())),
    )
    return summary.reset_index()


def check_threshold_ordering(summary: pd.DataFrame) -> List[str]:
    """
    For the deflation mode, the most aggressive rank threshold is expected to
    give a median error no larger than the least aggressive one at every
    noise point. Violations are warned about and returned.
    """
    notes: List[str] = []
    deflation = summary[summary["mode"] == SolverMode.DEFLATION.value]
    for (noise_kind, noise), group in deflation.groupby(["noise_kind", "noise"], sort=True):
        if group["rank_tol"].nunique() < 2:
            continue
        loose = group.loc[group["rank_tol"].idxmax()]
        tight = group.loc[group["rank_tol"].idxmin()]
        if loose["median_abs_error"] > tight["median_abs_error"]:
            message = (
                f"{noise}: median error at rank_tol={loose['rank_tol']:g} ({loose['median_abs_error']:.3e}) "
                f"exceeds rank_tol={tight['rank_tol']:g} ({tight['median_abs_error']:.3e})"
            )
            logging.warning(message)
            warnings.warn(ThresholdOrderingWarning(message))
            notes.append(message)
    return notes


def cmd_solver_bench(cfg: ExperimentConfig, opts: RunOptions = RunOptions()) -> CommandResult:
    """
    Solve noisy pairs of the sampled and synthetic-alpha families with every
    configured mode and rank threshold.
    """
    prepare_system(cfg, opts.limit_qubits)
    points = [(NoiseKind.SAMPLED.value, float(shots)) for shots in cfg.shots]
    points += [(NoiseKind.SYNTHETIC_ALPHA.value, float(alpha)) for alpha in cfg.alphas]
    tasks = [
        (cfg, opts.limit_qubits, kind, value, opts.run_seed(seed))
        for kind, value in points
        for seed in cfg.seeds
    ]
    logging.info(f"Solver benchmark: {len(points)} noise points x {len(cfg.seeds)} seeds")
    rows = [row for batch in run_tasks(_bench_point, tasks, opts.workers) for row in batch]

    out = opts.output_dir(cfg)
    frame = write_csv(rows, out / BENCH_CSV)
    summary = summarize_bench(frame)
    write_csv(summary, out / BENCH_SUMMARY_CSV)
    notes = check_threshold_ordering(summary)
    return CommandResult("solver-bench", {"bench": frame, "summary": summary}, [out / BENCH_CSV, out / BENCH_SUMMARY_CSV], notes)


# ---------------------------------------------------------------------------- analyze


def complexity_table(cfg: ExperimentConfig, system: PreparedSystem) -> pd.DataFrame:
    h = system.hamiltonian
    rows: List[Dict[str, Any]] = []
    for n_c, n_q in product(sorted(set(cfg.n_classical)), sorted(set(cfg.n_quantum))):
        if n_c == 0 or n_q == 0:
            continue
        inputs = ComplexityInputs(
            N_c=n_c, N_q=n_q, m=min(cfg.batch_size, n_c), n_H=h.n_terms, n_qubit=h.n_qubit,
            norm_1=h.norm_1, norm_2=h.norm_2, epsilon=cfg.epsilon, delta=cfg.delta,
        )
        row = {"system": system.name, "n_qubit": h.n_qubit, "N_c": n_c, "N_q": n_q, "m": inputs.m, "B": inputs.B}
        for method in ComplexityMethod:
            row[f"shots_{method.value}"] = complexity(method, inputs)
        rows.append(row)
    return pd.DataFrame(rows)


def hoeffding_table(cfg: ExperimentConfig, system: PreparedSystem) -> pd.DataFrame:
    n_c, n_q = system.basis.n_classical, system.basis.n_quantum
    m = max(1, min(cfg.batch_size, n_c))
    n_batches = -(-n_c // m)
    rows: List[Dict[str, Any]] = []
    for shots in sorted(set(cfg.shots)):
        if shots == 0 or n_q == 0:
            continue
        eps = hoeffding_epsilon(system.n_qubit, n_q, n_batches, shots, cfg.delta)
        rows.append({
            "system": system.name, "N_c": n_c, "N_q": n_q, "m": m, "B": n_batches, "shots": shots,
            "delta": cfg.delta, "epsilon": eps, "amplitude_error_bound": amplitude_error_bound(m, eps),
        })
    return pd.DataFrame(rows)


def unresolved_table(cfg: ExperimentConfig, system: PreparedSystem, blocks_dir: Path) -> pd.DataFrame:
    """
    W_unres of every stored block of this configuration, averaged over seeds
    per (N_c, N_q, shots), next to the first-order energy shift of the sampled
    block and the shift of its dense re-solve.
    """
    rows: List[Dict[str, Any]] = []
    ground: Dict[Tuple[int, int], Tuple[float, np.ndarray]] = {}
    for path in sorted(blocks_dir.glob("*.json")):
        block = EstimatedBlock.load(str(path))
        if block.metadata.get("config_hash") != cfg.config_hash:
            logging.warning(f"Skipping {path.name}: produced by a different configuration")
            continue
        n_c, n_q = block.n_classical, block.n_quantum
        exact = system.blocks_for(n_c, n_q)
        if (n_c, n_q) not in ground:
            ground[(n_c, n_q)] = dense_ground_state(exact)
        e0, c0 = ground[(n_c, n_q)]
        noisy = exact if block.is_exact else inject_qq(block, exact)
        result = unresolved_weight(exact, noisy.S_cq, exact.S_qq, c0)
        first_order = perturbative_energy_error(
            noisy.hamiltonian_dense() - exact.hamiltonian_dense(),
            noisy.overlap_dense() - exact.overlap_dense(),
            e0,
            c0,
        )
        rows.append({
            "system": system.name, "N_c": n_c, "N_q": n_q, "shots": block.shots_per_histogram,
            "seed": block.seed, "weight": result.weight, "tau": result.tau, "rank": result.rank,
            "dE_first_order": first_order.shift, "dE_dense": dense_ground_energy(noisy) - e0,
        })
    if not rows:
        raise MissingDependencyError(f"no estimated blocks of this configuration in {blocks_dir}", "sample")
    frame = pd.DataFrame(rows)
    return (
        frame.groupby(["system", "N_c", "N_q", "shots"], sort=True)
        .agg(W_unres=("weight", "mean"), tau=("tau", "mean"), rank=("rank", "max"),
             dE_first_order=("dE_first_order", "mean"), dE_dense=("dE_dense", "mean"),
             n_seeds=("weight", "size"))
        .reset_index()
    )


def shot_curves(frame: pd.DataFrame, source: str) -> List[ShotCurve]:
    """
    Seed-averaged |E - E_ref| against shots, one curve per system.
    """
    missing = [c for c in CURVE_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"{source}: missing columns {', '.join(missing)}")
    usable = frame[(frame["shots"] > 0) & frame["abs_error"].notna()]
    curves: List[ShotCurve] = []
    for (name, n_qubit, n_q), group in usable.groupby(["system", "n_qubit", "N_q"], sort=True):
        means = group.groupby("shots", sort=True)["abs_error"].mean()
        curves.append(ShotCurve(str(name), int(n_qubit), int(n_q), means.index.to_numpy(float), means.to_numpy(float)))
    return curves


def error_rate_table(cfg: ExperimentConfig, system: PreparedSystem) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for n in sorted({system.n_qubit, cfg.target_qubits}):
        for scaling, gates in (("n^4", float(n) ** 4), ("n", float(n))):
            depth, p_max = error_rate_bound(gates, cfg.trotter_steps, cfg.target_nq, cfg.failure_delta)
            rows.append({
                "n_qubit": n, "scaling": scaling, "L": gates, "r": cfg.trotter_steps, "k": cfg.target_nq,
                "delta": cfg.failure_delta, "D_gate": depth, "p_max": p_max,
            })
    return pd.DataFrame(rows)


def cmd_analyze(cfg: ExperimentConfig, opts: RunOptions = RunOptions()) -> CommandResult:
    """
    Complexity and Hoeffding tables, seed-averaged W_unres, the shot
    extrapolation fit and the gate error-rate table.
    """
    out = opts.output_dir(cfg)
    sample_csv = out / SAMPLE_CSV
    blocks_dir = out / BLOCKS_DIR
    if not sample_csv.is_file() or not blocks_dir.is_dir():
        raise MissingDependencyError(f"shot-sweep outputs not found in {out}", "sample")
    system = prepare_system(cfg, opts.limit_qubits)
    result = CommandResult("analyze")

    tables = {
        "complexity": complexity_table(cfg, system),
        "hoeffding": hoeffding_table(cfg, system),
        "wunres": unresolved_table(cfg, system, blocks_dir),
        "error_rate": error_rate_table(cfg, system),
    }
    for name, table in tables.items():
        path = out / f"{name}.csv"
        write_csv(table, path)
        result.outputs.append(path)

    curves = shot_curves(read_csv(sample_csv), str(sample_csv))
    for curve_path in cfg.curves:
        curves += shot_curves(read_csv(Path(curve_path)), curve_path)
    fit_path = out / "extrapolation.json"
    try:
        fit = extrapolate_shots(curves, cfg.target_nq, cfg.target_qubits, cfg.epsilon)
        report: Dict[str, Any] = {
            "a": fit.a,
            "b": fit.b,
            "r_squared": fit.r_squared,
            "target_qubits": fit.target_qubits,
            "target_nq": fit.target_nq,
            "predicted_shots_per_histogram": fit.predicted_shots,
            "target_batches": cfg.target_batches,
            "predicted_total_block_shots": fit.total_block_shots(cfg.target_batches),
            "points": [asdict(p) for p in fit.points],
        }
        tables["extrapolation"] = pd.DataFrame([asdict(p) for p in fit.points])
    except ExtrapolationError as err:
        logging.warning(f"Shot extrapolation skipped: {err.message}")
        report = {"error": err.message, "n_curves": len(curves)}
        result.notes.append(err.message)
    fit_path.write_text(json.dumps(report, indent=2), encoding="utf-8")
    result.outputs.append(fit_path)
    result.tables = tables
    return result


COMMANDS = {
    "exact": cmd_exact,
    "sample": cmd_sample,
    "solver-bench": cmd_solver_bench,
    "analyze": cmd_analyze,
}


def run_command(name: str, cfg: ExperimentConfig, opts: RunOptions = RunOptions()) -> CommandResult:
    """
    Run one command and write its manifest.
    """
    result = COMMANDS[name](cfg, opts)
    out = opts.output_dir(cfg)
    summary = {key: len(table) for key, table in result.tables.items()}
    if result.notes:
        summary["notes"] = result.notes
    result.outputs.append(write_manifest(out, name, cfg, result.outputs, opts.as_dict(), summary))
    return result
