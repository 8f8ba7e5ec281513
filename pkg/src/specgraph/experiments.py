"""Seeded Monte-Carlo harness.

Concentration measurement over (n, d) grids, the small-graph Laplacian
eigenvector study, phase sweeps over the SNR axis, and a bound scorecard.

Reproducibility scheme: every replicate derives its streams from
(master seed, grid index, replicate index) through SeedSequence, with one
stream for sampling and one for the eigensolver.  Replicates land in
preallocated slots keyed by those indices, and aggregation walks the slots in
a fixed order, so results are byte-identical for any thread count.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from .detect import misclassification_rate, sign_partition
from .models import ER, PlantedPartition, expected_matrix, max_expected_degree, sample
from .regularize import (
    choose_tau,
    degree_regularize,
    expected_regularized_laplacian,
    laplacian,
    regularized_laplacian,
    remove_high_degree,
)
from .spectral import NonConvergenceError, SymmetricOperator, top_eigs

CSV_COLUMNS = ("model", "n", "d", "a", "b", "snr", "regularization", "method",
               "statistic", "mean", "stderr", "R", "seed")

REGULARIZATIONS = ("none", "degree-cap", "vertex-removal", "tau-laplacian")

_SOLVER_TOL = 1e-6


def _fmt(x):
    if x is None or x == "":
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _rows_to_csv(rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(c, "")) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid description for measure_concentration.

    model: "er" (grid over d, edge probability d/n) or "pp" (grid over (a, b)).
    regularization: one of REGULARIZATIONS, applied before the deviation norm;
    centering always uses the expectation of the *original* model.
    """

    model: str = "er"
    n_grid: tuple = (1000,)
    d_grid: tuple = ()
    ab_grid: tuple = ()
    R: int = 20
    regularization: str = "none"
    tau_rho: float = 0.25
    cap_multiplier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("er", "pp"):
            raise ValueError("model must be 'er' or 'pp'")
        if self.R < 1:
            raise ValueError("R must be at least 1")
        if len(self.n_grid) == 0:
            raise ValueError("n grid must be nonempty")
        if self.model == "er" and len(self.d_grid) == 0:
            raise ValueError("er sweeps need a d grid")
        if self.model == "pp" and len(self.ab_grid) == 0:
            raise ValueError("pp sweeps need an (a, b) grid")
        if self.regularization not in REGULARIZATIONS:
            raise ValueError(f"regularization must be one of {REGULARIZATIONS}")


@dataclass
class ExperimentResult:
    records: list
    config: object = None

    def to_csv(self):
        return _rows_to_csv(self.records)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def _grid_points(config):
    pts = []
    if config.model == "er":
        for n in config.n_grid:
            for d in config.d_grid:
                pts.append({"model": "er", "n": int(n), "d": float(d),
                            "a": "", "b": "", "snr": "",
                            "spec": ER(float(d) / int(n))})
    else:
        for n in config.n_grid:
            for a, b in config.ab_grid:
                snr = 0.0 if a + b == 0 else (a - b) ** 2 / (a + b)
                pts.append({"model": "pp", "n": int(n), "d": (a + b) / 2.0,
                            "a": float(a), "b": float(b), "snr": snr,
                            "spec": PlantedPartition(float(a), float(b))})
    return pts


def _concentration_replicate(point, config, gi, r):
    """One sampled graph -> (deviation norm, tau used) or (nan, nan) on failure."""
    sample_seed = [config.seed, gi, r, 0]
    solver_seed = [config.seed, gi, r, 1]
    g, labels = sample(point["spec"], point["n"], sample_seed)
    E = expected_matrix(point["spec"], labels)
    tau = math.nan
    mode = config.regularization
    if mode == "tau-laplacian":
        tau = choose_tau(g, config.tau_rho) if g.m else 0.0
        if tau <= 0:
            return math.nan, tau
        op = regularized_laplacian(g, tau) - expected_regularized_laplacian(E, tau)
    else:
        if mode == "degree-cap":
            g, _ = degree_regularize(g, point["d"], config.cap_multiplier)
        elif mode == "vertex-removal":
            g = remove_high_degree(g, config.cap_multiplier * point["d"])
        op = SymmetricOperator.centered(g, E)
    try:
        pair = top_eigs(op, 1, which="largest-magnitude",
                        tol=_SOLVER_TOL, seed=solver_seed)[0]
    except NonConvergenceError:
        return math.nan, tau
    return abs(pair.value), tau


def _run_grid(points, config, replicate_fn, threads=None):
    """Fill norms[gi, r] in parallel; slot indexing keeps output order fixed."""
    R = config.R
    out = np.full((len(points), R), np.nan)
    taus = np.full((len(points), R), np.nan)

    def job(args):
        gi, r = args
        val, tau = replicate_fn(points[gi], config, gi, r)
        out[gi, r] = val
        taus[gi, r] = tau

    tasks = [(gi, r) for gi in range(len(points)) for r in range(R)]
    workers = threads or os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, tasks))
    else:
        for t in tasks:
            job(t)
    return out, taus


def _mean_stderr(values):
    ok = values[np.isfinite(values)]
    if len(ok) == 0:
        return "", "", 0
    mean = float(ok.mean())
    stderr = float(ok.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else 0.0
    return mean, stderr, len(ok)


def _applicable_bounds(point, config, tau_mean):
    """name -> bound value with all hidden constants at 1 (r = 1)."""
    n, d = point["n"], point["d"]
    vals = {"sqrt_d": math.sqrt(d) if d > 0 else math.nan}
    if config.regularization == "tau-laplacian":
        if isinstance(tau_mean, float) and tau_mean > 0:
            vals["thm54"] = bounds_mod.regularized_laplacian_bound(1.0, tau_mean, d)
        return vals
    vals["bai-yin"] = bounds_mod.bai_yin_limit(d)
    vals["bernstein"] = bounds_mod.bernstein_expectation(math.sqrt(d), 1.0, n)
    vals["bvh"] = bounds_mod.bvh_er(n, d / n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals["benaych"] = bounds_mod.benaych_bound(d, n)
    if config.regularization == "degree-cap":
        vals["thm51"] = bounds_mod.regularized_concentration_bound(1.0, d)
    return vals


def measure_concentration(config, threads=None):
    """Deviation norms ||A' - E A|| over the configured grid.

    A' is the regularized adjacency (or the regularized Laplacian pair, where
    the statistic becomes ||L(A_tau) - L(E A_tau)||).  Per grid point the
    result carries the mean/stderr of the norm, its ratio to sqrt(d), and the
    ratio to every applicable closed-form bound at C = 1.  Solver failures are
    dropped from the averages and counted in a solver_failures row.
    """
    points = _grid_points(config)
    norms, taus = _run_grid(points, config, _concentration_replicate, threads)
    records = []
    for gi, point in enumerate(points):
        base = {k: point[k] for k in ("model", "n", "d", "a", "b", "snr")}
        base["regularization"] = config.regularization
        base["method"] = ""
        base["seed"] = config.seed
        mean, stderr, used = _mean_stderr(norms[gi])
        records.append(dict(base, statistic="deviation_norm",
                            mean=mean, stderr=stderr, R=used))
        tau_mean = _mean_stderr(taus[gi])[0]
        if config.regularization == "tau-laplacian":
            records.append(dict(base, statistic="tau",
                                mean=tau_mean, stderr="", R=used))
        if mean != "":
            for name, bound in _applicable_bounds(point, config, tau_mean).items():
                if not (isinstance(bound, float) and math.isfinite(bound) and bound > 0):
                    continue
                records.append(dict(base, statistic=f"ratio_{name}",
                                    mean=mean / bound, stderr=stderr / bound,
                                    R=used))
        failures = int(np.sum(~np.isfinite(norms[gi])))
        if failures:
            records.append(dict(base, statistic="solver_failures",
                                mean=failures, stderr="", R=config.R))
    return ExperimentResult(records, config)


# ---------------------------------------------------------------------------
# Small-graph Laplacian eigenvector study
# ---------------------------------------------------------------------------

def participation_ratio(v):
    """(sum v^2)^2 / (n sum v^4): 1 for flat vectors, ~k/n for k-sparse ones."""
    v = np.asarray(v, dtype=np.float64)
    s2 = float((v ** 2).sum())
    s4 = float((v ** 4).sum())
    if s4 == 0:
        return 0.0
    return s2 * s2 / (len(v) * s4)


def _canonical_sign(v):
    peak = int(np.argmax(np.abs(v)))
    return v if v[peak] >= 0 else -v


@dataclass
class EigenvectorStudy:
    """Top-3 eigenvectors of L(A) and L(A_tau) on one planted-partition draw."""

    table: np.ndarray          # n x 6: unregularized v1..v3, regularized v1..v3
    mis_unregularized: float
    mis_regularized: float
    tau: float
    labels: np.ndarray

    def to_csv(self):
        header = "lap_v1,lap_v2,lap_v3,reglap_v1,reglap_v2,reglap_v3"
        lines = [header]
        for row in self.table:
            lines.append(",".join("%.17g" % x for x in row))
        return "\n".join(lines) + "\n"


def eigenvector_study(n=50, a=5.0, b=0.1, rho=0.1, seed=0):
    """Contrast plain and tau-regularized Laplacian eigenvectors on one draw.

    Nodes are ordered with the planted communities contiguous.  The
    misclassification pair scores the sign rule on the second eigenvector of
    each operator against the planted labels.
    """
    g, labels = sample(PlantedPartition(a, b), n, [seed, 0])
    tau = choose_tau(g, rho) if g.m else 0.0
    pairs_plain = top_eigs(laplacian(g), 3, which="largest-algebraic",
                           tol=1e-10, seed=[seed, 1], max_basis=n)
    if tau > 0:
        op_reg = regularized_laplacian(g, tau)
    else:
        op_reg = laplacian(g)
    pairs_reg = top_eigs(op_reg, 3, which="largest-algebraic",
                         tol=1e-10, seed=[seed, 2], max_basis=n)
    cols = [_canonical_sign(p.vector) for p in pairs_plain]
    cols += [_canonical_sign(p.vector) for p in pairs_reg]
    table = np.column_stack(cols)
    mis_plain = misclassification_rate(sign_partition(table[:, 1]), labels)
    mis_reg = misclassification_rate(sign_partition(table[:, 4]), labels)
    return EigenvectorStudy(table=table, mis_unregularized=mis_plain,
                            mis_regularized=mis_reg, tau=tau, labels=labels)


# ---------------------------------------------------------------------------
# Phase sweep
# ---------------------------------------------------------------------------

PHASE_METHODS = ("reg-adjacency", "reg-laplacian")


def _phase_replicate(point, config, gi, r):
    sample_seed = [config.seed, gi, r, 0]
    solver_seed = [config.seed, gi, r, 1]
    method = point["method"]
    g, labels = sample(point["spec"], point["n"], sample_seed)
    try:
        if method == "reg-adjacency":
            capped, _ = degree_regularize(g, point["a"], config.cap_multiplier)
            op = SymmetricOperator.from_graph(capped)
        else:
            tau = choose_tau(g, config.tau_rho) if g.m else 0.0
            if tau <= 0:
                return math.nan, math.nan
            op = regularized_laplacian(g, tau)
        pairs = top_eigs(op, 2, which="largest-algebraic",
                         tol=_SOLVER_TOL, seed=solver_seed)
    except NonConvergenceError:
        return math.nan, math.nan
    pred = sign_partition(pairs[1].vector)
    return 1.0 - misclassification_rate(pred, labels), math.nan


def phase_sweep(d, snr_grid, n=4000, R=50, method="both", tau_rho=0.25,
                cap_multiplier=2.0, seed=0, threads=None):
    """Mean detection accuracy along an SNR grid at fixed average degree d.

    Each SNR value s maps to a = d + sqrt(2 d s)/2, b = d - sqrt(2 d s)/2
    (so (a-b)^2/(a+b) = s with (a+b)/2 = d); infeasible points (b < 0) are
    recorded and skipped.  Methods: sign rule on the second-largest
    eigenvector of the degree-capped adjacency (cap 2a), and of the
    tau-regularized Laplacian with tau = tau_rho * mean degree.
    """
    if method == "both":
        methods = PHASE_METHODS
    elif method in PHASE_METHODS:
        methods = (method,)
    else:
        raise ValueError(f"method must be 'both' or one of {PHASE_METHODS}")
    if d <= 0:
        raise ValueError("d must be positive")
    config = ExperimentConfig(model="pp", n_grid=(n,), ab_grid=((d, d),), R=R,
                              tau_rho=tau_rho, cap_multiplier=cap_multiplier,
                              seed=seed)
    points = []
    infeasible = []
    for s in snr_grid:
        delta = math.sqrt(2.0 * d * s) / 2.0
        a, b = d + delta, d - delta
        for meth in methods:
            pt = {"model": "pp", "n": int(n), "d": float(d), "a": a, "b": b,
                  "snr": float(s), "method": meth,
                  "regularization": "degree-cap" if meth == "reg-adjacency"
                                    else "tau-laplacian"}
            if b < 0 or a > n:
                infeasible.append(pt)
            else:
                pt["spec"] = PlantedPartition(a, b)
                points.append(pt)
    acc, _ = _run_grid(points, config, _phase_replicate, threads)
    records = []
    for gi, pt in enumerate(points):
        mean, stderr, used = _mean_stderr(acc[gi])
        records.append({k: pt[k] for k in
                        ("model", "n", "d", "a", "b", "snr", "method",
                         "regularization")}
                       | {"statistic": "accuracy", "mean": mean,
                          "stderr": stderr, "R": used, "seed": seed})
    for pt in infeasible:
        records.append({k: pt[k] for k in
                        ("model", "n", "d", "a", "b", "snr", "method",
                         "regularization")}
                       | {"statistic": "infeasible", "mean": "", "stderr": "",
                          "R": 0, "seed": seed})
    records.sort(key=lambda rec: (rec["snr"], rec["method"]))
    return ExperimentResult(records, config)


# ---------------------------------------------------------------------------
# Bound scorecard
# ---------------------------------------------------------------------------

def _scorecard_replicate(point, config, gi, r):
    sample_seed = [config.seed, gi, r, 0]
    solver_seed = [config.seed, gi, r, 1]
    g, labels = sample(point["spec"], point["n"], sample_seed)
    E = expected_matrix(point["spec"], labels)
    op = SymmetricOperator.centered(g, E)
    try:
        norm = abs(top_eigs(op, 1, which="largest-magnitude",
                            tol=_SOLVER_TOL, seed=solver_seed)[0].value)
    except NonConvergenceError:
        return math.nan, math.nan
    return norm, bounds_mod.seginer_stat(g, E)


def bound_scorecard(n_grid, d_grid, R=20, seed=0, threads=None):
    """Empirical ER deviation norms against every closed-form bound (C = 1).

    Per grid point: the measured norm, the Seginer max-column statistic, each
    bound's value, and the empirical/bound ratio.
    """
    config = ExperimentConfig(model="er", n_grid=tuple(n_grid),
                              d_grid=tuple(d_grid), R=R, seed=seed)
    points = _grid_points(config)
    norms, segs = _run_grid(points, config, _scorecard_replicate, threads)
    records = []
    for gi, point in enumerate(points):
        base = {k: point[k] for k in ("model", "n", "d", "a", "b", "snr")}
        base["regularization"] = "none"
        base["method"] = ""
        base["seed"] = config.seed
        mean, stderr, used = _mean_stderr(norms[gi])
        seg_mean, seg_stderr, _ = _mean_stderr(segs[gi])
        records.append(dict(base, statistic="deviation_norm", mean=mean,
                            stderr=stderr, R=used))
        records.append(dict(base, statistic="seginer_stat", mean=seg_mean,
                            stderr=seg_stderr, R=used))
        if mean == "":
            continue
        n, dd = point["n"], point["d"]
        vals = {
            "bai-yin": bounds_mod.bai_yin_limit(dd),
            "bernstein": bounds_mod.bernstein_expectation(math.sqrt(dd), 1.0, n),
            "bvh": bounds_mod.bvh_er(n, dd / n),
        }
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            vals["benaych"] = bounds_mod.benaych_bound(dd, n)
        for name, bound in vals.items():
            records.append(dict(base, statistic=f"bound_{name}", mean=bound,
                                stderr="", R=""))
            if isinstance(bound, float) and math.isfinite(bound) and bound > 0:
                records.append(dict(base, statistic=f"ratio_{name}",
                                    mean=mean / bound, stderr=stderr / bound,
                                    R=used))
        if isinstance(seg_mean, float) and seg_mean > 0:
            records.append(dict(base, statistic="ratio_seginer",
                                mean=mean / seg_mean, stderr="", R=used))
    return ExperimentResult(records, config)
