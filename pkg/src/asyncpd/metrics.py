"""Reference solutions, optimality/feasibility measures and rate-slope fitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .graph import Topology, apply_laplacian_row, feasibility_residual


class ReferenceNotConvergedError(RuntimeError):
    """The centralized reference run exhausted its budget above tolerance."""


@dataclass(frozen=True)
class ReferenceSolution:
    """Centralized optimum used as the measurement baseline.

    ``certificate`` is 0 for closed forms; for the subgradient path it is a
    stall measure (relative objective decrease and averaged-iterate movement
    over the second half of the budget) rather than a gradient norm, which
    does not vanish at nonsmooth minimizers.
    """

    x_star: np.ndarray
    F_star: float
    method: str
    certificate: float


def centralized_reference(
    problems,
    method: str = "auto",
    budget: int = 50000,
    tol: float = 1e-4,
) -> ReferenceSolution:
    """Solve min_x sum_i f_i(x) over a single consensus variable."""
    if method == "auto":
        method = (
            "closed_form"
            if all(p.meta.get("kind") == "quadratic" for p in problems)
            else "long_run_subgradient"
        )
    if method == "closed_form":
        if not all(p.meta.get("kind") == "quadratic" for p in problems):
            raise ValueError("closed_form reference requires quadratic objectives")
        qs = np.array([p.meta["weight"] for p in problems])
        cs = np.stack([p.meta["center"] for p in problems])
        x_star = (qs[:, None] * cs).sum(axis=0) / qs.sum()
        F_star = sum(p.value(x_star) for p in problems)
        return ReferenceSolution(x_star, float(F_star), "closed_form", 0.0)
    if method != "long_run_subgradient":
        raise ValueError(f"unknown reference method {method!r}")

    d = problems[0].dim
    x = np.zeros(d)

    def total_value(z):
        return sum(p.value(z) for p in problems)

    def total_subgrad(z):
        g = np.zeros(d)
        for p in problems:
            g += p.subgrad(z)
        return g

    g0 = float(np.linalg.norm(total_subgrad(x)))
    step0 = 1.0 / max(g0, 1.0)
    avg = np.zeros(d)
    n_avg = 0
    half_avg = None
    half_val = None
    half = budget // 2
    for t in range(1, budget + 1):
        x = x - step0 / np.sqrt(t) * total_subgrad(x)
        if t > half:
            avg += x
            n_avg += 1
        if t == half + max(1, (budget - half) // 2):
            half_avg = avg / n_avg
            half_val = total_value(half_avg)
    x_bar = avg / n_avg
    F_bar = total_value(x_bar)
    move = float(np.linalg.norm(x_bar - half_avg)) / max(1.0, float(np.linalg.norm(x_bar)))
    decrease = abs(half_val - F_bar) / max(1.0, abs(F_bar))
    cert = max(move, decrease)
    if cert > tol:
        raise ReferenceNotConvergedError(
            f"stall certificate {cert:.3g} above tolerance {tol:.3g} after {budget} steps"
        )
    return ReferenceSolution(x_bar, float(F_bar), "long_run_subgradient", cert)


def primal_gap(problems, xs: np.ndarray, ref: ReferenceSolution) -> float:
    """Signed stacked-objective gap sum_i f_i(x_i) - F*; negative when infeasible."""
    return float(sum(p.value(xs[i]) for i, p in enumerate(problems)) - ref.F_star)


def _stacked_value(problems, xs: np.ndarray) -> float:
    return float(sum(p.value(xs[i]) for i, p in enumerate(problems)))


def _lap_inner(topo: Topology, xs: np.ndarray, ys: np.ndarray) -> float:
    total = 0.0
    for i in range(topo.m):
        total += float(apply_laplacian_row(topo, i, xs) @ ys[i])
    return total


def gap_function_Q(problems, topo: Topology, z, zbar) -> float:
    """Primal-dual gap F(x) + <Lx, ybar> - F(xbar) - <Lxbar, y>."""
    xs, ys = z
    xbars, ybars = zbar
    return (
        _stacked_value(problems, xs)
        + _lap_inner(topo, xs, ybars)
        - _stacked_value(problems, xbars)
        - _lap_inner(topo, xbars, ys)
    )


def perturbed_gap(
    problems, topo: Topology, v: np.ndarray, z, x_star: np.ndarray, Y_radius: float
) -> float:
    """sup over the dual ball of radius Y_radius: F(x) - F(x*) + R ||Lx - v||."""
    if Y_radius < 0:
        raise ValueError(f"dual ball radius must be nonnegative, got {Y_radius}")
    xs, _ = z
    m = topo.m
    star = np.tile(np.asarray(x_star, dtype=float), (m, 1))
    img = np.stack([apply_laplacian_row(topo, i, xs) for i in range(m)])
    resid = float(np.linalg.norm(img - np.asarray(v, dtype=float).reshape(img.shape)))
    return (
        _stacked_value(problems, xs)
        - _stacked_value(problems, star)
        + Y_radius * resid
    )


def rate_slope(points) -> float:
    """Least-squares slope of log(value) against log(N)."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 2:
        raise ValueError("need at least two points to fit a slope")
    if any(n <= 0 or v <= 0 for n, v in pts):
        raise ValueError("slope fit needs positive coordinates")
    logn = np.log([n for n, _ in pts])
    logv = np.log([v for _, v in pts])
    return float(np.polyfit(logn, logv, 1)[0])


TRACE_HEADER = ["k", "comm_rounds", "grad_evals", "objective", "feasibility", "wall_seconds", "seed"]


@dataclass
class RunTrace:
    """Per-checkpoint run log matching the CSV schema used by the harness."""

    seed: int
    k: list = field(default_factory=list)
    comm_rounds: list = field(default_factory=list)
    grad_evals: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    feasibility: list = field(default_factory=list)
    wall_seconds: list = field(default_factory=list)

    def append(self, k, comm_rounds, grad_evals, objective, feasibility, wall_seconds=0.0):
        self.k.append(int(k))
        self.comm_rounds.append(int(comm_rounds))
        self.grad_evals.append(int(grad_evals))
        self.objective.append(float(objective))
        self.feasibility.append(float(feasibility))
        self.wall_seconds.append(float(wall_seconds))

    def __len__(self):
        return len(self.k)

    def validate(self):
        for name in ("objective", "feasibility", "wall_seconds"):
            vals = getattr(self, name)
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"non-finite values in column {name}")
        if any(c != 2 * k for k, c in zip(self.k, self.comm_rounds)):
            raise ValueError("comm_rounds must equal 2k")
        if any(b < a for a, b in zip(self.grad_evals, self.grad_evals[1:])):
            raise ValueError("grad_evals must be nondecreasing")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(TRACE_HEADER)
            for i in range(len(self.k)):
                w.writerow(
                    [
                        self.k[i],
                        self.comm_rounds[i],
                        self.grad_evals[i],
                        repr(self.objective[i]),
                        repr(self.feasibility[i]),
                        repr(self.wall_seconds[i]),
                        self.seed,
                    ]
                )

    @staticmethod
    def from_csv(path) -> "RunTrace":
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader)
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header {header} in {path}")
            trace = None
            for row in reader:
                k, comm, grad = int(row[0]), int(row[1]), int(row[2])
                obj, feas, wall = float(row[3]), float(row[4]), float(row[5])
                seed = int(row[6])
                if trace is None:
                    trace = RunTrace(seed=seed)
                trace.append(k, comm, grad, obj, feas, wall)
        if trace is None:
            raise ValueError(f"no rows in trace file {path}")
        return trace


__all__ = [
    "ReferenceNotConvergedError",
    "ReferenceSolution",
    "RunTrace",
    "TRACE_HEADER",
    "centralized_reference",
    "feasibility_residual",
    "gap_function_Q",
    "perturbed_gap",
    "primal_gap",
    "rate_slope",
]
