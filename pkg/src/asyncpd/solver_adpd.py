"""Doubly randomized asynchronous primal-dual updates with exact local prox steps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Topology, apply_laplacian_row, feasibility_residual
from .metrics import RunTrace
from .problems import UnsupportedProblemError
from .schedules import ADPD, OuterSchedule


def activation_rng(seed: int) -> np.random.Generator:
    """Stream driving the (i_k, j_k) draws; independent of oracle sampling."""
    return np.random.default_rng(np.random.SeedSequence([seed, 0]))


def oracle_rng(seed: int, k: int) -> np.random.Generator:
    """Per-outer-iteration oracle stream, so changing inner budgets never
    perturbs the activation sequence."""
    return np.random.default_rng(np.random.SeedSequence([seed, 1, k]))


@dataclass
class Lagged:
    """Per-agent vectors with a one-iteration lag.

    ``current`` holds the value after the last completed iteration;
    ``prev[i]`` holds agent i's value before its most recent change, which
    happened at iteration ``last_change[i]``.  The two-steps-back value needed
    by the extrapolation is ``prev[i]`` only when the agent changed on the
    immediately preceding iteration, else the agent sat still and it equals
    ``current[i]``.
    """

    current: np.ndarray
    prev: np.ndarray
    last_change: np.ndarray

    @staticmethod
    def from_value(x0: np.ndarray) -> "Lagged":
        return Lagged(
            current=np.array(x0, dtype=float),
            prev=np.array(x0, dtype=float),
            last_change=np.zeros(x0.shape[0], dtype=int),
        )

    def two_back(self, i: int, k: int) -> np.ndarray:
        if self.last_change[i] == k - 1:
            return self.prev[i]
        return self.current[i]

    def update(self, i: int, value: np.ndarray, k: int) -> None:
        self.prev[i] = self.current[i]
        self.current[i] = value
        self.last_change[i] = k


@dataclass
class NetworkState:
    """Mutable run state: primal lags, duals, ergodic accumulator, counters."""

    x: Lagged
    y: np.ndarray
    xbar_acc: np.ndarray
    theta_sum: float
    k: int = 0
    comm_rounds: int = 0
    prox_solves: int = 0
    grad_evals: int = 0
    messages: list = field(default_factory=lambda: [0])

    @staticmethod
    def initial(x0: np.ndarray, theta0: float) -> "NetworkState":
        x0 = np.array(x0, dtype=float)
        return NetworkState(
            x=Lagged.from_value(x0),
            y=np.zeros_like(x0),
            xbar_acc=theta0 * x0,
            theta_sum=theta0,
        )

    def xbar(self) -> np.ndarray:
        """Running ergodic average, normalized by the weight consumed so far."""
        return self.xbar_acc / self.theta_sum

    def fold(self, xs: np.ndarray, theta: float) -> None:
        self.xbar_acc += theta * xs
        self.theta_sum += theta


def draw_agents(rng: np.random.Generator, m: int) -> tuple[int, int]:
    """Independent uniform draws of the dual-update and primal-update agents."""
    return int(rng.integers(m)), int(rng.integers(m))


def adpd_step(
    state: NetworkState,
    topo: Topology,
    problems,
    sched: OuterSchedule,
    k: int,
    act_rng: np.random.Generator,
) -> tuple[int, int]:
    """One outer iteration; returns the activated pair (i_k, j_k)."""
    m = topo.m
    i_k, j_k = draw_agents(act_rng, m)
    alpha = sched.alpha_at(k)
    tau = sched.tau_at(k)
    eta = sched.eta_at(k)

    # gather: extrapolated primals over N_{i_k} only
    x = state.x
    v = np.zeros_like(x.current[i_k])
    for j, c in topo.lap_rows[i_k].items():
        xt = alpha * (x.current[j] - x.two_back(j, k)) + x.current[j]
        v += c * xt
    state.messages[0] += len(topo.neighbors[i_k])

    y_old_ik = state.y[i_k].copy()
    state.y[i_k] = y_old_ik + v / tau

    # gather: extrapolated duals over N_{j_k}; only agent i_k moved this step
    w = np.zeros_like(v)
    for j, c in topo.lap_rows[j_k].items():
        if j == i_k:
            yt = m * (state.y[j] - y_old_ik) + y_old_ik
        else:
            yt = state.y[j]
        w += c * yt
    state.messages[0] += len(topo.neighbors[j_k])

    obj = problems[j_k]
    if obj.exact_prox is None:
        raise UnsupportedProblemError(
            f"agent {j_k} objective has no exact prox; use the sliding solver"
        )
    x_new = obj.exact_prox(w, eta, x.current[j_k])
    x.update(j_k, x_new, k)

    state.comm_rounds += 2
    state.prox_solves += 1
    state.k = k
    state.fold(x.current, float(sched.theta[k]))
    return i_k, j_k


def run_loop(step, state, topo, problems, sched, seed, log_every=0, timing=False):
    """Drive ``step`` for k = 1..N, logging checkpoint rows into a RunTrace."""
    import time

    act = activation_rng(seed)
    trace = RunTrace(seed=seed)
    t0 = time.perf_counter()

    def log_row(k):
        xb = state.xbar()
        obj = sum(p.value(xb[i]) for i, p in enumerate(problems))
        feas = feasibility_residual(topo, xb)
        wall = time.perf_counter() - t0 if timing else 0.0
        trace.append(k, state.comm_rounds, state.grad_evals, obj, feas, wall)

    for k in range(1, sched.N + 1):
        step(state, topo, problems, sched, k, act)
        if (log_every and k % log_every == 0) or k == sched.N:
            log_row(k)
    if sched.N == 0:
        log_row(0)
    return trace


def adpd_run(
    topo: Topology,
    problems,
    sched: OuterSchedule,
    x0: np.ndarray,
    seed: int,
    log_every: int = 0,
    timing: bool = False,
) -> tuple[np.ndarray, RunTrace]:
    """Run N ADPD steps; returns the theta-weighted ergodic average and trace."""
    if sched.regime != ADPD:
        raise ValueError(f"schedule regime {sched.regime!r} is not the exact-prox one")
    state = NetworkState.initial(x0, float(sched.theta[0]))
    trace = run_loop(adpd_step, state, topo, problems, sched, seed, log_every, timing)
    return state.xbar(), trace
