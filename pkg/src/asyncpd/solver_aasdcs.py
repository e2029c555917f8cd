"""Sliding variant: the outer randomized primal-dual loop with the accelerated
communication-sliding inner procedure replacing the exact local prox."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Topology
from .metrics import RunTrace
from .problems import AgentObjective, bregman_prox_step2
from .schedules import AASDCS_CONVEX, AASDCS_STRONG, InnerSchedule, OuterSchedule, inner_schedule
from .solver_adpd import Lagged, NetworkState, draw_agents, oracle_rng, run_loop

_COEF_TOL = 1e-9


@dataclass
class SlidingState(NetworkState):
    """Network state extended with the sliding sequence and its lag."""

    xu: Lagged = None
    seed: int = 0

    @staticmethod
    def initial(x0: np.ndarray, theta0: float, seed: int = 0) -> "SlidingState":
        x0 = np.array(x0, dtype=float)
        return SlidingState(
            x=Lagged.from_value(x0),
            y=np.zeros_like(x0),
            xbar_acc=theta0 * x0,
            theta_sum=theta0,
            xu=Lagged.from_value(x0),
            seed=seed,
        )


def acs_procedure(
    phi: AgentObjective,
    T: int,
    eta: float,
    mu: float,
    w: np.ndarray,
    x_anchor: np.ndarray,
    inner: InnerSchedule,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Inner loop approximately minimizing <w, u> + phi(u) + eta V(x_anchor, u).

    Returns the last iterate u^T and the averaged iterate; costs T oracle calls
    and no communication.
    """
    prox = phi.prox
    grad_anchor = prox.grad(x_anchor)
    u = np.array(x_anchor, dtype=float)
    u_avg = u.copy()
    me = mu + eta
    for t in range(1, T + 1):
        lam = inner.lam[t - 1]
        beta = inner.beta[t - 1]
        denom = beta + (1.0 - lam**2) * me
        c_avg = (1.0 - lam) * (me + beta) / denom
        c_last = lam * ((1.0 - lam) * me + beta) / denom
        if abs(c_avg + c_last - 1.0) > _COEF_TOL:
            raise AssertionError(
                f"combination weights {c_avg} + {c_last} do not form a convex combination"
            )
        u_hat = c_avg * u_avg + c_last * u
        G = phi.oracle(u_hat, rng)
        g = lam * (w + G + eta * (prox.grad(u_hat) - grad_anchor))
        u = bregman_prox_step2(
            prox,
            g,
            u_hat,
            lam * me,
            u,
            (1.0 - lam) * me + beta,
            phi.project,
        )
        u_avg = (1.0 - lam) * u_avg + lam * u
    return u, u_avg


def aasdcs_step(
    state: SlidingState,
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
    T_k = sched.T_at(k)

    x, xu = state.x, state.xu
    v = np.zeros_like(x.current[i_k])
    for j, c in topo.lap_rows[i_k].items():
        xt = (
            alpha
            * (m * xu.current[j] - (m - 1) * xu.two_back(j, k) - x.two_back(j, k))
            + x.current[j]
        )
        v += c * xt
    state.messages[0] += len(topo.neighbors[i_k])

    y_old_ik = state.y[i_k].copy()
    state.y[i_k] = y_old_ik + v / tau

    w = np.zeros_like(v)
    for j, c in topo.lap_rows[j_k].items():
        if j == i_k:
            yt = m * (state.y[j] - y_old_ik) + y_old_ik
        else:
            yt = state.y[j]
        w += c * yt
    state.messages[0] += len(topo.neighbors[j_k])

    consts = sched.consts if sched.consts is not None else problems[j_k].constants
    inner = inner_schedule(T_k, consts, eta)
    x_new, xu_new = acs_procedure(
        problems[j_k], T_k, eta, sched.acs_mu, w, x.current[j_k], inner, oracle_rng(state.seed, k)
    )
    x.update(j_k, x_new, k)
    xu.update(j_k, xu_new, k)

    state.comm_rounds += 2
    state.grad_evals += T_k
    state.k = k
    state.fold(xu.current, float(sched.theta[k]))
    return i_k, j_k


def aasdcs_run(
    topo: Topology,
    problems,
    sched: OuterSchedule,
    x0: np.ndarray,
    seed: int,
    log_every: int = 0,
    timing: bool = False,
) -> tuple[np.ndarray, RunTrace]:
    """Run N sliding steps; the ergodic average folds the averaged sequence."""
    if sched.regime not in (AASDCS_CONVEX, AASDCS_STRONG):
        raise ValueError(f"schedule regime {sched.regime!r} is not a sliding one")
    state = SlidingState.initial(x0, float(sched.theta[0]), seed)
    trace = run_loop(aasdcs_step, state, topo, problems, sched, seed, log_every, timing)
    return state.xbar(), trace
