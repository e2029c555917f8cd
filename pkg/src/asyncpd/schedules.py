"""Parameter sequences for the outer primal-dual loop and the sliding inner loop."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .problems import ProblemClassConstants

ADPD = "adpd"
AASDCS_CONVEX = "aasdcs_convex"
AASDCS_STRONG = "aasdcs_strongly_convex"

_REL_TOL = 1e-9


class ScheduleInfeasibleError(RuntimeError):
    """The requested parameters cannot satisfy the schedule's feasibility conditions."""


@dataclass(frozen=True)
class OuterSchedule:
    """Per-iteration outer-loop parameters, indexed k = 1..N (arrays hold [k-1]).

    ``theta_hat`` and ``theta`` have length N + 1 (index k = 0..N); ``theta``
    is derived from ``theta_hat`` by the telescoping weight recursion and both
    sum to one.  ``T`` is None for the exact-prox regime.  ``acs_mu`` is the
    strong-convexity modulus handed to the inner loop (0 in the convex regime
    even for strongly convex objectives, so schedule and inner loop match).
    """

    regime: str
    m: int
    d_max: int
    N: int
    alpha: np.ndarray
    tau: np.ndarray
    eta: np.ndarray
    theta_hat: np.ndarray
    theta: np.ndarray
    T: np.ndarray | None = None
    D: float | None = None
    acs_mu: float = 0.0
    consts: ProblemClassConstants | None = None

    def alpha_at(self, k: int) -> float:
        return float(self.alpha[k - 1])

    def tau_at(self, k: int) -> float:
        return float(self.tau[k - 1])

    def eta_at(self, k: int) -> float:
        return float(self.eta[k - 1])

    def T_at(self, k: int) -> int:
        if self.T is None:
            raise ValueError("schedule has no inner budget")
        return int(self.T[k - 1])

    def total_inner_steps(self) -> int:
        return 0 if self.T is None else int(self.T.sum())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["k", "alpha", "tau", "eta", "T", "theta_hat", "theta"])
            w.writerow([0, "", "", "", "", repr(self.theta_hat[0]), repr(self.theta[0])])
            for k in range(1, self.N + 1):
                w.writerow(
                    [
                        k,
                        repr(float(self.alpha[k - 1])),
                        repr(float(self.tau[k - 1])),
                        repr(float(self.eta[k - 1])),
                        "" if self.T is None else int(self.T[k - 1]),
                        repr(float(self.theta_hat[k])),
                        repr(float(self.theta[k])),
                    ]
                )


def theta_from_theta_hat(theta_hat: np.ndarray, m: int) -> np.ndarray:
    """Telescoping weight recursion mapping {theta_hat_k} to {theta_k}."""
    N = theta_hat.shape[0] - 1
    theta = np.empty_like(theta_hat)
    theta[0] = theta_hat[0] - (m - 1) * theta_hat[1]
    for k in range(1, N):
        theta[k] = m * theta_hat[k] - (m - 1) * theta_hat[k + 1]
    theta[N] = m * theta_hat[N]
    return theta


def _theta_hat_uniform(m: int, N: int) -> np.ndarray:
    th = np.full(N + 1, 1.0 / (N + m))
    th[0] = m / (N + m)
    return th


def _theta_hat_strong(m: int, N: int) -> np.ndarray:
    z = 6.0 * m**2 + N * (N + 6 * m + 1)
    th = np.array([2.0 * (k + 3 * m) / z for k in range(N + 1)])
    th[0] = 6.0 * m**2 / z
    return th


def adpd_schedule(m: int, d_max: int, N: int) -> OuterSchedule:
    """Constant exact-prox parameters: alpha = m, eta = tau = 2 m d_max."""
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if m < 2 or d_max < 1:
        raise ScheduleInfeasibleError(
            f"degenerate network (m={m}, d_max={d_max}): tau would not be positive"
        )
    theta_hat = _theta_hat_uniform(m, N)
    return OuterSchedule(
        regime=ADPD,
        m=m,
        d_max=d_max,
        N=N,
        alpha=np.full(N, float(m)),
        tau=np.full(N, 2.0 * m * d_max),
        eta=np.full(N, 2.0 * m * d_max),
        theta_hat=theta_hat,
        theta=theta_from_theta_hat(theta_hat, m),
    )


def aasdcs_convex_schedule(
    m: int,
    d_max: int,
    N: int,
    consts: ProblemClassConstants,
    D: float | None = None,
    T_override: int | None = None,
) -> OuterSchedule:
    """Convex-regime sliding parameters: alpha = 1, eta = 4 m d_max, tau = 2 d_max."""
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if d_max < 1 or m < 2:
        raise ValueError(f"degenerate network (m={m}, d_max={d_max})")
    if D is None:
        D = float(m**2 * d_max)
    CL = consts.growth_C + consts.lip_L
    if T_override is not None:
        T = T_override
    else:
        T = max(
            math.ceil((consts.lip_M**2 + consts.sigma**2) * N / (d_max * D)),
            math.ceil(math.sqrt(CL / (m * d_max))),
            1,
        )
    theta_hat = _theta_hat_uniform(m, N)
    return OuterSchedule(
        regime=AASDCS_CONVEX,
        m=m,
        d_max=d_max,
        N=N,
        alpha=np.ones(N),
        tau=np.full(N, 2.0 * d_max),
        eta=np.full(N, 4.0 * m * d_max),
        theta_hat=theta_hat,
        theta=theta_from_theta_hat(theta_hat, m),
        T=np.full(N, T, dtype=int),
        D=D,
        acs_mu=0.0,
        consts=consts,
    )


def aasdcs_strong_schedule(
    m: int,
    d_max: int,
    N: int,
    consts: ProblemClassConstants,
    D: float | None = None,
    T_override: int | None = None,
) -> OuterSchedule:
    """Strongly convex sliding parameters with growing eta and shrinking tau."""
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if d_max < 1 or m < 2:
        raise ValueError(f"degenerate network (m={m}, d_max={d_max})")
    mu = consts.mu
    if mu <= 0:
        raise ValueError("strongly convex schedule requires mu > 0")
    if D is None:
        D = float(m**3)
    CL = consts.growth_C + consts.lip_L
    alpha = np.empty(N)
    tau = np.empty(N)
    eta = np.empty(N)
    T = np.empty(N, dtype=int)
    for k in range(1, N + 1):
        alpha[k - 1] = (k + 3 * m - 1) / (k + 3 * m)
        tau[k - 1] = 32.0 * m * d_max**2 / ((k + 3 * m) * mu)
        if T_override is not None:
            Tk = T_override
        else:
            Tk = max(
                math.ceil(64.0 * m * (consts.lip_M**2 + consts.sigma**2) * N / (D * mu**2)),
                math.ceil(math.sqrt(4.0 * CL / ((k + 3 * m - 3) * mu))),
                1,
            )
        # raise T_k minimally until eta_k clears the proof's lower bound
        floor = (k + 3 * m + 1) * mu / 4.0
        while (k + 3 * m - 1) * mu / 2.0 - CL / (Tk * (Tk + 1)) < floor:
            Tk += 1
        T[k - 1] = Tk
        eta[k - 1] = (k + 3 * m - 1) * mu / 2.0 - CL / (Tk * (Tk + 1))
        if eta[k - 1] <= 0:
            raise ScheduleInfeasibleError(f"eta_{k} = {eta[k - 1]} is not positive")
    theta_hat = _theta_hat_strong(m, N)
    return OuterSchedule(
        regime=AASDCS_STRONG,
        m=m,
        d_max=d_max,
        N=N,
        alpha=alpha,
        tau=tau,
        eta=eta,
        theta_hat=theta_hat,
        theta=theta_from_theta_hat(theta_hat, m),
        T=T,
        D=D,
        acs_mu=mu,
        consts=consts,
    )


@dataclass(frozen=True)
class InnerSchedule:
    """Inner-loop combination and regularization weights, indexed t = 1..T."""

    T: int
    lam: np.ndarray
    beta: np.ndarray
    Lambda: np.ndarray


def inner_schedule(T: int, consts: ProblemClassConstants, eta: float) -> InnerSchedule:
    """lambda_t = 2/(t+1), beta_t = 4(C+L)/(t(t+1)), Lambda_t = (1-lambda_t)Lambda_{t-1}."""
    if T < 1:
        raise ValueError(f"need T >= 1, got {T}")
    t = np.arange(1, T + 1, dtype=float)
    lam = 2.0 / (t + 1.0)
    CL = consts.growth_C + consts.lip_L
    beta = 4.0 * CL / (t * (t + 1.0))
    Lambda = np.empty(T)
    Lambda[0] = 1.0
    for i in range(1, T):
        Lambda[i] = (1.0 - lam[i]) * Lambda[i - 1]
    return InnerSchedule(T=T, lam=lam, beta=beta, Lambda=Lambda)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ConditionResult:
    name: str
    ok: bool
    first_bad_k: int | None = None


@dataclass
class ValidationReport:
    regime: str
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions)

    def failed(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.ok]

    def __str__(self) -> str:
        lines = [f"schedule validation ({self.regime}):"]
        for c in self.conditions:
            status = "ok" if c.ok else f"FAIL at k={c.first_bad_k}"
            lines.append(f"  {c.name}: {status}")
        return "\n".join(lines)


def _check(name: str, pairs) -> ConditionResult:
    """pairs: iterable of (k, lhs, rhs) checked as lhs <= rhs with relative slack."""
    for k, lhs, rhs in pairs:
        if lhs > rhs + _REL_TOL * max(1.0, abs(lhs), abs(rhs)):
            return ConditionResult(name, False, k)
    return ConditionResult(name, True)


def _check_eq(name: str, pairs) -> ConditionResult:
    for k, lhs, rhs in pairs:
        if abs(lhs - rhs) > _REL_TOL * max(1.0, abs(lhs), abs(rhs)):
            return ConditionResult(name, False, k)
    return ConditionResult(name, True)


def validate_schedule(
    s: OuterSchedule, m: int, d_max: int, consts: ProblemClassConstants | None = None
) -> ValidationReport:
    """Check every regime-appropriate feasibility inequality of the schedule."""
    N = s.N
    th = s.theta_hat
    rep = ValidationReport(regime=s.regime)
    d2 = float(d_max) ** 2
    ks2 = range(2, N + 1)

    rep.conditions.append(
        _check("positivity", [(k, 0.0, s.tau[k - 1]) for k in range(1, N + 1)]
               + [(k, 0.0, s.eta[k - 1]) for k in range(1, N + 1)])
    )
    # strict positivity (the slack-tolerant _check accepts 0 <= 0)
    if any(s.tau <= 0) or any(s.eta <= 0):
        bad = int(np.argmax((s.tau <= 0) | (s.eta <= 0))) + 1
        rep.conditions[-1] = ConditionResult("positivity", False, bad)

    rep.conditions.append(
        _check_eq("theta_tau", [(k, th[k] * s.tau[k - 1], th[k - 1] * s.tau[k - 2]) for k in ks2])
    )
    if s.regime == ADPD:
        rep.conditions.append(
            _check("theta_eta", [(k, th[k] * s.eta[k - 1], th[k - 1] * s.eta[k - 2]) for k in ks2])
        )
        rep.conditions.append(
            _check_eq("alpha_theta", [(k, s.alpha[k - 1] * th[k], m * th[k - 1]) for k in ks2])
        )
        rep.conditions.append(
            _check(
                "eta_tau_alpha1",
                [(k, 4.0 * m * s.alpha[k - 1] * d2, s.eta[k - 2] * s.tau[k - 1]) for k in ks2],
            )
        )
        rep.conditions.append(
            _check(
                "eta_tau_alpha2",
                [(k, 4.0 * (m - 1) ** 2 * d2, s.eta[k - 1] * s.tau[k - 1]) for k in range(1, N + 1)],
            )
        )
        return rep

    if consts is None:
        consts = s.consts
    CL = consts.growth_C + consts.lip_L

    def gamma(k):  # (C+L)/(T_k(T_k+1)) + eta_k
        Tk = s.T[k - 1]
        return CL / (Tk * (Tk + 1.0)) + s.eta[k - 1]

    rep.conditions.append(
        _check_eq("alpha_htheta", [(k, s.alpha[k - 1] * th[k], th[k - 1]) for k in ks2])
    )
    rep.conditions.append(
        _check(
            "alpha_d_eta_tau",
            [(k, 8.0 * m * s.alpha[k - 1] * d2, s.eta[k - 2] * s.tau[k - 1]) for k in ks2],
        )
    )
    rep.conditions.append(
        _check(
            "m_d_eta_tau",
            [(k, 8.0 * (m - 1) ** 2 * d2, m * s.eta[k - 1] * s.tau[k - 1]) for k in range(1, N + 1)],
        )
    )
    if s.regime == AASDCS_CONVEX:
        rep.conditions.append(
            _check("theta_Tk_eta", [(k, th[k] * gamma(k), th[k - 1] * gamma(k - 1)) for k in ks2])
        )
    else:
        mu = consts.mu
        rep.conditions.append(
            _check(
                "theta_Tk_eta_s",
                [(k, th[k] * gamma(k), th[k - 1] * (gamma(k - 1) + mu)) for k in ks2],
            )
        )
        rep.conditions.append(
            _check(
                "eta_lower_bound",
                [(k, (k + 3 * m + 1) * mu / 4.0, s.eta[k - 1]) for k in range(1, N + 1)],
            )
        )
    return rep
