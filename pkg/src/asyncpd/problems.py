"""Objective families, Bregman prox machinery, stochastic oracles and data loading."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ParseError(ValueError):
    """Malformed data file; carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnsupportedProblemError(RuntimeError):
    """The objective lacks the structure a solver needs (e.g. an exact prox)."""


@dataclass(frozen=True)
class ProblemClassConstants:
    """Regularity constants of the objective class.

    ``mu`` strong convexity, ``lip_L`` smoothness, ``lip_M`` nonsmoothness,
    ``sigma`` oracle noise bound, ``growth_C`` quadratic growth of the
    prox-function (1 for the Euclidean one).
    """

    mu: float = 0.0
    lip_L: float = 0.0
    lip_M: float = 0.0
    sigma: float = 0.0
    growth_C: float = 1.0

    def __post_init__(self):
        for name in ("mu", "lip_L", "lip_M", "sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.growth_C < 1.0:
            raise ValueError("growth_C must be >= 1")


class EuclideanProx:
    """Distance generating function omega(x) = ||x||^2 / 2 and its Bregman divergence."""

    growth_C = 1.0

    def omega(self, x: np.ndarray) -> float:
        return 0.5 * float(x @ x)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return x

    def bregman(self, x: np.ndarray, u: np.ndarray) -> float:
        d = u - x
        return 0.5 * float(d @ d)


@dataclass
class AgentObjective:
    """One agent's private objective with deterministic and stochastic access.

    ``value``/``subgrad`` are full-batch; ``oracle(x, rng)`` returns one
    stochastic (sub)gradient sample.  ``project`` maps a point back onto the
    agent's constraint set (identity for the unconstrained default).
    ``exact_prox(w, eta, anchor)``, when available, solves
    ``argmin <w, x> + f(x) + eta * V(anchor, x)`` in closed form.
    """

    dim: int
    value: Callable[[np.ndarray], float]
    subgrad: Callable[[np.ndarray], np.ndarray]
    oracle: Callable[[np.ndarray, np.random.Generator], np.ndarray]
    constants: ProblemClassConstants
    project: Callable[[np.ndarray], np.ndarray] | None = None
    exact_prox: Callable[[np.ndarray, float, np.ndarray], np.ndarray] | None = None
    prox: EuclideanProx = field(default_factory=EuclideanProx)
    meta: dict = field(default_factory=dict)


def hinge_value(x: np.ndarray, v: float, u: np.ndarray) -> float:
    """max{0, 1 - v <x, u>}."""
    return max(0.0, 1.0 - v * float(x @ u))


def hinge_subgradient(x: np.ndarray, v: float, u: np.ndarray) -> np.ndarray:
    """Subgradient of the hinge loss; zero on the inactive side of the kink."""
    if v * float(x @ u) < 1.0:
        return -v * u
    return np.zeros_like(u)


def ball_projection(radius: float) -> Callable[[np.ndarray], np.ndarray]:
    """Euclidean projection onto the origin-centered ball of the given radius."""

    def project(x: np.ndarray) -> np.ndarray:
        n = float(np.linalg.norm(x))
        if n <= radius:
            return x
        return (radius / n) * x

    return project


def bregman_prox_step(
    prox: EuclideanProx,
    g: np.ndarray,
    anchor: np.ndarray,
    a_anchor: float,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Minimize ``<g, u> + a_anchor * V(anchor, u)`` (Euclidean closed form)."""
    if a_anchor <= 0:
        raise ValueError(f"anchor weight must be positive, got {a_anchor}")
    out = anchor - g / a_anchor
    return project(out) if project is not None else out


def bregman_prox_step2(
    prox: EuclideanProx,
    g: np.ndarray,
    anchor1: np.ndarray,
    a1: float,
    anchor2: np.ndarray,
    a2: float,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Minimize ``<g, u> + a1 * V(anchor1, u) + a2 * V(anchor2, u)``."""
    if a1 + a2 <= 0:
        raise ValueError("total anchor weight must be positive")
    out = (a1 * anchor1 + a2 * anchor2 - g) / (a1 + a2)
    return project(out) if project is not None else out


# ---------------------------------------------------------------------------
# Synthetic quadratics (closed-form optimum; the workhorse of the test suite)
# ---------------------------------------------------------------------------


def make_quadratic_problem(
    centers,
    weight: float,
    sigma: float = 0.0,
    radius: float | None = None,
) -> list[AgentObjective]:
    """Per-agent quadratics ``f_i(x) = (q/2) ||x - c_i||^2``.

    The exact-gradient oracle (``sigma=0``) or an isotropic-Gaussian noisy one
    (per-coordinate std ``sigma/sqrt(d)`` so the noise norm has second moment
    ``sigma^2``).  The centralized optimum is the mean of the centers.
    """
    if weight <= 0:
        raise ValueError(f"quadratic weight must be positive, got {weight}")
    centers = [np.asarray(c, dtype=float) for c in centers]
    d = centers[0].shape[0]
    if any(c.shape != (d,) for c in centers):
        raise ValueError("all centers must share one dimension")
    project = ball_projection(radius) if radius is not None else None
    consts = ProblemClassConstants(
        mu=weight, lip_L=weight, lip_M=0.0, sigma=sigma, growth_C=1.0
    )
    out = []
    noise_std = sigma / np.sqrt(d)
    for c in centers:
        ci = c  # bind per iteration

        def value(x, ci=ci):
            dlt = x - ci
            return 0.5 * weight * float(dlt @ dlt)

        def subgrad(x, ci=ci):
            return weight * (x - ci)

        if sigma == 0.0:

            def oracle(x, rng, ci=ci):
                return weight * (x - ci)

        else:

            def oracle(x, rng, ci=ci):
                return weight * (x - ci) + rng.normal(0.0, noise_std, size=d)

        def exact_prox(w, eta, anchor, ci=ci):
            # argmin <w,x> + (q/2)||x-c||^2 + (eta/2)||x-anchor||^2
            x = (weight * ci - w + eta * anchor) / (weight + eta)
            return project(x) if project is not None else x

        out.append(
            AgentObjective(
                dim=d,
                value=value,
                subgrad=subgrad,
                oracle=oracle,
                constants=consts,
                project=project,
                exact_prox=exact_prox,
                meta={"kind": "quadratic", "center": ci, "weight": weight},
            )
        )
    return out


# ---------------------------------------------------------------------------
# SVM instances over a partitioned dataset
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """Labeled samples plus a near-even partition over agents."""

    labels: np.ndarray  # (n,) entries in {-1, +1}
    features: np.ndarray  # (n, d)
    partition: list[np.ndarray]  # index arrays, one per agent

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def partition_evenly(n: int, m: int) -> list[np.ndarray]:
    """Contiguous near-even split of ``range(n)`` into ``m`` shards."""
    if n < m:
        raise ValueError(f"cannot split {n} samples over {m} agents")
    bounds = np.linspace(0, n, m + 1).round().astype(int)
    return [np.arange(bounds[i], bounds[i + 1]) for i in range(m)]


def load_libsvm(
    path,
    num_agents: int = 1,
    dim: int | None = None,
    subsample: int | None = None,
    seed: int = 0,
) -> Dataset:
    """Parse a LIBSVM sparse text file into a :class:`Dataset`.

    Lines look like ``label idx:val idx:val ...`` with 1-based indices.
    Labels in {0, 1} are remapped to {-1, +1} (0 -> -1).
    """
    rows: list[dict[int, float]] = []
    raw_labels: list[float] = []
    max_idx = 0
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            try:
                lab = float(toks[0])
            except ValueError as exc:
                raise ParseError(f"bad label {toks[0]!r}", line_no) from exc
            feats: dict[int, float] = {}
            for tok in toks[1:]:
                try:
                    idx_s, val_s = tok.split(":")
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError as exc:
                    raise ParseError(f"bad feature token {tok!r}", line_no) from exc
                if idx < 1:
                    raise ParseError(f"feature index {idx} is not 1-based", line_no)
                feats[idx - 1] = val
                max_idx = max(max_idx, idx)
            raw_labels.append(lab)
            rows.append(feats)
    if not rows:
        raise ParseError(f"no samples in {path}")
    label_set = set(raw_labels)
    if label_set <= {-1.0, 1.0}:
        labels = np.asarray(raw_labels)
    elif label_set <= {0.0, 1.0}:
        labels = np.asarray([1.0 if v == 1.0 else -1.0 for v in raw_labels])
    else:
        bad = sorted(label_set - {-1.0, 0.0, 1.0})
        raise ParseError(f"unknown label value(s) {bad}")
    d = dim if dim is not None else max_idx
    features = np.zeros((len(rows), d))
    for r, feats in enumerate(rows):
        for j, v in feats.items():
            if j >= d:
                raise ParseError(f"feature index {j + 1} exceeds dimension {d}")
            features[r, j] = v
    if subsample is not None and subsample < len(rows):
        rng = np.random.default_rng(np.random.SeedSequence([seed, len(rows)]))
        keep = np.sort(rng.choice(len(rows), size=subsample, replace=False))
        labels = labels[keep]
        features = features[keep]
    return Dataset(
        labels=labels,
        features=features,
        partition=partition_evenly(labels.shape[0], num_agents),
    )


def _estimate_sigma(oracle, subgrad, x0: np.ndarray, n: int = 1000, seed: int = 0) -> float:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    g_full = subgrad(x0)
    sq = 0.0
    for _ in range(n):
        g = oracle(x0, rng)
        dlt = g - g_full
        sq += float(dlt @ dlt)
    return float(np.sqrt(sq / n))


def make_svm_problem(
    data: Dataset,
    topo,
    reg: str = "l1",
    reg_weight: float | None = None,
    sigma_seed: int = 0,
) -> list[AgentObjective]:
    """Per-agent hinge-loss SVM objectives with an l1 or l2 regularizer.

    Agent ``i`` owns shard ``S_i``; its objective is the shard-mean hinge loss
    plus ``w_i ||x||_1`` (l1) or ``(w_i/2) ||x||_2^2`` (l2), where ``w_i``
    defaults to ``1/|S_i|``.  The stochastic oracle draws one shard sample
    uniformly and returns its hinge subgradient plus the exact regularizer
    subgradient.
    """
    if reg not in ("l1", "l2"):
        raise ValueError(f"unknown regularizer {reg!r}")
    if len(data.partition) != topo.m:
        raise ValueError(
            f"dataset partitioned over {len(data.partition)} agents, topology has {topo.m}"
        )
    d = data.dim
    shard_sizes = [len(idx) for idx in data.partition]
    if min(shard_sizes) == 0:
        raise ValueError("empty agent shard")
    weights = [reg_weight if reg_weight is not None else 1.0 / s for s in shard_sizes]

    feat_norms = np.linalg.norm(data.features, axis=1)
    lip_M = float(feat_norms.max()) + 1.0
    if reg == "l2":
        mu = min(weights)
        lip_L = max(weights)
    else:
        mu = 0.0
        lip_L = 0.0

    out = []
    for i, idx in enumerate(data.partition):
        labs = data.labels[idx]
        feats = data.features[idx]
        w_i = weights[i]
        n_i = len(idx)

        def value(x, labs=labs, feats=feats, w_i=w_i, n_i=n_i):
            margins = 1.0 - labs * (feats @ x)
            hinge = float(np.maximum(margins, 0.0).mean())
            if reg == "l1":
                return hinge + w_i * float(np.abs(x).sum())
            return hinge + 0.5 * w_i * float(x @ x)

        def reg_subgrad(x, w_i=w_i):
            if reg == "l1":
                return w_i * np.sign(x)
            return w_i * x

        def subgrad(x, labs=labs, feats=feats, w_i=w_i, n_i=n_i):
            margins = 1.0 - labs * (feats @ x)
            active = margins > 0.0
            g = np.zeros(d)
            if active.any():
                g = -(labs[active, None] * feats[active]).sum(axis=0) / n_i
            return g + reg_subgrad(x)

        def oracle(x, rng, labs=labs, feats=feats, n_i=n_i, reg_subgrad=reg_subgrad):
            s = int(rng.integers(n_i))
            return hinge_subgradient(x, labs[s], feats[s]) + reg_subgrad(x)

        obj = AgentObjective(
            dim=d,
            value=value,
            subgrad=subgrad,
            oracle=oracle,
            constants=ProblemClassConstants(mu=mu, lip_L=lip_L, lip_M=lip_M, sigma=0.0),
            meta={"kind": f"svm_{reg}", "shard_size": n_i, "reg_weight": w_i},
        )
        out.append(obj)

    sigma = max(
        _estimate_sigma(o.oracle, o.subgrad, np.zeros(d), seed=sigma_seed + i)
        for i, o in enumerate(out)
    )
    consts = ProblemClassConstants(
        mu=mu, lip_L=lip_L, lip_M=lip_M, sigma=sigma, growth_C=1.0
    )
    for o in out:
        o.constants = consts
    return out
