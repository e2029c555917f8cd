"""Communication topologies and their Laplacian encoding of the consensus constraint."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class TopologyError(RuntimeError):
    """Raised when a requested topology cannot be generated."""


@dataclass(frozen=True)
class Topology:
    """Undirected communication graph over ``m`` agents.

    ``neighbors[i]`` lists agent ``i``'s neighborhood *including* ``i`` itself
    (every agent has a self-loop).  The Laplacian is kept row-sparse:
    ``lap_rows[i]`` maps neighbor index ``j`` to the integer coefficient
    ``L[i, j]`` (``|N_i| - 1`` on the diagonal, ``-1`` on edges).
    """

    m: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...]
    lap_rows: tuple[dict[int, int], ...] = field(repr=False)
    d_max: int

    def laplacian_dense(self) -> np.ndarray:
        lap = np.zeros((self.m, self.m))
        for i, row in enumerate(self.lap_rows):
            for j, c in row.items():
                lap[i, j] = c
        return lap


def _from_edges(m: int, edges: set[tuple[int, int]]) -> Topology:
    nbr: list[set[int]] = [{i} for i in range(m)]
    for i, j in edges:
        nbr[i].add(j)
        nbr[j].add(i)
    neighbors = tuple(tuple(sorted(s)) for s in nbr)
    rows = []
    for i in range(m):
        row = {j: -1 for j in neighbors[i] if j != i}
        row[i] = len(neighbors[i]) - 1
        rows.append(row)
    d_max = max(len(n) - 1 for n in neighbors)
    return Topology(
        m=m,
        edges=tuple(sorted(edges)),
        neighbors=neighbors,
        lap_rows=tuple(rows),
        d_max=d_max,
    )


def _is_connected(m: int, edges: set[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(m)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * m
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == m


_ER_MAX_RETRIES = 1000


def build_topology(kind: str, m: int, p: float = 0.5, seed: int = 0) -> Topology:
    """Build a connected topology of the given kind.

    ``kind`` is one of ``ring``, ``path``, ``complete`` or ``erdos_renyi``.
    Erdos-Renyi draws are resampled (up to a bounded retry budget) until the
    graph is connected; generation is deterministic for fixed ``(m, p, seed)``.
    """
    if m < 2:
        raise ValueError(f"need at least 2 agents, got m={m}")
    if kind == "ring":
        edges = {(i, (i + 1) % m) if i < (i + 1) % m else ((i + 1) % m, i) for i in range(m)}
        if m == 2:
            edges = {(0, 1)}
    elif kind == "path":
        edges = {(i, i + 1) for i in range(m - 1)}
    elif kind == "complete":
        edges = {(i, j) for i in range(m) for j in range(i + 1, m)}
    elif kind == "erdos_renyi":
        if not 0.0 < p <= 1.0:
            raise ValueError(f"edge probability must be in (0, 1], got p={p}")
        rng = np.random.default_rng(np.random.SeedSequence([seed, m]))
        for _ in range(_ER_MAX_RETRIES):
            edges = set()
            for i in range(m):
                for j in range(i + 1, m):
                    if rng.random() < p:
                        edges.add((i, j))
            if _is_connected(m, edges):
                break
        else:
            raise TopologyError(
                f"no connected Erdos-Renyi draw in {_ER_MAX_RETRIES} tries (m={m}, p={p})"
            )
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    if not _is_connected(m, edges):
        raise TopologyError(f"{kind} graph on m={m} agents is not connected")
    return _from_edges(m, edges)


def apply_laplacian_row(
    t: Topology, i: int, xs: np.ndarray, message_counter: list[int] | None = None
) -> np.ndarray:
    """Neighborhood disagreement: sum of ``L[i, j] * xs[j]`` over ``j in N_i``.

    ``xs`` is an ``(m, d)`` array of per-agent vectors.  Only neighbor slots
    are read; ``message_counter``, when given, accumulates the number of
    vector transfers (one per neighborhood member).
    """
    if not 0 <= i < t.m:
        raise ValueError(f"agent id {i} out of range [0, {t.m})")
    if xs.shape[0] != t.m:
        raise ValueError(f"expected {t.m} agent vectors, got {xs.shape[0]}")
    row = t.lap_rows[i]
    out = np.zeros_like(xs[i], dtype=float)
    for j, c in row.items():
        out += c * xs[j]
    if message_counter is not None:
        message_counter[0] += len(t.neighbors[i])
    return out


def feasibility_residual(t: Topology, xs: np.ndarray) -> float:
    """Euclidean norm of the stacked Laplacian image: disagreement magnitude."""
    total = 0.0
    for i in range(t.m):
        total += float(np.sum(apply_laplacian_row(t, i, xs) ** 2))
    return float(np.sqrt(total))


def save_edge_list(t: Topology, path) -> None:
    """Write the topology as plain text: first line ``m``, then sorted ``i j`` pairs."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{t.m}\n")
        for i, j in t.edges:
            f.write(f"{i} {j}\n")


def load_edge_list(path) -> Topology:
    with open(path, encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines:
        raise ValueError(f"empty edge list file {path}")
    m = int(lines[0])
    edges = set()
    for ln in lines[1:]:
        i, j = (int(tok) for tok in ln.split())
        if i == j or not (0 <= i < m and 0 <= j < m):
            raise ValueError(f"bad edge '{ln}' for m={m}")
        edges.add((min(i, j), max(i, j)))
    if not _is_connected(m, edges):
        raise TopologyError(f"edge list in {path} is not connected")
    return _from_edges(m, edges)
