"""Graph representation and lazy-random-walk machinery.

Graphs are finite directed or undirected multigraphs built from an ordered
edge list.  The order of each node's adjacency list is the order in which its
edges appear in that list, and it is preserved exactly through the text file
format (see :func:`read_graph` / :func:`write_graph`).

Walk conventions
----------------
* Lazy walk: stay put with probability 1/2, otherwise move to a uniformly
  random adjacency slot (out-slot for directed graphs).
* Multi-edges count with multiplicity everywhere.
* A directed self-loop occupies one out-slot; an undirected self-loop uses two
  stubs and therefore occupies two slots of its node.  Self-loops are never
  cut edges.
* A directed node without out-edges keeps the walk in place.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

__all__ = [
    "GraphError",
    "NotStronglyConnectedError",
    "ConvergenceError",
    "Graph",
    "Distribution",
    "ConductanceResult",
    "parse_graph",
    "format_graph",
    "read_graph",
    "write_graph",
    "reachable_from",
    "strong_connectivity_violation",
    "is_strongly_connected",
    "is_connected",
    "bfs_distances",
    "diameter",
    "transition_matrix",
    "lazy_step",
    "stationary_distribution",
    "tv_distance",
    "mixing_time_empirical",
    "coupling_mixing_bound",
    "general_conductance",
    "gambler_ruin_prob",
    "BRUTE_FORCE_CAP",
    "MIXING_CAP",
]

BRUTE_FORCE_CAP = 24
MIXING_CAP = 5000


class GraphError(ValueError):
    """Invalid graph, node, or parameter."""


class NotStronglyConnectedError(GraphError):
    """Raised when an operation needs a strongly connected graph.

    ``pair`` is ``(u, v)`` such that ``v`` is not reachable from ``u``.
    """

    def __init__(self, u: int, v: int):
        self.pair = (u, v)
        super().__init__(f"graph is not strongly connected: node {v} is unreachable from node {u}")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable multigraph with ordered adjacency lists.

    ``out_adj[u]`` is the adjacency list of ``u`` (its out-list when directed).
    ``in_adj`` is only populated for directed graphs.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    directed: bool = False
    allows_multi: bool = False
    out_adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    in_adj: tuple[tuple[int, ...], ...] | None = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise GraphError("graph needs at least one node")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] | None = [[] for _ in range(n)] if self.directed else None
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if not self.allows_multi:
                if u == v:
                    raise GraphError(f"self-loop at {u} in a simple graph")
                key = (u, v) if self.directed else (min(u, v), max(u, v))
                if key in seen:
                    raise GraphError(f"repeated edge {key} in a simple graph")
                seen.add(key)
            out[u].append(v)
            if self.directed:
                inn[v].append(u)
            else:
                out[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "out_adj", tuple(tuple(a) for a in out))
        object.__setattr__(self, "in_adj", None if inn is None else tuple(tuple(a) for a in inn))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        return self.out_adj

    def out_degree(self, u: int) -> int:
        return len(self.out_adj[u])

    def in_degree(self, u: int) -> int:
        if not self.directed:
            return len(self.out_adj[u])
        return len(self.in_adj[u])

    def degree(self, u: int) -> int:
        return len(self.out_adj[u])

    def out_degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.out_adj), dtype=np.int64, count=self.n)

    def in_degrees(self) -> np.ndarray:
        adj = self.in_adj if self.directed else self.out_adj
        return np.fromiter((len(a) for a in adj), dtype=np.int64, count=self.n)

    def average_degree(self) -> float:
        """``2m/n`` when undirected, average out-degree ``m/n`` when directed."""
        return float(self.out_degrees().sum()) / self.n

    def check_node(self, u: int) -> int:
        if not isinstance(u, (int, np.integer)) or not 0 <= u < self.n:
            raise GraphError(f"invalid node {u!r} for graph with n={self.n}")
        return int(u)

    def arcs(self) -> Iterable[tuple[int, int]]:
        """Every walk arc ``u -> v`` with multiplicity (both directions if undirected)."""
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def degree_sequence(self) -> list[int]:
        return self.out_degrees().tolist()


@dataclass(frozen=True)
class Distribution:
    """Probability vector indexed by node."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise GraphError("distribution must be a non-empty vector")
        if np.any(p < 0):
            raise GraphError("distribution has negative entries")
        if abs(p.sum() - 1.0) > 1e-12:
            raise GraphError(f"distribution sums to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i):
        return self.probs[i]

    def two_norm(self) -> float:
        return float(np.sqrt(np.dot(self.probs, self.probs)))


@dataclass(frozen=True)
class ConductanceResult:
    phi: float
    witness_set: frozenset[int]
    epsilon: float
    cut: int
    volume: int
    exact: bool = True


# ---------------------------------------------------------------------------
# file format


def format_graph(g: Graph) -> str:
    kind = "directed" if g.directed else "undirected"
    multi = "multi" if g.allows_multi else "simple"
    lines = [f"graph {kind} {g.n} {g.m} {multi}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise GraphError("empty graph file")
    head = rows[0].split()
    if len(head) != 5 or head[0] != "graph":
        raise GraphError(f"bad header line: {rows[0]!r}")
    _, kind, n_s, m_s, multi = head
    if kind not in ("directed", "undirected") or multi not in ("multi", "simple"):
        raise GraphError(f"bad header line: {rows[0]!r}")
    try:
        n, m = int(n_s), int(m_s)
        edges = []
        for ln in rows[1:]:
            u, v = ln.split()
            edges.append((int(u), int(v)))
    except ValueError as exc:
        raise GraphError(f"malformed graph file: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, file has {len(edges)}")
    return Graph(n, tuple(edges), directed=kind == "directed", allows_multi=multi == "multi")


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


# ---------------------------------------------------------------------------
# reachability


def reachable_from(g: Graph, source: int, reverse: bool = False) -> np.ndarray:
    adj = (g.in_adj if g.directed else g.out_adj) if reverse else g.out_adj
    seen = np.zeros(g.n, dtype=bool)
    seen[source] = True
    stack = [source]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def strong_connectivity_violation(g: Graph) -> tuple[int, int] | None:
    """Return ``(u, v)`` with ``v`` unreachable from ``u``, or None."""
    fwd = reachable_from(g, 0)
    if not fwd.all():
        return 0, int(np.flatnonzero(~fwd)[0])
    back = reachable_from(g, 0, reverse=True)
    if not back.all():
        return int(np.flatnonzero(~back)[0]), 0
    return None


def is_strongly_connected(g: Graph) -> bool:
    return strong_connectivity_violation(g) is None


def is_connected(g: Graph) -> bool:
    """Weak connectivity for directed graphs, plain connectivity otherwise."""
    if not g.directed:
        return bool(reachable_from(g, 0).all())
    und = Graph(g.n, g.edges, directed=False, allows_multi=True)
    return bool(reachable_from(und, 0).all())


def _require_strong(g: Graph) -> None:
    bad = strong_connectivity_violation(g)
    if bad is not None:
        raise NotStronglyConnectedError(*bad)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances along out-edges; -1 for unreachable nodes."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.out_adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def diameter(g: Graph) -> float:
    """Largest directed hop distance; ``inf`` if some pair is unreachable."""
    best = 0
    for u in range(g.n):
        d = bfs_distances(g, u)
        if np.any(d < 0):
            return math.inf
        best = max(best, int(d.max()))
    return best


# ---------------------------------------------------------------------------
# random walks


def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Lazy transition matrix ``(I + D^-1 A) / 2`` as a sparse CSR matrix."""
    rows, cols, vals = [], [], []
    for u, nbrs in enumerate(g.out_adj):
        if not nbrs:
            rows.append(u)
            cols.append(u)
            vals.append(1.0)
            continue
        rows.append(u)
        cols.append(u)
        vals.append(0.5)
        w = 0.5 / len(nbrs)
        for v in nbrs:
            rows.append(u)
            cols.append(v)
            vals.append(w)
    P = sp.coo_matrix((vals, (rows, cols)), shape=(g.n, g.n)).tocsr()
    P.sum_duplicates()
    return P


def lazy_step(g: Graph, u: int, rng: np.random.Generator) -> int:
    u = g.check_node(u)
    if rng.random() < 0.5:
        return u
    nbrs = g.out_adj[u]
    if not nbrs:
        return u
    return nbrs[int(rng.integers(len(nbrs)))]


def stationary_distribution(g: Graph, tol: float = 1e-12, max_iter: int = 10**7) -> Distribution:
    """Stationary distribution of the lazy walk by power iteration.

    Iterates ``x <- xP`` from the uniform vector until successive iterates
    differ by at most ``tol / 10`` in L1.
    """
    _require_strong(g)
    PT = transition_matrix(g).T.tocsr()
    x = np.full(g.n, 1.0 / g.n)
    stop = tol / 10
    for _ in range(max_iter):
        y = PT @ x
        if np.abs(y - x).sum() <= stop:
            x = y
            break
        x = y
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")
    x = np.clip(x, 0.0, None)
    return Distribution(x / x.sum())


def _as_probs(p) -> np.ndarray:
    return p.probs if isinstance(p, Distribution) else np.asarray(p, dtype=np.float64)


def tv_distance(p, q) -> float:
    a, b = _as_probs(p), _as_probs(q)
    if a.shape != b.shape:
        raise GraphError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(0.5 * np.abs(a - b).sum())


def mixing_time_empirical(
    g: Graph,
    threshold: float = math.exp(-1),
    cap: int = MIXING_CAP,
    max_steps: int = 1_000_000,
) -> int:
    """Worst-start mixing time by exact propagation of every start distribution.

    Returns ``max_u min{t >= 1 : TV(p^t(u, .), pi) <= threshold}``.  The
    distance from stationarity of each start is also checked to be
    non-increasing in ``t``.
    """
    if g.n > cap:
        raise GraphError(
            f"n={g.n} exceeds the exact-propagation cap {cap}; "
            "use coupling_mixing_bound for a sampling-based upper bound"
        )
    pi = stationary_distribution(g).probs
    PT = transition_matrix(g).T.tocsr()
    # column u of M is p^t(u, .)
    M = np.eye(g.n)
    prev = np.full(g.n, np.inf)
    hit = np.zeros(g.n, dtype=np.int64)
    for t in range(1, max_steps + 1):
        M = PT @ M
        dist = 0.5 * np.abs(M - pi[:, None]).sum(axis=0)
        if np.any(dist > prev + 1e-12):
            raise RuntimeError(f"distance to stationarity increased at step {t}")
        prev = dist
        newly = (hit == 0) & (dist <= threshold)
        hit[newly] = t
        if np.all(hit > 0):
            return int(hit.max())
    raise ConvergenceError(f"walk did not mix within {max_steps} steps")


def coupling_mixing_bound(
    g: Graph,
    rng: np.random.Generator,
    threshold: float = math.exp(-1),
    pairs: int = 64,
    trials: int = 200,
    max_steps: int = 100_000,
) -> int:
    """Sampling-based mixing-time upper bound via coalescing coupled walks.

    For random start pairs ``(x, y)`` two independent lazy walks run until they
    meet; by the coupling inequality ``TV(p^t(x), p^t(y)) <= P(T > t)``.  The
    returned ``t`` is the smallest step at which the empirical meeting-time
    tail is at most ``threshold`` for every sampled pair.  This is an estimate,
    not a certificate: unsampled pairs may be worse.
    """
    worst = 0
    for _ in range(pairs):
        x0, y0 = (int(v) for v in rng.integers(g.n, size=2))
        times = np.empty(trials, dtype=np.int64)
        for k in range(trials):
            x, y, t = x0, y0, 0
            while x != y:
                if t >= max_steps:
                    raise ConvergenceError("coupled walks did not meet")
                x = lazy_step(g, x, rng)
                y = lazy_step(g, y, rng)
                t += 1
            times[k] = t
        times.sort()
        # smallest t with #(T > t) / trials <= threshold
        idx = int(math.ceil((1 - threshold) * trials)) - 1
        worst = max(worst, int(times[max(idx, 0)]))
    return max(worst, 1)


# ---------------------------------------------------------------------------
# conductance


@numba.njit(cache=True)
def _gray_conductance(n, out_ptr, out_idx, in_ptr, in_idx, outdeg, max_size):
    in_s = np.zeros(n, dtype=np.bool_)
    cut = 0
    vol = 0
    size = 0
    mask = 0
    best_cut = -1
    best_vol = 1
    best_mask = 0
    for i in range(1, 1 << n):
        x = 0
        j = i
        while (j & 1) == 0:
            j >>= 1
            x += 1
        mask ^= 1 << x
        if not in_s[x]:
            in_s[x] = True
            size += 1
            vol += outdeg[x]
            for p in range(out_ptr[x], out_ptr[x + 1]):
                v = out_idx[p]
                if v != x and not in_s[v]:
                    cut += 1
            for p in range(in_ptr[x], in_ptr[x + 1]):
                u = in_idx[p]
                if u != x and in_s[u]:
                    cut -= 1
        else:
            for p in range(out_ptr[x], out_ptr[x + 1]):
                v = out_idx[p]
                if v != x and not in_s[v]:
                    cut -= 1
            for p in range(in_ptr[x], in_ptr[x + 1]):
                u = in_idx[p]
                if u != x and in_s[u]:
                    cut += 1
            in_s[x] = False
            size -= 1
            vol -= outdeg[x]
        if size >= 1 and size <= max_size and vol > 0:
            if best_cut < 0 or cut * best_vol < best_cut * vol:
                best_cut = cut
                best_vol = vol
                best_mask = mask
    return best_cut, best_vol, best_mask


def _csr(adj: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(adj) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(a) for a in adj])
    idx = np.fromiter((v for a in adj for v in a), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx


def _max_set_size(n: int, epsilon: float) -> int:
    return int(math.floor((1 - epsilon) * n + 1e-9))


def general_conductance(
    g: Graph, epsilon: float, heuristic: bool = False, cap: int = BRUTE_FORCE_CAP
) -> ConductanceResult:
    """Minimum of ``|cut(S)| / out-volume(S)`` over ``1 <= |S| <= (1 - epsilon) n``.

    Exhaustive over all subsets (Gray-code order, incremental cut/volume
    updates) for ``n <= cap``.  Larger graphs need ``heuristic=True``, which
    returns an upper bound from BFS-prefix sweeps with ``exact=False``.
    Subsets with zero out-volume are skipped.
    """
    if not 0 <= epsilon < 1:
        raise GraphError(f"epsilon must lie in [0, 1), got {epsilon}")
    max_size = _max_set_size(g.n, epsilon)
    if max_size < 1:
        raise GraphError(f"no admissible set: (1 - {epsilon}) * {g.n} < 1")
    if g.n > cap:
        if not heuristic:
            raise GraphError(
                f"n={g.n} exceeds the brute-force cap {cap}; pass heuristic=True for an upper bound"
            )
        return _sweep_conductance(g, epsilon, max_size)
    out_ptr, out_idx = _csr(g.out_adj)
    in_ptr, in_idx = _csr(g.in_adj if g.directed else g.out_adj)
    cut, vol, mask = _gray_conductance(
        g.n, out_ptr, out_idx, in_ptr, in_idx, g.out_degrees(), max_size
    )
    if cut < 0:
        raise GraphError("every admissible set has zero out-volume")
    witness = frozenset(u for u in range(g.n) if (mask >> u) & 1)
    return ConductanceResult(cut / vol, witness, epsilon, int(cut), int(vol), exact=True)


def _sweep_conductance(g: Graph, epsilon: float, max_size: int) -> ConductanceResult:
    in_adj = g.in_adj if g.directed else g.out_adj
    outdeg = g.out_degrees()
    best = None
    for s in range(g.n):
        dist = bfs_distances(g, s)
        order = [int(u) for u in np.argsort(np.where(dist < 0, g.n + 1, dist), kind="stable")]
        in_s = np.zeros(g.n, dtype=bool)
        cut = vol = 0
        for size, x in enumerate(order[:max_size], start=1):
            in_s[x] = True
            vol += int(outdeg[x])
            cut += sum(1 for v in g.out_adj[x] if v != x and not in_s[v])
            cut -= sum(1 for u in in_adj[x] if u != x and in_s[u])
            if vol > 0 and (best is None or cut * best[1] < best[0] * vol):
                best = (cut, vol, frozenset(order[:size]))
    if best is None:
        raise GraphError("every admissible set has zero out-volume")
    cut, vol, witness = best
    return ConductanceResult(cut / vol, witness, epsilon, cut, vol, exact=False)


# ---------------------------------------------------------------------------
# gambler's ruin


def gambler_ruin_prob(p: float, s: int, b: int) -> float:
    """Probability that a walk stepping up w.p. ``p`` hits ``b`` before ``0`` from ``s``.

    Evaluates ``(r**s - 1) / (r**b - 1)`` with ``r = (1 - p) / p > 1`` as
    ``r**(s - b) * expm1(-s log r) / expm1(-b log r)`` so large exponents do
    not overflow.
    """
    if not 0 < p < 0.5:
        raise ValueError(f"p must lie in (0, 1/2), got {p}")
    if b < 1 or not 0 <= s <= b:
        raise ValueError(f"need 0 <= s <= b and b >= 1, got s={s}, b={b}")
    if s == 0:
        return 0.0
    if s == b:
        return 1.0
    log_r = math.log1p(-p) - math.log(p)
    return math.exp((s - b) * log_r) * math.expm1(-s * log_r) / math.expm1(-b * log_r)
