"""Graph families: configuration model, comets, suns, gadget pairs.

Comet layout (shared by :func:`comet` and :func:`double_comet`): centres
``v_1..v_k`` are nodes ``0..k-1`` (node 0 is ``v_1``); the ``j``-th leaf of
centre ``v_l`` is node ``k + (l-1)(d-1) + (j-1)`` with ``d = n/k``.  Use
:func:`comet_index` rather than hard-coding this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .graph_core import ConductanceResult, Graph, GraphError, is_connected

__all__ = [
    "DegreeSequence",
    "GadgetPair",
    "is_graphical",
    "configuration_model",
    "pair_stubs",
    "havel_hakimi",
    "realize_simple",
    "random_regular",
    "comet",
    "comet_index",
    "comet_embedding",
    "comet_conductance",
    "double_comet",
    "comet_pair",
    "line",
    "sun",
    "bright_sun",
    "gnp",
    "gnp_pendant",
    "complete_graph",
    "cycle",
    "path",
    "bridge_edge_ids",
    "doubled_copy",
    "expander_augmented",
    "conductance_gadget",
]

MAX_REGULAR_ATTEMPTS = 100


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.degrees)
        if not d:
            raise GraphError("degree sequence is empty")
        if any(x < 1 for x in d):
            raise GraphError("degrees must be positive")
        object.__setattr__(self, "degrees", d)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self):
        return iter(self.degrees)


@dataclass(frozen=True)
class GadgetPair:
    """Two graphs of different sizes built to be hard to tell apart.

    ``removed``/``added`` are the edges that differ between the shared part of
    ``g`` and ``g_prime`` (in ``g_prime``'s node indexing).
    """

    g: Graph
    g_prime: Graph
    removed: tuple[tuple[int, int], ...]
    added: tuple[tuple[int, int], ...]
    n_true: tuple[int, int]

    @property
    def distinguished_edges(self) -> tuple[tuple[int, int], ...]:
        return self.removed + self.added


def _as_degrees(d) -> tuple[int, ...]:
    if isinstance(d, DegreeSequence):
        return d.degrees
    return DegreeSequence(tuple(d)).degrees


def is_graphical(d) -> bool:
    """Erdős–Gallai test: can a simple graph realize ``d``?"""
    degs = sorted(_as_degrees(d), reverse=True)
    n = len(degs)
    if sum(degs) % 2:
        return False
    if degs[0] > n - 1:
        return False
    prefix = 0
    for k in range(1, n + 1):
        prefix += degs[k - 1]
        rhs = k * (k - 1) + sum(min(x, k) for x in degs[k:])
        if prefix > rhs:
            return False
    return True


def pair_stubs(degrees: Sequence[int], order: Sequence[int]) -> Graph:
    """Multigraph from matching consecutive stubs of ``order``.

    Stub ``s`` belongs to the node whose degree block contains ``s`` when stubs
    are numbered ``0..D-1`` node by node.
    """
    owner = np.repeat(np.arange(len(degrees)), degrees)
    stubs = owner[np.asarray(order, dtype=np.int64)]
    edges = tuple((int(a), int(b)) for a, b in stubs.reshape(-1, 2))
    return Graph(len(degrees), edges, directed=False, allows_multi=True)


def configuration_model(d, rng: np.random.Generator) -> Graph:
    """Random multigraph with degree sequence ``d`` from a uniform stub matching.

    Self-loops and multi-edges are kept.
    """
    degs = _as_degrees(d)
    total = sum(degs)
    if total % 2:
        raise GraphError(f"degree sum {total} is odd")
    return pair_stubs(degs, rng.permutation(total))


def havel_hakimi(d) -> Graph:
    """Deterministic simple realization of a graphical sequence."""
    degs = _as_degrees(d)
    if not is_graphical(degs):
        raise GraphError(f"sequence {degs} is not graphical")
    residual = list(degs)
    edges = []
    while True:
        order = sorted(range(len(residual)), key=lambda u: (-residual[u], u))
        u = order[0]
        k = residual[u]
        if k == 0:
            break
        residual[u] = 0
        for v in order[1 : k + 1]:
            residual[v] -= 1
            edges.append((u, v))
    return Graph(len(degs), tuple(edges))


def realize_simple(d, rng: np.random.Generator, swaps: int | None = None) -> Graph:
    """Havel–Hakimi realization scrambled by random double-edge swaps.

    ``swaps`` defaults to ``ceil(n log n)`` attempted swaps; swaps that would
    create a self-loop or a repeated edge are rejected.
    """
    g = havel_hakimi(d)
    n = g.n
    if swaps is None:
        swaps = math.ceil(n * math.log(max(n, 2)))
    edges = [tuple(e) for e in g.edges]
    present = {frozenset(e) for e in edges}
    if len(edges) < 2:
        return g
    for _ in range(swaps):
        i, j = rng.choice(len(edges), size=2, replace=False)
        a, b = edges[i]
        c, e = edges[j]
        if rng.random() < 0.5:
            c, e = e, c
        new1, new2 = (a, e), (c, b)
        if a == e or c == b:
            continue
        k1, k2 = frozenset(new1), frozenset(new2)
        if k1 in present or k2 in present or k1 == k2:
            continue
        present -= {frozenset(edges[i]), frozenset(edges[j])}
        present |= {k1, k2}
        edges[i], edges[j] = new1, new2
    return Graph(n, tuple(edges))


def random_regular(d: int, n: int, rng: np.random.Generator) -> Graph:
    """Connected uniformly-random-ish ``d``-regular simple graph.

    Uses the Steger–Wormald pairing (``networkx.random_regular_graph``); draws
    are repeated until connected, at most 100 times.
    """
    if d < 1 or d >= n or (n * d) % 2:
        raise GraphError(f"no {d}-regular simple graph on {n} nodes")
    for _ in range(MAX_REGULAR_ATTEMPTS):
        h = nx.random_regular_graph(d, n, seed=int(rng.integers(2**63)))
        edges = tuple((int(u), int(v)) for u, v in h.edges())
        g = Graph(n, edges)
        if is_connected(g):
            return g
    raise GraphError(f"no connected {d}-regular graph on {n} nodes after {MAX_REGULAR_ATTEMPTS} draws")


# ---------------------------------------------------------------------------
# comets


def _comet_dims(n: int, k: int) -> int:
    if k < 1 or n < 1 or n % k:
        raise GraphError(f"comet needs k >= 1 dividing n, got n={n}, k={k}")
    d = n // k
    if d < 2:
        raise GraphError(f"comet needs n/k >= 2, got n={n}, k={k}")
    return d


def comet_index(n: int, k: int, centre: int, leaf: int | None = None) -> int:
    """Node index of centre ``v_centre`` or of its ``leaf``-th leaf (1-based)."""
    d = _comet_dims(n, k)
    if not 1 <= centre <= k:
        raise GraphError(f"centre {centre} out of range 1..{k}")
    if leaf is None:
        return centre - 1
    if not 1 <= leaf <= d - 1:
        raise GraphError(f"leaf {leaf} out of range 1..{d - 1}")
    return k + (centre - 1) * (d - 1) + (leaf - 1)


def comet_embedding(n: int, k: int) -> np.ndarray:
    """Map each node of ``comet(n, k)`` to its namesake in ``comet(2n, 2k)``."""
    d = _comet_dims(n, k)
    out = np.empty(n, dtype=np.int64)
    for ell in range(1, k + 1):
        out[comet_index(n, k, ell)] = comet_index(2 * n, 2 * k, ell)
        for j in range(1, d):
            out[comet_index(n, k, ell, j)] = comet_index(2 * n, 2 * k, ell, j)
    return out


def comet_conductance(n: int, k: int, epsilon: float) -> ConductanceResult:
    """Exact general conductance of ``comet(n, k)`` beyond the brute-force cap.

    Leaves of one centre are interchangeable, so a set is described by its
    centres and by how many leaves it takes under included and under
    excluded centres.  Given those, the cut is fixed: each leaf under an
    included centre saves one star edge, and every leaf costs its edge to
    ``v_1`` unless ``v_1`` is in the set.
    """
    d = _comet_dims(n, k)
    if not 0 <= epsilon < 1:
        raise GraphError(f"epsilon must lie in [0, 1), got {epsilon}")
    leaves = d - 1
    cap = int(math.floor((1 - epsilon) * n + 1e-9))
    best = None
    for mask in range(1 << k):
        inc = [(mask >> ell) & 1 for ell in range(k)]
        nc = sum(inc)
        base = nc * leaves + sum(1 for ell in range(k) if inc[ell] and not inc[(ell + 1) % k])
        for a_in in range(nc * leaves + 1):
            for a_out in range((k - nc) * leaves + 1):
                size = nc + a_in + a_out
                if size == 0 or size > cap:
                    continue
                cut = base - a_in + (0 if inc[0] else a_in + a_out)
                vol = nc * d + a_in + a_out
                if best is None or cut * best[1] < best[0] * vol:
                    best = (cut, vol, mask, a_in, a_out)
    if best is None:
        raise GraphError(f"no admissible set: (1 - {epsilon}) * {n} < 1")
    cut, vol, mask, a_in, a_out = best
    witness = set()
    todo = {1: a_in, 0: a_out}
    for ell in range(1, k + 1):
        bit = (mask >> (ell - 1)) & 1
        if bit:
            witness.add(comet_index(n, k, ell))
        take = min(todo[bit], leaves)
        todo[bit] -= take
        witness.update(comet_index(n, k, ell, j) for j in range(1, take + 1))
    return ConductanceResult(cut / vol, frozenset(witness), epsilon, cut, vol, exact=True)


def comet(n: int, k: int) -> Graph:
    """Directed cycle of ``k`` star centres; every leaf points back to ``v_1``."""
    d = _comet_dims(n, k)
    edges = []
    for ell in range(1, k + 1):
        edges.append((ell - 1, ell % k))
        edges.extend((ell - 1, comet_index(n, k, ell, j)) for j in range(1, d))
    for ell in range(1, k + 1):
        edges.extend((comet_index(n, k, ell, j), 0) for j in range(1, d))
    return Graph(n, tuple(edges), directed=True, allows_multi=(k == 1))


def _double_comet_parts(n2: int, k2: int):
    if n2 % 2 or k2 % 2:
        raise GraphError(f"double comet needs even n2 and k2, got n2={n2}, k2={k2}")
    n, k = n2 // 2, k2 // 2
    if k < 2:
        raise GraphError("double comet needs k2 >= 4")
    d = _comet_dims(n, k)

    def centre(ell):
        return ell - 1

    def leaf(ell, j):
        return k2 + (ell - 1) * (d - 1) + (j - 1)

    a1, ak, b1, b2 = centre(1), centre(k), centre(k + 1), centre(k + 2)
    edges = []
    # first copy: cycle v_1 .. v_k without the closing edge (v_k, v_1)
    for ell in range(1, k + 1):
        edges.append((centre(ell), centre(ell + 1)) if ell < k else (ak, b1))
        edges.extend((centre(ell), leaf(ell, j)) for j in range(1, d))
    # v_{k+1}: old out-edges are dropped and replaced by these two
    edges.append((b1, b2))
    edges.append((b1, a1))
    for ell in range(k + 2, 2 * k + 1):
        edges.append((centre(ell), centre(ell + 1) if ell < 2 * k else b1))
        edges.extend((centre(ell), leaf(ell, j)) for j in range(1, d))
        if ell == k + 2:
            # orphaned leaves of v_{k+1} hang off v_{k+2}
            edges.extend((b2, leaf(k + 1, j)) for j in range(1, d))
    for ell in range(1, 2 * k + 1):
        root = a1 if ell <= k else b1
        edges.extend((leaf(ell, j), root) for j in range(1, d))
    removed = ((ak, a1), (b1, b2)) + tuple((b1, leaf(k + 1, j)) for j in range(1, d))
    added = ((ak, b1), (b1, b2), (b1, a1)) + tuple((b2, leaf(k + 1, j)) for j in range(1, d))
    return Graph(n2, tuple(edges), directed=True), removed, added


def double_comet(n2: int, k2: int) -> Graph:
    """Two copies of ``comet(n2/2, k2/2)`` spliced into one strongly connected graph.

    The first copy's closing edge ``(v_k, v_1)`` and every out-edge of
    ``v_{k+1}`` are removed; ``(v_k, v_{k+1})``, ``(v_{k+1}, v_{k+2})`` and
    ``(v_{k+1}, v_1)`` are added.  The former leaves of ``v_{k+1}`` become
    leaves of ``v_{k+2}`` so no node is lost.
    """
    return _double_comet_parts(n2, k2)[0]


def comet_pair(n: int, k: int) -> GadgetPair:
    """``comet(n, k)`` versus ``double_comet(2n, 2k)``."""
    dc, removed, added = _double_comet_parts(2 * n, 2 * k)
    return GadgetPair(comet(n, k), dc, removed, added, (n, 2 * n))


# ---------------------------------------------------------------------------
# small families


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise GraphError(msg)


def complete_graph(n: int, directed: bool = False) -> Graph:
    _need(n >= 2, "complete graph needs n >= 2")
    if directed:
        edges = [(u, v) for u in range(n) for v in range(n) if u != v]
    else:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph(n, tuple(edges), directed=directed)


def cycle(n: int, directed: bool = False) -> Graph:
    _need(n >= 3 or (directed and n >= 2), "cycle too short")
    return Graph(n, tuple((u, (u + 1) % n) for u in range(n)), directed=directed)


def path(n: int) -> Graph:
    _need(n >= 2, "path needs n >= 2")
    return Graph(n, tuple((u, u + 1) for u in range(n - 1)))


def line(n: int) -> Graph:
    """Directed path ``v_1 -> ... -> v_n`` (not strongly connected)."""
    _need(n >= 2, "line needs n >= 2")
    return Graph(n, tuple((u, u + 1) for u in range(n - 1)), directed=True)


def sun(n: int) -> Graph:
    """``K_n`` with a pendant leaf on every clique vertex (``2n`` nodes)."""
    _need(n >= 3, "sun needs n >= 3")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges += [(u, n + u) for u in range(n)]
    return Graph(2 * n, tuple(edges))


def bright_sun(n: int) -> Graph:
    """``K_n`` with a two-edge path hanging off every clique vertex (``3n`` nodes)."""
    _need(n >= 3, "bright sun needs n >= 3")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for u in range(n):
        edges += [(u, n + u), (n + u, 2 * n + u)]
    return Graph(3 * n, tuple(edges))


def _gnp_edges(n: int, p: float, rng: np.random.Generator, offset: int = 0) -> list[tuple[int, int]]:
    coins = rng.random((n, n)) < p
    iu, ju = np.triu_indices(n, k=1)
    keep = coins[iu, ju]
    return [(int(u) + offset, int(v) + offset) for u, v in zip(iu[keep], ju[keep])]


def gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    _need(n >= 1 and 0 < p < 1, "gnp needs n >= 1 and p in (0, 1)")
    return Graph(n, tuple(_gnp_edges(n, p, rng)))


def gnp_pendant(n: int, p: float, with_extra_copy: bool, rng: np.random.Generator) -> Graph:
    """``G(n, p)`` with a pendant on every node.

    With ``with_extra_copy`` one uniformly chosen node gets, instead of its
    pendant, a bridge to a random node of an independent ``G(n, p)`` copy
    (``3n - 1`` nodes in total).
    """
    _need(n >= 3, "gnp_pendant needs n >= 3")
    _need(0 < p < 1, "gnp_pendant needs p in (0, 1)")
    edges = _gnp_edges(n, p, rng)
    special = int(rng.integers(n)) if with_extra_copy else -1
    nxt = n
    for u in range(n):
        if u != special:
            edges.append((u, nxt))
            nxt += 1
    if with_extra_copy:
        base = nxt
        edges += _gnp_edges(n, p, rng, offset=base)
        edges.append((special, base + int(rng.integers(n))))
        nxt += n
    return Graph(nxt, tuple(edges))


# ---------------------------------------------------------------------------
# degree-preserving gadgets


def bridge_edge_ids(g: Graph) -> set[int]:
    """Indices into ``g.edges`` of the bridges of an undirected multigraph."""
    if g.directed:
        raise GraphError("bridges are defined for undirected graphs")
    inc: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for eid, (u, v) in enumerate(g.edges):
        if u == v:
            continue
        inc[u].append((v, eid))
        inc[v].append((u, eid))
    disc = [-1] * g.n
    low = [0] * g.n
    bridges: set[int] = set()
    timer = 0
    for root in range(g.n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, 0)]
        while stack:
            u, parent_eid, pos = stack[-1]
            if pos < len(inc[u]):
                stack[-1] = (u, parent_eid, pos + 1)
                v, eid = inc[u][pos]
                if eid == parent_eid:
                    continue
                if disc[v] < 0:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, eid, 0))
                else:
                    low[u] = min(low[u], disc[v])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        bridges.add(parent_eid)
    return bridges


def _non_bridge_choice(g: Graph, rng: np.random.Generator) -> int:
    bridges = bridge_edge_ids(g)
    pool = [eid for eid in range(g.m) if eid not in bridges]
    if not pool:
        raise GraphError("graph is a forest: every edge is a bridge")
    return pool[int(rng.integers(len(pool)))]


def _check_swap_input(g: Graph) -> None:
    if g.directed:
        raise GraphError("expected an undirected graph")
    if not is_connected(g):
        raise GraphError("expected a connected graph")
    if g.m < g.n:
        raise GraphError(f"graph is a tree (m={g.m} < n={g.n})")


def doubled_copy(g: Graph, rng: np.random.Generator) -> GadgetPair:
    """Two copies of ``g`` joined by a degree-preserving 2-swap.

    A uniformly chosen non-bridge ``{i, j}`` and its twin ``{i', j'}`` are
    replaced by ``{i, j'}`` and ``{i', j}`` (copy node ``x'`` is ``x + n``);
    the new edges take the old edges' positions in every adjacency list.
    """
    _check_swap_input(g)
    n = g.n
    k = _non_bridge_choice(g, rng)
    i, j = g.edges[k]
    first = list(g.edges)
    second = [(u + n, v + n) for u, v in g.edges]
    first[k] = (i, j + n)
    second[k] = (i + n, j)
    gt = Graph(2 * n, tuple(first + second), allows_multi=g.allows_multi or i == j)
    return GadgetPair(g, gt, ((i, j), (i + n, j + n)), ((i, j + n), (i + n, j)), (n, 2 * n))


def expander_augmented(g: Graph, rng: np.random.Generator) -> GadgetPair:
    """``g`` joined to a random connected 3-regular graph by a 2-swap.

    The 3-regular part has ``n`` nodes (``n + 1`` when ``n`` is odd) and sits
    at indices ``n..``.  Every degree is preserved.
    """
    _check_swap_input(g)
    n = g.n
    if n < 4:
        raise GraphError("expander_augmented needs n >= 4")
    size = n if n % 2 == 0 else n + 1
    h = random_regular(3, size, rng)
    k = _non_bridge_choice(g, rng)
    kh = _non_bridge_choice(h, rng)
    i, j = g.edges[k]
    a, b = h.edges[kh]
    first = list(g.edges)
    second = [(u + n, v + n) for u, v in h.edges]
    first[k] = (i, b + n)
    second[kh] = (a + n, j)
    gb = Graph(n + size, tuple(first + second), allows_multi=g.allows_multi)
    return GadgetPair(g, gb, ((i, j), (a + n, b + n)), ((i, b + n), (a + n, j)), (n, n + size))


def conductance_gadget(
    n: int, phi: float, epsilon: float, delta: float, rng: np.random.Generator
) -> GadgetPair:
    """Clique-expanded regular graph ``G`` and its hidden-component twin ``G'``.

    ``d = ceil(1/phi)``.  ``G`` replaces every node of a random connected
    ``d``-regular graph on ``n1/d`` nodes by a ``K_d`` whose members each take
    one of the original edges, so ``n1 = n(1 - epsilon + delta/2)``.  ``G'``
    (``n`` nodes) removes a uniform intra-clique edge ``(u, v)`` and adds
    ``(u, w), (v, w)`` to a random node ``w`` of a connected 3-regular graph on
    the remaining ``n - n1`` nodes.
    """
    if not 0 < epsilon <= 0.5:
        raise GraphError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    if not 0 <= delta < epsilon / 2:
        raise GraphError(f"delta must lie in [0, epsilon/2), got {delta}")
    if not 1 / n <= phi <= 1:
        raise GraphError(f"phi must lie in [1/n, 1], got {phi}")
    d = math.ceil(1 / phi - 1e-9)
    if d < 2:
        raise GraphError("phi too large: ceil(1/phi) must be at least 2 to have clique edges")
    n1f = n * (1 - epsilon + delta / 2)
    n1 = round(n1f)
    if abs(n1 - n1f) > 1e-9 or n1 % d:
        raise GraphError(f"d={d} must divide n(1 - epsilon + delta/2) = {n1f:g}")
    cliques = n1 // d
    if cliques <= d or (cliques * d) % 2:
        raise GraphError(f"no {d}-regular graph on {cliques} clique nodes")
    rest = n - n1
    if rest < 4 or rest % 2:
        raise GraphError(f"hidden 3-regular part needs an even size >= 4, got {rest}")

    g1 = random_regular(d, cliques, rng)
    intra = []
    for r in range(cliques):
        members = range(r * d, (r + 1) * d)
        intra += [(a, b) for a in members for b in members if a < b]
    used = [0] * cliques
    inter = []
    for a, b in g1.edges:
        inter.append((a * d + used[a], b * d + used[b]))
        used[a] += 1
        used[b] += 1
    g = Graph(n1, tuple(intra + inter))

    k = int(rng.integers(len(intra)))
    u, v = intra[k]
    g2 = random_regular(3, rest, rng)
    w = n1 + int(rng.integers(rest))
    edges = list(intra + inter)
    edges[k] = (u, w)
    edges += [(a + n1, b + n1) for a, b in g2.edges]
    edges.append((v, w))
    gp = Graph(n, tuple(edges))
    return GadgetPair(g, gp, ((u, v),), ((u, w), (v, w)), (n1, n))
