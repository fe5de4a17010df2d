"""Stateful local-query oracles with consecutive labelling.

Every oracle hides node identities behind labels ``1, 2, 3, ...`` handed out
in disclosure order, charges one query unit per call (null answers included)
and can enforce a hard budget.  Responses are :class:`NodeInfo` or ``None``
(the null answer).

Kinds
-----
``undirected``     answers ``(l, i)`` with ``(label, deg)``
``out-only``       answers ``(l, i, "out")`` with ``(label, deg+)``
``out+indeg``      answers ``(l, i, "out")`` with ``(label, deg+, deg-)``
``bidirectional``  like ``out+indeg`` and also answers ``(l, i, "in")``
``stationary``     ``sample()`` draws a node from the walk's stationary law
``lazy-config``    undirected answers with side information, graph built
                   on the fly from a degree sequence

Transcript lines (when ``record=True``) read
``t kind request response inner_count``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph_core import Graph, GraphError, stationary_distribution

__all__ = [
    "NodeInfo",
    "OracleError",
    "BudgetExhausted",
    "NEIGHBOUR_KINDS",
    "NeighbourOracle",
    "StationaryOracle",
    "LazyConfigOracle",
    "SensibleOracle",
    "sensible_wrap",
    "make_oracle",
    "format_request",
    "format_response",
]

NEIGHBOUR_KINDS = ("undirected", "out-only", "out+indeg", "bidirectional")
INIT_POLICIES = ("fixed", "uniform", "stationary")


@dataclass(frozen=True)
class NodeInfo:
    label: int
    degree: int
    in_degree: int | None = None
    side_index: int | None = None


class OracleError(RuntimeError):
    pass


class BudgetExhausted(OracleError):
    """The call would exceed the oracle's hard query budget."""


def format_request(l=None, i=None, etype=None, op: str = "query") -> str:
    if op != "query":
        return op
    return f"({l},{i})" if etype is None else f"({l},{i},{etype})"


def format_response(resp: NodeInfo | None) -> str:
    if resp is None:
        return "null"
    body = f"{resp.label},{resp.degree}"
    if resp.in_degree is not None:
        body += f",{resp.in_degree}"
    if resp.side_index is not None:
        body += f";side={resp.side_index}"
    return f"({body})"


def _is_index(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


class _Oracle:
    kind = ""

    def __init__(self, budget: int | None = None, record: bool = False):
        self.queries_used = 0
        self.budget = budget
        self.transcript: list[str] | None = [] if record else None
        self._node_of: list[int] = []
        self._label_of: dict[int, int] = {}

    # accounting -------------------------------------------------------
    @property
    def remaining(self) -> int | None:
        return None if self.budget is None else self.budget - self.queries_used

    def _charge(self, units: int = 1) -> None:
        if self.budget is not None and self.queries_used + units > self.budget:
            raise BudgetExhausted(f"budget of {self.budget} queries exhausted")
        self.queries_used += units

    @property
    def inner_queries(self) -> int:
        return self.queries_used

    def _log(self, request: str, resp: NodeInfo | None, t: int | None = None) -> None:
        if self.transcript is not None:
            t = self.queries_used if t is None else t
            self.transcript.append(
                f"{t} {self.kind} {request} {format_response(resp)} {self.inner_queries}"
            )

    # labelling --------------------------------------------------------
    def _label(self, node: int) -> int:
        lab = self._label_of.get(node)
        if lab is None:
            self._node_of.append(node)
            lab = len(self._node_of)
            self._label_of[node] = lab
        return lab

    def _node(self, l) -> int | None:
        if not _is_index(l) or not 1 <= l <= len(self._node_of):
            return None
        return self._node_of[l - 1]

    @property
    def disclosed(self) -> frozenset[int]:
        """Node identities disclosed so far (oracle-side view, for audits)."""
        return frozenset(self._node_of)

    def label_map(self) -> dict[int, int]:
        """``label -> node`` (oracle-side view, for audits)."""
        return {i + 1: v for i, v in enumerate(self._node_of)}

    @property
    def num_labels(self) -> int:
        return len(self._node_of)


class NeighbourOracle(_Oracle):
    """Neighbour-query oracle over a stored graph.

    Parameters
    ----------
    graph : Graph
    kind : one of ``NEIGHBOUR_KINDS``; ``undirected`` needs an undirected
        graph, the other kinds a directed one.
    rng : numpy Generator used for the hidden adjacency permutations and for
        random init policies.
    init : ``fixed`` (node ``init_node``), ``uniform`` or ``stationary``.
    shuffle : present each adjacency list through a uniformly random
        permutation fixed at construction.
    side_info : undirected only; every answer also carries the position of
        the querying node in the answered node's adjacency list.
    """

    def __init__(
        self,
        graph: Graph,
        kind: str = "undirected",
        rng: np.random.Generator | None = None,
        init: str = "fixed",
        init_node: int = 0,
        shuffle: bool = True,
        side_info: bool = False,
        budget: int | None = None,
        record: bool = False,
    ):
        super().__init__(budget=budget, record=record)
        if kind not in NEIGHBOUR_KINDS:
            raise ValueError(f"unknown oracle kind {kind!r}; expected one of {NEIGHBOUR_KINDS}")
        if (kind == "undirected") == graph.directed:
            raise GraphError(f"oracle kind {kind!r} does not fit a {'directed' if graph.directed else 'undirected'} graph")
        if init not in INIT_POLICIES:
            raise ValueError(f"unknown init policy {init!r}")
        if side_info and graph.directed:
            raise ValueError("side information is only defined for undirected oracles")
        if rng is None:
            if shuffle or init != "fixed":
                raise ValueError("a random generator is required for shuffling or random init")
        self.kind = kind
        self.graph = graph
        self._rng = rng
        self._init_policy = init
        self._init_node = graph.check_node(init_node)
        self._side_info = side_info
        self.initialized = False
        self._perm = None
        self._out = graph.out_adj
        self._in = graph.in_adj if kind == "bidirectional" else None
        if shuffle:
            self._perm = [rng.permutation(len(a)) for a in graph.out_adj]
            self._out = self._permute(graph.out_adj, self._perm)
            if self._in is not None:
                self._in = self._permute(self._in, [rng.permutation(len(a)) for a in self._in])
        self._twin = self._twins() if side_info else None

    @staticmethod
    def _permute(adj, perms):
        return tuple(tuple(a[p] for p in perm) for a, perm in zip(adj, perms))

    def _twins(self):
        g = self.graph
        slots = [[None] * g.degree(u) for u in range(g.n)]
        fill = [0] * g.n
        for u, v in g.edges:
            a = fill[u]
            fill[u] += 1
            b = fill[v]
            fill[v] += 1
            slots[u][a] = b
            slots[v][b] = a
        if self._perm is None:
            return tuple(tuple(s + 1 for s in row) for row in slots)
        # presented index p of u holds stored slot perm[u][p]
        inv = [np.argsort(p) for p in self._perm]
        twins = []
        for u in range(g.n):
            row = []
            for p in range(g.degree(u)):
                stored = self._perm[u][p]
                v = g.out_adj[u][stored]
                row.append(int(inv[v][slots[u][stored]]) + 1)
            twins.append(tuple(row))
        return tuple(twins)

    def _info(self, u: int, side: int | None = None) -> NodeInfo:
        g = self.graph
        lab = self._label(u)
        if self.kind == "undirected" or self.kind == "out-only":
            return NodeInfo(lab, g.out_degree(u), side_index=side)
        return NodeInfo(lab, g.out_degree(u), g.in_degree(u))

    def init(self) -> NodeInfo:
        if self.initialized:
            raise OracleError("oracle already initialized")
        self._charge()
        self.initialized = True
        if self._init_policy == "fixed":
            v = self._init_node
        elif self._init_policy == "uniform":
            v = int(self._rng.integers(self.graph.n))
        else:
            pi = stationary_distribution(self.graph).probs
            v = int(self._rng.choice(self.graph.n, p=pi))
        resp = self._info(v)
        self._log("init", resp)
        return resp

    def query(self, l, i, etype: str | None = None) -> NodeInfo | None:
        self._charge()
        resp = self._answer(l, i, etype)
        self._log(format_request(l, i, etype), resp)
        return resp

    def _answer(self, l, i, etype):
        if self.kind == "undirected":
            if etype is not None:
                return None
            lists = self._out
        elif etype == "out":
            lists = self._out
        elif etype == "in" and self.kind == "bidirectional":
            lists = self._in
        else:
            return None
        v = self._node(l)
        if v is None or not _is_index(i) or not 1 <= i <= len(lists[v]):
            return None
        u = lists[v][i - 1]
        side = self._twin[v][i - 1] if self._twin is not None else None
        return self._info(u, side)


class StationaryOracle(_Oracle):
    """Returns i.i.d. nodes drawn from the lazy walk's stationary distribution."""

    kind = "stationary"

    def __init__(
        self,
        graph: Graph,
        rng: np.random.Generator,
        budget: int | None = None,
        record: bool = False,
        pi=None,
    ):
        super().__init__(budget=budget, record=record)
        self.graph = graph
        self._rng = rng
        probs = stationary_distribution(graph).probs if pi is None else np.asarray(pi, dtype=float)
        self.pi = probs
        self._cdf = np.cumsum(probs)
        self._cdf[-1] = 1.0
        self._label_arr = np.zeros(graph.n, dtype=np.int64)
        self._out_deg = graph.out_degrees()
        self._in_deg = graph.in_degrees() if graph.directed else None

    def init(self):
        raise OracleError("the stationary oracle only answers sample()")

    def sample(self) -> NodeInfo:
        labels, degs = self.sample_arrays(1)
        if self._in_deg is not None:
            return NodeInfo(int(labels[0]), int(degs[0]), int(self._in_deg[self._node_of[labels[0] - 1]]))
        return NodeInfo(int(labels[0]), int(degs[0]))

    def sample_arrays(self, r: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``r`` samples at once; returns ``(labels, degrees)`` arrays.

        Charges ``r`` query units; raises :class:`BudgetExhausted` without
        drawing anything if fewer than ``r`` remain.
        """
        t0 = self.queries_used
        self._charge(r)
        idx = np.searchsorted(self._cdf, self._rng.random(r), side="right")
        np.minimum(idx, self.graph.n - 1, out=idx)
        uniq, first = np.unique(idx, return_index=True)
        fresh = uniq[self._label_arr[uniq] == 0]
        if fresh.size:
            order = fresh[np.argsort(first[self._label_arr[uniq] == 0], kind="stable")]
            start = len(self._node_of) + 1
            self._label_arr[order] = np.arange(start, start + order.size)
            for v in order.tolist():
                self._label_of[v] = len(self._node_of) + 1
                self._node_of.append(v)
        labels = self._label_arr[idx]
        degs = self._out_deg[idx]
        if self.transcript is not None:
            for k, (lab, v) in enumerate(zip(labels.tolist(), idx.tolist())):
                resp = NodeInfo(lab, int(self._out_deg[v]), None if self._in_deg is None else int(self._in_deg[v]))
                self._log("sample", resp, t=t0 + k + 1)
        return labels, degs


class LazyConfigOracle(_Oracle):
    """Undirected oracle whose graph is a configuration-model draw made on demand.

    Stub ``i`` of node ``v`` is the ``i``-th slot of ``v``'s adjacency list.
    The first query of an unmatched stub pairs it with a uniformly random
    unmatched stub; answers carry the partner's slot as ``side_index``.
    Queries of already matched stubs are answered from the matching without
    new randomness.
    """

    kind = "lazy-config"

    def __init__(
        self,
        degrees: Sequence[int],
        rng,
        init: str = "stationary",
        init_node: int = 0,
        budget: int | None = None,
        record: bool = False,
    ):
        super().__init__(budget=budget, record=record)
        degs = [int(x) for x in degrees]
        if not degs or any(x < 1 for x in degs):
            raise GraphError("degrees must be positive")
        if sum(degs) % 2:
            raise GraphError(f"degree sum {sum(degs)} is odd")
        if init not in ("fixed", "stationary"):
            raise ValueError(f"unknown init policy {init!r}")
        self.degrees = tuple(degs)
        self.n = len(degs)
        self.total = sum(degs)
        self._rng = rng
        self._init_policy = init
        self._init_node = init_node
        self.initialized = False
        self._offset = np.concatenate([[0], np.cumsum(degs)]).astype(np.int64)
        self._owner = np.repeat(np.arange(self.n), degs)
        self.partner = np.full(self.total, -1, dtype=np.int64)
        self._free = list(range(self.total))
        self._pos = list(range(self.total))
        self.disclosed_edges = np.zeros(self.n, dtype=np.int64)
        self.fresh_responses = 0

    def _take(self, stub: int) -> None:
        k = self._pos[stub]
        last = self._free[-1]
        self._free[k] = last
        self._pos[last] = k
        self._free.pop()
        self._pos[stub] = -1

    def _slot(self, stub: int) -> tuple[int, int]:
        u = int(self._owner[stub])
        return u, int(stub - self._offset[u]) + 1

    def init(self) -> NodeInfo:
        if self.initialized:
            raise OracleError("oracle already initialized")
        self._charge()
        self.initialized = True
        if self._init_policy == "fixed":
            v = int(self._init_node)
        else:
            v = int(self._owner[int(self._rng.integers(self.total))])
        self.fresh_responses += 1
        resp = NodeInfo(self._label(v), self.degrees[v])
        self._log("init", resp)
        return resp

    def query(self, l, i, etype: str | None = None) -> NodeInfo | None:
        self._charge()
        resp = self._answer(l, i, etype)
        self._log(format_request(l, i, etype), resp)
        return resp

    def _answer(self, l, i, etype):
        if etype is not None:
            return None
        v = self._node(l)
        if v is None or not _is_index(i) or not 1 <= i <= self.degrees[v]:
            return None
        stub = int(self._offset[v]) + i - 1
        other = int(self.partner[stub])
        if other < 0:
            self._take(stub)
            other = self._free[int(self._rng.integers(len(self._free)))]
            self._take(other)
            self.partner[stub] = other
            self.partner[other] = stub
            u, _ = self._slot(other)
            self.disclosed_edges[v] += 1
            self.disclosed_edges[u] += 1
            self.fresh_responses += 1
        u, j = self._slot(other)
        return NodeInfo(self._label(u), self.degrees[u], side_index=j)

    @property
    def complete(self) -> bool:
        return not self._free

    def finish(self) -> None:
        """Match every remaining stub uniformly at random (no queries charged)."""
        while self._free:
            a = self._free[int(self._rng.integers(len(self._free)))]
            self._take(a)
            b = self._free[int(self._rng.integers(len(self._free)))]
            self._take(b)
            self.partner[a] = b
            self.partner[b] = a

    def realized_graph(self) -> Graph:
        if not self.complete:
            raise OracleError("matching is incomplete; call finish() first")
        edges = tuple(
            (int(self._owner[s]), int(self._owner[t]))
            for s, t in enumerate(self.partner.tolist())
            if s < t
        )
        return Graph(self.n, edges, directed=False, allows_multi=True)


class SensibleOracle(_Oracle):
    """Memoizing front end that never spends inner budget on known answers.

    Repeated queries, queries about unknown labels, out-of-range indices and
    in-queries to oracles that always answer them with null are handled
    locally.  ``queries_used`` counts calls to this wrapper, ``inner_queries``
    those that reached the wrapped oracle.
    """

    def __init__(self, inner: _Oracle, record: bool = False):
        super().__init__(budget=None, record=record)
        self.inner = inner
        self.kind = inner.kind
        self._memo: dict[tuple, NodeInfo | None] = {}
        self._init_resp: NodeInfo | None = None
        self._deg: dict[int, int] = {}
        self._indeg: dict[int, int] = {}

    @property
    def inner_queries(self) -> int:
        return self.inner.queries_used

    @property
    def remaining(self):
        return self.inner.remaining

    @property
    def initialized(self) -> bool:
        return self._init_resp is not None

    @property
    def num_labels(self) -> int:
        return len(self._deg)

    def _learn(self, resp: NodeInfo | None) -> None:
        if resp is not None:
            self._deg[resp.label] = resp.degree
            if resp.in_degree is not None:
                self._indeg[resp.label] = resp.in_degree

    def known_degree(self, label: int) -> int | None:
        return self._deg.get(label)

    def init(self) -> NodeInfo:
        if self._init_resp is None:
            resp = self.inner.init()
            self._init_resp = resp
            self._learn(resp)
        self.queries_used += 1
        self._log("init", self._init_resp)
        return self._init_resp

    def sample(self) -> NodeInfo:
        resp = self.inner.sample()
        self._learn(resp)
        self.queries_used += 1
        self._log("sample", resp)
        return resp

    def _provably_null(self, l, i, etype) -> bool:
        if l not in self._deg:
            return True
        if self.kind in ("undirected", "lazy-config"):
            if etype is not None:
                return True
            limit = self._deg[l]
        elif etype == "out":
            limit = self._deg[l]
        elif etype == "in" and self.kind == "bidirectional":
            limit = self._indeg.get(l)
        else:
            return True
        return limit is not None and not (_is_index(i) and 1 <= i <= limit)

    def query(self, l, i, etype: str | None = None) -> NodeInfo | None:
        key = (l, i, etype)
        if key in self._memo:
            resp = self._memo[key]
        elif self._provably_null(l, i, etype):
            resp = None
        else:
            resp = self.inner.query(l, i, etype)
            self._memo[key] = resp
            self._learn(resp)
            if resp is not None and resp.side_index is not None:
                self._memo[(resp.label, resp.side_index, etype)] = NodeInfo(
                    l, self._deg[l], side_index=i
                )
        self.queries_used += 1
        self._log(format_request(l, i, etype), resp)
        return resp

    def is_known(self, l, i, etype: str | None = None) -> bool:
        return (l, i, etype) in self._memo


def sensible_wrap(inner: _Oracle, record: bool = False) -> SensibleOracle:
    return SensibleOracle(inner, record=record)


def make_oracle(
    graph: Graph,
    kind: str,
    rng: np.random.Generator,
    init: str | None = None,
    init_node: int = 0,
    budget: int | None = None,
    record: bool = False,
):
    """Build an oracle of the given kind with the library's default policies."""
    if kind == "stationary":
        return StationaryOracle(graph, rng, budget=budget, record=record)
    if kind == "lazy-config":
        return LazyConfigOracle(
            graph.degree_sequence(), rng, init=init or "stationary", init_node=init_node,
            budget=budget, record=record,
        )
    return NeighbourOracle(
        graph, kind, rng, init=init or "fixed", init_node=init_node, budget=budget, record=record
    )
