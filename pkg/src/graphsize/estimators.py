"""Graph-size estimators.

* Katzir et al. collision estimator on samples from the stationary law, with
  the sample-size rule that guarantees an ``epsilon``-accurate answer with
  probability ``1 - delta``.
* Random-walk simulation of the stationary oracle through neighbour queries.
* ``EdgeSampling``: out-edge sampling with a +/-1 failure counter, guaranteed
  to find ``(1 - epsilon) n`` nodes when the supplied ``phi`` lower-bounds the
  graph's ``epsilon``-general conductance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .graph_core import GraphError
from .oracles import BudgetExhausted, SensibleOracle

__all__ = [
    "NoCollisionError",
    "SampleBatch",
    "KatzirStats",
    "katzir_stats",
    "katzir_estimate",
    "katzir_sample_size",
    "stationary_batch",
    "rw_stationary_batch",
    "walk_length",
    "WalkEstimate",
    "estimate_n_via_walks",
    "EdgeSamplingRun",
    "edge_sampling",
    "edge_sampling_centered",
    "centered_estimate",
    "block_length",
    "EstimateReport",
    "REPORT_FIELDS",
]


class NoCollisionError(ValueError):
    """No label repeats in the batch, so the collision estimator is undefined."""

    def __init__(self, msg: str, batch: "SampleBatch | None" = None):
        super().__init__(msg)
        self.batch = batch


@dataclass(frozen=True)
class SampleBatch:
    """Ordered ``(label, degree)`` samples."""

    labels: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        degrees = np.asarray(self.degrees, dtype=np.int64)
        if labels.shape != degrees.shape or labels.ndim != 1 or labels.size < 1:
            raise ValueError("a batch needs at least one (label, degree) pair")
        if np.any(degrees < 1):
            raise ValueError("sample degrees must be positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "SampleBatch":
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def r(self) -> int:
        return int(self.labels.size)

    @property
    def samples(self) -> list[tuple[int, int]]:
        return list(zip(self.labels.tolist(), self.degrees.tolist()))

    def extend(self, other: "SampleBatch") -> "SampleBatch":
        return SampleBatch(
            np.concatenate([self.labels, other.labels]),
            np.concatenate([self.degrees, other.degrees]),
        )


@dataclass(frozen=True)
class KatzirStats:
    r: int
    psi1: float
    psi_minus1: float
    collisions: int


def katzir_stats(batch: SampleBatch) -> KatzirStats:
    """Degree sums and ordered-pair collision count of a batch."""
    _, counts = np.unique(batch.labels, return_counts=True)
    collisions = int(np.sum(counts * (counts - 1)))
    deg = batch.degrees.astype(np.float64)
    return KatzirStats(batch.r, float(deg.sum()), float((1.0 / deg).sum()), collisions)


def katzir_estimate(batch: SampleBatch) -> float:
    """``(psi1 * psi_minus1 - r) / C``."""
    st = katzir_stats(batch)
    if st.collisions == 0:
        raise NoCollisionError(f"no collisions among {st.r} samples", batch)
    return (st.psi1 * st.psi_minus1 - st.r) / st.collisions


def katzir_sample_size(epsilon: float, delta: float, pi_two_norm: float, d_avg: float) -> int:
    """``ceil(1 + 32 / (epsilon^2 delta) * max(1/||pi||_2, d_avg))``."""
    if not (0 < epsilon <= 1 and 0 < delta <= 1):
        raise ValueError(f"epsilon and delta must lie in (0, 1], got {epsilon}, {delta}")
    if pi_two_norm <= 0:
        raise ValueError("pi_two_norm must be positive")
    val = 1 + 32.0 / (epsilon**2 * delta) * max(1.0 / pi_two_norm, d_avg)
    return int(math.ceil(val - 1e-9))


def stationary_batch(oracle, r: int) -> SampleBatch:
    """``r`` draws from a stationary oracle (``r`` query units)."""
    labels, degrees = oracle.sample_arrays(r)
    return SampleBatch(labels, degrees)


# ---------------------------------------------------------------------------
# random-walk sampling


def walk_length(T: int, s: int) -> int:
    """Steps per walk: ``ceil(2 T log(max(s, 2)))``, i.e. ``T log(1/rho)`` with ``rho = s^-2``."""
    return int(math.ceil(2 * T * math.log(max(s, 2))))


class _NeighbourTable:
    """Dense ``label -> slot -> neighbour label`` cache for lockstep walks."""

    def __init__(self):
        self.deg = np.zeros(16, dtype=np.int64)
        self.nbr = np.full((16, 1), -1, dtype=np.int64)

    def learn(self, label: int, degree: int) -> None:
        rows, cols = self.nbr.shape
        if label >= rows:
            grow = max(rows, label + 1 - rows)
            self.nbr = np.vstack([self.nbr, np.full((grow, cols), -1, dtype=np.int64)])
            self.deg = np.concatenate([self.deg, np.zeros(grow, dtype=np.int64)])
        if degree > self.nbr.shape[1]:
            extra = degree - self.nbr.shape[1]
            self.nbr = np.hstack([self.nbr, np.full((self.nbr.shape[0], extra), -1, dtype=np.int64)])
        self.deg[label] = degree


def rw_stationary_batch(oracle, T: int, s: int, rng: np.random.Generator) -> SampleBatch:
    """Endpoints of ``s`` independent lazy walks started at the init node.

    Each walk runs :func:`walk_length` steps.  Walks advance in lockstep;
    every neighbour slot is queried at most once (through a
    :class:`SensibleOracle`) and cached, so repeated traversals cost nothing.
    """
    if T < 1 or s < 1:
        raise ValueError("T and s must be positive")
    so = oracle if isinstance(oracle, SensibleOracle) else SensibleOracle(oracle)
    start = so.init()
    if start.degree == 0:
        raise GraphError("init node has degree 0: the graph is not connected")
    table = _NeighbourTable()
    table.learn(start.label, start.degree)
    pos = np.full(s, start.label, dtype=np.int64)
    for _ in range(walk_length(T, s)):
        movers = np.flatnonzero(rng.random(s) < 0.5)
        if movers.size == 0:
            continue
        here = pos[movers]
        slot = rng.integers(0, table.deg[here])
        nxt = table.nbr[here, slot]
        for k in np.flatnonzero(nxt < 0).tolist():
            l, i = int(here[k]), int(slot[k])
            if table.nbr[l, i] < 0:
                resp = so.query(l, i + 1)
                if resp is None or resp.degree == 0:
                    raise GraphError(f"walk reached a dead end at label {l}")
                table.learn(resp.label, resp.degree)
                table.nbr[l, i] = resp.label
                if resp.side_index is not None:
                    table.nbr[resp.label, resp.side_index - 1] = l
            nxt[k] = table.nbr[l, i]
        pos[movers] = nxt
    return SampleBatch(pos, table.deg[pos])


@dataclass(frozen=True)
class WalkEstimate:
    estimate: float
    queries: int
    r: int
    pilot_pi_two_norm: float
    pilot_d_avg: float


def estimate_n_via_walks(
    oracle,
    T: int,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
    pilot: int = 100,
) -> WalkEstimate:
    """Collision estimate of ``n`` from random-walk samples.

    A pilot batch gives plug-in values for ``d_avg`` (``s / sum(1/deg)``) and
    ``||pi||_2^2`` (collision rate, at least one collision assumed), which set
    the main batch size.  Without collisions the batch is doubled once before
    giving up.  ``queries`` counts every query that reached ``oracle``.
    """
    so = oracle if isinstance(oracle, SensibleOracle) else SensibleOracle(oracle)
    pb = rw_stationary_batch(so, T, pilot, rng)
    st = katzir_stats(pb)
    d_avg = pb.r / st.psi_minus1
    norm_sq = max(st.collisions, 1) / (pb.r * (pb.r - 1)) if pb.r > 1 else 1.0
    norm = math.sqrt(norm_sq)
    r = katzir_sample_size(epsilon, delta, norm, d_avg)
    batch = rw_stationary_batch(so, T, r, rng)
    try:
        est = katzir_estimate(batch)
    except NoCollisionError:
        batch = batch.extend(rw_stationary_batch(so, T, r, rng))
        try:
            est = katzir_estimate(batch)
        except NoCollisionError as exc:
            raise NoCollisionError(f"no collisions among {batch.r} samples after doubling", batch) from exc
    return WalkEstimate(est, so.inner_queries, batch.r, norm, d_avg)


# ---------------------------------------------------------------------------
# edge sampling


def block_length(phi: float) -> int:
    return int(math.ceil(2.0 / phi - 1e-12))


@dataclass
class EdgeSamplingRun:
    """Outcome of one EdgeSampling run.

    ``queries_used`` counts neighbour queries; the init call is not included.
    ``counter_trace`` lists the failure counter after every block, starting
    with its initial value 0.
    """

    estimate: int
    queries_used: int
    counter_trace: list[int]
    disclosed: set[int]
    queried: list[tuple[int, int]] = field(repr=False, default_factory=list)
    new_node_blocks: list[bool] = field(repr=False, default_factory=list)
    budget_exhausted: bool = False


def edge_sampling(oracle, ell: int, phi: float, rng: np.random.Generator) -> EdgeSamplingRun:
    """EdgeSampling: count nodes reached by randomly sampled unexplored out-edges.

    Queries are grouped into blocks of ``ceil(2/phi)`` draws, without
    replacement, from the pool of undisclosed out-edges of discovered nodes.
    A block stops at the first new node and lowers the counter; a block with
    no new node raises it.  The run ends when the counter reaches ``ell``, the
    pool is empty, or the oracle's budget runs out.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if not 0 < phi <= 1:
        raise ValueError(f"phi must lie in (0, 1], got {phi}")
    etype = None if oracle.kind in ("undirected", "lazy-config") else "out"
    run = EdgeSamplingRun(0, 0, [0], set())
    try:
        start = oracle.init()
    except BudgetExhausted:
        run.budget_exhausted = True
        return run
    seen = {start.label}
    pool = [(start.label, i) for i in range(1, start.degree + 1)]
    block = block_length(phi)
    y = 0
    try:
        while pool and y < ell:
            found = False
            for _ in range(block):
                if not pool:
                    break
                k = int(rng.integers(len(pool)))
                u, i = pool[k]
                pool[k] = pool[-1]
                pool.pop()
                resp = oracle.query(u, i, etype)
                run.queries_used += 1
                run.queried.append((u, i))
                if resp is not None and resp.label not in seen:
                    seen.add(resp.label)
                    pool.extend((resp.label, j) for j in range(1, resp.degree + 1))
                    found = True
                    break
            y += -1 if found else 1
            run.counter_trace.append(y)
            run.new_node_blocks.append(found)
    except BudgetExhausted:
        run.budget_exhausted = True
    run.disclosed = seen
    run.estimate = len(seen)
    return run


def centered_estimate(size: int | float, epsilon: float) -> float:
    """``size * (1 + epsilon / (2 - epsilon))``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return size * (1 + epsilon / (2 - epsilon))


def edge_sampling_centered(oracle, ell: int, phi: float, epsilon: float, rng: np.random.Generator) -> float:
    """Two-sided variant: EdgeSampling's count scaled by ``1 + epsilon/(2 - epsilon)``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return centered_estimate(edge_sampling(oracle, ell, phi, rng).estimate, epsilon)


# ---------------------------------------------------------------------------
# reporting

REPORT_FIELDS = ("estimator", "graph_id", "seed", "params", "estimate", "queries", "wall_time")


@dataclass(frozen=True)
class EstimateReport:
    """One estimator run, serialized as one CSV row in ``REPORT_FIELDS`` order.

    ``params`` is rendered as compact JSON with sorted keys; ``wall_time`` may
    be ``None`` (empty cell) to keep outputs byte-reproducible.
    """

    estimator: str
    graph_id: str
    seed: int
    params: dict
    estimate: float | None
    queries: int
    wall_time: float | None = None

    def to_row(self) -> list[str]:
        import json

        est = "" if self.estimate is None else repr(float(self.estimate))
        wall = "" if self.wall_time is None else f"{self.wall_time:.6f}"
        return [
            self.estimator,
            self.graph_id,
            str(self.seed),
            json.dumps(self.params, sort_keys=True, separators=(",", ":")),
            est,
            str(self.queries),
            wall,
        ]


assert tuple(f.name for f in fields(EstimateReport)) == REPORT_FIELDS
