"""Scripted oracle sessions whose transcripts are committed under ``golden/``.

Regenerate with ``python tests/golden_scripts.py`` (then check the diff by hand).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from graphsize import Graph, LazyConfigOracle, NeighbourOracle, SensibleOracle, comet, complete_graph

GOLDEN = Path(__file__).parent / "golden"
ORACLE_SEED = 7


def sweep(oracle, max_index=4, etypes=(None, "out", "in")):
    """init, then every (label, index, etype) with labels up to one past the
    disclosed ones, re-reading the label count as it grows; label 0 and
    index 0 are probed too."""
    oracle.init()
    l = 0
    while l <= oracle.num_labels + 1:
        for i in range(max_index + 1):
            for e in etypes:
                oracle.query(l, i, e)
        l += 1
    return oracle.transcript


def multigraph():
    # double edge between the two nodes plus a loop at node 0
    return Graph(2, ((0, 1), (0, 1), (0, 0)), allows_multi=True)


def sessions():
    rng = lambda: np.random.default_rng(ORACLE_SEED)  # noqa: E731
    k3 = complete_graph(3)
    c82 = comet(8, 2)
    mg = multigraph()
    yield "k3_undirected", sweep(NeighbourOracle(k3, "undirected", rng(), record=True), 3)
    yield "k3_sensible", sweep(SensibleOracle(NeighbourOracle(k3, "undirected", rng()), record=True), 3)
    for kind in ("out-only", "out+indeg", "bidirectional"):
        yield f"comet8_2_{kind}", sweep(NeighbourOracle(c82, kind, rng(), record=True))
    yield "comet8_2_unshuffled", sweep(NeighbourOracle(c82, "out-only", shuffle=False, record=True))
    yield "multi2_undirected", sweep(NeighbourOracle(mg, "undirected", rng(), side_info=True, record=True), 5)
    yield "multi2_lazy", sweep(LazyConfigOracle((6, 2), rng(), init="fixed", record=True), 7)


def render(lines):
    return "".join(line + "\n" for line in lines)


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, lines in sessions():
        (GOLDEN / f"{name}.txt").write_text(render(lines))
        print(name, len(lines))
