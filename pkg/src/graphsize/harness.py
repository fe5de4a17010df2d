"""Experiment runner: registries, spec files, seeded trials, distinguish runs.

Experiment spec files are INI-style (``configparser``); sections and keys may
appear in any order::

    [experiment]
    name = comet-es
    trials = 20
    master_seed = 7
    output = comet.csv        ; optional
    workers = 1               ; optional
    record_wall_time = false  ; optional, breaks byte-reproducibility when on

    [graph]
    generator = comet
    n = 20
    k = 4

    [oracle]                  ; optional section
    kind = out-only
    init = fixed
    init_node = 0
    budget = 500

    [estimator]
    name = edge-sampling
    phi = exact
    ell = 10
    epsilon = 0.25

Every trial ``i`` gets its own 64-bit seed derived from ``(master_seed, i)``,
so trials can be re-run one at a time.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable

import numpy as np
from scipy.stats import binomtest

from . import generators as gen
from .estimators import (
    REPORT_FIELDS,
    EstimateReport,
    NoCollisionError,
    centered_estimate,
    edge_sampling,
    estimate_n_via_walks,
    katzir_estimate,
    katzir_sample_size,
    stationary_batch,
)
from .graph_core import (
    Graph,
    general_conductance,
    mixing_time_empirical,
    read_graph,
    stationary_distribution,
)
from .oracles import (
    INIT_POLICIES,
    NEIGHBOUR_KINDS,
    BudgetExhausted,
    NeighbourOracle,
    StationaryOracle,
)

__all__ = [
    "SpecError",
    "ExperimentSpec",
    "GENERATORS",
    "ESTIMATORS",
    "PAIRS",
    "parse_params",
    "build_graph",
    "build_pair",
    "graph_id",
    "trial_seed",
    "load_spec",
    "parse_spec",
    "run_estimator",
    "run_trial",
    "run_experiment",
    "reports_to_csv",
    "DistinguishTrial",
    "DistinguishResult",
    "run_distinguish",
    "budget_sweep",
    "distinguish_bound",
]


class SpecError(ValueError):
    """Validation failure; ``problems`` lists every violated field."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid specification:\n  " + "\n  ".join(self.problems))


# ---------------------------------------------------------------------------
# parameter parsing


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).replace(",", " ").split())


def _at_least(lo: int) -> Callable[[Any], int]:
    def conv(text):
        val = int(text)
        if val < lo:
            raise ValueError(f"must be at least {lo}")
        return val

    return conv


def _unit(text) -> float:
    """A float in ``(0, 1]``."""
    val = float(text)
    if not 0 < val <= 1:
        raise ValueError("must lie in (0, 1]")
    return val


def _open_unit(text) -> float:
    val = float(text)
    if not 0 < val < 1:
        raise ValueError("must lie in (0, 1)")
    return val


def _float_or_exact(text):
    if str(text).strip().lower() == "exact":
        return "exact"
    return _unit(text)


def _int_or_auto(text):
    if str(text).strip().lower() == "auto":
        return "auto"
    return _at_least(1)(text)


_CONVERTERS: dict[Any, Callable] = {int: int, float: float, bool: _bool, str: str}


@dataclass(frozen=True)
class Param:
    kind: Any
    default: Any = None
    required: bool = True

    def convert(self, raw):
        conv = _CONVERTERS.get(self.kind, self.kind)
        return conv(raw)


def _opt(kind, default) -> Param:
    return Param(kind, default, required=False)


def parse_params(schema: dict[str, Param], raw: dict[str, Any], where: str) -> tuple[dict, list[str]]:
    """Convert and check ``raw`` against ``schema``; returns ``(params, problems)``."""
    problems = []
    out = {}
    norm = {k.replace("-", "_"): v for k, v in raw.items()}
    for key in sorted(set(norm) - set(schema)):
        problems.append(f"{where}: unknown parameter {key!r} (expected one of {sorted(schema)})")
    for key, p in schema.items():
        if key not in norm:
            if p.required:
                problems.append(f"{where}: missing parameter {key!r}")
            elif p.default is not None:
                out[key] = p.default
            continue
        try:
            out[key] = p.convert(norm[key])
        except (TypeError, ValueError) as exc:
            why = str(exc) if str(exc).startswith("must") else ""
            problems.append(f"{where}: parameter {key!r} has invalid value {norm[key]!r}" + (f" ({why})" if why else ""))
    return out, problems


# ---------------------------------------------------------------------------
# registries


@dataclass(frozen=True)
class GeneratorEntry:
    build: Callable[..., Graph]
    params: dict[str, Param]
    random: bool = False


def _side(pair: gen.GadgetPair, side: str) -> Graph:
    if side not in ("g", "g_prime"):
        raise ValueError(f"side must be 'g' or 'g_prime', got {side!r}")
    return pair.g if side == "g" else pair.g_prime


GENERATORS: dict[str, GeneratorEntry] = {
    "comet": GeneratorEntry(lambda rng, n, k: gen.comet(n, k), {"n": Param(int), "k": Param(int)}),
    "double-comet": GeneratorEntry(
        lambda rng, n, k: gen.double_comet(n, k), {"n": Param(int), "k": Param(int)}
    ),
    "sun": GeneratorEntry(lambda rng, n: gen.sun(n), {"n": Param(int)}),
    "bright-sun": GeneratorEntry(lambda rng, n: gen.bright_sun(n), {"n": Param(int)}),
    "line": GeneratorEntry(lambda rng, n: gen.line(n), {"n": Param(int)}),
    "path": GeneratorEntry(lambda rng, n: gen.path(n), {"n": Param(int)}),
    "cycle": GeneratorEntry(
        lambda rng, n, directed: gen.cycle(n, directed), {"n": Param(int), "directed": _opt(bool, False)}
    ),
    "complete": GeneratorEntry(
        lambda rng, n, directed: gen.complete_graph(n, directed),
        {"n": Param(int), "directed": _opt(bool, False)},
    ),
    "gnp": GeneratorEntry(lambda rng, n, p: gen.gnp(n, p, rng), {"n": Param(int), "p": Param(float)}, True),
    "gnp-pendant": GeneratorEntry(
        lambda rng, n, p, extra_copy: gen.gnp_pendant(n, p, extra_copy, rng),
        {"n": Param(int), "p": Param(float), "extra_copy": _opt(bool, False)},
        True,
    ),
    "configuration": GeneratorEntry(
        lambda rng, degrees: gen.configuration_model(degrees, rng), {"degrees": Param(_int_list)}, True
    ),
    "regular": GeneratorEntry(
        lambda rng, d, n: gen.random_regular(d, n, rng), {"d": Param(int), "n": Param(int)}, True
    ),
    "doubled-cycle": GeneratorEntry(
        lambda rng, n, side: _side(gen.doubled_copy(gen.cycle(n), rng), side),
        {"n": Param(int), "side": _opt(str, "g_prime")},
        True,
    ),
    "expander-cycle": GeneratorEntry(
        lambda rng, n, side: _side(gen.expander_augmented(gen.cycle(n), rng), side),
        {"n": Param(int), "side": _opt(str, "g_prime")},
        True,
    ),
    "conductance-gadget": GeneratorEntry(
        lambda rng, n, phi, epsilon, delta, side: _side(gen.conductance_gadget(n, phi, epsilon, delta, rng), side),
        {
            "n": Param(int),
            "phi": Param(float),
            "epsilon": Param(float),
            "delta": _opt(float, 0.0),
            "side": _opt(str, "g"),
        },
        True,
    ),
    "file": GeneratorEntry(lambda rng, path: read_graph(path), {"path": Param(str)}),
}

PAIRS: dict[str, GeneratorEntry] = {
    "doubled-cycle": GeneratorEntry(lambda rng, n: gen.doubled_copy(gen.cycle(n), rng), {"n": Param(int)}, True),
    "expander-cycle": GeneratorEntry(
        lambda rng, n: gen.expander_augmented(gen.cycle(n), rng), {"n": Param(int)}, True
    ),
    "comet": GeneratorEntry(lambda rng, n, k: gen.comet_pair(n, k), {"n": Param(int), "k": Param(int)}),
    "conductance-gadget": GeneratorEntry(
        lambda rng, n, phi, epsilon, delta: gen.conductance_gadget(n, phi, epsilon, delta, rng),
        {"n": Param(int), "phi": Param(float), "epsilon": Param(float), "delta": _opt(float, 0.0)},
        True,
    ),
}


def _lookup(table: dict, name: str, what: str):
    if name not in table:
        raise SpecError([f"unknown {what} {name!r}; available: {', '.join(sorted(table))}"])
    return table[name]


def build_graph(name: str, raw: dict[str, Any], rng: np.random.Generator) -> Graph:
    entry = _lookup(GENERATORS, name, "generator")
    params, problems = parse_params(entry.params, raw, f"generator {name}")
    if problems:
        raise SpecError(problems)
    return entry.build(rng, **params)


def build_pair(name: str, raw: dict[str, Any], rng: np.random.Generator) -> gen.GadgetPair:
    entry = _lookup(PAIRS, name, "pair")
    params, problems = parse_params(entry.params, raw, f"pair {name}")
    if problems:
        raise SpecError(problems)
    return entry.build(rng, **params)


def graph_id(name: str, params: dict[str, Any]) -> str:
    inner = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{name}({inner})"


@dataclass(frozen=True)
class OracleConfig:
    kind: str | None = None
    init: str = "fixed"
    init_node: int = 0
    budget: int | None = None


@dataclass
class TrialOutcome:
    estimate: float | None
    queries: int
    params: dict
    transcript: list[str] | None = None


def _neighbour_oracle(graph, cfg: OracleConfig, default_kind, rng, record):
    kind = cfg.kind or default_kind
    return NeighbourOracle(
        graph, kind, rng, init=cfg.init, init_node=cfg.init_node, budget=cfg.budget, record=record
    )


def _run_katzir(graph, params, cfg, orng, erng, record):
    pi = stationary_distribution(graph)
    r = params.get("r")
    if r is None:
        r = katzir_sample_size(params["epsilon"], params["delta"], pi.two_norm(), graph.average_degree())
    oracle = StationaryOracle(graph, orng, budget=cfg.budget, record=record, pi=pi.probs)
    try:
        est = katzir_estimate(stationary_batch(oracle, r))
    except (NoCollisionError, BudgetExhausted):
        est = None
    return TrialOutcome(est, oracle.queries_used, dict(params, r=r), oracle.transcript)


def _run_walk(graph, params, cfg, orng, erng, record):
    T = params["T"]
    if T == "auto":
        T = mixing_time_empirical(graph)
    oracle = _neighbour_oracle(graph, cfg, "undirected", orng, record)
    resolved = dict(params, T=T)
    try:
        res = estimate_n_via_walks(oracle, T, params["epsilon"], params["delta"], erng, pilot=params["pilot"])
    except (NoCollisionError, BudgetExhausted):
        return TrialOutcome(None, oracle.queries_used, resolved, oracle.transcript)
    resolved["r"] = res.r
    return TrialOutcome(res.estimate, oracle.queries_used, resolved, oracle.transcript)


def _resolve_phi(graph, params):
    phi = params["phi"]
    if phi == "exact":
        phi = general_conductance(graph, params["epsilon"]).phi
    return phi


def _run_edge_sampling(graph, params, cfg, orng, erng, record, centered=False):
    phi = _resolve_phi(graph, params)
    oracle = _neighbour_oracle(graph, cfg, "out-only" if graph.directed else "undirected", orng, record)
    run = edge_sampling(oracle, params["ell"], phi, erng)
    est = centered_estimate(run.estimate, params["epsilon"]) if centered else run.estimate
    return TrialOutcome(est, oracle.queries_used, dict(params, phi=phi), oracle.transcript)


@dataclass(frozen=True)
class EstimatorEntry:
    run: Callable[..., TrialOutcome]
    params: dict[str, Param]
    kinds: tuple[str, ...]


ESTIMATORS: dict[str, EstimatorEntry] = {
    "katzir": EstimatorEntry(
        _run_katzir,
        {"r": _opt(_at_least(1), None), "epsilon": _opt(_unit, 0.3), "delta": _opt(_unit, 0.3)},
        ("stationary",),
    ),
    "katzir-walk": EstimatorEntry(
        _run_walk,
        {"T": Param(_int_or_auto), "epsilon": _opt(_unit, 0.3), "delta": _opt(_unit, 0.3), "pilot": _opt(_at_least(2), 100)},
        ("undirected",),
    ),
    "edge-sampling": EstimatorEntry(
        _run_edge_sampling,
        {"phi": Param(_float_or_exact), "ell": Param(_at_least(1)), "epsilon": _opt(_open_unit, 0.25)},
        NEIGHBOUR_KINDS,
    ),
    "edge-sampling-centered": EstimatorEntry(
        partial(_run_edge_sampling, centered=True),
        {"phi": Param(_float_or_exact), "ell": Param(_at_least(1)), "epsilon": Param(_open_unit)},
        NEIGHBOUR_KINDS,
    ),
}


def _check_oracle(cfg: OracleConfig, estimator: str) -> list[str]:
    problems = []
    entry = ESTIMATORS.get(estimator)
    if cfg.kind is not None and entry is not None and cfg.kind not in entry.kinds:
        problems.append(f"oracle: kind {cfg.kind!r} does not fit estimator {estimator!r} (allowed: {', '.join(entry.kinds)})")
    if cfg.init not in INIT_POLICIES:
        problems.append(f"oracle: init must be one of {INIT_POLICIES}, got {cfg.init!r}")
    if cfg.init_node < 0:
        problems.append("oracle: init_node must be non-negative")
    if cfg.budget is not None and cfg.budget < 1:
        problems.append("oracle: budget must be at least 1")
    return problems


def trial_seed(master_seed: int, trial: int) -> int:
    """Stable 64-bit seed for one trial of an experiment."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return int(ss.generate_state(1, np.uint64)[0])


def run_estimator(
    graph: Graph,
    estimator: str,
    raw_params: dict[str, Any],
    seed: int,
    oracle: OracleConfig = OracleConfig(),
    record: bool = False,
) -> TrialOutcome:
    """Run one estimator on ``graph`` with all randomness drawn from ``seed``."""
    entry = _lookup(ESTIMATORS, estimator, "estimator")
    params, problems = parse_params(entry.params, raw_params, f"estimator {estimator}")
    problems += _check_oracle(oracle, estimator)
    if problems:
        raise SpecError(problems)
    o_ss, e_ss = np.random.SeedSequence(seed).spawn(2)
    return entry.run(graph, params, oracle, np.random.default_rng(o_ss), np.random.default_rng(e_ss), record)


# ---------------------------------------------------------------------------
# experiment specs


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    generator: str
    generator_params: dict[str, Any]
    estimator: str
    estimator_params: dict[str, Any]
    trials: int
    master_seed: int
    oracle: OracleConfig = OracleConfig()
    output: str | None = None
    workers: int = 1
    record_wall_time: bool = False

    def validate(self) -> None:
        problems = []
        if not self.name:
            problems.append("experiment: name must be non-empty")
        if self.trials < 1:
            problems.append(f"experiment: trials must be at least 1, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            problems.append("experiment: master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            problems.append("experiment: workers must be at least 1")
        if not self.generator:
            problems.append("graph: missing 'generator'")
        elif self.generator not in GENERATORS:
            problems.append(f"graph: unknown generator {self.generator!r}; available: {', '.join(sorted(GENERATORS))}")
        else:
            problems += parse_params(GENERATORS[self.generator].params, self.generator_params, "graph")[1]
        if not self.estimator:
            problems.append("estimator: missing 'name'")
        elif self.estimator not in ESTIMATORS:
            problems.append(f"estimator: unknown estimator {self.estimator!r}; available: {', '.join(sorted(ESTIMATORS))}")
        else:
            problems += parse_params(ESTIMATORS[self.estimator].params, self.estimator_params, "estimator")[1]
        problems += _check_oracle(self.oracle, self.estimator)
        if problems:
            raise SpecError(problems)


_SECTIONS = {
    "experiment": {"name", "trials", "master_seed", "output", "workers", "record_wall_time"},
    "graph": None,
    "oracle": {"kind", "init", "init_node", "budget"},
    "estimator": None,
}


def parse_spec(text: str) -> ExperimentSpec:
    """Parse and validate spec-file text; :class:`SpecError` lists every problem."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError([f"syntax: {exc}"]) from None
    problems = []
    for sec in cp.sections():
        if sec not in _SECTIONS:
            problems.append(f"unknown section [{sec}]")
    for sec in ("experiment", "graph", "estimator"):
        if not cp.has_section(sec):
            problems.append(f"missing section [{sec}]")

    def get(sec, key, conv, default=..., required=False):
        if not cp.has_section(sec) or key not in cp[sec]:
            if required:
                problems.append(f"{sec}: missing {key!r}")
            return None if default is ... else default
        try:
            return conv(cp[sec][key])
        except ValueError:
            problems.append(f"{sec}: {key!r} has invalid value {cp[sec][key]!r}")
            return None if default is ... else default

    for sec in ("experiment", "oracle"):
        if cp.has_section(sec):
            for key in cp[sec]:
                if key not in _SECTIONS[sec]:
                    problems.append(f"{sec}: unknown key {key!r}")

    name = get("experiment", "name", str, "", required=True)
    trials = get("experiment", "trials", int, 0, required=True)
    master_seed = get("experiment", "master_seed", int, 0, required=True)
    output = get("experiment", "output", str, None)
    workers = get("experiment", "workers", int, 1)
    wall = get("experiment", "record_wall_time", _bool, False)
    budget = get("oracle", "budget", int, None)
    oracle = OracleConfig(
        kind=get("oracle", "kind", str, None),
        init=get("oracle", "init", str, "fixed"),
        init_node=get("oracle", "init_node", int, 0),
        budget=budget,
    )
    graph_raw = dict(cp["graph"]) if cp.has_section("graph") else {}
    generator = graph_raw.pop("generator", None)
    est_raw = dict(cp["estimator"]) if cp.has_section("estimator") else {}
    estimator = est_raw.pop("name", None)

    spec = ExperimentSpec(
        name=name or "",
        generator=generator or "",
        generator_params=graph_raw,
        estimator=estimator or "",
        estimator_params=est_raw,
        trials=trials if trials is not None else 0,
        master_seed=master_seed if master_seed is not None else 0,
        oracle=oracle,
        output=output,
        workers=workers,
        record_wall_time=wall,
    )
    try:
        spec.validate()
    except SpecError as exc:
        problems += [p for p in exc.problems if p not in problems]
    if problems:
        raise SpecError(problems)
    return spec


def load_spec(path: str | Path) -> ExperimentSpec:
    return parse_spec(Path(path).read_text())


# ---------------------------------------------------------------------------
# running


def run_trial(spec: ExperimentSpec, trial: int, transcript_dir: str | None = None) -> EstimateReport:
    seed = trial_seed(spec.master_seed, trial)
    g_ss, est_ss = np.random.SeedSequence(seed).spawn(2)
    graph = build_graph(spec.generator, spec.generator_params, np.random.default_rng(g_ss))
    t0 = time.perf_counter()
    out = run_estimator(
        graph,
        spec.estimator,
        spec.estimator_params,
        int(est_ss.generate_state(1, np.uint64)[0]),
        spec.oracle,
        record=transcript_dir is not None,
    )
    wall = time.perf_counter() - t0
    if transcript_dir is not None and out.transcript is not None:
        path = Path(transcript_dir) / f"{spec.name}-trial{trial:05d}.log"
        path.write_text("".join(line + "\n" for line in out.transcript))
    if out.estimate is not None and math.isinf(out.estimate):
        out.estimate = None
    gen_params, _ = parse_params(GENERATORS[spec.generator].params, spec.generator_params, "graph")
    return EstimateReport(
        spec.estimator,
        graph_id(spec.generator, gen_params),
        seed,
        out.params,
        out.estimate,
        out.queries,
        wall if spec.record_wall_time else None,
    )


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(REPORT_FIELDS)
    for rep in reports:
        w.writerow(rep.to_row())
    return buf.getvalue()


def run_experiment(
    spec: ExperimentSpec,
    transcript_dir: str | None = None,
    workers: int | None = None,
) -> list[EstimateReport]:
    """Run every trial; rows come back (and are written) in trial order.

    With ``spec.output`` set the CSV is written there.  Output bytes depend
    only on the spec, never on ``workers``.
    """
    spec.validate()
    if transcript_dir is not None:
        os.makedirs(transcript_dir, exist_ok=True)
    nworkers = workers or spec.workers
    job = partial(run_trial, spec, transcript_dir=transcript_dir)
    if nworkers > 1 and spec.trials > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as ex:
            reports = list(ex.map(job, range(spec.trials)))
    else:
        reports = [job(i) for i in range(spec.trials)]
    if spec.output:
        with open(spec.output, "w", newline="") as fh:
            fh.write(reports_to_csv(reports))
    return reports


# ---------------------------------------------------------------------------
# distinguishability


@dataclass(frozen=True)
class DistinguishTrial:
    budget: int
    truth: int
    guess: int
    estimate: float
    queries: int

    @property
    def correct(self) -> bool:
        return self.truth == self.guess


@dataclass(frozen=True)
class DistinguishResult:
    budget: int
    trials: int
    correct: int
    ci_low: float
    ci_high: float
    oracle_kind: str
    records: tuple[DistinguishTrial, ...] = field(default=(), repr=False)

    @property
    def accuracy(self) -> float:
        return self.correct / self.trials


def distinguish_bound(pair: gen.GadgetPair, oracle_kind: str) -> float:
    """Natural query scale of a pair: ``1/||pi_G||`` for samples, ``n_G`` for crawls."""
    if oracle_kind == "stationary":
        return 1.0 / stationary_distribution(pair.g).two_norm()
    return float(pair.n_true[0])


def run_distinguish(
    pair: gen.GadgetPair,
    budget: int,
    trials: int,
    rng: np.random.Generator,
    oracle_kind: str = "stationary",
    keep_records: bool = False,
) -> DistinguishResult:
    """Accuracy of a fixed decision rule at telling ``pair.g`` from ``pair.g_prime``.

    Each trial hides one of the two graphs (fair coin) behind an oracle with a
    hard budget.  With the stationary oracle the rule spends the whole budget
    on samples and thresholds the collision estimate (no collision counts as
    "large"); with neighbour oracles it crawls until the budget or the graph
    runs out and thresholds the number of nodes seen.  The threshold is the
    midpoint of the two true sizes.  The rule is a reasonable one, not an
    optimal one.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    graphs = (pair.g, pair.g_prime)
    mid = (pair.n_true[0] + pair.n_true[1]) / 2
    pis = [stationary_distribution(g).probs for g in graphs] if oracle_kind == "stationary" else None
    records = []
    for _ in range(trials):
        truth = int(rng.integers(2))
        g = graphs[truth]
        if oracle_kind == "stationary":
            oracle = StationaryOracle(g, rng, budget=budget, pi=pis[truth])
            try:
                est = katzir_estimate(stationary_batch(oracle, budget))
            except NoCollisionError:
                est = math.inf
        else:
            oracle = NeighbourOracle(g, oracle_kind, rng, budget=budget)
            est = float(edge_sampling(oracle, budget + 1, 1.0, rng).estimate)
        assert oracle.queries_used <= budget
        records.append(DistinguishTrial(budget, truth, int(est > mid), est, oracle.queries_used))
    correct = sum(r.correct for r in records)
    ci = binomtest(correct, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return DistinguishResult(
        budget, trials, correct, float(ci.low), float(ci.high), oracle_kind,
        tuple(records) if keep_records else (),
    )


def budget_sweep(
    pair: gen.GadgetPair,
    budgets,
    trials: int,
    rng: np.random.Generator,
    oracle_kind: str = "stationary",
) -> list[DistinguishResult]:
    return [run_distinguish(pair, int(b), trials, rng, oracle_kind) for b in budgets]
