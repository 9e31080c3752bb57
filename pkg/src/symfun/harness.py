"""Exhaustive and randomized verification of the block protocols.

A scenario names a protocol and a network. Verification runs the protocol
on inputs, counts nodes that decoded a wrong function block, records the
worst bit count per edge with a witness input, and compares it with the
closed-form bounds.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

from .bounds import BoundReport, interval_bounds, threshold_complexity
from .errors import DomainError, ProtocolError, ResourceError
from .funckernel import INTERVAL, THRESHOLD, FunctionSpec
from .graphnet import as_spanning_tree
from .network import Edge, Network
from .rng import SplitMix64
from .treenet import (
    TreeNetwork,
    TreeProtocol,
    assignment_count,
    assignment_from_index,
    edge_components,
    sweep_assignments,
)
from .twonode import (
    TwoNodeInstance,
    TwoNodeProtocol,
    pair_from_index,
    sweep_pairs,
)

log = logging.getLogger(__name__)

MAX_INPUTS = 2**26


@dataclass(frozen=True)
class TwoNodeScenario:
    m1: int
    m2: int
    spec: FunctionSpec
    starter: int = 1

    def instance(self, B: int) -> TwoNodeInstance:
        return TwoNodeInstance(self.m1, self.m2, self.spec, B, self.starter)

    def describe(self) -> dict:
        return {"type": "two-node", "m1": self.m1, "m2": self.m2,
                "starter": self.starter, "function": self.spec.to_dict()}


@dataclass(frozen=True)
class TreeScenario:
    tree: TreeNetwork
    spec: FunctionSpec

    def describe(self) -> dict:
        return {"type": "tree", "network": self.tree.to_dict(), "function": self.spec.to_dict()}


@dataclass(frozen=True)
class SubtreeScenario:
    """Tree aggregation on a spanning tree of a general network."""

    net: Network
    tree_edges: tuple[Edge, ...]
    spec: FunctionSpec
    root: Optional[int] = None

    def tree(self) -> TreeNetwork:
        return as_spanning_tree(self.net, self.tree_edges, root=self.root)

    def describe(self) -> dict:
        return {"type": "subtree", "network": self.net.to_dict(),
                "tree_edges": [list(e) for e in self.tree_edges],
                "root": self.tree().root, "function": self.spec.to_dict()}


Scenario = Union[TwoNodeScenario, TreeScenario, SubtreeScenario]


@dataclass(frozen=True)
class EdgeResult:
    edge: Edge
    lower: float
    measured: int
    upper: float
    lower_bits: int
    upper_bits: int
    within_bounds: bool
    witness: Optional[dict] = None
    up_bits: int = 0
    down_bits: int = 0

    @property
    def label(self) -> str:
        return f"{self.edge[0]}-{self.edge[1]}"

    def to_dict(self) -> dict:
        return {
            "edge": list(self.edge),
            "lower": self.lower,
            "measured": self.measured,
            "upper": self.upper,
            "lower_bits": self.lower_bits,
            "upper_bits": self.upper_bits,
            "up_bits": self.up_bits,
            "down_bits": self.down_bits,
            "within_bounds": self.within_bounds,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class VerificationReport:
    scenario: dict
    B: int
    mode: str
    instances_checked: int
    decode_errors: int
    edges: tuple[EdgeResult, ...]
    seed: Optional[int] = None
    trials: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.decode_errors == 0 and all(e.within_bounds for e in self.edges)

    @property
    def worst_bits(self) -> dict[Edge, int]:
        return {e.edge: e.measured for e in self.edges}

    @property
    def argmax_inputs(self) -> dict[Edge, Optional[dict]]:
        return {e.edge: e.witness for e in self.edges}

    def edge(self, u: int, v: int) -> EdgeResult:
        key = (min(u, v), max(u, v))
        for e in self.edges:
            if e.edge == key:
                return e
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "B": self.B,
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "instances_checked": self.instances_checked,
            "decode_errors": self.decode_errors,
            "ok": self.ok,
            "edges": [e.to_dict() for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge", "lower", "measured", "upper", "pass"])
        for e in self.edges:
            w.writerow([e.label, f"{e.lower:.6f}", e.measured, f"{e.upper:.6f}",
                        "pass" if e.within_bounds and self.decode_errors == 0 else "fail"])
        return buf.getvalue()


def _bound_for(spec: FunctionSpec, s_a: int, s_b: int, scheme_size: int) -> BoundReport:
    if spec.kind == THRESHOLD:
        return threshold_complexity(spec.theta, s_a, s_b)
    if spec.kind == INTERVAL:
        return interval_bounds(spec.a, spec.b, s_a, s_b)
    # arbitrary sum function: only the scheme's own cost is known
    return BoundReport(0.0, math.log2(scheme_size), 1, scheme_size, None)


def _edge_result(edge: Edge, rep: BoundReport, B: int, measured: int, exhaustive: bool,
                 witness: Optional[dict], up: int, down: int) -> EdgeResult:
    lo_bits = rep.lower_block_bits(B)
    hi_bits = rep.upper_block_bits(B)
    ok = measured <= hi_bits
    if exhaustive and rep.valid:
        ok = ok and measured >= lo_bits
    return EdgeResult(edge, rep.lower_bits_per_instance, measured, rep.upper_bits_per_instance,
                      lo_bits, hi_bits, ok, witness, up, down)


def _tree_of(scenario: Scenario) -> TreeNetwork:
    return scenario.tree if isinstance(scenario, TreeScenario) else scenario.tree()


def input_count(scenario: Scenario, B: int) -> int:
    if isinstance(scenario, TwoNodeScenario):
        return scenario.instance(B).pair_count
    return assignment_count(_tree_of(scenario), B)


# -- exhaustive sweeps -------------------------------------------------------

def _two_node_shard(args):
    scenario, B, start, stop = args
    return sweep_pairs(TwoNodeProtocol(scenario.instance(B)), start, stop)


def _tree_shard(args):
    tree, spec, B, start, stop = args
    return sweep_assignments(TreeProtocol(tree, spec, B), start, stop)


def _shards(total: int, jobs: int) -> list[tuple[int, int]]:
    pieces = max(1, min(total, jobs * 4))
    step = -(-total // pieces)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def _map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def exhaustive_verify(scenario: Scenario, B: int, jobs: int = 1) -> VerificationReport:
    """Run every input of the scenario.

    The result does not depend on ``jobs``: shards are merged by summing
    counts and taking per-edge maxima, ties going to the earliest input.

    Raises
    ------
    ResourceError
        If the input space exceeds 2^26 (use :func:`random_verify`).
    """
    total = input_count(scenario, B)
    if total > MAX_INPUTS:
        raise ResourceError(f"{total} inputs exceeds the exhaustive guard of 2^26; use random_verify")
    log.info("exhaustive sweep of %d inputs (jobs=%d)", total, jobs)

    if isinstance(scenario, TwoNodeScenario):
        inst = scenario.instance(B)
        proto = TwoNodeProtocol(inst)
        n_start = (inst.max_of(inst.starter) + 1) ** B
        parts = _map(_two_node_shard, [(scenario, B, lo, hi) for lo, hi in _shards(n_start, jobs)], jobs)
        count = sum(p.count for p in parts)
        errors = sum(p.errors for p in parts)
        worst, witness = -1, None
        for p in parts:
            if p.worst > worst or (p.worst == worst and p.witness < witness):
                worst, witness = p.worst, p.witness
        x1, x2 = pair_from_index(inst, witness)
        transcript, _, _ = proto.run(x1, x2)
        if transcript.total != worst or not proto.replay_matches(transcript, x1, x2):
            raise ProtocolError("witness replay does not reproduce the sweep")
        totals = transcript.totals
        up = totals.get((inst.starter, inst.responder), 0)
        rep = _bound_for(scenario.spec, scenario.m1, scenario.m2, proto.partition.scheme_size)
        edge = _edge_result((1, 2), rep, B, worst, True,
                            {"1": list(x1), "2": list(x2)}, up, worst - up)
        return VerificationReport(scenario.describe(), B, "exhaustive", count, errors, (edge,))

    tree = _tree_of(scenario)
    proto = TreeProtocol(tree, scenario.spec, B)
    tasks = [(tree, scenario.spec, B, lo, hi) for lo, hi in _shards(total, jobs)]
    parts = _map(_tree_shard, tasks, jobs)
    count = sum(p.count for p in parts)
    errors = sum(p.errors for p in parts)
    edges = []
    for e in _report_edges(scenario, tree):
        if e not in tree.edges:
            edges.append(EdgeResult(e, 0.0, 0, 0.0, 0, 0, True))
            continue
        best = None
        for p in parts:
            t, u, d = p.worst[e]
            cand = (t, -p.witness.get(e, 0), u, d, p.witness.get(e))
            if best is None or cand[:2] > best[:2]:
                best = cand
        t, _, u, d, idx = best
        wit = assignment_from_index(tree, B, idx)
        edges.append(_edge_result(e, _tree_bound(tree, proto, scenario.spec, e), B, t, True,
                                  {str(k): list(v) for k, v in wit.items()}, u, d))
    return VerificationReport(scenario.describe(), B, "exhaustive", count, errors, tuple(edges))


def _report_edges(scenario: Scenario, tree: TreeNetwork) -> tuple[Edge, ...]:
    if isinstance(scenario, SubtreeScenario):
        return scenario.net.edges
    return tree.edges


def _tree_bound(tree: TreeNetwork, proto: TreeProtocol, spec: FunctionSpec, e: Edge) -> BoundReport:
    side, _ = edge_components(tree, e)
    s_a = tree.max_sum(side)
    child = e[0] if proto.parent.get(e[0]) == e[1] else e[1]
    return _bound_for(spec, s_a, tree.max_sum() - s_a, proto.partitions[child].scheme_size)


# -- randomized --------------------------------------------------------------

def random_verify(scenario: Scenario, B: int, trials: int, seed: int) -> VerificationReport:
    """Check ``trials`` pseudorandom inputs drawn with :class:`SplitMix64`.

    Letters are drawn node by node in ascending id order, instance by
    instance. Measured values are lower estimates of the true worst case,
    so only the upper bounds are enforced.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    rng = SplitMix64(seed)
    errors = 0
    if isinstance(scenario, TwoNodeScenario):
        inst = scenario.instance(B)
        proto = TwoNodeProtocol(inst)
        best = (-1, 0, None)
        for trial in range(trials):
            x1 = rng.block(inst.m1 + 1, B)
            x2 = rng.block(inst.m2 + 1, B)
            transcript, f1, f2 = proto.run(x1, x2)
            truth = tuple(scenario.spec(a + b) for a, b in zip(x1, x2))
            errors += (f1 != truth) + (f2 != truth)
            if transcript.total > best[0]:
                up = transcript.totals.get((inst.starter, inst.responder), 0)
                best = (transcript.total, up, {"1": list(x1), "2": list(x2)})
        worst, up, wit = best
        rep = _bound_for(scenario.spec, scenario.m1, scenario.m2, proto.partition.scheme_size)
        edge = _edge_result((1, 2), rep, B, worst, False, wit, up, worst - up)
        return VerificationReport(scenario.describe(), B, "random", trials, errors, (edge,),
                                  seed=seed, trials=trials)

    tree = _tree_of(scenario)
    proto = TreeProtocol(tree, scenario.spec, B)
    worst: dict[Edge, tuple] = {e: (-1, 0, 0, None) for e in tree.edges}
    for trial in range(trials):
        assignment = {v: rng.block(tree.alphabets[v], B) for v in tree.nodes}
        run = proto.run(assignment)
        proto.check_schedule(run.transcript)
        truth = proto.truth(assignment)
        errors += sum(1 for f in run.decoded.values() if f != truth)
        for e, (u, d) in run.edge_bits().items():
            if u + d > worst[e][0]:
                worst[e] = (u + d, u, d, {str(k): list(v) for k, v in assignment.items()})
    edges = []
    for e in _report_edges(scenario, tree):
        if e not in tree.edges:
            edges.append(EdgeResult(e, 0.0, 0, 0.0, 0, 0, True))
            continue
        t, u, d, wit = worst[e]
        edges.append(_edge_result(e, _tree_bound(tree, proto, scenario.spec, e), B, t, False, wit, u, d))
    return VerificationReport(scenario.describe(), B, "random", trials, errors, tuple(edges),
                              seed=seed, trials=trials)
