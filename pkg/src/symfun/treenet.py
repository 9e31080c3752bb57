"""Convergecast/broadcast block protocol on trees.

Each edge is run as a two-node problem between the child's subtree (which
speaks first, with measurement = subtree sum) and the rest of the tree.
Codewords climb to the root; the root resolves the function and the reply
bits flow back down, each node answering its children once its own edge
has been resolved.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence

from .bounds import BoundReport, threshold_complexity
from .errors import DomainError, NetworkError, ProtocolError, ResourceError
from .funckernel import THRESHOLD, FunctionSpec, SeparationPartition, separate
from .network import Edge, Network, norm_edge
from .prefixcode import Codebook, build_codebook, decode_message, encode
from .twonode import FORWARD, REPLY, Event, Transcript

MAX_ASSIGNMENTS = 2**26


@dataclass(frozen=True)
class TreeNetwork(Network):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_tree():
            raise NetworkError(
                f"not a tree: {self.n} nodes need {self.n - 1} edges, got {len(self.edges)}"
            )
        if self.root is None:
            object.__setattr__(self, "root", self.nodes[0])

    @classmethod
    def from_network(cls, net: Network, root: Optional[int] = None) -> "TreeNetwork":
        return cls(dict(net.alphabets), net.edges, net.root if root is None else root)

    def rerooted(self, root: int) -> "TreeNetwork":
        return TreeNetwork(dict(self.alphabets), self.edges, root)


class EdgeAccount(NamedTuple):
    edge: Edge
    up_bits: int
    down_bits: int
    total_bits: int
    bound_lower: float
    bound_upper: float


def _side(tree: Network, edge: Edge, start: int) -> frozenset[int]:
    adj = tree.neighbors()
    seen = {start}
    queue = deque([start])
    blocked = norm_edge(*edge)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen and norm_edge(u, w) != blocked:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def edge_components(tree: Network, edge: Edge) -> tuple[frozenset[int], frozenset[int]]:
    """Split the tree at ``edge`` into ``(A_e, rest)``.

    ``A_e`` is the side with the smaller maximum sum; on a tie, the side
    holding the smaller node id.
    """
    e = norm_edge(*edge)
    if e not in tree.edges:
        raise NetworkError(f"edge {edge} is not in the tree")
    left = _side(tree, e, e[0])
    right = frozenset(tree.alphabets) - left
    key_l = (tree.max_sum(left), min(left))
    key_r = (tree.max_sum(right), min(right))
    return (left, right) if key_l < key_r else (right, left)


def edge_complexity(tree: Network, spec: FunctionSpec, edge: Edge) -> BoundReport:
    if spec.kind != THRESHOLD:
        raise DomainError("per-edge complexity is only known for sum-threshold functions")
    a_e, _ = edge_components(tree, edge)
    s_e = tree.max_sum(a_e)
    return threshold_complexity(spec.theta, s_e, tree.max_sum() - s_e)


@dataclass(frozen=True)
class TreeRun:
    transcript: Transcript
    decoded: dict[int, tuple]

    def edge_transcripts(self) -> dict[Edge, Transcript]:
        out: dict[Edge, list[Event]] = {}
        for e in self.transcript.events:
            out.setdefault(norm_edge(e.sender, e.receiver), []).append(e)
        return {k: Transcript(tuple(v)) for k, v in sorted(out.items())}

    def edge_bits(self) -> dict[Edge, tuple[int, int]]:
        """``edge -> (up bits, down bits)``."""
        out: dict[Edge, list[int]] = {}
        for e in self.transcript.events:
            slot = out.setdefault(norm_edge(e.sender, e.receiver), [0, 0])
            slot[0 if e.phase == FORWARD else 1] += len(e.bits)
        return {k: (u, d) for k, (u, d) in out.items()}


@dataclass
class TreeProtocol:
    tree: TreeNetwork
    spec: FunctionSpec
    B: int
    parent: dict[int, Optional[int]] = field(init=False)
    children: dict[int, list[int]] = field(init=False)
    partitions: dict[int, SeparationPartition] = field(init=False)
    codebooks: dict[int, Codebook] = field(init=False)

    def __post_init__(self):
        if self.B < 1:
            raise DomainError(f"block length must be >= 1, got {self.B}")
        if not self.spec.is_boolean:
            raise DomainError("the reply-bit protocol needs a {0,1}-valued function")
        tree, root = self.tree, self.tree.root
        adj = tree.neighbors()
        self.parent = {root: None}
        self.children = {i: [] for i in tree.nodes}
        self.bfs_order = [root]
        for u in self.bfs_order:
            for w in adj[u]:
                if w not in self.parent:
                    self.parent[w] = u
                    self.children[u].append(w)
                    self.bfs_order.append(w)
        self.post_order = self._post_order(root)

        total = tree.max_sum()
        sub_max: dict[int, int] = {}
        for v in self.post_order:
            sub_max[v] = tree.max_value(v) + sum(sub_max[c] for c in self.children[v])
        self.sub_max = sub_max
        self.partitions, self.codebooks = {}, {}
        self._lookup, self._const, self._amb = {}, {}, {}
        for v in tree.nodes:
            if v == root:
                continue
            part = separate(self.spec, sub_max[v], total - sub_max[v])
            self.partitions[v] = part
            self.codebooks[v] = build_codebook(part.size, len(part.ambiguous), self.B,
                                               ambiguous=part.ambiguous)
            self._lookup[v] = part.lookup()
            const = {part.a0_class: 0, part.a1_class: 1}
            const.pop(None, None)
            self._const[v] = const
            self._amb[v] = tuple(c not in const for c in range(part.size))
        self._combine_cache: dict[tuple, int] = {}
        self._decoded: dict[tuple[int, str], tuple[int, ...]] = {}
        self._truth = [self.spec(s) for s in range(total + 1)]

    def _post_order(self, root: int) -> list[int]:
        out: list[int] = []
        stack = [(root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
                continue
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return out

    def edge_of(self, v: int) -> Edge:
        return norm_edge(v, self.parent[v])

    def _combine(self, v: int, x: int, child_classes: tuple[int, ...]):
        """Class of ``v``'s subtree sum (or f at the root) from its own letter
        and its children's class letters for one instance."""
        key = (v, x, child_classes)
        hit = self._combine_cache.get(key)
        if hit is not None:
            return hit
        sums = {x}
        for c, k in zip(self.children[v], child_classes):
            members = self.partitions[c].classes[k]
            sums = {s + m for s in sums for m in members}
        if self.parent[v] is None:
            values = {self._truth[s] for s in sums}
        else:
            lookup = self._lookup[v]
            values = {lookup[s] for s in sums}
        if len(values) != 1:
            raise ProtocolError(f"node {v} cannot resolve its subtree class from its children")
        (out,) = values
        self._combine_cache[key] = out
        return out

    def _decode(self, child: int, bits: str) -> tuple[int, ...]:
        key = (child, bits)
        hit = self._decoded.get(key)
        if hit is None:
            hit = self._decoded[key] = decode_message(self.codebooks[child], bits)
        return hit

    def run(self, assignment: Mapping[int, Sequence[int]], validate: bool = True) -> TreeRun:
        tree, B = self.tree, self.B
        for v in tree.nodes if validate else ():
            blk = assignment[v]
            if len(blk) != B:
                raise DomainError(f"node {v} block has length {len(blk)}, expected {B}")
            m = tree.max_value(v)
            if any(not 0 <= x <= m for x in blk):
                raise DomainError(f"node {v} block {tuple(blk)} outside 0..{m}")

        events: list[Event] = []
        own_classes: dict[int, tuple[int, ...]] = {}
        heard: dict[int, tuple[int, ...]] = {}  # child -> class block as decoded by its parent
        messages: dict[int, str] = {}
        root_f: tuple = ()
        for v in self.post_order:
            kids = self.children[v]
            child_blocks = [heard[c] for c in kids]
            x = assignment[v]
            per_instance = zip(*child_blocks) if kids else itertools.repeat((), B)
            letters = tuple(self._combine(v, x[t], ck) for t, ck in zip(range(B), per_instance))
            p = self.parent[v]
            if p is None:
                root_f = letters
                continue
            own_classes[v] = letters
            msg = encode(self.codebooks[v], letters)
            messages[v] = msg
            events.append(Event(v, p, msg, FORWARD))
            heard[v] = self._decode(v, msg)

        decoded: dict[int, tuple] = {tree.root: root_f}
        for v in self.bfs_order:
            f = decoded[v]
            for c in self.children[v]:
                amb = self._amb[c]
                reply = "".join("1" if val else "0" for k, val in zip(heard[c], f) if amb[k])
                events.append(Event(v, c, reply, REPLY))
                decoded[c] = self._finish(c, own_classes[c], reply)
        return TreeRun(Transcript(tuple(events)), decoded)

    def _finish(self, v: int, classes: tuple[int, ...], reply: str) -> tuple:
        const = self._const[v]
        out = []
        pos = 0
        for k in classes:
            if k in const:
                out.append(const[k])
            else:
                if pos >= len(reply):
                    raise ProtocolError(f"node {v}: reply too short")
                out.append(1 if reply[pos] == "1" else 0)
                pos += 1
        if pos != len(reply):
            raise ProtocolError(f"node {v}: reply too long")
        return tuple(out)

    def check_schedule(self, transcript: Transcript) -> None:
        """Raise :class:`ProtocolError` unless every forward message follows
        all of the sender's children's messages and every reply follows the
        sender's own reply (or, at the root, all incoming codewords)."""
        sent_up: set[int] = set()
        resolved = set()
        for e in transcript.events:
            if e.phase == FORWARD:
                if self.parent[e.sender] != e.receiver:
                    raise ProtocolError(f"codeword {e.sender}->{e.receiver} not sent to parent")
                if resolved:
                    raise ProtocolError("codeword sent after the broadcast started")
                missing = [c for c in self.children[e.sender] if c not in sent_up]
                if missing:
                    raise ProtocolError(f"node {e.sender} sent before hearing children {missing}")
                sent_up.add(e.sender)
            else:
                if self.parent[e.receiver] != e.sender:
                    raise ProtocolError(f"reply {e.sender}->{e.receiver} not sent to a child")
                if self.parent[e.sender] is None:
                    missing = [c for c in self.children[e.sender] if c not in sent_up]
                    if missing:
                        raise ProtocolError(f"root replied before hearing {missing}")
                elif e.sender not in resolved:
                    raise ProtocolError(f"node {e.sender} replied before its own edge resolved")
                resolved.add(e.receiver)

    def truth(self, assignment: Mapping[int, Sequence[int]]) -> tuple:
        cols = zip(*(assignment[v] for v in self.tree.nodes))
        return tuple(self._truth[sum(col)] for col in cols)


def run_tree_protocol(tree: TreeNetwork, spec: FunctionSpec, B: int,
                      assignment: Mapping[int, Sequence[int]]) -> tuple[dict[Edge, Transcript], dict[int, tuple]]:
    proto = TreeProtocol(tree, spec, B)
    run = proto.run(assignment)
    proto.check_schedule(run.transcript)
    return run.edge_transcripts(), run.decoded


def assignment_count(tree: Network, B: int) -> int:
    out = 1
    for l in tree.alphabets.values():
        out *= l**B
    return out


def iter_assignments(tree: Network, B: int):
    """All assignments, node blocks in ascending node-id order, lexicographic."""
    nodes = tree.nodes
    per_node = [list(itertools.product(range(tree.alphabets[v]), repeat=B)) for v in nodes]
    for combo in itertools.product(*per_node):
        yield dict(zip(nodes, combo))


def assignment_from_index(tree: Network, B: int, index: int) -> dict[int, tuple[int, ...]]:
    out = {}
    for v in reversed(tree.nodes):
        radix = tree.alphabets[v]
        blk = []
        for _ in range(B):
            index, d = divmod(index, radix)
            blk.append(d)
        out[v] = tuple(reversed(blk))
    return dict(sorted(out.items()))


class TreeSweepStats(NamedTuple):
    count: int
    errors: int
    worst: dict[Edge, tuple[int, int, int]]  # edge -> (total, up, down)
    witness: dict[Edge, int]


def sweep_assignments(proto: TreeProtocol, start: int = 0, stop: Optional[int] = None,
                      check_schedule: bool = True) -> TreeSweepStats:
    """Run assignments with enumeration index in ``[start, stop)``."""
    count = errors = 0
    worst: dict[Edge, tuple[int, int, int]] = {e: (-1, 0, 0) for e in proto.tree.edges}
    witness: dict[Edge, int] = {}
    it = itertools.islice(iter_assignments(proto.tree, proto.B), start, stop)
    for idx, assignment in enumerate(it, start):
        run = proto.run(assignment, validate=False)
        if check_schedule:
            proto.check_schedule(run.transcript)
        truth = proto.truth(assignment)
        errors += sum(1 for f in run.decoded.values() if f != truth)
        for e, (up, down) in run.edge_bits().items():
            if up + down > worst[e][0]:
                worst[e] = (up + down, up, down)
                witness[e] = idx
        count += 1
    worst = {e: (max(t, 0), u, d) for e, (t, u, d) in worst.items()}
    return TreeSweepStats(count, errors, worst, witness)


def worst_case_edge_bits(tree: TreeNetwork, spec: FunctionSpec, B: int) -> dict[Edge, EdgeAccount]:
    """Exhaustive per-edge worst-case totals with their bounds.

    Raises
    ------
    ResourceError
        If the number of assignments exceeds 2^26.
    """
    total = assignment_count(tree, B)
    if total > MAX_ASSIGNMENTS:
        raise ResourceError(f"{total} assignments exceeds the guard of 2^26; lower B")
    proto = TreeProtocol(tree, spec, B)
    stats = sweep_assignments(proto)
    if stats.errors:
        raise ProtocolError(f"{stats.errors} decoding errors during the sweep")
    out = {}
    for e in tree.edges:
        t, up, down = stats.worst[e]
        if spec.kind == THRESHOLD:
            rep = edge_complexity(tree, spec, e)
            lo, hi = rep.lower_bits_per_instance, rep.upper_bits_per_instance
        else:
            # no closed form; the scheme's own per-instance cost
            child = e[0] if proto.parent.get(e[0]) == e[1] else e[1]
            lo, hi = 0.0, math.log2(proto.partitions[child].scheme_size)
        out[e] = EdgeAccount(e, up, down, t, lo, hi)
    return out
