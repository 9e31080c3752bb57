"""Single-round two-node block protocols.

The starting node separates its alphabet against the other node's range,
sends one prefix-free codeword for its block of class letters, and the
other node answers one bit (the function value) for every instance whose
class is still ambiguous. For sum-threshold functions this is optimal from
either starting node; for any other {0,1}-valued sum function it is the
generic separation-then-coding scheme.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .errors import DomainError, ProtocolError, ResourceError
from .funckernel import FunctionSpec, SeparationPartition, separate
from .prefixcode import Codebook, build_codebook, decode_message, encode

FORWARD = "forward"
REPLY = "reply"

MAX_PAIRS = 2**26


class Event(NamedTuple):
    sender: int
    receiver: int
    bits: str
    phase: str


@dataclass(frozen=True)
class Transcript:
    events: tuple[Event, ...] = ()

    @property
    def total(self) -> int:
        return sum(len(e.bits) for e in self.events)

    @property
    def totals(self) -> dict[tuple[int, int], int]:
        """Bits per direction ``(sender, receiver)``."""
        out: dict[tuple[int, int], int] = {}
        for e in self.events:
            key = (e.sender, e.receiver)
            out[key] = out.get(key, 0) + len(e.bits)
        return out

    def on_edge(self, u: int, v: int) -> "Transcript":
        pair = {u, v}
        return Transcript(tuple(e for e in self.events if {e.sender, e.receiver} == pair))

    def to_dict(self) -> dict:
        return {
            "events": [e._asdict() for e in self.events],
            "total": self.total,
        }


@dataclass(frozen=True)
class TwoNodeInstance:
    m1: int
    m2: int
    spec: FunctionSpec
    B: int
    starter: int = 1

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise DomainError("alphabet maxima must be >= 0")
        if self.B < 1:
            raise DomainError(f"block length must be >= 1, got {self.B}")
        if self.starter not in (1, 2):
            raise DomainError(f"starter must be node 1 or 2, got {self.starter}")

    @property
    def responder(self) -> int:
        return 2 if self.starter == 1 else 1

    def max_of(self, node: int) -> int:
        return self.m1 if node == 1 else self.m2

    @property
    def pair_count(self) -> int:
        return ((self.m1 + 1) * (self.m2 + 1)) ** self.B


@dataclass
class TwoNodeProtocol:
    """Precomputed state for repeated runs of one instance."""

    inst: TwoNodeInstance
    partition: SeparationPartition = field(init=False)
    codebook: Codebook = field(init=False)

    def __post_init__(self):
        inst = self.inst
        if not inst.spec.is_boolean:
            raise DomainError("the reply-bit protocol needs a {0,1}-valued function")
        ms, mr = inst.max_of(inst.starter), inst.max_of(inst.responder)
        self.partition = separate(inst.spec, ms, mr)
        self.codebook = build_codebook(
            self.partition.size, len(self.partition.ambiguous), inst.B,
            ambiguous=self.partition.ambiguous,
        )
        self._cls = self.partition.lookup()
        self._rows = self.partition.rows
        self._const = {self.partition.a0_class: 0, self.partition.a1_class: 1}
        self._const.pop(None, None)
        self._amb = tuple(c not in self._const for c in range(self.partition.size))
        self._decoded: dict[str, tuple[int, ...]] = {}

    @property
    def worst_case(self) -> int:
        """Bits exchanged on every input: codeword length + replies = L."""
        return self.codebook.total_budget

    def _check(self, block: Sequence[int], node: int) -> None:
        m = self.inst.max_of(node)
        if len(block) != self.inst.B:
            raise DomainError(f"node {node} block has length {len(block)}, expected {self.inst.B}")
        for x in block:
            if not 0 <= x <= m:
                raise DomainError(f"node {node} letter {x} outside 0..{m}")

    def forward(self, starter_block: Sequence[int]) -> str:
        cls = self._cls
        return encode(self.codebook, tuple(cls[x] for x in starter_block))

    def respond(self, message: str, responder_block: Sequence[int]) -> tuple[str, tuple]:
        """Responder side: decode the codeword, return (reply bits, f block)."""
        classes = self._decoded.get(message)
        if classes is None:
            classes = self._decoded[message] = decode_message(self.codebook, message)
        rows, amb = self._rows, self._amb
        f = tuple(rows[c][y] for c, y in zip(classes, responder_block))
        reply = "".join("1" if v else "0" for c, v in zip(classes, f) if amb[c])
        return reply, f

    def finish(self, starter_block: Sequence[int], reply: str) -> tuple:
        """Starter side: fill in the ambiguous instances from the reply bits."""
        cls, const = self._cls, self._const
        out = []
        pos = 0
        for x in starter_block:
            c = cls[x]
            if c in const:
                out.append(const[c])
            else:
                if pos >= len(reply):
                    raise ProtocolError("reply shorter than the number of ambiguous instances")
                out.append(1 if reply[pos] == "1" else 0)
                pos += 1
        if pos != len(reply):
            raise ProtocolError("reply longer than the number of ambiguous instances")
        return tuple(out)

    def run(self, x1: Sequence[int], x2: Sequence[int]) -> tuple[Transcript, tuple, tuple]:
        self._check(x1, 1)
        self._check(x2, 2)
        s, r = self.inst.starter, self.inst.responder
        xs, xr = (x1, x2) if s == 1 else (x2, x1)
        message = self.forward(xs)
        reply, f_r = self.respond(message, xr)
        f_s = self.finish(xs, reply)
        events = (Event(s, r, message, FORWARD), Event(r, s, reply, REPLY))
        f1, f2 = (f_s, f_r) if s == 1 else (f_r, f_s)
        return Transcript(events), f1, f2

    def replay_matches(self, transcript: Transcript, x1: Sequence[int], x2: Sequence[int]) -> bool:
        """Recompute each event from earlier events and the sender's own block."""
        if len(transcript.events) != 2:
            return False
        first, second = transcript.events
        s = self.inst.starter
        xs, xr = (x1, x2) if s == 1 else (x2, x1)
        if first.sender != s or first.bits != self.forward(xs):
            return False
        reply, _ = self.respond(first.bits, xr)
        return second.sender == self.inst.responder and second.bits == reply


class SweepStats(NamedTuple):
    count: int
    errors: int
    worst: int
    witness: Optional[int]  # enumeration index of the first worst input


def blocks(max_letter: int, B: int):
    return itertools.product(range(max_letter + 1), repeat=B)


def sweep_pairs(proto: TwoNodeProtocol, start: int = 0, stop: Optional[int] = None) -> SweepStats:
    """Run every pair whose starter-block index lies in ``[start, stop)``.

    Pairs are enumerated starter-block-major in lexicographic order; the
    enumeration index of a pair is ``i_starter * n_responder + i_responder``.
    """
    inst = proto.inst
    spec = inst.spec
    ms, mr = inst.max_of(inst.starter), inst.max_of(inst.responder)
    resp_blocks = list(blocks(mr, inst.B))
    n_resp = len(resp_blocks)
    n_start = (ms + 1) ** inst.B
    stop = n_start if stop is None else min(stop, n_start)

    truth_table = [spec(s) for s in range(ms + mr + 1)]
    count = errors = 0
    worst = -1
    witness = None
    for i, xs in enumerate(itertools.islice(blocks(ms, inst.B), start, stop), start):
        message = proto.forward(xs)
        for j, xr in enumerate(resp_blocks):
            reply, f_r = proto.respond(message, xr)
            f_s = proto.finish(xs, reply)
            truth = tuple(truth_table[a + b] for a, b in zip(xs, xr))
            if f_r != truth or f_s != truth:
                errors += 1
            bits = len(message) + len(reply)
            if bits > worst:
                worst = bits
                witness = i * n_resp + j
            count += 1
    return SweepStats(count, errors, max(worst, 0), witness)


def pair_from_index(inst: TwoNodeInstance, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inverse of the sweep enumeration: ``(x1_block, x2_block)``."""
    ms, mr = inst.max_of(inst.starter), inst.max_of(inst.responder)
    n_resp = (mr + 1) ** inst.B
    i, j = divmod(index, n_resp)
    xs = _unrank(i, ms + 1, inst.B)
    xr = _unrank(j, mr + 1, inst.B)
    return (xs, xr) if inst.starter == 1 else (xr, xs)


def _unrank(index: int, radix: int, B: int) -> tuple[int, ...]:
    out = []
    for _ in range(B):
        index, d = divmod(index, radix)
        out.append(d)
    return tuple(reversed(out))


def run_two_node(inst: TwoNodeInstance, x1_block, x2_block) -> tuple[Transcript, tuple, tuple]:
    """Run the protocol once; returns the transcript and the f blocks decoded
    at node 1 and node 2."""
    return TwoNodeProtocol(inst).run(x1_block, x2_block)


def run_interval(inst: TwoNodeInstance, x1_block, x2_block) -> tuple[Transcript, tuple, tuple]:
    if inst.spec.kind != "interval":
        raise DomainError("run_interval needs a sum-interval function")
    return TwoNodeProtocol(inst).run(x1_block, x2_block)


def worst_case_bits(inst: TwoNodeInstance) -> tuple[int, tuple[tuple[int, ...], tuple[int, ...]]]:
    """Maximum transcript length over all input pairs, with a witness pair.

    Raises
    ------
    ResourceError
        If the number of pairs exceeds 2^26.
    """
    if inst.pair_count > MAX_PAIRS:
        raise ResourceError(f"{inst.pair_count} input pairs exceeds the guard of 2^26; lower B")
    stats = sweep_pairs(TwoNodeProtocol(inst))
    if stats.errors:
        raise ProtocolError(f"{stats.errors} decoding errors during the sweep")
    return stats.worst, pair_from_index(inst, stats.witness)
