"""Cut-set bounds and tree-aggregation rates on general graphs.

Two conventions are supported for the "size" of a node set:

``maxsum``   the largest sum the set can produce, ``sum(l_i - 1)``; this is
             what the two-node reduction actually needs.
``alphabet`` the literal ``sum(l_i)`` used in the non-binary statements.

All rates are in bits per function instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .bounds import threshold_size
from .errors import DomainError, NetworkError, ResourceError
from .funckernel import THRESHOLD, FunctionSpec
from .network import Edge, Network, norm_edge
from .treenet import TreeNetwork, edge_components, worst_case_edge_bits

MAXSUM = "maxsum"
ALPHABET = "alphabet"
CONVENTIONS = (MAXSUM, ALPHABET)
MAX_CUT_NODES = 16
TOL = 1e-9


@dataclass(frozen=True)
class GeneralNetwork(Network):
    def __post_init__(self):
        super().__post_init__()
        if self.n < 2:
            raise NetworkError("a network needs at least two nodes")

    @classmethod
    def from_network(cls, net: Network) -> "GeneralNetwork":
        return cls(dict(net.alphabets), net.edges, net.root)


@dataclass(frozen=True)
class RateVector:
    rates: dict[Edge, float]

    @property
    def max(self) -> float:
        return max(self.rates.values(), default=0.0)

    @property
    def symmetric(self) -> bool:
        vals = list(self.rates.values())
        return all(abs(v - vals[0]) <= TOL for v in vals)

    def to_dict(self) -> dict:
        return {f"{u}-{v}": r for (u, v), r in sorted(self.rates.items())}


def _threshold(spec: FunctionSpec) -> int:
    if spec.kind != THRESHOLD:
        raise DomainError("graph bounds are only defined for sum-threshold functions")
    return spec.theta


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def side_size(net: Network, nodes: Iterable[int], convention: str = MAXSUM) -> int:
    _check_convention(convention)
    offset = 1 if convention == MAXSUM else 0
    return sum(net.alphabets[i] - offset for i in nodes)


def split_size(net: Network, side: Iterable[int], spec: FunctionSpec,
               convention: str = MAXSUM) -> int:
    """|Z| of the two-node problem obtained by merging each side of a cut."""
    theta = _threshold(spec)
    side = set(side)
    s_a = side_size(net, side, convention)
    s_v = side_size(net, net.alphabets, convention)
    return threshold_size(theta, s_a, s_v - s_a)


def crossing_edges(net: Network, side: Iterable[int]) -> list[Edge]:
    side = set(side)
    return [e for e in net.edges if (e[0] in side) != (e[1] in side)]


def _check_side(net: Network, side) -> frozenset[int]:
    side = frozenset(side)
    if not side or side >= set(net.alphabets) or not side <= set(net.alphabets):
        raise NetworkError(f"cut side {sorted(side)} must be a proper nonempty subset of the nodes")
    return side


def cutset_bound(net: Network, spec: FunctionSpec, cut_side: Iterable[int],
                 convention: str = MAXSUM) -> float:
    """Lower bound on the bits per instance summed over the edges of the cut."""
    side = _check_side(net, cut_side)
    return math.log2(split_size(net, side, spec, convention))


def iter_cuts(net: Network):
    """Every bipartition once, as the side not containing the largest node id."""
    nodes = net.nodes
    head = nodes[:-1]
    for mask in range(1, 2 ** len(head)):
        yield frozenset(v for k, v in enumerate(head) if mask >> k & 1)


def min_symmetric_cut_rate(net: Network, spec: FunctionSpec,
                           convention: str = MAXSUM) -> tuple[float, Optional[frozenset[int]]]:
    """Smallest common edge rate meeting every cut-set constraint.

    Returns the rate and the binding cut side (``None`` for a constant
    function).
    """
    if net.n > MAX_CUT_NODES:
        raise ResourceError(f"{net.n} nodes: cut enumeration is limited to {MAX_CUT_NODES}")
    best, arg = 0.0, None
    for side in iter_cuts(net):
        crossing = len(crossing_edges(net, side))
        rate = cutset_bound(net, spec, side, convention) / crossing
        if rate > best + TOL:
            best, arg = rate, side
    return best, arg


def _tree_edges(net: Network, tree: Union[Network, Sequence[Edge]]) -> tuple[Edge, ...]:
    edges = tree.edges if isinstance(tree, Network) else tuple(norm_edge(*e) for e in tree)
    edges = tuple(sorted(set(edges)))
    if isinstance(tree, Network) and set(tree.alphabets) != set(net.alphabets):
        raise NetworkError("tree does not have the same node set as the network")
    missing = [e for e in edges if e not in net.edges]
    if missing:
        raise NetworkError(f"tree edges {missing} are not in the network")
    try:
        TreeNetwork(dict(net.alphabets), edges)
    except NetworkError as exc:
        raise NetworkError(f"not a spanning tree: {exc}") from None
    return edges


def as_spanning_tree(net: Network, tree: Union[Network, Sequence[Edge]],
                     root: Optional[int] = None) -> TreeNetwork:
    edges = _tree_edges(net, tree)
    if root is None and isinstance(tree, Network):
        root = tree.root
    return TreeNetwork(dict(net.alphabets), edges, root)


def star_tree(net: Network, center: int) -> TreeNetwork:
    return as_spanning_tree(net, [(center, j) for j in net.nodes if j != center], root=center)


def tree_rate_vector(net: Network, tree: Union[Network, Sequence[Edge]], spec: FunctionSpec,
                     convention: str = MAXSUM) -> RateVector:
    """Per-instance rate of tree aggregation: ``log2 |Z_e|`` on each tree edge,
    zero elsewhere (the block-length-to-infinity cost of the tree protocol)."""
    t = as_spanning_tree(net, tree)
    rates = {e: 0.0 for e in net.edges}
    for e in t.edges:
        side, _ = edge_components(t, e)
        rates[e] = math.log2(split_size(net, side, spec, convention))
    return RateVector(rates)


def mix_rates(parts: Sequence[tuple[RateVector, Union[Fraction, float]]]) -> RateVector:
    """Time-share schemes: the weighted sum of their rate vectors."""
    total = sum(w for _, w in parts)
    if abs(float(total) - 1.0) > TOL or any(w < 0 for _, w in parts):
        raise DomainError(f"mixture weights must be nonnegative and sum to 1, got {total}")
    keys = parts[0][0].rates.keys()
    return RateVector({e: sum(float(w) * rv.rates[e] for rv, w in parts) for e in keys})


def star_mix_rate(net: Network, spec: FunctionSpec,
                  convention: str = MAXSUM) -> tuple[float, RateVector]:
    """Use each of the ``n`` stars of a complete graph on ``1/n`` of the block.

    Edge ``(i, j)`` is a leaf edge of the stars centred at ``i`` and ``j``, so
    its rate is ``(c_i + c_j) / n`` where ``c_i`` is the singleton-cut cost of
    node ``i``. In the regime ``θ <= half the total`` with equal alphabets,
    ``c_i = min(log2(2θ+1), log2(2 l_i + 2))``.
    """
    if not net.is_complete():
        raise NetworkError("star mixing needs a complete graph")
    n = net.n
    stars = [(tree_rate_vector(net, star_tree(net, c), spec, convention), Fraction(1, n))
             for c in net.nodes]
    vec = mix_rates(stars)
    return vec.max, vec


def spanning_tree_scheme(net: Network, tree: Union[Network, Sequence[Edge]],
                         spec: FunctionSpec, B: int) -> dict[Edge, int]:
    """Exhaustive worst-case bits per edge when only ``tree``'s edges are used."""
    t = as_spanning_tree(net, tree)
    accounts = worst_case_edge_bits(t, spec, B)
    return {e: (accounts[e].total_bits if e in accounts else 0) for e in net.edges}


def mixture_scheme(net: Network, trees: Sequence[tuple[Union[Network, Sequence[Edge]], Fraction]],
                   spec: FunctionSpec, B: int) -> RateVector:
    """Measured rates of a tree mixture: tree ``t`` handles ``w_t * B`` of the
    ``B`` instances with its own codebooks."""
    weights = [Fraction(w) for _, w in trees]
    if sum(weights) != 1 or any(w < 0 for w in weights):
        raise DomainError("mixture weights must be nonnegative fractions summing to 1")
    bits = {e: 0 for e in net.edges}
    for (tree, _), w in zip(trees, weights):
        sub = w * B
        if sub.denominator != 1:
            raise DomainError(f"B={B} is not divisible into a sub-block of weight {w}")
        if sub == 0:
            continue
        for e, b in spanning_tree_scheme(net, tree, spec, int(sub)).items():
            bits[e] += b
    return RateVector({e: b / B for e, b in bits.items()})


class TwoOptReport(NamedTuple):
    convention: str
    r_ach: float
    r_cut: float
    ratio: float
    bound: float
    holds: bool
    tight: bool

    def to_dict(self) -> dict:
        return self._asdict()


def two_opt_check(net: Network, spec: FunctionSpec, convention: str = MAXSUM) -> TwoOptReport:
    """Compare star mixing against the cut-set optimum on a complete graph."""
    r_ach, _ = star_mix_rate(net, spec, convention)
    r_cut, _ = min_symmetric_cut_rate(net, spec, convention)
    bound = 2 * (1 - 1 / net.n)
    if r_cut == 0.0:
        ratio = 1.0 if r_ach == 0.0 else math.inf
    else:
        ratio = r_ach / r_cut
    return TwoOptReport(convention, r_ach, r_cut, ratio, bound,
                        ratio <= bound + TOL, abs(ratio - bound) <= TOL)
