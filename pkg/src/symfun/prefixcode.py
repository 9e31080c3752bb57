"""Prefix-free block codebooks whose lengths trade off against reply bits.

Every block ``x^B`` over an effective alphabet of ``k`` letters, ``r`` of
them ambiguous, gets a codeword of length ``L - w(x^B)`` where ``w`` counts
ambiguous letters and ``L = ceil(B log2(k + r))``. The Kraft sum is then
``(k + r)^B / 2^L <= 1``, and codeword plus replies always costs ``L`` bits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DomainError, FramingError, ResourceError

MAX_BLOCKS = 2**24


def ceil_log2_power(base: int, exponent: int) -> int:
    """Smallest ``L`` with ``2**L >= base**exponent`` (exact)."""
    if base < 1:
        raise DomainError("base must be >= 1")
    return (base**exponent - 1).bit_length()


def floor_log2_power(base: int, exponent: int) -> int:
    """Largest ``L`` with ``2**L <= base**exponent`` (exact)."""
    if base < 1:
        raise DomainError("base must be >= 1")
    return (base**exponent).bit_length() - 1


@dataclass(frozen=True)
class Codebook:
    block_length: int
    alphabet: tuple[int, ...]
    ambiguous: frozenset[int]
    total_budget: int
    words: dict[tuple[int, ...], str] = field(repr=False)
    _inverse: dict[str, tuple[int, ...]] = field(repr=False, compare=False)
    _max_len: int = field(repr=False, compare=False)

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(w)) for w in self.words.values()), Fraction(0))

    def ambiguous_count(self, block: Sequence[int]) -> int:
        return sum(1 for x in block if x in self.ambiguous)

    def rows(self):
        """``(block, codeword)`` pairs in canonical order."""
        return sorted(self.words.items(), key=lambda kv: (len(kv[1]), kv[0]))

    def dump_csv(self) -> str:
        lines = ["block;codeword"]
        for block, word in self.rows():
            lines.append(f"{','.join(map(str, block))};{word}")
        return "\n".join(lines) + "\n"


def build_codebook(
    k: int, r: int, B: int, ambiguous: Optional[Iterable[int]] = None
) -> Codebook:
    """Canonical prefix-free code over blocks of ``B`` letters from ``0..k-1``.

    Parameters
    ----------
    k : int
        Effective alphabet size.
    r : int
        Number of ambiguous letters. ``r = 0`` yields a fixed-length code of
        ``ceil(B log2 k)`` bits (zero bits when ``k = 1``).
    B : int
        Block length.
    ambiguous : iterable of int, optional
        Which letters are ambiguous; defaults to ``0..r-1``.

    Returns
    -------
    Codebook
        Codewords are assigned by counting, blocks sorted by (length,
        lexicographic block), shifting left whenever the length grows.
    """
    if k < 1 or B < 1:
        raise DomainError(f"need k >= 1 and B >= 1, got k={k}, B={B}")
    if not 0 <= r <= k:
        raise DomainError(f"need 0 <= r <= k, got r={r}, k={k}")
    if k**B > MAX_BLOCKS:
        raise ResourceError(f"{k}^{B} blocks exceeds the guard of 2^24; lower B")
    amb = frozenset(range(r)) if ambiguous is None else frozenset(ambiguous)
    if len(amb) != r or not amb <= set(range(k)):
        raise DomainError(f"ambiguous set {sorted(amb)} must be {r} letters of 0..{k - 1}")

    L = ceil_log2_power(k + r, B)
    blocks = list(itertools.product(range(k), repeat=B))
    lengths = {blk: L - sum(1 for x in blk if x in amb) for blk in blocks}
    blocks.sort(key=lambda blk: (lengths[blk], blk))

    words: dict[tuple[int, ...], str] = {}
    code = 0
    prev_len = lengths[blocks[0]]
    for blk in blocks:
        n = lengths[blk]
        code <<= n - prev_len
        prev_len = n
        words[blk] = format(code, f"0{n}b") if n else ""
        code += 1
    # the counter never overflows its length because the Kraft sum is <= 1
    assert code <= 2**prev_len
    inverse = {w: blk for blk, w in words.items()}
    return Codebook(B, tuple(range(k)), amb, L, words, inverse, prev_len)


def encode(cb: Codebook, block: Sequence[int]) -> str:
    key = tuple(block)
    try:
        return cb.words[key]
    except KeyError:
        if len(key) != cb.block_length:
            raise DomainError(f"block has length {len(key)}, expected {cb.block_length}") from None
        raise DomainError(f"block {key} has letters outside 0..{len(cb.alphabet) - 1}") from None


def decode_stream(cb: Codebook, bits: str, start: int = 0) -> tuple[tuple[int, ...], int]:
    """Read one codeword from ``bits[start:]``.

    Returns the block and the number of bits consumed. Raises
    :class:`FramingError` if no codeword is a prefix of the stream.
    """
    inverse = cb._inverse
    end = min(len(bits), start + cb._max_len)
    for stop in range(start, end + 1):
        blk = inverse.get(bits[start:stop])
        if blk is not None:
            return blk, stop - start
    raise FramingError(f"no codeword matches stream {bits[start:end]!r}")


def decode_message(cb: Codebook, bits: str) -> tuple[int, ...]:
    """Decode a message that must consist of exactly one codeword."""
    blk = cb._inverse.get(bits)
    if blk is None:
        raise FramingError(f"{bits!r} is not a codeword")
    return blk


def is_prefix_free(words: Iterable[str]) -> bool:
    ordered = sorted(words)
    return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))
