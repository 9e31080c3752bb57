"""Acceptance criteria, each at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one ``ACCEPTANCE n: PASS|FAIL`` line per criterion.
"""

import filecmp
import itertools
import time
from fractions import Fraction
from pathlib import Path

import pytest

from symfun.bounds import case_formula, coefficient_oracle, fooling_oracle
from symfun.cli import main
from symfun.funckernel import FunctionSpec
from symfun.graphnet import ALPHABET, MAXSUM, two_opt_check
from symfun.harness import TreeScenario, TwoNodeScenario, exhaustive_verify
from symfun.network import complete_graph, load_network, path_graph
from symfun.prefixcode import MAX_BLOCKS, build_codebook, decode_stream, encode
from symfun.treenet import TreeNetwork
from symfun.twonode import TwoNodeInstance, worst_case_bits

from oracles import ceil_bits

NETWORKS = Path(__file__).resolve().parent.parent / "networks"
REAL_TOL = 1e-9


def note(record_property, text):
    record_property("detail", text)


@pytest.mark.criterion(1, "Boolean AND, B=8, both starters: 0 errors, worst 13 bits, < 30 s")
def test_boolean_and_exactness(record_property):
    t0 = time.perf_counter()
    measured = {}
    for starter in (1, 2):
        rep = exhaustive_verify(TwoNodeScenario(1, 1, FunctionSpec.threshold(2), starter), 8)
        assert rep.instances_checked == 4**8
        assert rep.decode_errors == 0
        measured[starter] = rep.edge(1, 2).measured
    elapsed = time.perf_counter() - t0
    note(record_property, f"worst {measured}, {elapsed:.1f}s")
    assert measured == {1: 13, 2: 13} and ceil_bits(3, 8) == 13
    assert elapsed < 30


@pytest.mark.slow
@pytest.mark.criterion(2, "case sweep m1,m2<=4, B<=4: worst = ceil(B log2|Z|), fooling = formula, < 5 min")
def test_case_sweep_tightness(record_property):
    t0 = time.perf_counter()
    checked = 0
    for m1, m2 in itertools.product(range(5), repeat=2):
        for theta in range(1, m1 + m2 + 1):
            size = fooling_oracle(theta, m1, m2)
            assert size == case_formula(theta, m1, m2), (theta, m1, m2)
            for B in range(1, 5):
                for starter in (1, 2):
                    bits, _ = worst_case_bits(
                        TwoNodeInstance(m1, m2, FunctionSpec.threshold(theta), B, starter))
                    assert bits == ceil_bits(size, B), (theta, m1, m2, B, starter)
                    checked += 1
    elapsed = time.perf_counter() - t0
    note(record_property, f"{checked} configurations, {elapsed:.1f}s")
    assert elapsed < 300


@pytest.mark.criterion(3, "fooling_oracle = coefficient_oracle for all theta, m1, m2 <= 12")
def test_oracle_agreement(record_property):
    checked = 0
    for theta, m1, m2 in itertools.product(range(13), repeat=3):
        assert fooling_oracle(theta, m1, m2) == coefficient_oracle([m1, m2], {theta - 1, theta})
        checked += 1
    note(record_property, f"{checked} triples")


@pytest.mark.slow
@pytest.mark.criterion(4, "5-node binary star, theta=2, B=4: 2^20 inputs, 0 errors, 8 bits per edge, < 5 min")
def test_tree_per_edge_optimality(record_property):
    tree = TreeNetwork.from_network(load_network(NETWORKS / "star5.json"))
    assert tree.n == 5 and all(l == 2 for l in tree.alphabets.values())
    t0 = time.perf_counter()
    rep = exhaustive_verify(TreeScenario(tree, FunctionSpec.threshold(2)), 4)
    elapsed = time.perf_counter() - t0
    note(record_property, f"worst {sorted(rep.worst_bits.values())}, {elapsed:.1f}s")
    assert rep.instances_checked == 2**20
    assert rep.decode_errors == 0
    assert rep.worst_bits == {e: 8 for e in tree.edges}
    assert ceil_bits(4, 4) == 8
    assert elapsed < 300


@pytest.mark.criterion(5, "path (3,2,4), theta=3, B=2: edges (1,2) and (2,3) both 6 bits")
def test_non_binary_tree(record_property):
    tree = TreeNetwork.from_network(path_graph([3, 2, 4], 1))
    rep = exhaustive_verify(TreeScenario(tree, FunctionSpec.threshold(3)), 2)
    note(record_property, f"worst {rep.worst_bits}")
    assert rep.decode_errors == 0
    assert ceil_bits(6, 2) == 6 and ceil_bits(7, 2) == 6
    assert rep.worst_bits == {(1, 2): 6, (2, 3): 6}


@pytest.mark.criterion(6, "interval [2,3], m1=4, m2=5, B=2: 5 <= worst <= 7")
def test_interval_sandwich(record_property):
    rep = exhaustive_verify(TwoNodeScenario(4, 5, FunctionSpec.interval(2, 3)), 2)
    w = rep.edge(1, 2).measured
    note(record_property, f"worst {w}")
    assert rep.decode_errors == 0
    assert ceil_bits(5, 2) == 5 and ceil_bits(9, 2) == 7
    assert 5 <= w <= 7


@pytest.mark.criterion(7, "K4 binary theta=2: R_cut = 2/3, R_ach/R_cut <= 1.5 under both conventions, < 1 s")
def test_two_opt_on_k4(record_property):
    t0 = time.perf_counter()
    net = complete_graph(4)
    reports = {conv: two_opt_check(net, FunctionSpec.threshold(2), conv) for conv in (MAXSUM, ALPHABET)}
    elapsed = time.perf_counter() - t0
    note(record_property, ", ".join(
        f"{c}: R_ach={r.r_ach:.4f} R_cut={r.r_cut:.4f} ratio={r.ratio:.4f}" for c, r in reports.items()))
    assert abs(reports[MAXSUM].r_cut - 2 / 3) <= REAL_TOL
    for rep in reports.values():
        assert rep.bound == pytest.approx(1.5, abs=REAL_TOL)
        assert rep.ratio <= 1.5 + REAL_TOL
        assert rep.holds
    assert elapsed < 1


def sorted_prefix_free(words):
    # in lexicographic order a word that prefixes another also prefixes its successor
    ws = sorted(words)
    return len(set(ws)) == len(ws) and not any(b.startswith(a) for a, b in zip(ws, ws[1:]))


@pytest.mark.criterion(8, "codec family k<=5, r<=k, B<=6: prefix-free, Kraft <= 1, length law, round trip")
def test_codec_properties(record_property):
    books = 0
    for k in range(1, 6):
        for r in range(k + 1):
            for amb in itertools.combinations(range(k), r):
                for B in range(1, 7):
                    if k**B > MAX_BLOCKS:
                        continue
                    cb = build_codebook(k, r, B, ambiguous=amb)
                    L = ceil_bits(k + r, B)
                    words = cb.words
                    assert len(words) == k**B
                    assert sorted_prefix_free(words.values())
                    assert sum(Fraction(1, 2 ** len(w)) for w in words.values()) <= 1
                    for block in itertools.product(range(k), repeat=B):
                        w = encode(cb, block)
                        assert len(w) + sum(x in amb for x in block) == L
                        assert decode_stream(cb, w + "0") == (block, len(w))
                    books += 1
    note(record_property, f"{books} codebooks")


ACCEPTANCE_COMMANDS = [
    ["simulate", "--two-node", "--threshold", "2", "--m1", "1", "--m2", "1", "-B", "8", "--starter", "1"],
    ["simulate", "--two-node", "--threshold", "2", "--m1", "1", "--m2", "1", "-B", "8", "--starter", "2"],
    ["simulate", "--tree", str(NETWORKS / "path3_nonbinary.json"), "--threshold", "3", "-B", "2"],
    ["simulate", "--two-node", "--interval", "2", "3", "--m1", "4", "--m2", "5", "-B", "2",
     "--format", "csv"],
    ["simulate", "--tree", str(NETWORKS / "path8.json"), "--threshold", "4", "-B", "4", "--random",
     "--trials", "2000", "--seed", "7"],
    ["graph", str(NETWORKS / "k4.json"), "--threshold", "2"],
    ["bounds", "--threshold", "2", "--tree", str(NETWORKS / "star5.json")],
    ["codebook", "--k", "3", "--r", "2", "-B", "4"],
]


@pytest.mark.criterion(9, "determinism: repeated acceptance commands give bit-identical reports")
def test_determinism(tmp_path, record_property):
    for i, argv in enumerate(ACCEPTANCE_COMMANDS):
        paths = []
        for rep in range(2):
            out = tmp_path / f"cmd{i}_{rep}.out"
            assert main(argv + ["--out", str(out)]) == 0, argv
            paths.append(out)
        assert filecmp.cmp(*paths, shallow=False), argv
        assert paths[0].stat().st_size > 0
    note(record_property, f"{len(ACCEPTANCE_COMMANDS)} commands")

