from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import instances
from reconftw.graph import Graph, Instance, LengthMode, ProblemKind, check_witness
from reconftw.hardness import WordDigraph
from reconftw.oracle import (
    TooLargeError,
    bfs_hword,
    bfs_reconfig,
    enumerate_feasible,
    exact_by_parity,
    oracle_answer,
    oracle_witness,
    reachable_in_exactly,
    thue_reachable,
)

P3 = Graph.from_edges(3, [(1, 2), (2, 3)])
K3 = Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)])
fs = frozenset


def test_bfs_path_p3():
    inst = Instance(P3, fs({2}), fs({1, 3}), 3, 3, ProblemKind.VC_R)
    res = bfs_reconfig(inst)
    assert res.reachable and res.shortest_length == 3
    assert res.path[0] == fs({2}) and res.path[-1] == fs({1, 3})
    check_witness(inst, res.path)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_identity_has_length_zero(k):
    res = bfs_reconfig(Instance(P3, fs({2}), fs({2}), k, 0, ProblemKind.VC_R))
    assert res.shortest_length == 0


def test_triangle_oct_unreachable():
    assert not bfs_reconfig(Instance(K3, fs({1}), fs({2}), 1, 5, ProblemKind.OCT_R)).reachable


def test_enumerate_examples():
    assert enumerate_feasible(P3, 1, ProblemKind.VC_R) == [fs({2})]
    assert enumerate_feasible(P3, 2, ProblemKind.IS_R) == [fs({1, 3})]
    assert enumerate_feasible(K3, 1, ProblemKind.FVS_R) == [fs({1}), fs({2}), fs({3})]


def test_size_guard():
    g = Graph.from_edges(25, [])
    with pytest.raises(TooLargeError):
        bfs_reconfig(Instance(g, fs(), fs(), 0, 0, ProblemKind.VC_R))


def test_hword_examples():
    arcs = {("a", "b"), ("b", "a"), ("b", "b")}
    assert bfs_hword("ab", arcs, "ab", "ba")
    assert bfs_hword("ab", arcs, "bb", "bb")
    with pytest.raises(ValueError):
        bfs_hword("ab", set(), "ab", "ab")


def test_thue_examples():
    rules = [("ab", "ba")]
    assert thue_reachable(rules, "aab", "baa")
    assert not thue_reachable(rules, "aab", "bba")


@settings(max_examples=150, deadline=None)
@given(instances(max_n=6, max_ell=6))
def test_exact_parity_rule(inst):
    """Exact-length reachability equals the parity rule (with the bounce caveat)."""
    assert reachable_in_exactly(inst, inst.ell) == exact_by_parity(inst)


@settings(max_examples=100, deadline=None)
@given(instances(max_n=6, max_ell=6))
def test_oracle_witness_consistent(inst):
    w = oracle_witness(inst)
    assert (w is not None) == oracle_answer(inst)
    if w is not None:
        check_witness(inst, w)


def test_isolated_state_breaks_naive_parity():
    # {1} cannot move at all with k=1 on a single edge, so no walk of length 2 exists
    g = Graph.from_edges(2, [(1, 2)])
    inst = Instance(g, fs({1}), fs({1}), 1, 2, ProblemKind.VC_R)
    assert not reachable_in_exactly(inst, 2)
    assert not exact_by_parity(inst)
