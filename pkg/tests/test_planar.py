from __future__ import annotations

import random

import pytest

from conftest import feasible_sets, grid, outerplanar_ish
from reconftw.dp import solve
from reconftw.graph import Graph, InputError, Instance, LengthMode, ProblemKind, bfs_layers, check_witness
from reconftw.oracle import oracle_answer
from reconftw.planar import LayeredInstance, build_subinstance, compute_gj, shift_solve

fs = frozenset


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def layered(g, S, T, k, ell, outer=(1,), kind=ProblemKind.VC_R, mode=LengthMode.EXACT):
    inst = Instance(g, fs(S), fs(T), k, ell, kind, mode)
    return LayeredInstance(inst, bfs_layers(g, outer))


def test_gj_deletes_residue_classes():
    g = path(3)
    L = layered(g, {2}, {2}, 3, 1)
    _, _, deleted = compute_gj(L, 0)
    assert deleted == {1, 3}
    L2 = layered(g, {2}, {2}, 3, 2)
    gj, to_orig, deleted = compute_gj(L2, 1)
    assert deleted == {2}
    assert gj.n == 2 and gj.m == 0 and sorted(to_orig.values()) == [1, 3]


def test_gj_single_layer():
    g = Graph.from_edges(3, [(1, 2), (2, 3), (1, 3)])
    L = layered(g, {1, 2}, {1, 2}, 2, 2, outer=(1, 2, 3))
    for j in (1, 2):
        gj, _, deleted = compute_gj(L, j)
        assert not deleted and gj == g


def test_star_gadget_for_kept_solution_vertex():
    g = path(3)
    # layers 0,1,2; ell=2 so j=1 deletes vertex 2, which is in both endpoints
    L = layered(g, {2}, {2}, 2, 2)
    sub = build_subinstance(L, 1)
    assert sub.kept_common == {2}
    assert len(sub.centers) == 1 and len(sub.star_leaves) == 3
    (u,) = sub.centers
    assert u in sub.source_star and u in sub.target_star
    assert sub.gstar.neighbors(u) == sub.star_leaves


def test_pendants_guard_vertices_next_to_deleted_rest():
    g = path(4)
    # layer of v is v-1; ell=1, j=1 deletes 2 and 4; 3 is in both sets and touches 4
    L = layered(g, {1, 3}, {1, 3}, 3, 1)
    sub = build_subinstance(L, 1)
    assert sub.rest == {2, 4}
    assert len(sub.guarded) == 2
    assert len(sub.pendant_leaves) == 2 * 2


def test_offset_skipped_when_difference_deleted():
    g = path(3)
    L = layered(g, {2}, {1, 3}, 3, 3)
    assert build_subinstance(L, 0) is None
    assert build_subinstance(L, 2) is None


def test_plain_restriction_without_gadgets():
    g = path(5)
    # layers 0..4 with period 6: offset 5 deletes nothing
    L = layered(g, {2, 4}, {2, 4}, 3, 5)
    sub = build_subinstance(L, 5)
    assert not sub.gadget and not sub.deleted
    assert sub.gstar == g
    assert sub.source_star == sub.target_star == {2, 4}


def test_p3_shift_agrees():
    L = layered(path(3), {2}, {1, 3}, 3, 3)
    res = shift_solve(L)
    assert res.answer == solve(L.inst).answer == oracle_answer(L.inst) is True
    check_witness(L.inst, res.witness)


def test_grid_examples():
    g = grid(3, 3)
    outer = [1, 2, 3, 4, 6, 7, 8, 9]
    covers = feasible_sets(g, 5, ProblemKind.VC_R)
    pairs = [(S, T) for S in covers for T in covers if len(S ^ T) == 2]
    rng = random.Random(2)
    for S, T in rng.sample(pairs, 6):
        for ell in (2, 3, 4):
            for k in (len(S), len(S) + 1):
                L = layered(g, S, T, k, ell, outer=outer)
                res = shift_solve(L)
                assert res.answer == oracle_answer(L.inst)
                if res.answer:
                    check_witness(L.inst, res.witness)


def test_all_offsets_skipped_is_no():
    g = path(6)
    S = fs({2, 4, 6})
    T = fs({1, 3, 5})
    L = layered(g, S, T, 6, 2)
    res = shift_solve(L)
    assert res.offsets_skipped == [0, 1, 2]
    assert not res.answer and not oracle_answer(L.inst)


def test_independent_set_through_complement():
    g = grid(2, 3)
    L = layered(g, {1, 3, 5}, {2, 4, 6}, 2, 6, outer=(1, 2, 3), kind=ProblemKind.IS_R,
                mode=LengthMode.AT_MOST)
    res = shift_solve(L)
    assert res.answer == oracle_answer(L.inst)
    if res.answer:
        check_witness(L.inst, res.witness)


def test_rejects_bad_layering():
    g = path(3)
    inst = Instance(g, fs({2}), fs({2}), 1, 1, ProblemKind.VC_R)
    with pytest.raises(InputError, match="spans"):
        LayeredInstance(inst, {1: 0, 2: 1, 3: 3})
    with pytest.raises(InputError):
        LayeredInstance(inst, {1: 0, 2: 1})
    with pytest.raises(InputError):
        LayeredInstance(Instance(g, fs({2}), fs({2}), 1, 1, ProblemKind.OCT_R), {1: 0, 2: 1, 3: 2})


def test_random_outerplanar_agree():
    rng = random.Random(9)
    for _ in range(30):
        g = outerplanar_ish(rng, rng.randint(3, 9))
        kind = rng.choice([ProblemKind.VC_R, ProblemKind.IS_R])
        k = rng.randint(0, g.n)
        pool = feasible_sets(g, k, kind)
        if not pool:
            continue
        S = rng.choice(pool)
        T = rng.choice([X for X in pool if len(X ^ S) <= 4])
        L = layered(g, S, T, k, rng.randint(0, 4), kind=kind, mode=rng.choice(list(LengthMode)))
        res = shift_solve(L, debug=True)
        assert res.answer == oracle_answer(L.inst) == solve(L.inst).answer
        if res.answer:
            check_witness(L.inst, res.witness)
