from __future__ import annotations

import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from brute import dp_step_tables, extendable_signatures
from conftest import instances, random_instance
from reconftw.dp import UNUSED, DPContext, prepare_decomposition, sigma_sequences
from reconftw.dp_ext import (
    FVSSignature,
    OCTSignature,
    aux_forget,
    aux_introduce,
    aux_is_valid,
    aux_join,
    solve_variant,
)
from reconftw.graph import Graph, InputError, Instance, ProblemKind, Property, check_witness
from reconftw.oracle import oracle_answer

K3 = Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)])
PATH3 = Graph.from_edges(3, [(1, 2), (2, 3)])
C4 = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
fs = frozenset


def test_oct_valid_triangle():
    ctx = DPContext.build(K3, {1}, {2}, (1, -1), Property.BIPARTITE)
    assert aux_is_valid(ctx, {1, 2, 3}, OCTSignature((2, 1), (fs({3}),)))


def test_oct_rejects_monochromatic_edge():
    g = Graph.from_edges(3, [(1, 2)])
    ctx = DPContext.build(g, {3}, {3}, (1, -1), Property.BIPARTITE)
    assert not aux_is_valid(ctx, {1, 2, 3}, OCTSignature((UNUSED, UNUSED), (fs({1, 2}),)))
    assert aux_is_valid(ctx, {1, 2, 3}, OCTSignature((UNUSED, UNUSED), (fs({1}),)))


def test_fvs_rejects_block_plus_edge_cycle():
    # u=1, v=2, w=3 on a bag path; block {1,2} claims a second link besides the edge 1-2
    ctx = DPContext.build(PATH3, set(), set(), (1, -1), Property.FOREST)
    sig = FVSSignature((UNUSED, UNUSED), ((fs({1, 2}), fs({3})),))
    assert not aux_is_valid(ctx, {1, 2, 3}, sig)
    ok = FVSSignature((UNUSED, UNUSED), ((fs({1}), fs({2}), fs({3})),))
    assert aux_is_valid(ctx, {1, 2, 3}, ok)


def test_oct_introduce_isolated_keeps_both_labels():
    g = Graph.from_edges(2, [])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.BIPARTITE)
    out = aux_introduce(ctx, {1}, OCTSignature((UNUSED, UNUSED), (fs(),)), 2)
    labels = {s.left[0] for s in out if s.steps == (UNUSED, UNUSED)}
    assert labels == {fs(), fs({2})}


def test_oct_introduce_forced_label():
    g = Graph.from_edges(2, [(1, 2)])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.BIPARTITE)
    # with 1 LEFT at step 1, vertex 2 must be RIGHT there
    out = aux_introduce(ctx, {1}, OCTSignature((UNUSED, UNUSED), (fs({1}),)), 2)
    surviving = {s.left[0] for s in out if s.steps == (UNUSED, UNUSED)}
    assert surviving == {fs({1})}


def test_fvs_introduce_rejects_cycle():
    ctx = DPContext.build(K3, set(), set(), (1, -1), Property.FOREST)
    sig = FVSSignature((UNUSED, UNUSED), ((fs({1}), fs({2})),))
    # 3 touches 1 and 2 while the edge 1-2 is alive at step 1: a triangle
    out = aux_introduce(ctx, {1, 2}, sig, 3)
    assert all(3 in s.steps for s in out)


def test_fvs_introduce_same_block_rejected():
    g = Graph.from_edges(3, [(1, 3), (2, 3)])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.FOREST)
    sig = FVSSignature((UNUSED, UNUSED), ((fs({1, 2}),),))
    out = aux_introduce(ctx, {1, 2}, sig, 3)
    assert all(3 in s.steps for s in out)


def test_oct_forget_drops_label():
    g = Graph.from_edges(2, [(1, 2)])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.BIPARTITE)
    out = aux_forget(ctx, {1, 2}, OCTSignature((UNUSED, UNUSED), (fs({1}),)), 1)
    assert out == OCTSignature((UNUSED, UNUSED), (fs(),))


def test_fvs_forget_splits_block():
    g = Graph.from_edges(3, [])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.FOREST)
    sig = FVSSignature((UNUSED, UNUSED), ((fs({1, 2}), fs({3})),))
    out = aux_forget(ctx, {1, 2, 3}, sig, 1)
    assert out == FVSSignature((UNUSED, UNUSED), ((fs({2}), fs({3})),))


def test_fvs_forget_links_through_forgotten_vertex():
    ctx = DPContext.build(PATH3, set(), set(), (1, -1), Property.FOREST)
    sig = FVSSignature((UNUSED, UNUSED), ((fs({1}), fs({2}), fs({3})),))
    out = aux_forget(ctx, {1, 2, 3}, sig, 2)
    assert out == FVSSignature((UNUSED, UNUSED), ((fs({1, 3}),),))


def test_oct_join_compatibility():
    g = Graph.from_edges(1, [])
    ctx = DPContext.build(g, set(), set(), (1, -1), Property.BIPARTITE)
    a = OCTSignature((UNUSED, UNUSED), (fs({1}),))
    b = OCTSignature((UNUSED, UNUSED), (fs(),))
    assert aux_join(ctx, {1}, a, a) == a
    assert aux_join(ctx, {1}, a, b) is None


def test_fvs_join_double_link_rejected():
    # C4 split across a join: each side links 1 and 3 through its own forgotten vertex
    ctx = DPContext.build(C4, set(), set(), (1, -1), Property.FOREST)
    linked = FVSSignature((UNUSED, UNUSED), ((fs({1, 3}),),))
    apart = FVSSignature((UNUSED, UNUSED), ((fs({1}), fs({3})),))
    assert aux_join(ctx, {1, 3}, linked, linked) is None
    assert aux_join(ctx, {1, 3}, linked, apart) == linked


@st.composite
def aux_setups(draw, prop):
    kind = ProblemKind.OCT_R if prop is Property.BIPARTITE else ProblemKind.FVS_R
    inst = draw(instances(kinds=(kind,), max_n=6, max_ell=3))
    sigmas = sigma_sequences(len(inst.source), len(inst.target), inst.k, inst.ell)
    assume(sigmas)
    sig = draw(st.sampled_from(sigmas))
    return DPContext.build(inst.graph, inst.source, inst.target, sig.dirs, prop), kind


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([Property.BIPARTITE, Property.FOREST]).flatmap(aux_setups))
def test_variant_tables_equal_extendable_sets(setup):
    ctx, kind = setup
    ntd = prepare_decomposition(ctx.graph)
    # debug mode asserts validity of every inserted entry and the size bound
    tables = dp_step_tables(ctx, ntd, kind)
    for i, nd in enumerate(ntd.nodes):
        assert tables[i] == extendable_signatures(ctx, ntd.subtree_vertices[i], nd.bag)


def test_oct_examples():
    yes = Instance(K3, fs({1}), fs({2}), 2, 2, ProblemKind.OCT_R)
    res = solve_variant(yes)
    assert res.answer and res.witness == [fs({1}), fs({1, 2}), fs({2})]
    assert not solve_variant(Instance(K3, fs({1}), fs({2}), 1, 2, ProblemKind.OCT_R)).answer


def test_fvs_example():
    res = solve_variant(Instance(K3, fs({1}), fs({2}), 2, 2, ProblemKind.FVS_R))
    assert res.answer


def test_solve_variant_rejects_vc():
    with pytest.raises(InputError):
        solve_variant(Instance(K3, fs({1, 2}), fs({1, 2}), 2, 0, ProblemKind.VC_R))


@pytest.mark.parametrize("kind", [ProblemKind.OCT_R, ProblemKind.IBS_R, ProblemKind.FVS_R, ProblemKind.IF_R])
def test_variants_match_oracle(kind):
    rng = random.Random(kind.value)
    for _ in range(40):
        inst = random_instance(rng, kind, n_max=7, ell_max=4, near=True)
        res = solve_variant(inst, debug=True)
        assert res.answer == oracle_answer(inst)
        if res.answer:
            check_witness(inst, res.witness)
