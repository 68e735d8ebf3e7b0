"""Layer-shifting solver for VC-R / IS-R on layered (planar) graphs.

For every offset ``j`` the layers with index ``= j (mod ell+1)`` are deleted.
Deleted solution vertices are replaced by a star whose centre sits in both
endpoints (so the capacity they consume stays consumed), and solution vertices
next to deleted non-solution vertices get ``ell+1`` pendant leaves so that
no sequence of ``ell`` moves can drop them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Mapping

from .dp import SolveResult, solve
from .graph import (
    Graph,
    InputError,
    Instance,
    LengthMode,
    ProblemKind,
    check_feasible,
    check_witness,
    complement_instance,
    validate_instance,
)
from .treedecomp import min_fill_decompose, nicify


@dataclass(frozen=True)
class LayeredInstance:
    inst: Instance
    layers: Mapping[int, int]

    def __post_init__(self) -> None:
        if self.inst.kind not in (ProblemKind.VC_R, ProblemKind.IS_R):
            raise InputError(f"layer shifting supports vc-r and is-r, not {self.inst.kind.value}")
        g = self.inst.graph
        missing = [v for v in g.vertices if v not in self.layers]
        if missing:
            raise InputError(f"vertices {missing} have no layer")
        for u, v in sorted(g.edges):
            if abs(self.layers[u] - self.layers[v]) > 1:
                raise InputError(f"edge {u}-{v} spans layers {self.layers[u]} and {self.layers[v]}")
        if any(self.layers[v] < 0 for v in g.vertices):
            raise InputError("layer indices must be non-negative")


@dataclass
class ShiftSubinstance:
    j: int
    gstar: Graph
    to_original: dict[int, int]
    deleted: frozenset[int]
    kept_common: frozenset[int]
    rest: frozenset[int]
    source_star: frozenset[int]
    target_star: frozenset[int]
    centers: frozenset[int] = frozenset()
    star_leaves: frozenset[int] = frozenset()
    pendant_leaves: frozenset[int] = frozenset()
    guarded: frozenset[int] = frozenset()

    @property
    def gadget(self) -> frozenset[int]:
        return self.centers | self.star_leaves | self.pendant_leaves


def compute_gj(layered: LayeredInstance, j: int) -> tuple[Graph, dict[int, int], frozenset[int]]:
    """``G`` minus the layers ``= j (mod ell+1)``: (renumbered graph, new->old ids, deleted set)."""
    g = layered.inst.graph
    period = layered.inst.ell + 1
    if not 0 <= j < period:
        raise InputError(f"shift offset {j} outside 0..{period - 1}")
    deleted = frozenset(v for v in g.vertices if layered.layers[v] % period == j)
    kept = [v for v in g.vertices if v not in deleted]
    new_id = {v: i for i, v in enumerate(kept, 1)}
    edges = [(new_id[u], new_id[v]) for u, v in sorted(g.edges) if u in new_id and v in new_id]
    return Graph.from_edges(len(kept), edges), {i: v for v, i in new_id.items()}, deleted


def build_subinstance(layered: LayeredInstance, j: int) -> ShiftSubinstance | None:
    """The gadget-augmented instance for offset ``j``, or ``None`` when the offset is skipped."""
    inst = layered.inst
    g = inst.graph
    ell = inst.ell
    gj, to_orig, deleted = compute_gj(layered, j)
    if (inst.source ^ inst.target) & deleted:
        return None
    common = inst.source & inst.target
    kept_common = deleted & common
    rest = deleted - kept_common
    new_id = {v: i for i, v in to_orig.items()}
    src = frozenset(new_id[v] for v in inst.source if v in new_id)
    tgt = frozenset(new_id[v] for v in inst.target if v in new_id)

    def touches_rest(v_new: int) -> bool:
        return bool(g.neighbors(to_orig[v_new]) & rest)

    if any(touches_rest(v) for v in src ^ tgt):
        return None
    edges = [tuple(e) for e in sorted(gj.edges)]
    nxt = gj.n + 1
    centers, star_leaves, pendants = set(), set(), set()
    for _ in sorted(kept_common):
        u = nxt
        nxt += 1
        centers.add(u)
        for _ in range(ell + 1):
            edges.append((u, nxt))
            star_leaves.add(nxt)
            nxt += 1
    src |= centers
    tgt |= centers
    guarded = frozenset(v for v in sorted(src & tgt) if v in to_orig and touches_rest(v))
    for v in sorted(guarded):
        for _ in range(ell + 1):
            edges.append((v, nxt))
            pendants.add(nxt)
            nxt += 1
    gstar = Graph.from_edges(nxt - 1, edges)
    return ShiftSubinstance(
        j=j,
        gstar=gstar,
        to_original=to_orig,
        deleted=deleted,
        kept_common=kept_common,
        rest=rest,
        source_star=frozenset(src),
        target_star=frozenset(tgt),
        centers=frozenset(centers),
        star_leaves=frozenset(star_leaves),
        pendant_leaves=frozenset(pendants),
        guarded=guarded,
    )


def _lift_witness(sub: ShiftSubinstance, inst: Instance,
                  raw: list[frozenset[int]]) -> list[frozenset[int]]:
    """Map a sub-instance sequence back to ``G``: drop gadget moves, re-pad to the length asked for."""
    moves = []
    for a, b in zip(raw, raw[1:]):
        (v,) = a ^ b
        if v in sub.centers or v in sub.guarded:
            raise AssertionError(f"gadget-protected vertex {v} was moved")
        if v in sub.gadget:
            continue
        moves.append(sub.to_original[v])
    cur = set(inst.source)
    out = [frozenset(cur)]
    for v in moves:
        cur ^= {v}
        out.append(frozenset(cur))
    if inst.mode is LengthMode.EXACT:
        out = _pad(inst, out)
    return out


def _pad(inst: Instance, seq: list[frozenset[int]]) -> list[frozenset[int]]:
    missing = inst.ell - (len(seq) - 1)
    if missing % 2:
        raise AssertionError("gadget moves did not come in pairs")
    if missing == 0:
        return seq
    if len(seq) >= 2:
        a, b = seq[-2], seq[-1]
    else:
        a = seq[0]
        b = None
        V = frozenset(inst.graph.vertices)
        for v in sorted(V - a):
            if len(a) + 1 <= inst.k:
                b = a | {v}
                break
        if b is None:
            for v in sorted(a):
                if check_feasible(inst.graph, a - {v}, inst.kind):
                    b = a - {v}
                    break
        if b is None:
            raise AssertionError("no move available to pad the sequence")
        seq = [a]
        for _ in range(missing // 2):
            seq += [b, a]
        return seq
    for _ in range(missing // 2):
        seq += [a, b]
    return seq


@dataclass
class ShiftResult(SolveResult):
    offsets_tried: list[int] = field(default_factory=list)
    offsets_skipped: list[int] = field(default_factory=list)
    sub_widths: dict[int, int] = field(default_factory=dict)


def shift_solve(layered: LayeredInstance, *, threads: int = 1, debug: bool = False) -> ShiftResult:
    """Solve by deleting every ``(ell+1)``-th layer for each offset; first YES wins."""
    t0 = time.perf_counter()
    inst = layered.inst
    validate_instance(inst)
    work = inst if inst.kind.minimization else complement_instance(inst)
    wl = replace(layered, inst=work)
    res = ShiftResult(False, None)
    for j in range(work.ell + 1):
        sub = build_subinstance(wl, j)
        if sub is None:
            res.offsets_skipped.append(j)
            continue
        res.offsets_tried.append(j)
        sub_inst = Instance(sub.gstar, sub.source_star, sub.target_star, work.k, work.ell,
                            ProblemKind.VC_R, work.mode)
        ntd = nicify(min_fill_decompose(sub.gstar)) if sub.gstar.n else None
        if ntd is not None:
            res.sub_widths[j] = ntd.width
        r = solve(sub_inst, ntd, threads=threads, debug=debug)
        res.sigmas_tried += r.sigmas_tried
        res.max_table = max(res.max_table, r.max_table)
        if r.answer:
            witness = _lift_witness(sub, work, r.witness)
            check_witness(work, witness)
            res.answer = True
            res.witness = witness
            break
    if res.witness is not None and work is not inst:
        V = frozenset(inst.graph.vertices)
        res.witness = [V - S for S in res.witness]
    res.width = max(res.sub_widths.values(), default=-1)
    res.seconds = time.perf_counter() - t0
    return res
