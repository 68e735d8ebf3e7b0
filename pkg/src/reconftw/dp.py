"""Signature dynamic programming over nice tree decompositions (VC-R / IS-R).

A signature over a bag ``X`` is a tuple of ``ell`` steps.  Step encoding:
``UNUSED`` (0), ``USED`` (-1), or a positive vertex id of ``X``.  Vertex sets
are bitmasks (bit ``v`` for vertex ``v``) throughout the engine; the public
helpers accept and return ordinary sets.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph import (
    Graph,
    Instance,
    InputError,
    LengthMode,
    ProblemKind,
    Property,
    complement_instance,
    from_mask,
    has_property,
    to_mask,
    validate_instance,
)
from .treedecomp import NiceTreeDecomposition, NodeKind, min_fill_decompose, nicify

UNUSED = 0
USED = -1


@dataclass(frozen=True)
class StepDirections:
    dirs: tuple[int, ...]
    start: int
    capacity: int

    def __len__(self) -> int:
        return len(self.dirs)

    def sizes(self) -> list[int]:
        out = [self.start]
        for d in self.dirs:
            out.append(out[-1] + d)
        return out


def sigma_sequences(size_s: int, size_t: int, k: int, ell: int) -> list[StepDirections]:
    """All capacity-respecting +-1 sequences from ``size_s`` to ``size_t``, lexicographic."""
    out: list[StepDirections] = []
    prefix: list[int] = []

    def rec(cur: int, left: int) -> None:
        if left == 0:
            if cur == size_t:
                out.append(StepDirections(tuple(prefix), size_s, k))
            return
        for d in (-1, 1):
            nxt = cur + d
            if not 0 <= nxt <= k or abs(size_t - nxt) > left - 1:
                continue
            prefix.append(d)
            rec(nxt, left - 1)
            prefix.pop()

    if 0 <= size_s <= k and 0 <= size_t <= k and ell >= abs(size_t - size_s) and (ell - size_t + size_s) % 2 == 0:
        rec(size_s, ell)
    return out


def apply_steps(steps: tuple[int, ...], dirs: tuple[int, ...], i: int, S: Iterable[int]) -> frozenset[int]:
    """The set reached from ``S`` after the first ``i`` steps."""
    cur = set(S)
    for s, d in zip(steps[:i], dirs[:i]):
        if s > 0:
            if d > 0:
                cur.add(s)
            else:
                cur.discard(s)
    return frozenset(cur)


@dataclass(frozen=True)
class DPContext:
    """The fixed data a DP run is parameterised by: graph, endpoints, step directions."""

    graph: Graph
    source: int
    target: int
    dirs: tuple[int, ...]
    prop: Property = Property.EDGELESS

    @classmethod
    def build(cls, graph: Graph, source: Iterable[int], target: Iterable[int],
              dirs: Iterable[int], prop: Property = Property.EDGELESS) -> DPContext:
        return cls(graph, to_mask(source), to_mask(target), tuple(dirs), prop)

    @property
    def ell(self) -> int:
        return len(self.dirs)

    def step_sets(self, bag: int, steps: tuple[int, ...]) -> list[int] | None:
        """Sets ``sig(i, S_s & X)`` for ``i = 0..ell``; ``None`` if conditions (1)-(3) fail."""
        cur = self.source & bag
        out = [cur]
        for s, d in zip(steps, self.dirs):
            if s > 0:
                bit = 1 << s
                if d > 0:
                    if cur & bit:
                        return None
                    cur |= bit
                else:
                    if not cur & bit:
                        return None
                    cur &= ~bit
            out.append(cur)
        if cur != self.target & bag:
            return None
        return out


def is_valid(ctx: DPContext, bag: Iterable[int], steps: tuple[int, ...]) -> bool:
    """Validity of a signature over ``bag``: well-defined steps ending at ``S_t``, Pi at every step."""
    bag = frozenset(bag)
    bag_mask = to_mask(bag)
    if len(steps) != ctx.ell:
        return False
    for s in steps:
        if s > 0 and s not in bag:
            return False
        if s < USED:
            return False
    sets = ctx.step_sets(bag_mask, steps)
    if sets is None:
        return False
    return all(has_property(ctx.graph, from_mask(bag_mask & ~S), ctx.prop) for S in sets)


def introduce(ctx: DPContext, bag: Iterable[int], steps: tuple[int, ...], v: int) -> set[tuple[int, ...]]:
    """Valid signatures over ``bag + v`` obtained by setting some UNUSED steps of ``steps`` to ``v``."""
    dp = SignatureDP(ctx, None)
    return {e[0] for e in dp.introduce_entry(to_mask(bag), (tuple(steps), None), v)}


def forget(steps: tuple[int, ...], v: int) -> tuple[int, ...]:
    return tuple(USED if s == v else s for s in steps)


def join(s1: tuple[int, ...], s2: tuple[int, ...]) -> tuple[int, ...] | None:
    """Merge two compatible signatures, or ``None`` if they are incompatible."""
    out = []
    for a, b in zip(s1, s2):
        if a == b:
            if a == USED:
                return None
            out.append(a)
        elif a == USED and b == UNUSED or a == UNUSED and b == USED:
            out.append(USED)
        else:
            return None
    return tuple(out)


def skeleton(steps: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """(USED-position mask, steps with USED blanked to UNUSED); the join grouping key."""
    mask = 0
    for i, s in enumerate(steps):
        if s == USED:
            mask |= 1 << i
    if not mask:
        return 0, steps
    return mask, tuple(UNUSED if s == USED else s for s in steps)


class SignatureDP:
    """One DP run for a fixed step-direction sequence.

    Table entries are ``(steps, aux)`` pairs; ``aux`` is ``None`` here and
    carries per-step labels / partitions in the subclasses.
    """

    def __init__(self, ctx: DPContext, ntd: NiceTreeDecomposition, debug: bool = False):
        self.ctx = ctx
        self.ntd = ntd
        self.debug = debug
        self.graph = ctx.graph
        self.ell = ctx.ell
        self.tables: dict[int, dict[tuple, tuple]] = {}
        self.table_sizes: dict[int, int] = {}

    # -- variant hooks -------------------------------------------------
    def absent_ok(self, bag: int, entry: tuple, sets: list[int], v: int) -> list[bool]:
        """Per step, whether the introduced ``v`` may be outside the solution there."""
        nb = self.graph.adj_mask[v] & bag
        return [nb & ~S == 0 for S in sets]

    def extend(self, bag: int, entry: tuple, new_steps: tuple[int, ...], member: list[bool],
               sets: list[int], v: int) -> Iterator[object]:
        yield None

    def forget_aux(self, bag: int, entry: tuple, v: int) -> object:
        return None

    def join_key(self, aux: object) -> object:
        return None

    def join_aux(self, bag: int, steps: tuple[int, ...], a1: object, a2: object) -> tuple[bool, object]:
        return True, None

    def entry_valid(self, bag: int, entry: tuple) -> bool:
        return is_valid(self.ctx, from_mask(bag), entry[0])

    def size_bound(self, bag_size: int) -> int:
        return (bag_size + 2) ** self.ell

    # -- operations ----------------------------------------------------
    def introduce_entry(self, bag: int, entry: tuple, v: int) -> Iterator[tuple]:
        """All valid entries over ``bag + v`` made by turning UNUSED steps of ``entry`` into ``v``."""
        steps = entry[0]
        ctx = self.ctx
        sets = ctx.step_sets(bag, steps)
        ok = self.absent_ok(bag, entry, sets, v)
        bit = 1 << v
        inside0 = bool(ctx.source & bit)
        want_end = bool(ctx.target & bit)
        if not inside0 and not ok[0]:
            return
        dirs = ctx.dirs
        ell = self.ell
        cur = list(steps)
        member = [inside0] + [False] * ell
        new_bag = bag | bit

        def rec(i: int, inside: bool) -> Iterator[tuple]:
            if i == ell:
                if inside == want_end:
                    new_steps = tuple(cur)
                    for aux in self.extend(new_bag, entry, new_steps, member, sets, v):
                        yield new_steps, aux
                return
            options = [inside]
            if steps[i] == UNUSED and (dirs[i] > 0) != inside:
                options.append(not inside)
            for nxt in options:
                if not nxt and not ok[i + 1]:
                    continue
                placed = nxt != inside
                cur[i] = v if placed else steps[i]
                member[i + 1] = nxt
                yield from rec(i + 1, nxt)
            cur[i] = steps[i]

        yield from rec(0, inside0)

    def forget_entry(self, bag: int, entry: tuple, v: int) -> tuple:
        return forget(entry[0], v), self.forget_aux(bag, entry, v)

    # -- table filling -------------------------------------------------
    def _insert(self, table: dict, bag: int, entry: tuple, prov: tuple) -> None:
        if entry not in table:
            if self.debug and not self.entry_valid(bag, entry):
                raise AssertionError(f"invalid signature produced: {entry}")
            table[entry] = prov

    def run(self) -> dict[tuple, tuple]:
        """Fill all tables bottom-up and return the root table."""
        ntd = self.ntd
        empty = ((UNUSED,) * self.ell, self.initial_aux())
        for i in ntd.postorder():
            nd = ntd.nodes[i]
            bag = to_mask(nd.bag)
            table: dict[tuple, tuple] = {}
            if nd.kind is NodeKind.LEAF:
                for e in self.introduce_entry(0, empty, nd.vertex):
                    self._insert(table, bag, e, ("leaf", empty))
            elif nd.kind is NodeKind.INTRODUCE:
                child = nd.children[0]
                cbag = to_mask(ntd.nodes[child].bag)
                for ce in self.tables[child]:
                    for e in self.introduce_entry(cbag, ce, nd.vertex):
                        self._insert(table, bag, e, ("intro", ce))
            elif nd.kind is NodeKind.FORGET:
                child = nd.children[0]
                cbag = to_mask(ntd.nodes[child].bag)
                for ce in self.tables[child]:
                    self._insert(table, bag, self.forget_entry(cbag, ce, nd.vertex), ("forget", ce))
            else:
                self._join_tables(table, bag, *nd.children)
            if self.debug:
                self._check_bounds(i, len(nd.bag), table)
            self.tables[i] = table
            self.table_sizes[i] = len(table)
        return self.tables[ntd.root]

    def _check_bounds(self, node: int, bag_size: int, table: dict) -> None:
        if len(table) > self.size_bound(bag_size):
            raise AssertionError(
                f"table at node {node} has {len(table)} entries > bound {self.size_bound(bag_size)}")
        signatures = len({e[0] for e in table})
        if signatures > (bag_size + 2) ** self.ell:
            raise AssertionError(f"table at node {node} has {signatures} step signatures")

    def initial_aux(self) -> object:
        return None

    def _join_tables(self, table: dict, bag: int, left: int, right: int) -> None:
        t1, t2 = self.tables[left], self.tables[right]
        swap = len(t1) > len(t2)
        small, big = (t2, t1) if swap else (t1, t2)
        groups: dict[tuple, list[tuple[int, tuple]]] = {}
        for e in big:
            mask, skel = skeleton(e[0])
            groups.setdefault((skel, self.join_key(e[1])), []).append((mask, e))
        for e in small:
            mask, skel = skeleton(e[0])
            for m2, e2 in groups.get((skel, self.join_key(e[1])), ()):
                if mask & m2:
                    continue
                merged = tuple(USED if (mask | m2) >> i & 1 else s for i, s in enumerate(skel))
                first, second = (e2, e) if swap else (e, e2)
                ok, aux = self.join_aux(bag, merged, first[1], second[1])
                if ok:
                    self._insert(table, bag, (merged, aux), ("join", first, second))

    # -- acceptance and witness ---------------------------------------
    def accepted_entry(self) -> tuple | None:
        root = self.tables[self.ntd.root]
        for e in sorted(root, key=_entry_order):
            if UNUSED not in e[0]:
                return e
        return None

    def reconstruct(self, entry: tuple) -> list[int]:
        """Vertex of every step, recovered by walking provenance links down from the root."""
        assign = [0] * self.ell
        ntd = self.ntd
        for idx, s in enumerate(entry[0]):
            if s > 0:
                assign[idx] = s
        stack = [(ntd.root, entry)]
        while stack:
            i, e = stack.pop()
            nd = ntd.nodes[i]
            prov = self.tables[i][e]
            if prov[0] == "forget":
                ce = prov[1]
                for idx, s in enumerate(ce[0]):
                    if s == nd.vertex:
                        assign[idx] = s
                stack.append((nd.children[0], ce))
            elif prov[0] == "intro":
                stack.append((nd.children[0], prov[1]))
            elif prov[0] == "join":
                stack.append((nd.children[0], prov[1]))
                stack.append((nd.children[1], prov[2]))
        if any(a <= 0 for a in assign):
            raise AssertionError("provenance walk left a step without a vertex")
        return assign


def _entry_order(e: tuple) -> tuple:
    return (e[0], repr(e[1]))


def witness_from_steps(source: Iterable[int], dirs: tuple[int, ...], vertices: list[int]) -> list[frozenset[int]]:
    cur = set(source)
    out = [frozenset(cur)]
    for v, d in zip(vertices, dirs):
        if d > 0:
            cur.add(v)
        else:
            cur.discard(v)
        out.append(frozenset(cur))
    return out


@dataclass
class DPRun:
    witness: list[frozenset[int]] | None
    table_sizes: dict[int, int]


def run_dp_for_sigma(graph: Graph, ntd: NiceTreeDecomposition, inst: Instance,
                     sigma: StepDirections, debug: bool = False,
                     engine: type[SignatureDP] | None = None) -> DPRun:
    """Run the DP for one direction sequence; the witness is ``None`` for a NO."""
    if not inst.kind.minimization:
        raise InputError("run_dp_for_sigma expects a minimization instance")
    if engine is None:
        engine = engine_for(inst.kind)
    ctx = DPContext.build(graph, inst.source, inst.target, sigma.dirs, inst.kind.prop)
    dp = engine(ctx, ntd, debug=debug)
    dp.run()
    entry = dp.accepted_entry()
    if entry is None:
        return DPRun(None, dp.table_sizes)
    vertices = dp.reconstruct(entry)
    return DPRun(witness_from_steps(inst.source, sigma.dirs, vertices), dp.table_sizes)


def engine_for(kind: ProblemKind) -> type[SignatureDP]:
    prop = kind.prop
    if prop is Property.EDGELESS:
        return SignatureDP
    from .dp_ext import FVSSignatureDP, OCTSignatureDP

    return OCTSignatureDP if prop is Property.BIPARTITE else FVSSignatureDP


@dataclass
class SolveResult:
    answer: bool
    witness: list[frozenset[int]] | None
    sigmas_tried: int = 0
    lengths_tried: list[int] = field(default_factory=list)
    max_table: int = 0
    node_max_table: dict[int, int] = field(default_factory=dict)
    width: int = -1
    seconds: float = 0.0


def _run_task(args: tuple) -> DPRun:
    graph, ntd, inst, sigma, debug = args
    return run_dp_for_sigma(graph, ntd, inst, sigma, debug=debug)


def prepare_decomposition(graph: Graph) -> NiceTreeDecomposition:
    return nicify(min_fill_decompose(graph))


def solve(inst: Instance, ntd: NiceTreeDecomposition | None = None, *, threads: int = 1,
          debug: bool = False) -> SolveResult:
    """Decide an instance of any kind; maximization kinds go through the complement."""
    validate_instance(inst)
    t0 = time.perf_counter()
    work = inst if inst.kind.minimization else complement_instance(inst)
    result = _solve_min(work, ntd, threads=threads, debug=debug)
    if result.witness is not None and work is not inst:
        V = frozenset(inst.graph.vertices)
        result.witness = [V - S for S in result.witness]
    result.seconds = time.perf_counter() - t0
    return result


def _solve_min(inst: Instance, ntd: NiceTreeDecomposition | None, *, threads: int,
               debug: bool) -> SolveResult:
    graph = inst.graph
    if inst.mode is LengthMode.EXACT:
        lengths = [inst.ell]
    else:
        d = len(inst.source ^ inst.target)
        lengths = list(range(d, inst.ell + 1, 2))
    if graph.n == 0:
        # the only state is the empty set, and it has no neighbours
        ok = 0 in lengths
        return SolveResult(ok, [frozenset()] if ok else None, lengths_tried=lengths[:1])
    if ntd is None:
        ntd = prepare_decomposition(graph)
    res = SolveResult(False, None, width=ntd.width)
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for length in lengths:
            res.lengths_tried.append(length)
            sigmas = sigma_sequences(len(inst.source), len(inst.target), inst.k, length)
            tasks = [(graph, ntd, inst, s, debug) for s in sigmas]
            runs = pool.map(_run_task, tasks) if pool else map(_run_task, tasks)
            for run in runs:
                res.sigmas_tried += 1
                for node, size in run.table_sizes.items():
                    if size > res.node_max_table.get(node, -1):
                        res.node_max_table[node] = size
                if run.witness is not None:
                    res.answer = True
                    res.witness = run.witness
                    break
            if res.answer:
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
    res.max_table = max(res.node_max_table.values(), default=0)
    return res
