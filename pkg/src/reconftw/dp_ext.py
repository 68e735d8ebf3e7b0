"""Signature DP variants carrying per-step auxiliary data (OCT-R/IBS-R, FVS-R/IF-R).

Auxiliary data exists for the intermediate steps ``1..ell-1`` only; the
endpoints are feasible by instance validation.

* OCT: for each intermediate step, the set of surviving bag vertices labelled
  LEFT (the rest of the survivors are RIGHT).  Every bag edge between
  survivors must join a LEFT and a RIGHT vertex.
* FVS: for each intermediate step, a partition of the surviving bag vertices
  into blocks of vertices connected through already-forgotten vertices.
  Edges inside the bag are not recorded in the blocks; a forest requires the
  blocks (each taken as a tree) plus the surviving bag edges to be acyclic.
  Bag edges become block connections only when an endpoint is forgotten,
  which is what lets a join glue two sides without counting a bag edge twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator

from .dp import DPContext, SignatureDP, forget, join, skeleton, solve
from .graph import InputError, Property, from_mask, to_mask


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class OCTSignatureDP(SignatureDP):
    def initial_aux(self) -> tuple[int, ...]:
        return (0,) * max(self.ell - 1, 0)

    def absent_ok(self, bag, entry, sets, v):
        ok = [True] * (self.ell + 1)
        nb = self.graph.adj_mask[v] & bag
        labels = entry[1]
        for i in range(1, self.ell):
            alive = nb & ~sets[i]
            left = labels[i - 1]
            if alive & left and alive & ~left:
                ok[i] = False
        return ok

    def extend(self, bag, entry, new_steps, member, sets, v):
        nb = self.graph.adj_mask[v] & bag
        bit = 1 << v
        labels = entry[1]
        choices = []
        for i in range(1, self.ell):
            left = labels[i - 1]
            if member[i]:
                choices.append((left,))
                continue
            alive = nb & ~sets[i]
            if alive & left:
                choices.append((left,))
            elif alive:
                choices.append((left | bit,))
            else:
                choices.append((left, left | bit))
        for combo in product(*choices):
            yield combo

    def forget_aux(self, bag, entry, v):
        keep = ~(1 << v)
        return tuple(left & keep for left in entry[1])

    def join_key(self, aux):
        return aux

    def join_aux(self, bag, steps, a1, a2):
        return True, a1

    def entry_valid(self, bag, entry):
        return oct_valid(self.ctx, bag, entry[0], entry[1])

    def size_bound(self, bag_size):
        return (bag_size + 2) ** self.ell * 2 ** (bag_size * max(self.ell - 1, 0))


def oct_valid(ctx: DPContext, bag: int, steps: tuple[int, ...], labels: tuple[int, ...]) -> bool:
    if len(steps) != ctx.ell or len(labels) != max(ctx.ell - 1, 0):
        return False
    if any(s > 0 and not bag >> s & 1 for s in steps):
        return False
    sets = ctx.step_sets(bag, steps)
    if sets is None:
        return False
    adj = ctx.graph.adj_mask
    for i in range(1, ctx.ell):
        alive = bag & ~sets[i]
        left = labels[i - 1]
        if left & ~alive:
            return False
        right = alive & ~left
        for u in _bits(left):
            if adj[u] & left:
                return False
        for u in _bits(right):
            if adj[u] & right:
                return False
    return True


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p.get(root, root) != root:
            root = p[root]
        while p.get(x, x) != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Unite; ``False`` if already united (the new link would close a cycle)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _add_blocks(uf: _UnionFind, blocks: Iterable[int]) -> bool:
    for block in blocks:
        members = list(_bits(block))
        for a, b in zip(members, members[1:]):
            if not uf.union(a, b):
                return False
    return True


def _add_bag_edges(uf: _UnionFind, adj: tuple[int, ...], alive: int) -> bool:
    for u in _bits(alive):
        for w in _bits(adj[u] & alive):
            if w > u and not uf.union(u, w):
                return False
    return True


def _canonical(blocks: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted((b for b in blocks if b), key=lambda b: b & -b))


def _partition_of(uf: _UnionFind, alive: int) -> tuple[int, ...]:
    groups: dict[int, int] = {}
    for u in _bits(alive):
        r = uf.find(u)
        groups[r] = groups.get(r, 0) | (1 << u)
    return _canonical(groups.values())


class FVSSignatureDP(SignatureDP):
    def initial_aux(self) -> tuple[tuple[int, ...], ...]:
        return ((),) * max(self.ell - 1, 0)

    def absent_ok(self, bag, entry, sets, v):
        ok = [True] * (self.ell + 1)
        adj = self.graph.adj_mask
        nb = adj[v] & bag
        for i in range(1, self.ell):
            alive_nb = nb & ~sets[i]
            if alive_nb & (alive_nb - 1) == 0:
                continue
            uf = _UnionFind()
            _add_blocks(uf, entry[1][i - 1])
            _add_bag_edges(uf, adj, bag & ~sets[i])
            roots = [uf.find(u) for u in _bits(alive_nb)]
            if len(set(roots)) != len(roots):
                ok[i] = False
        return ok

    def extend(self, bag, entry, new_steps, member, sets, v):
        bit = 1 << v
        parts = []
        for i in range(1, self.ell):
            blocks = entry[1][i - 1]
            parts.append(blocks if member[i] else _canonical((*blocks, bit)))
        yield tuple(parts)

    def forget_aux(self, bag, entry, v):
        sets = self.ctx.step_sets(bag, entry[0])
        adj = self.graph.adj_mask
        bit = 1 << v
        parts = []
        for i in range(1, self.ell):
            blocks = entry[1][i - 1]
            alive = bag & ~sets[i]
            if not alive & bit:
                parts.append(blocks)
                continue
            touch = (adj[v] & alive) | bit
            merged = 0
            rest = []
            for b in blocks:
                if b & touch:
                    merged |= b
                else:
                    rest.append(b)
            merged |= adj[v] & alive
            parts.append(_canonical((*rest, merged & ~bit)))
        return tuple(parts)

    def join_aux(self, bag, steps, a1, a2):
        sets = self.ctx.step_sets(bag, steps)
        adj = self.graph.adj_mask
        parts = []
        for i in range(1, self.ell):
            alive = bag & ~sets[i]
            uf = _UnionFind()
            if not _add_blocks(uf, a1[i - 1]) or not _add_blocks(uf, a2[i - 1]):
                return False, None
            merged = _partition_of(uf, alive)
            if not _add_bag_edges(uf, adj, alive):
                return False, None
            parts.append(merged)
        return True, tuple(parts)

    def size_bound(self, bag_size):
        # one partition of the surviving bag vertices per intermediate step
        return (bag_size + 2) ** self.ell * bell_number(bag_size) ** max(self.ell - 1, 0)

    def entry_valid(self, bag, entry):
        return fvs_valid(self.ctx, bag, entry[0], entry[1])


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def fvs_valid(ctx: DPContext, bag: int, steps: tuple[int, ...],
              partitions: tuple[tuple[int, ...], ...]) -> bool:
    if len(steps) != ctx.ell or len(partitions) != max(ctx.ell - 1, 0):
        return False
    if any(s > 0 and not bag >> s & 1 for s in steps):
        return False
    sets = ctx.step_sets(bag, steps)
    if sets is None:
        return False
    for i in range(1, ctx.ell):
        alive = bag & ~sets[i]
        seen = 0
        for b in partitions[i - 1]:
            if not b or b & seen:
                return False
            seen |= b
        if seen != alive:
            return False
        uf = _UnionFind()
        _add_blocks(uf, partitions[i - 1])
        if not _add_bag_edges(uf, ctx.graph.adj_mask, alive):
            return False
    return True


# -- public signature-level operations -------------------------------------

@dataclass(frozen=True)
class OCTSignature:
    """Steps plus, for each intermediate step ``1..ell-1``, the LEFT-labelled survivors."""

    steps: tuple[int, ...]
    left: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class FVSSignature:
    """Steps plus, for each intermediate step, blocks of survivors linked via forgotten vertices."""

    steps: tuple[int, ...]
    partitions: tuple[tuple[frozenset[int], ...], ...]


def _encode(sig):
    if isinstance(sig, OCTSignature):
        return sig.steps, tuple(to_mask(s) for s in sig.left)
    return sig.steps, tuple(_canonical(to_mask(b) for b in p) for p in sig.partitions)


def _decode(cls, entry):
    steps, aux = entry
    if cls is OCTSignature:
        return OCTSignature(steps, tuple(from_mask(m) for m in aux))
    return FVSSignature(steps, tuple(tuple(from_mask(b) for b in p) for p in aux))


def _engine(ctx: DPContext, sig) -> SignatureDP:
    cls = OCTSignatureDP if isinstance(sig, OCTSignature) else FVSSignatureDP
    return cls(ctx, None)


def aux_is_valid(ctx: DPContext, bag: Iterable[int], sig: OCTSignature | FVSSignature) -> bool:
    steps, aux = _encode(sig)
    if isinstance(sig, OCTSignature):
        return oct_valid(ctx, to_mask(bag), steps, aux)
    return fvs_valid(ctx, to_mask(bag), steps, aux)


def aux_introduce(ctx: DPContext, bag: Iterable[int], sig, v: int) -> set:
    dp = _engine(ctx, sig)
    return {_decode(type(sig), e) for e in dp.introduce_entry(to_mask(bag), _encode(sig), v)}


def aux_forget(ctx: DPContext, bag: Iterable[int], sig, v: int):
    dp = _engine(ctx, sig)
    entry = _encode(sig)
    return _decode(type(sig), (forget(entry[0], v), dp.forget_aux(to_mask(bag), entry, v)))


def aux_join(ctx: DPContext, bag: Iterable[int], sig1, sig2):
    """Merged signature, or ``None`` when the two are incompatible."""
    dp = _engine(ctx, sig1)
    e1, e2 = _encode(sig1), _encode(sig2)
    steps = join(e1[0], e2[0])
    if steps is None or skeleton(e1[0])[1] != skeleton(e2[0])[1]:
        return None
    if dp.join_key(e1[1]) != dp.join_key(e2[1]):
        return None
    ok, aux = dp.join_aux(to_mask(bag), steps, e1[1], e2[1])
    return _decode(type(sig1), (steps, aux)) if ok else None


def solve_variant(inst, ntd=None, **kw):
    """Solve an OCT-R/IBS-R/FVS-R/IF-R instance (maximization kinds via the complement)."""
    if inst.kind.prop is Property.EDGELESS:
        raise InputError(f"{inst.kind.value} is not an OCT/FVS variant")
    return solve(inst, ntd, **kw)
