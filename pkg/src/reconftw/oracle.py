"""Brute-force ground truth over explicit state spaces.

Nothing here uses tree decompositions, signatures or duality; maximization
kinds are searched directly so the complement reduction gets an independent
check.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .graph import Graph, InputError, Instance, LengthMode, ProblemKind, check_feasible, from_mask, to_mask

MAX_ORACLE_VERTICES = 24
MAX_WORD_STATES = 2_000_000


class TooLargeError(InputError):
    pass


@dataclass
class StateSpaceResult:
    reachable: bool
    shortest_length: int | None = None
    path: list[frozenset[int]] | None = None


class _ReconfigurationGraph:
    """Implicit reconfiguration graph; nodes are bitmasks of feasible, capacity-respecting sets."""

    def __init__(self, graph: Graph, k: int, kind: ProblemKind):
        if graph.n > MAX_ORACLE_VERTICES:
            raise TooLargeError(f"oracle limited to {MAX_ORACLE_VERTICES} vertices, got {graph.n}")
        self.graph = graph
        self.k = k
        self.kind = kind
        self._feasible: dict[int, bool] = {}

    def is_node(self, mask: int) -> bool:
        hit = self._feasible.get(mask)
        if hit is None:
            size = bin(mask).count("1")
            if self.kind.minimization:
                ok = size <= self.k
            else:
                ok = size >= self.k
            hit = ok and check_feasible(self.graph, from_mask(mask), self.kind)
            self._feasible[mask] = hit
        return hit

    def neighbors(self, mask: int) -> list[int]:
        out = []
        for v in self.graph.vertices:
            nxt = mask ^ (1 << v)
            if self.is_node(nxt):
                out.append(nxt)
        return out


def bfs_reconfig(inst: Instance) -> StateSpaceResult:
    """Shortest reconfiguration sequence from source to target, ignoring ``inst.ell``."""
    rg = _ReconfigurationGraph(inst.graph, inst.k, inst.kind)
    start, goal = to_mask(inst.source), to_mask(inst.target)
    if not rg.is_node(start) or not rg.is_node(goal):
        return StateSpaceResult(False)
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            path = []
            x = u
            while x is not None:
                path.append(from_mask(x))
                x = parent[x]
            path.reverse()
            return StateSpaceResult(True, len(path) - 1, path)
        for w in rg.neighbors(u):
            if w not in parent:
                parent[w] = u
                queue.append(w)
    return StateSpaceResult(False)


def reachable_in_exactly(inst: Instance, length: int) -> bool:
    """Whether some walk of exactly ``length`` moves joins source and target (layered sweep)."""
    rg = _ReconfigurationGraph(inst.graph, inst.k, inst.kind)
    start, goal = to_mask(inst.source), to_mask(inst.target)
    if not rg.is_node(start) or not rg.is_node(goal):
        return False
    frontier = {start}
    for _ in range(length):
        frontier = {w for u in frontier for w in rg.neighbors(u)}
        if not frontier:
            return False
    return goal in frontier


def oracle_answer(inst: Instance) -> bool:
    """Ground-truth answer respecting ``inst.mode`` and ``inst.ell``."""
    if inst.mode is LengthMode.EXACT:
        return reachable_in_exactly(inst, inst.ell)
    res = bfs_reconfig(inst)
    return res.reachable and res.shortest_length <= inst.ell


def exact_by_parity(inst: Instance, res: StateSpaceResult | None = None) -> bool:
    """Exact-length answer derived from the shortest path by the parity rule.

    A walk can be stretched by two moves by bouncing on any edge, so the rule
    needs a bounce edge when the shortest length is zero.
    """
    if res is None:
        res = bfs_reconfig(inst)
    if not res.reachable or res.shortest_length > inst.ell:
        return False
    if (inst.ell - res.shortest_length) % 2:
        return False
    if res.shortest_length == 0 and inst.ell > 0:
        rg = _ReconfigurationGraph(inst.graph, inst.k, inst.kind)
        return bool(rg.neighbors(to_mask(inst.source)))
    return True


def oracle_witness(inst: Instance) -> list[frozenset[int]] | None:
    """A sequence meeting ``inst.mode``: the BFS path, stretched by bouncing for exact lengths."""
    res = bfs_reconfig(inst)
    if not res.reachable or res.shortest_length > inst.ell:
        return None
    path = list(res.path)
    if inst.mode is LengthMode.AT_MOST:
        return path
    if not exact_by_parity(inst, res):
        return None
    if len(path) == 1 and inst.ell > 0:
        rg = _ReconfigurationGraph(inst.graph, inst.k, inst.kind)
        path.append(from_mask(rg.neighbors(to_mask(path[0]))[0]))
        path.append(path[0])
    while len(path) - 1 < inst.ell:
        path += [path[-2], path[-1]]
    return path


def enumerate_feasible(graph: Graph, k: int, kind: ProblemKind) -> list[frozenset[int]]:
    """All feasible sets of size exactly ``k``, in lexicographic order."""
    if graph.n > MAX_ORACLE_VERTICES:
        raise TooLargeError(f"oracle limited to {MAX_ORACLE_VERTICES} vertices, got {graph.n}")
    if not 0 <= k <= graph.n:
        return []
    return [frozenset(c) for c in combinations(graph.vertices, k) if check_feasible(graph, c, kind)]


def is_hword(arcs: set[tuple[Hashable, Hashable]], word: Sequence[Hashable]) -> bool:
    return all((a, b) in arcs for a, b in zip(word, word[1:]))


def bfs_hword(symbols: Iterable[Hashable], arcs: Iterable[tuple[Hashable, Hashable]],
              s: Sequence[Hashable], t: Sequence[Hashable]) -> bool:
    """Whether ``t`` is reachable from ``s`` changing one symbol at a time through H-words."""
    symbols = list(symbols)
    arcs = set(arcs)
    s, t = tuple(s), tuple(t)
    if len(s) != len(t):
        return False
    if not is_hword(arcs, s) or not is_hword(arcs, t):
        raise InputError("source or target is not an H-word")
    seen = {s}
    queue = deque([s])
    while queue:
        w = queue.popleft()
        if w == t:
            return True
        for i in range(len(w)):
            for a in symbols:
                if a == w[i]:
                    continue
                if i > 0 and (w[i - 1], a) not in arcs:
                    continue
                if i + 1 < len(w) and (a, w[i + 1]) not in arcs:
                    continue
                nxt = w[:i] + (a,) + w[i + 1:]
                if nxt not in seen:
                    if len(seen) >= MAX_WORD_STATES:
                        raise TooLargeError("H-word state space too large")
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def thue_reachable(rules: Iterable[tuple[Sequence[Hashable], Sequence[Hashable]]],
                   s: Sequence[Hashable], t: Sequence[Hashable]) -> bool:
    """Word problem of a symmetric length-preserving rewriting system, by BFS."""
    s, t = tuple(s), tuple(t)
    if len(s) != len(t):
        return False
    pairs = []
    for a, b in rules:
        a, b = tuple(a), tuple(b)
        pairs.append((a, b))
        pairs.append((b, a))
    seen = {s}
    queue = deque([s])
    while queue:
        w = queue.popleft()
        if w == t:
            return True
        for a, b in pairs:
            la = len(a)
            for i in range(len(w) - la + 1):
                if w[i:i + la] == a:
                    nxt = w[:i] + b + w[i + la:]
                    if nxt not in seen:
                        if len(seen) >= MAX_WORD_STATES:
                            raise TooLargeError("word state space too large")
                        seen.add(nxt)
                        queue.append(nxt)
    return False
