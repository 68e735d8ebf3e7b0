from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import strategies as st

from reconftw.graph import Graph, Instance, LengthMode, ProblemKind
from reconftw.oracle import enumerate_feasible

ALL_KINDS = list(ProblemKind)


def random_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    if p is None:
        p = rng.uniform(0.15, 0.6)
    edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def grid(rows: int, cols: int) -> Graph:
    def idx(i: int, j: int) -> int:
        return i * cols + j + 1

    edges = [(idx(i, j), idx(i, j + 1)) for i in range(rows) for j in range(cols - 1)]
    edges += [(idx(i, j), idx(i + 1, j)) for i in range(rows - 1) for j in range(cols)]
    return Graph.from_edges(rows * cols, edges)


def outerplanar_ish(rng: random.Random, n: int) -> Graph:
    """A cycle with random non-crossing chords and a few pendant vertices."""
    ring = min(n, max(3, n - rng.randint(0, n // 3)))
    edges: set[tuple[int, int]] = set()
    if ring >= 3:
        for i in range(1, ring + 1):
            j = i % ring + 1
            edges.add((min(i, j), max(i, j)))
    elif ring == 2:
        edges.add((1, 2))
    chords: list[tuple[int, int]] = []
    for _ in range(rng.randint(0, ring)):
        a, b = sorted(rng.sample(range(1, ring + 1), 2))
        if b - a < 2 or (a == 1 and b == ring):
            continue
        if any(a < c < b < d or c < a < d < b for c, d in chords):
            continue
        chords.append((a, b))
        edges.add((a, b))
    for v in range(ring + 1, n + 1):
        edges.add((rng.randint(1, v - 1), v))
    return Graph.from_edges(n, sorted(edges))


def partial_ktree(rng: random.Random, n: int, k: int, drop: float) -> Graph:
    """A random k-tree on ``n`` vertices with each edge dropped with probability ``drop``."""
    cliques = [tuple(range(1, k + 2))]
    edges = set(combinations(range(1, k + 2), 2))
    for v in range(k + 2, n + 1):
        sub = rng.sample(rng.choice(cliques), k)
        edges.update((u, v) for u in sub)
        cliques.append((*sub, v))
    return Graph.from_edges(n, [e for e in sorted(edges) if rng.random() > drop])


def feasible_sets(graph: Graph, k: int, kind: ProblemKind) -> list[frozenset[int]]:
    sizes = range(0, k + 1) if kind.minimization else range(k, graph.n + 1)
    return [S for z in sizes for S in enumerate_feasible(graph, z, kind)]


def random_instance(rng: random.Random, kind: ProblemKind, *, graph: Graph | None = None,
                    n_max: int = 10, ell_max: int = 6, mode: LengthMode | None = None,
                    near: bool = False) -> Instance:
    """Random instance with feasible endpoints; ``near`` keeps the endpoints close so YES is common."""
    while True:
        g = graph if graph is not None else random_graph(rng, rng.randint(1, n_max))
        k = rng.randint(0, g.n)
        pool = feasible_sets(g, k, kind)
        if not pool:
            continue
        S = rng.choice(pool)
        if near:
            close = [T for T in pool if len(S ^ T) <= ell_max]
            T = rng.choice(close)
        else:
            T = rng.choice(pool)
        ell = rng.randint(0, ell_max)
        m = mode if mode is not None else rng.choice(list(LengthMode))
        return Instance(g, S, T, k, ell, kind, m)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)


@st.composite
def graphs(draw, max_n: int = 7, min_n: int = 1) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(1, n + 1), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def instances(draw, kinds=tuple(ALL_KINDS), max_n: int = 6, max_ell: int = 4) -> Instance:
    g = draw(graphs(max_n=max_n))
    kind = draw(st.sampled_from(kinds))
    k = draw(st.integers(0, g.n))
    pool = feasible_sets(g, k, kind)
    if not pool:
        # the empty/full set is always feasible with the loosest capacity
        k = g.n if kind.minimization else 0
        pool = feasible_sets(g, k, kind)
    S = draw(st.sampled_from(pool))
    T = draw(st.sampled_from(pool))
    ell = draw(st.integers(0, max_ell))
    mode = draw(st.sampled_from(list(LengthMode)))
    return Instance(g, S, T, k, ell, kind, mode)


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
