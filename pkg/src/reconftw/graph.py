"""Graphs, problem kinds, reconfiguration instances and their file formats."""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping


class InputError(ValueError):
    """Malformed or inconsistent input (files, instances, decompositions)."""


class InstanceError(InputError):
    """An instance endpoint is not a node of the reconfiguration graph."""

    def __init__(self, code: str, endpoint: str, message: str):
        super().__init__(f"{code} ({endpoint}): {message}")
        self.code = code
        self.endpoint = endpoint


class Property(enum.Enum):
    EDGELESS = "edgeless"
    BIPARTITE = "bipartite"
    FOREST = "forest"


class ProblemKind(enum.Enum):
    VC_R = "vc-r"
    IS_R = "is-r"
    OCT_R = "oct-r"
    IBS_R = "ibs-r"
    FVS_R = "fvs-r"
    IF_R = "if-r"

    @property
    def minimization(self) -> bool:
        return self in (ProblemKind.VC_R, ProblemKind.OCT_R, ProblemKind.FVS_R)

    @property
    def prop(self) -> Property:
        return _PROPERTY[self]

    @property
    def dual(self) -> ProblemKind:
        return _DUAL[self]


_PROPERTY = {
    ProblemKind.VC_R: Property.EDGELESS,
    ProblemKind.IS_R: Property.EDGELESS,
    ProblemKind.OCT_R: Property.BIPARTITE,
    ProblemKind.IBS_R: Property.BIPARTITE,
    ProblemKind.FVS_R: Property.FOREST,
    ProblemKind.IF_R: Property.FOREST,
}

_DUAL = {
    ProblemKind.VC_R: ProblemKind.IS_R,
    ProblemKind.IS_R: ProblemKind.VC_R,
    ProblemKind.OCT_R: ProblemKind.IBS_R,
    ProblemKind.IBS_R: ProblemKind.OCT_R,
    ProblemKind.FVS_R: ProblemKind.IF_R,
    ProblemKind.IF_R: ProblemKind.FVS_R,
}


class LengthMode(enum.Enum):
    EXACT = "exact"
    AT_MOST = "at-most"


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``1..n``.

    ``adj_mask[v]`` is the neighbourhood of ``v`` as a bitmask (bit ``v`` set
    for vertex ``v``); the DP engines work on these masks.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[frozenset[int], ...] = field(repr=False, compare=False)
    adj_mask: tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if n < 0:
            raise InputError(f"negative vertex count {n}")
        norm: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise InputError(f"vertex id out of range in edge {u} {v} (n={n})")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in norm:
                raise InputError(f"duplicate edge {e[0]} {e[1]}")
            norm.add(e)
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        masks = [0] * (n + 1)
        for v in range(1, n + 1):
            m = 0
            for u in adj[v]:
                m |= 1 << u
            masks[v] = m
        return cls(n, frozenset(norm), tuple(frozenset(a) for a in adj), tuple(masks))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def induced_edges(self, S: Iterable[int]) -> list[tuple[int, int]]:
        s = set(S)
        return sorted((u, v) for u, v in self.edges if u in s and v in s)

    def to_gr(self, comment: str | None = None) -> str:
        lines = []
        if comment:
            lines.append(f"c {comment}")
        lines.append(f"p tw {self.n} {self.m}")
        lines.extend(f"{u} {v}" for u, v in sorted(self.edges))
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse a PACE ``.gr`` graph (``p tw n m`` header, one edge per line)."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise InputError(f"line {lineno}: second header line")
            if len(parts) != 4 or parts[1] != "tw":
                raise InputError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise InputError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if header is None:
            raise InputError(f"line {lineno}: edge before header")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: malformed edge line {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InputError(f"line {lineno}: malformed edge line {line!r}") from None
    if header is None:
        raise InputError("missing 'p tw <n> <m>' header")
    n, m = header
    if len(edges) != m:
        raise InputError(f"header declares {m} edges but {len(edges)} were given")
    return Graph.from_edges(n, edges)


def to_mask(S: Iterable[int]) -> int:
    m = 0
    for v in S:
        m |= 1 << v
    return m


def from_mask(mask: int) -> frozenset[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def _is_bipartite(graph: Graph, keep: frozenset[int]) -> bool:
    color: dict[int, int] = {}
    for s in keep:
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in graph.adjacency[u]:
                if w not in keep:
                    continue
                if w not in color:
                    color[w] = color[u] ^ 1
                    queue.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _is_forest(graph: Graph, keep: frozenset[int]) -> bool:
    # forest iff every component has fewer edges than vertices
    seen: set[int] = set()
    for s in keep:
        if s in seen:
            continue
        seen.add(s)
        stack = [s]
        nv = 0
        deg_sum = 0
        while stack:
            u = stack.pop()
            nv += 1
            for w in graph.adjacency[u]:
                if w in keep:
                    deg_sum += 1
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        if deg_sum // 2 >= nv:
            return False
    return True


def has_property(graph: Graph, keep: Iterable[int], prop: Property) -> bool:
    """Whether the subgraph induced by ``keep`` has ``prop``."""
    keep = frozenset(keep)
    if prop is Property.EDGELESS:
        return all(not (graph.adjacency[v] & keep) for v in keep)
    if prop is Property.BIPARTITE:
        return _is_bipartite(graph, keep)
    return _is_forest(graph, keep)


def check_feasible(graph: Graph, S: Iterable[int], kind: ProblemKind) -> bool:
    S = frozenset(S)
    if kind.minimization:
        keep = frozenset(graph.vertices) - S
    else:
        keep = S
    return has_property(graph, keep, kind.prop)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    source: frozenset[int]
    target: frozenset[int]
    k: int
    ell: int
    kind: ProblemKind
    mode: LengthMode = LengthMode.EXACT

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", frozenset(self.source))
        object.__setattr__(self, "target", frozenset(self.target))


def complement_instance(inst: Instance) -> Instance:
    """Dual instance: complemented endpoints, capacity ``n - k``, dual kind."""
    V = frozenset(inst.graph.vertices)
    return replace(
        inst,
        source=V - inst.source,
        target=V - inst.target,
        k=inst.graph.n - inst.k,
        kind=inst.kind.dual,
    )


def validate_instance(inst: Instance) -> None:
    """Raise :class:`InstanceError` unless both endpoints are reconfiguration-graph nodes."""
    if inst.k < 0:
        raise InstanceError("CAPACITY_VIOLATED", "capacity", f"k={inst.k} is negative")
    if inst.ell < 0:
        raise InputError(f"ell={inst.ell} is negative")
    V = frozenset(inst.graph.vertices)
    for name, S in (("source", inst.source), ("target", inst.target)):
        stray = S - V
        if stray:
            raise InstanceError("SET_OUT_OF_RANGE", name, f"vertices {sorted(stray)} not in 1..{inst.graph.n}")
    for name, S in (("source", inst.source), ("target", inst.target)):
        if inst.kind.minimization and len(S) > inst.k:
            raise InstanceError("CAPACITY_VIOLATED", name, f"|{name}|={len(S)} > k={inst.k}")
        if not inst.kind.minimization and len(S) < inst.k:
            raise InstanceError("CAPACITY_VIOLATED", name, f"|{name}|={len(S)} < k={inst.k}")
    for name, S in (("source", inst.source), ("target", inst.target)):
        if not check_feasible(inst.graph, S, inst.kind):
            raise InstanceError(
                "ENDPOINT_INFEASIBLE", name, f"{sorted(S)} is not feasible for {inst.kind.value}"
            )


def bfs_layers(graph: Graph, outer: Iterable[int]) -> dict[int, int]:
    """BFS distance of every vertex from the ``outer`` set."""
    outer = sorted(set(outer))
    if not outer:
        raise InputError("outer vertex set is empty")
    for v in outer:
        if not 1 <= v <= graph.n:
            raise InputError(f"outer vertex {v} out of range")
    layer = {v: 0 for v in outer}
    queue = deque(outer)
    while queue:
        u = queue.popleft()
        for w in sorted(graph.adjacency[u]):
            if w not in layer:
                layer[w] = layer[u] + 1
                queue.append(w)
    missing = [v for v in graph.vertices if v not in layer]
    if missing:
        raise InputError(f"vertices {missing} unreachable from the outer set")
    return layer


@dataclass(frozen=True)
class InstanceSpec:
    """Contents of an instance file, before it is bound to a graph."""

    kind: ProblemKind
    k: int
    ell: int
    mode: LengthMode
    source: frozenset[int]
    target: frozenset[int]
    outer: frozenset[int] | None = None
    layers: Mapping[int, int] | None = None

    def bind(self, graph: Graph) -> Instance:
        return Instance(graph, self.source, self.target, self.k, self.ell, self.kind, self.mode)


def _int_list(doc: dict, key: str) -> list[int]:
    value = doc[key]
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(f"field '{key}' must be a list of vertex ids")
    return value


def parse_instance(text: str) -> InstanceSpec:
    """Parse an instance file (JSON object)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("instance file must be a JSON object")
    for key in ("problem", "k", "ell", "source", "target"):
        if key not in doc:
            raise InputError(f"missing field '{key}'")
    try:
        kind = ProblemKind(str(doc["problem"]).lower())
    except ValueError:
        raise InputError(f"field 'problem': unknown problem {doc['problem']!r}") from None
    try:
        mode = LengthMode(str(doc.get("mode", "exact")).lower())
    except ValueError:
        raise InputError(f"field 'mode': unknown mode {doc['mode']!r}") from None
    for key in ("k", "ell"):
        if not isinstance(doc[key], int) or isinstance(doc[key], bool) or doc[key] < 0:
            raise InputError(f"field '{key}' must be a non-negative integer")
    outer = frozenset(_int_list(doc, "outer")) if "outer" in doc else None
    layers = None
    if "layers" in doc:
        raw = doc["layers"]
        if not isinstance(raw, dict):
            raise InputError("field 'layers' must map vertex ids to layer indices")
        try:
            layers = {int(v): int(i) for v, i in raw.items()}
        except (TypeError, ValueError):
            raise InputError("field 'layers' must map vertex ids to layer indices") from None
    return InstanceSpec(
        kind=kind,
        k=doc["k"],
        ell=doc["ell"],
        mode=mode,
        source=frozenset(_int_list(doc, "source")),
        target=frozenset(_int_list(doc, "target")),
        outer=outer,
        layers=layers,
    )


def dump_instance(inst: Instance, outer: Iterable[int] | None = None,
                  layers: Mapping[int, int] | None = None) -> str:
    doc: dict = {
        "problem": inst.kind.value,
        "k": inst.k,
        "ell": inst.ell,
        "mode": inst.mode.value,
        "source": sorted(inst.source),
        "target": sorted(inst.target),
    }
    if outer is not None:
        doc["outer"] = sorted(outer)
    if layers is not None:
        doc["layers"] = {str(v): layers[v] for v in sorted(layers)}
    return json.dumps(doc, indent=2) + "\n"


def check_witness(inst: Instance, sets: list[frozenset[int]]) -> None:
    """Independent check of a reconfiguration sequence; raises ``AssertionError`` on failure."""
    if not sets:
        raise AssertionError("empty witness")
    length = len(sets) - 1
    if inst.mode is LengthMode.EXACT and length != inst.ell:
        raise AssertionError(f"witness has length {length}, expected exactly {inst.ell}")
    if length > inst.ell:
        raise AssertionError(f"witness has length {length} > {inst.ell}")
    if frozenset(sets[0]) != inst.source or frozenset(sets[-1]) != inst.target:
        raise AssertionError("witness does not run from source to target")
    V = frozenset(inst.graph.vertices)
    for i, S in enumerate(sets):
        S = frozenset(S)
        if not S <= V:
            raise AssertionError(f"set {i} leaves the vertex range")
        if inst.kind.minimization and len(S) > inst.k or not inst.kind.minimization and len(S) < inst.k:
            raise AssertionError(f"set {i} violates capacity {inst.k}")
        if not check_feasible(inst.graph, S, inst.kind):
            raise AssertionError(f"set {i} = {sorted(S)} is infeasible")
        if i and len(frozenset(sets[i - 1]) ^ S) != 1:
            raise AssertionError(f"sets {i - 1} and {i} differ in more than one vertex")
