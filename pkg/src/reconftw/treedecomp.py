"""Tree decompositions: PACE ``.td`` I/O, validation, min-fill construction, nicification."""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .graph import Graph, InputError


class TDError(InputError):
    def __init__(self, code: str, witness: object, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.witness = witness


@dataclass(frozen=True)
class TreeDecomposition:
    bags: dict[int, frozenset[int]]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags.values()) - 1

    def to_td(self, n: int) -> str:
        ids = sorted(self.bags)
        max_bag = max((len(b) for b in self.bags.values()), default=0)
        lines = [f"s td {len(ids)} {max_bag} {n}"]
        for i in ids:
            lines.append(" ".join(["b", str(i), *map(str, sorted(self.bags[i]))]))
        lines.extend(f"{a} {b}" for a, b in self.tree_edges)
        return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td" or header is not None:
                    raise InputError(f"line {lineno}: malformed solution line {line!r}")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                if header is None:
                    raise InputError(f"line {lineno}: bag before 's td' line")
                bid = int(parts[1])
                if not 1 <= bid <= header[0]:
                    raise InputError(f"line {lineno}: bag id {bid} outside 1..{header[0]}")
                if bid in bags:
                    raise InputError(f"line {lineno}: bag {bid} declared twice")
                bags[bid] = frozenset(int(x) for x in parts[2:])
            else:
                if header is None or len(parts) != 2:
                    raise InputError(f"line {lineno}: malformed line {line!r}")
                edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InputError(f"line {lineno}: non-integer token in {line!r}") from None
    if header is None:
        raise InputError("missing 's td' line")
    nbags, max_bag, _n = header
    if len(bags) != nbags:
        raise InputError(f"header declares {nbags} bags but {len(bags)} were given")
    if bags and max(len(b) for b in bags.values()) > max_bag:
        raise InputError(f"a bag exceeds the declared maximum size {max_bag}")
    for a, b in edges:
        if a not in bags or b not in bags:
            raise TDError("NOT_A_TREE", (a, b), f"tree edge {a} {b} references an undeclared bag")
    return TreeDecomposition(bags, tuple(edges))


def validate_td(graph: Graph, td: TreeDecomposition) -> None:
    """Check the three tree-decomposition conditions (and that the tree is a tree)."""
    nodes = sorted(td.bags)
    adj: dict[int, list[int]] = {i: [] for i in nodes}
    seen_edges = set()
    for a, b in td.tree_edges:
        key = (min(a, b), max(a, b))
        if a == b or key in seen_edges:
            raise TDError("NOT_A_TREE", (a, b), f"tree edge {a} {b} is a loop or repeated")
        seen_edges.add(key)
        adj[a].append(b)
        adj[b].append(a)
    if nodes:
        if len(td.tree_edges) != len(nodes) - 1:
            raise TDError("NOT_A_TREE", len(td.tree_edges),
                          f"{len(nodes)} bags need {len(nodes) - 1} tree edges, got {len(td.tree_edges)}")
        reach = {nodes[0]}
        queue = deque([nodes[0]])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in reach:
                    reach.add(w)
                    queue.append(w)
        if len(reach) != len(nodes):
            missing = min(set(nodes) - reach)
            raise TDError("NOT_A_TREE", missing, f"bag {missing} is not connected to bag {nodes[0]}")
    for i in nodes:
        stray = [v for v in td.bags[i] if not 1 <= v <= graph.n]
        if stray:
            raise TDError("VERTEX_MISSING", stray[0], f"bag {i} holds unknown vertex {stray[0]}")
    covered = set().union(*td.bags.values()) if nodes else set()
    for v in graph.vertices:
        if v not in covered:
            raise TDError("VERTEX_MISSING", v, f"vertex {v} is in no bag")
    holders: dict[int, list[int]] = defaultdict(list)
    for i in nodes:
        for v in td.bags[i]:
            holders[v].append(i)
    for u, v in sorted(graph.edges):
        if not any(v in td.bags[i] for i in holders[u]):
            raise TDError("EDGE_UNCOVERED", (u, v), f"edge {u}-{v} is in no bag")
    for v in graph.vertices:
        hs = set(holders[v])
        start = holders[v][0]
        reach = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in hs and y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != hs:
            bad = min(hs - reach)
            raise TDError("SUBTREE_DISCONNECTED", v,
                          f"bags holding vertex {v} are not connected (bag {bad} is cut off)")


def parse_and_validate_td(graph: Graph, text: str) -> TreeDecomposition:
    td = parse_td(text)
    validate_td(graph, td)
    return td


def min_fill_decompose(graph: Graph) -> TreeDecomposition:
    """Tree decomposition from the min-fill-in elimination heuristic."""
    if graph.n == 0:
        return TreeDecomposition({}, ())
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from(sorted(graph.edges))
    _, decomp = treewidth_min_fill_in(g)
    # fixed node order keeps ids deterministic across runs
    bag_list = sorted(decomp.nodes, key=lambda b: (sorted(b), len(b)))
    ids = {b: i for i, b in enumerate(bag_list, 1)}
    bags = {ids[b]: frozenset(b) for b in bag_list}
    edges = tuple(sorted((min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in decomp.edges))
    return TreeDecomposition(bags, edges)


class NodeKind(enum.Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: NodeKind
    bag: frozenset[int]
    children: tuple[int, ...]
    vertex: int | None = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    nodes: tuple[NiceNode, ...]
    root: int

    @property
    def width(self) -> int:
        return max((len(nd.bag) for nd in self.nodes), default=0) - 1

    def postorder(self) -> list[int]:
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                order.append(i)
                continue
            stack.append((i, True))
            for c in reversed(self.nodes[i].children):
                stack.append((c, False))
        return order

    @cached_property
    def subtree_vertices(self) -> tuple[frozenset[int], ...]:
        out: list[frozenset[int]] = [frozenset()] * len(self.nodes)
        for i in self.postorder():
            nd = self.nodes[i]
            acc = set(nd.bag)
            for c in nd.children:
                acc |= out[c]
            out[i] = frozenset(acc)
        return tuple(out)

    def as_tree_decomposition(self) -> TreeDecomposition:
        bags = {i + 1: nd.bag for i, nd in enumerate(self.nodes)}
        edges = tuple((i + 1, c + 1) for i, nd in enumerate(self.nodes) for c in nd.children)
        return TreeDecomposition(bags, edges)

    def to_text(self) -> str:
        lines = [f"c nice tree decomposition, root {self.root + 1}, width {self.width}"]
        for i, nd in enumerate(self.nodes):
            head = f"n {i + 1} {nd.kind.value}"
            if nd.vertex is not None:
                head += f" {nd.vertex}"
            kids = " ".join(str(c + 1) for c in nd.children)
            bag = " ".join(map(str, sorted(nd.bag)))
            lines.append(f"{head} | children {kids} | bag {bag}".rstrip())
        return "\n".join(lines) + "\n"


def check_nice(graph: Graph, ntd: NiceTreeDecomposition) -> None:
    """Raise ``TDError`` unless ``ntd`` is a valid nice tree decomposition of ``graph``."""
    validate_td(graph, ntd.as_tree_decomposition())
    for i, nd in enumerate(ntd.nodes):
        kids = [ntd.nodes[c] for c in nd.children]
        if nd.kind is NodeKind.LEAF:
            ok = not kids and len(nd.bag) == 1 and nd.vertex in nd.bag
        elif nd.kind is NodeKind.INTRODUCE:
            ok = (len(kids) == 1 and nd.vertex not in kids[0].bag
                  and nd.bag == kids[0].bag | {nd.vertex})
        elif nd.kind is NodeKind.FORGET:
            ok = (len(kids) == 1 and nd.vertex in kids[0].bag
                  and nd.bag == kids[0].bag - {nd.vertex})
        else:
            ok = len(kids) == 2 and kids[0].bag == nd.bag == kids[1].bag
        if not ok:
            raise TDError("NOT_NICE", i + 1, f"node {i + 1} violates the {nd.kind.value} node rule")
    if ntd.nodes and ntd.subtree_vertices[ntd.root] != frozenset(graph.vertices):
        raise TDError("VERTEX_MISSING", ntd.root + 1, "root subtree does not cover every vertex")


class _Builder:
    def __init__(self) -> None:
        self.nodes: list[NiceNode] = []

    def add(self, kind: NodeKind, bag: frozenset[int], children: tuple[int, ...],
            vertex: int | None = None) -> int:
        self.nodes.append(NiceNode(kind, bag, children, vertex))
        return len(self.nodes) - 1

    def leaf_chain(self, bag: frozenset[int]) -> int:
        vs = sorted(bag)
        cur = self.add(NodeKind.LEAF, frozenset(vs[:1]), (), vs[0])
        for v in vs[1:]:
            cur = self.add(NodeKind.INTRODUCE, self.nodes[cur].bag | {v}, (cur,), v)
        return cur

    def morph(self, cur: int, target: frozenset[int]) -> int:
        """Forget down to the intersection, then introduce up to ``target``."""
        bag = self.nodes[cur].bag
        for v in sorted(bag - target):
            bag = bag - {v}
            cur = self.add(NodeKind.FORGET, bag, (cur,), v)
        for v in sorted(target - bag):
            bag = bag | {v}
            cur = self.add(NodeKind.INTRODUCE, bag, (cur,), v)
        return cur

    def join_all(self, parts: list[int], bag: frozenset[int]) -> int:
        cur = parts[0]
        for p in parts[1:]:
            cur = self.add(NodeKind.JOIN, bag, (cur, p))
        return cur


def nicify(td: TreeDecomposition, graph: Graph | None = None) -> NiceTreeDecomposition:
    """Convert ``td`` into a nice tree decomposition of no larger width.

    Bags of ``td`` that are empty and childless are dropped; two parts of the
    tree whose bags share no vertex are connected through an empty-bag forget
    node, which only happens between parts covering different components.
    """
    if not td.bags:
        raise InputError("cannot nicify an empty decomposition")
    if graph is not None:
        validate_td(graph, td)
    adj: dict[int, list[int]] = {i: [] for i in td.bags}
    for a, b in td.tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    root = min(td.bags)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                order.append(y)
    children: dict[int, list[int]] = defaultdict(list)
    for x in order[1:]:
        children[parent[x]].append(x)

    b = _Builder()
    built: dict[int, int | None] = {}
    for x in reversed(order):
        bag = td.bags[x]
        parts = []
        for c in children[x]:
            sub = built[c]
            if sub is not None:
                parts.append(b.morph(sub, bag))
        if bag and not parts:
            parts.append(b.leaf_chain(bag))
        built[x] = b.join_all(parts, bag) if parts else None
    top = built[root]
    if top is None:
        raise InputError("decomposition has only empty bags")
    return NiceTreeDecomposition(tuple(b.nodes), top)
