"""Generators for the hardness constructions.

Chain: a 2-balanced Thue system is split so every rule changes one position,
encoded as an H-word problem over pair symbols, which in turn becomes a VC-R
instance on a path of cliques (and an FVS-R instance by lifting edges to
triangles).

Symbols are strings.  Names starting with ``_`` belong to generated symbols:
``_X<i>``/``_Y<i>`` from rule splitting, and ``_L``, ``_R``, ``_E``,
``_x<i>`` from the H-word encoding.  Pair symbols are written ``a:b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .graph import Graph, InputError, Instance, LengthMode, ProblemKind
from .treedecomp import TreeDecomposition

Word = tuple[str, ...]
Rule = tuple[Word, Word]

LEFT_END = "_L"
RIGHT_END = "_R"
BLANK = "_E"
_ENCODING_RESERVED = re.compile(r"^_(L|R|E|x\d+)$")
_BAD_CHARS = re.compile(r"[\s,:#]")


def _check_symbol(sym: str, *, allow_encoding: bool = False) -> None:
    if not sym or _BAD_CHARS.search(sym):
        raise InputError(f"bad symbol {sym!r}: symbols are non-empty and avoid whitespace , : #")
    if not allow_encoding and _ENCODING_RESERVED.match(sym):
        raise InputError(f"symbol {sym!r} is reserved for the H-word encoding")


def pair(a: str, b: str) -> str:
    return f"{a}:{b}"


@dataclass(frozen=True)
class ThueSystem:
    """Alphabet plus symmetric rules relating two words of length 2."""

    alphabet: tuple[str, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("alphabet has repeated symbols")
        for sym in self.alphabet:
            _check_symbol(sym)
        known = set(self.alphabet)
        for w1, w2 in self.rules:
            if len(w1) != 2 or len(w2) != 2:
                raise InputError(f"rule {w1}->{w2} is not 2-balanced")
            for sym in (*w1, *w2):
                if sym not in known:
                    raise InputError(f"rule uses undeclared symbol {sym!r}")

    def one_position(self) -> bool:
        return all(a[0] == b[0] or a[1] == b[1] for a, b in self.rules)


@dataclass(frozen=True)
class WordDigraph:
    """Symbols and allowed consecutive pairs; a word is valid iff it is a walk."""

    symbols: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]
    special: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise InputError("digraph has repeated symbols")
        known = set(self.symbols)
        for a, b in self.arcs:
            if a not in known or b not in known:
                raise InputError(f"arc ({a}, {b}) uses an undeclared symbol")

    def is_word(self, word: Sequence[str]) -> bool:
        return all(s in self.symbols for s in word) and all(
            (a, b) in self.arcs for a, b in zip(word, word[1:])
        )

    def words(self, n: int) -> list[Word]:
        """All H-words of length ``n`` (exponential; for tests)."""
        out: list[Word] = [(s,) for s in self.symbols] if n > 0 else [()]
        for _ in range(n - 1):
            out = [w + (b,) for w in out for b in self.symbols if (w[-1], b) in self.arcs]
        return out


# -- rule splitting ---------------------------------------------------------

def split_thue_rules(ts: ThueSystem) -> ThueSystem:
    """Replace each rule changing both positions by four one-position rules via fresh ``X``, ``Y``."""
    alphabet = list(ts.alphabet)
    used = set(alphabet)
    rules: list[Rule] = []
    counter = 0

    def fresh_pair() -> tuple[str, str]:
        nonlocal counter
        while True:
            counter += 1
            x, y = f"_X{counter}", f"_Y{counter}"
            if x not in used and y not in used:
                used.update((x, y))
                alphabet.extend((x, y))
                return x, y

    for a, b in ts.rules:
        if a[0] == b[0] or a[1] == b[1]:
            rules.append((a, b))
            continue
        x, y = fresh_pair()
        rules += [
            (a, (x, a[1])),
            ((x, a[1]), (x, y)),
            ((x, y), (b[0], y)),
            ((b[0], y), b),
        ]
    return ThueSystem(tuple(alphabet), tuple(rules))


# -- Thue system to H-words -------------------------------------------------

def psi(word: Sequence[str]) -> Word:
    """Encode ``a1..an`` as ``_L (_E,a1)(a1,a2)..(an,_E) _R``."""
    padded = (BLANK, *word, BLANK)
    return (LEFT_END, *(pair(a, b) for a, b in zip(padded, padded[1:])), RIGHT_END)


def decode(word: Sequence[str]) -> Word:
    """Inverse of ``psi`` on H-words of the encoding digraph (reads each position off a pair)."""
    n = len(word) - 3
    out = []
    for i in range(1, n + 1):
        here, nxt = word[i], word[i + 1]
        if ":" in here:
            out.append(here.split(":")[1])
        elif ":" in nxt:
            out.append(nxt.split(":")[0])
        else:
            raise InputError("two consecutive special symbols")
    return tuple(out)


def thue_to_hword(ts: ThueSystem, s: Sequence[str], t: Sequence[str]) -> tuple[WordDigraph, Word, Word]:
    """Digraph whose one-symbol reconfiguration mirrors the Thue word problem, with ``psi(s)``, ``psi(t)``."""
    if len(s) != len(t):
        raise InputError(f"words have unequal lengths {len(s)} and {len(t)}")
    if not ts.one_position():
        raise InputError("every rule must change one position; run split_thue_rules first")
    for sym in (*s, *t):
        if sym not in ts.alphabet:
            raise InputError(f"word uses undeclared symbol {sym!r}")
    gamma = list(ts.alphabet)
    ext = gamma + [BLANK]
    xs = [f"_x{i}" for i in range(1, len(ts.rules) + 1)]
    special = [LEFT_END, RIGHT_END, *xs]
    pairs = [pair(a, b) for a, b in product(ext, ext)]
    arcs: set[tuple[str, str]] = set()
    for a, b, c in product(ext, gamma, ext):
        arcs.add((pair(a, b), pair(b, c)))
    for a in gamma:
        arcs.add((LEFT_END, pair(BLANK, a)))
        arcs.add((pair(a, BLANK), RIGHT_END))
    for x, (w1, w2) in zip(xs, ts.rules):
        for dot in ext:
            arcs.add((pair(dot, w1[0]), x))
            arcs.add((pair(dot, w2[0]), x))
            arcs.add((x, pair(w1[1], dot)))
            arcs.add((x, pair(w2[1], dot)))
    H = WordDigraph(tuple(special + pairs), frozenset(arcs), frozenset(special))
    return H, psi(s), psi(t)


# -- H-words to VC-R --------------------------------------------------------

@dataclass(frozen=True)
class HWordReduction:
    inst: Instance
    td: TreeDecomposition
    symbols: tuple[str, ...]
    length: int

    def vertex(self, i: int, sym: str) -> int:
        """Vertex standing for symbol ``sym`` at position ``i`` (1-based)."""
        return (i - 1) * len(self.symbols) + self.symbols.index(sym) + 1

    def cover_of(self, word: Sequence[str]) -> frozenset[int]:
        missing = {self.vertex(i, a) for i, a in enumerate(word, 1)}
        return frozenset(v for v in self.inst.graph.vertices if v not in missing)

    def word_of(self, cover: Iterable[int]) -> Word | None:
        """The word a size-``k`` cover misses, or ``None`` when it misses not exactly one per clique."""
        cover = set(cover)
        q = len(self.symbols)
        out = []
        for i in range(1, self.length + 1):
            miss = [self.symbols[j] for j in range(q) if (i - 1) * q + j + 1 not in cover]
            if len(miss) != 1:
                return None
            out.append(miss[0])
        return tuple(out)


def hword_to_vcr(H: WordDigraph, s: Sequence[str], t: Sequence[str], *,
                 cap: int | None = None) -> HWordReduction:
    """Path-of-cliques VC-R instance; covers of size ``n(|Sigma|-1)`` are exactly the H-words."""
    s, t = tuple(s), tuple(t)
    if len(s) != len(t):
        raise InputError(f"words have unequal lengths {len(s)} and {len(t)}")
    if not s:
        raise InputError("words must be non-empty")
    for name, w in (("source", s), ("target", t)):
        if not H.is_word(w):
            raise InputError(f"{name} word is not an H-word")
    q, n = len(H.symbols), len(s)
    idx = {a: j for j, a in enumerate(H.symbols)}

    def vid(i: int, a: str) -> int:
        return (i - 1) * q + idx[a] + 1

    edges = []
    for i in range(1, n + 1):
        for x in range(q):
            for y in range(x + 1, q):
                edges.append(((i - 1) * q + x + 1, (i - 1) * q + y + 1))
    for i in range(1, n):
        for a, b in product(H.symbols, H.symbols):
            if (a, b) not in H.arcs:
                edges.append((vid(i, a), vid(i + 1, b)))
    g = Graph.from_edges(n * q, edges)
    k = n * (q - 1)
    ell = 2 * q ** n * n
    if cap is not None:
        ell = min(ell, cap)
    block = [frozenset(range((i - 1) * q + 1, i * q + 1)) for i in range(1, n + 1)]
    if n == 1:
        td = TreeDecomposition({1: block[0]}, ())
    else:
        bags = {i: block[i - 1] | block[i] for i in range(1, n)}
        td = TreeDecomposition(bags, tuple((i, i + 1) for i in range(1, n - 1)))
    V = frozenset(g.vertices)
    src = V - {vid(i, a) for i, a in enumerate(s, 1)}
    tgt = V - {vid(i, a) for i, a in enumerate(t, 1)}
    inst = Instance(g, src, tgt, k + 1, ell, ProblemKind.VC_R, LengthMode.AT_MOST)
    return HWordReduction(inst, td, H.symbols, n)


def triangle_lift(inst: Instance) -> Instance:
    """FVS-R instance where each edge ``uv`` gains a fresh ``w`` adjacent to both."""
    if inst.kind is not ProblemKind.VC_R:
        raise InputError(f"triangle lifting expects vc-r, got {inst.kind.value}")
    g = inst.graph
    edges = []
    w = g.n
    for u, v in sorted(g.edges):
        w += 1
        edges += [(u, v), (u, w), (v, w)]
    lifted = Graph.from_edges(w, edges)
    return Instance(lifted, inst.source, inst.target, inst.k, inst.ell, ProblemKind.FVS_R, inst.mode)


# -- file formats -----------------------------------------------------------

def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line and not line.startswith("c "):
            yield lineno, line.split()


def parse_word(token: str) -> Word:
    """``a,b,c`` splits on commas; a token without commas is one symbol per character."""
    if "," in token:
        return tuple(p for p in token.split(",") if p)
    return tuple(token)


def format_word(word: Sequence[str]) -> str:
    if all(len(s) == 1 for s in word) and len(word) != 1:
        return "".join(word)
    return ",".join(word) + ("," if len(word) == 1 else "")


def parse_thue(text: str) -> ThueSystem:
    """``s <sym>...`` declares symbols; ``r <w1> <w2>`` adds a rule."""
    alphabet: list[str] = []
    rules: list[Rule] = []
    for lineno, parts in _content_lines(text):
        if parts[0] == "s":
            alphabet.extend(parts[1:])
        elif parts[0] == "r":
            if len(parts) != 3:
                raise InputError(f"line {lineno}: rule needs two words")
            rules.append((parse_word(parts[1]), parse_word(parts[2])))
        else:
            raise InputError(f"line {lineno}: unknown record {parts[0]!r}")
    try:
        return ThueSystem(tuple(alphabet), tuple(rules))
    except InputError as exc:
        raise InputError(f"thue file: {exc}") from None


def dump_thue(ts: ThueSystem) -> str:
    lines = ["s " + " ".join(ts.alphabet)]
    lines += [f"r {format_word(a)} {format_word(b)}" for a, b in ts.rules]
    return "\n".join(lines) + "\n"


def parse_digraph(text: str) -> WordDigraph:
    """``h <#symbols>`` header, ``s <sym>`` declarations, ``a <sym1> <sym2>`` arcs."""
    declared = None
    symbols: list[str] = []
    arcs: set[tuple[str, str]] = set()
    for lineno, parts in _content_lines(text):
        tag = parts[0]
        if tag == "h":
            if declared is not None or len(parts) != 2 or not parts[1].isdigit():
                raise InputError(f"line {lineno}: malformed header")
            declared = int(parts[1])
        elif declared is None:
            raise InputError(f"line {lineno}: record before the 'h' header")
        elif tag == "s":
            for sym in parts[1:]:
                _check_symbol(sym.replace(":", ""), allow_encoding=True)
            symbols.extend(parts[1:])
        elif tag == "a":
            if len(parts) != 3:
                raise InputError(f"line {lineno}: arc needs two symbols")
            arcs.add((parts[1], parts[2]))
        else:
            raise InputError(f"line {lineno}: unknown record {tag!r}")
    if declared is None:
        raise InputError("missing 'h' header")
    if declared != len(symbols):
        raise InputError(f"header declares {declared} symbols, found {len(symbols)}")
    special = frozenset(s for s in symbols if ":" not in s and _ENCODING_RESERVED.match(s))
    return WordDigraph(tuple(symbols), frozenset(arcs), special)


def dump_digraph(H: WordDigraph) -> str:
    lines = [f"h {len(H.symbols)}"]
    lines += [f"s {s}" for s in H.symbols]
    lines += [f"a {a} {b}" for a, b in sorted(H.arcs)]
    return "\n".join(lines) + "\n"
