"""k-uniform hypergraphs on 0-based vertex sets, and the shared indexing helpers.

The arity cap is k <= 4: coordinate grids and cell enumerations grow
doubly-exponentially in k, and 2**k - 1 = 15 coordinates is the tested
ceiling. Edges are unordered k-subsets stored as sorted tuples; the
symmetric (ordered-tuple) view is derived, never stored.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_ARITY = 4


class FormatError(ValueError):
    """Malformed text input; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured budget; no work was done."""


class UniformHypergraph:
    """A simple k-uniform hypergraph on vertices 0..n_vertices-1.

    The constructor expects canonical input: every edge a strictly
    increasing k-tuple, edges strictly increasing lexicographically.
    Use :meth:`from_edges` to normalize arbitrary edge iterables.
    """

    __slots__ = ("k", "n_vertices", "edges", "_edge_set")

    def __init__(self, k: int, n_vertices: int, edges: Sequence[tuple[int, ...]] = ()):
        if not 1 <= k <= MAX_ARITY:
            raise ValueError(f"arity k={k} unsupported: must satisfy 1 <= k <= {MAX_ARITY}")
        if n_vertices < 0:
            raise ValueError("n_vertices must be nonnegative")
        edges = tuple(tuple(e) for e in edges)
        prev = None
        for e in edges:
            if len(e) != k:
                raise ValueError(f"edge {e} does not have arity {k}")
            for i, v in enumerate(e):
                if not 0 <= v < n_vertices:
                    raise ValueError(f"edge {e}: vertex {v} out of range 0..{n_vertices - 1}")
                if i and e[i - 1] >= v:
                    raise ValueError(f"edge {e} is not strictly increasing")
            if prev is not None and prev >= e:
                raise ValueError(f"edges not in canonical order or duplicated near {e}")
            prev = e
        self.k = k
        self.n_vertices = n_vertices
        self.edges = edges
        self._edge_set = frozenset(edges)

    @classmethod
    def from_edges(cls, k: int, n_vertices: int, edges: Iterable[Iterable[int]]) -> "UniformHypergraph":
        """Build from arbitrary edge iterables; sorts and deduplicates."""
        canon = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(set(t)) != len(t):
                raise ValueError(f"edge {tuple(e)} has a repeated vertex")
            canon.add(t)
        return cls(k, n_vertices, sorted(canon))

    @property
    def edge_set(self) -> frozenset:
        return self._edge_set

    def has_edge(self, edge: tuple[int, ...]) -> bool:
        return edge in self._edge_set

    def without_edges(self, drop: Iterable[tuple[int, ...]]) -> "UniformHypergraph":
        gone = {tuple(e) for e in drop}
        return UniformHypergraph(
            self.k, self.n_vertices, [e for e in self.edges if e not in gone]
        )

    def relabel(self, image: Sequence[int]) -> "UniformHypergraph":
        """Apply a vertex bijection v -> image[v]."""
        if sorted(image) != list(range(self.n_vertices)):
            raise ValueError("image must be a permutation of the vertex set")
        return UniformHypergraph.from_edges(
            self.k, self.n_vertices, ([image[v] for v in e] for e in self.edges)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UniformHypergraph)
            and self.k == other.k
            and self.n_vertices == other.n_vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.k, self.n_vertices, self.edges))

    def __repr__(self) -> str:
        return f"UniformHypergraph(k={self.k}, n={self.n_vertices}, m={len(self.edges)})"


class SymmetricTupleView:
    """Ordered-tuple membership view of a hypergraph's edge set.

    A k-tuple is a member iff its entries are distinct and the underlying
    set is an edge. Membership is invariant under all coordinate
    permutations by construction.
    """

    __slots__ = ("hypergraph",)

    def __init__(self, hypergraph: UniformHypergraph):
        self.hypergraph = hypergraph

    def __contains__(self, tup: tuple[int, ...]) -> bool:
        return symmetric_membership(self.hypergraph, tup)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for e in self.hypergraph.edges:
            yield from permutations(e)


def symmetric_membership(hypergraph: UniformHypergraph, tup: tuple[int, ...]) -> bool:
    """True iff ``tup`` has distinct, in-range entries forming an edge."""
    if len(tup) != hypergraph.k:
        raise ValueError(f"tuple {tup} does not have arity {hypergraph.k}")
    for v in tup:
        if not 0 <= v < hypergraph.n_vertices:
            raise ValueError(f"vertex {v} out of range 0..{hypergraph.n_vertices - 1}")
    s = tuple(sorted(tup))
    if len(set(s)) != len(s):
        return False
    return s in hypergraph.edge_set


class SubsetIndexing:
    """Canonical indexing of the 2**k - 1 nonempty subsets of {0..k-1}.

    Order: by size, then lexicographically. Coordinate vectors over this
    index carry the natural symmetric-group action; `canonicalize` returns
    the lexicographic minimum of an orbit, which is the storage key for
    box grids and cell profiles alike.
    """

    __slots__ = ("k", "subsets", "index", "perms", "_remaps", "_canon_cache")

    def __init__(self, k: int):
        if not 1 <= k <= MAX_ARITY:
            raise ValueError(f"arity k={k} unsupported: must satisfy 1 <= k <= {MAX_ARITY}")
        self.k = k
        subsets = []
        for size in range(1, k + 1):
            subsets.extend(combinations(range(k), size))
        self.subsets = tuple(subsets)
        self.index = {s: i for i, s in enumerate(subsets)}
        self.perms = tuple(permutations(range(k)))
        self._remaps = {p: self._build_remap(p) for p in self.perms}
        self._canon_cache: dict[tuple, tuple] = {}

    @property
    def n_coords(self) -> int:
        return len(self.subsets)

    @property
    def top_index(self) -> int:
        # The full set {0..k-1} sorts last (largest size).
        return len(self.subsets) - 1

    def _build_remap(self, perm: tuple[int, ...]) -> tuple[int, ...]:
        # remap[i] = index of perm(A_i)
        return tuple(self.index[tuple(sorted(perm[a] for a in s))] for s in self.subsets)

    def index_remap(self, perm: tuple[int, ...]) -> tuple[int, ...]:
        return self._remaps[perm]

    def permute_point(self, perm: tuple[int, ...], vec: Sequence) -> tuple:
        """Action on coordinate vectors: result[remap(perm)[j]] = vec[j]."""
        remap = self._remaps[perm]
        out = [None] * len(vec)
        for j, value in enumerate(vec):
            out[remap[j]] = value
        return tuple(out)

    def canonicalize(self, vec: Sequence) -> tuple:
        """Lexicographic minimum of the orbit of ``vec`` under all of S_k."""
        key = tuple(vec)
        hit = self._canon_cache.get(key)
        if hit is not None:
            return hit
        best = key
        for remap in self._remaps.values():
            out = [None] * len(key)
            for j, value in enumerate(key):
                out[remap[j]] = value
            cand = tuple(out)
            if cand < best:
                best = cand
        self._canon_cache[key] = best
        return best


@lru_cache(maxsize=None)
def subset_indexing(k: int) -> SubsetIndexing:
    """Shared per-arity indexing instance (canonicalization cache included)."""
    return SubsetIndexing(k)


def simplicial_support(hypergraph: UniformHypergraph) -> tuple[tuple[int, ...], ...]:
    """All nonempty subsets of the edges, deduplicated and ordered.

    Order: by size, then lexicographically. Every nonempty subset of a
    member is a member (downward closure), since subsets of subsets of
    edges are subsets of edges. A single k-edge yields 2**k - 1 elements.
    """
    seen = set()
    for e in hypergraph.edges:
        for size in range(1, hypergraph.k + 1):
            seen.update(combinations(e, size))
    return tuple(sorted(seen, key=lambda s: (len(s), s)))


def complete_hypergraph(k: int, n: int) -> UniformHypergraph:
    """All k-subsets of {0..n-1}; empty when k > n."""
    return UniformHypergraph(k, n, list(combinations(range(n), k)))


def edge_density(hypergraph: UniformHypergraph) -> Fraction:
    """Exact |E| / C(n, k); undefined (raises) when n < k."""
    n, k = hypergraph.n_vertices, hypergraph.k
    if n < k:
        raise ValueError(f"edge density undefined for n={n} < k={k}")
    return Fraction(len(hypergraph.edges), comb(n, k))


# ---------------------------------------------------------------------------
# HG text format
#
#   HG <k> <n> <m>
#   <v_1> ... <v_k>     (m lines, vertices strictly increasing)
#
# '#' lines are comments; blank lines are ignored. Canonical serialization
# lists edges in lexicographic order, LF line endings, UTF-8.
# ---------------------------------------------------------------------------


def _content_lines(text: str | bytes) -> list[tuple[int, str]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((lineno, line))
    return out


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"{what}: {token!r} is not an integer", lineno) from None


def parse_edge_line(line: str, lineno: int, k: int, n: int) -> tuple[int, ...]:
    tokens = line.split()
    if len(tokens) != k:
        raise FormatError(f"expected {k} vertex ids, got {len(tokens)}", lineno)
    edge = tuple(_parse_int(t, "vertex id", lineno) for t in tokens)
    for i, v in enumerate(edge):
        if not 0 <= v < n:
            raise FormatError(f"vertex {v} out of range 0..{n - 1}", lineno)
        if i and edge[i - 1] == v:
            raise FormatError(f"repeated vertex {v} within an edge", lineno)
        if i and edge[i - 1] > v:
            raise FormatError("vertices not in strictly increasing order", lineno)
    return edge


def parse_hypergraph(text: str | bytes) -> UniformHypergraph:
    """Parse the HG format; raises FormatError with a line number."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input: missing HG header")
    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) != 4 or tokens[0] != "HG":
        raise FormatError("malformed header: expected 'HG <k> <n> <m>'", lineno)
    k = _parse_int(tokens[1], "arity k", lineno)
    n = _parse_int(tokens[2], "vertex count n", lineno)
    m = _parse_int(tokens[3], "edge count m", lineno)
    if not 1 <= k <= MAX_ARITY:
        raise FormatError(f"arity k={k} out of supported range 1..{MAX_ARITY}", lineno)
    if n < 0 or m < 0:
        raise FormatError("n and m must be nonnegative", lineno)
    body = lines[1:]
    if len(body) != m:
        raise FormatError(f"expected {m} edge lines, found {len(body)}", lineno)
    edges = []
    seen = set()
    for elineno, line in body:
        edge = parse_edge_line(line, elineno, k, n)
        if edge in seen:
            raise FormatError(f"duplicate edge {edge}", elineno)
        seen.add(edge)
        edges.append(edge)
    return UniformHypergraph(k, n, sorted(edges))


def serialize_hypergraph(hypergraph: UniformHypergraph) -> str:
    """Canonical HG text: header plus edges in lexicographic order."""
    lines = [f"HG {hypergraph.k} {hypergraph.n_vertices} {len(hypergraph.edges)}"]
    lines.extend(" ".join(str(v) for v in e) for e in hypergraph.edges)
    return "\n".join(lines) + "\n"
