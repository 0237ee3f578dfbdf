"""Step hypergraphons: symmetric step functions on the subset-coordinate cube.

A step hypergraphon of arity k at resolution l assigns a value to every
box of the grid ``{0..l-1}**(2**k - 1)``, one coordinate per nonempty
subset of {0..k-1}, invariantly under the symmetric-group action. Only
canonical orbit representatives are stored; missing orbits read 0.
Indicator kind ("ind") takes values in {0,1}; projected kind ("proj")
takes values in [0,1].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb, sqrt
from typing import Mapping, Sequence

from .core import (
    BudgetError,
    FormatError,
    MAX_ARITY,
    UniformHypergraph,
    _content_lines,
    _parse_int,
    parse_hypergraph,
    serialize_hypergraph,
    simplicial_support,
    subset_indexing,
)
from .rng import check_seed, fraction_box, stream

INDICATOR = "ind"
PROJECTED = "proj"

_MC_CHUNK = 4096  # fixed chunk size keeps Monte-Carlo sums thread-invariant


class CompensatedSum:
    """Neumaier-compensated accumulator for long float sums."""

    __slots__ = ("_sum", "_comp")

    def __init__(self):
        self._sum = 0.0
        self._comp = 0.0

    def add(self, x: float) -> None:
        s = self._sum
        t = s + x
        if abs(s) >= abs(x):
            self._comp += (s - t) + x
        else:
            self._comp += (x - t) + s
        self._sum = t

    @property
    def total(self) -> float:
        return self._sum + self._comp


class StepHypergraphon:
    """Grid-valued symmetric step function; see module docstring.

    ``values`` maps canonical orbit representatives (tuples of 2**k - 1
    box indices) to values; exact zeros are dropped on construction.
    """

    __slots__ = ("k", "resolution", "kind", "values", "_indexing", "_cache")

    def __init__(self, k: int, resolution: int, kind: str, values: Mapping[tuple[int, ...], float]):
        if not 1 <= k <= MAX_ARITY:
            raise ValueError(f"arity k={k} unsupported: must satisfy 1 <= k <= {MAX_ARITY}")
        if resolution < 1:
            raise ValueError("resolution must be at least 1")
        if kind not in (INDICATOR, PROJECTED):
            raise ValueError(f"kind must be {INDICATOR!r} or {PROJECTED!r}, got {kind!r}")
        idx = subset_indexing(k)
        stored: dict[tuple[int, ...], float] = {}
        for key, value in values.items():
            key = tuple(key)
            if len(key) != idx.n_coords:
                raise ValueError(f"box {key}: expected {idx.n_coords} coordinates")
            if any(not 0 <= b < resolution for b in key):
                raise ValueError(f"box {key}: index out of range 0..{resolution - 1}")
            if idx.canonicalize(key) != key:
                raise ValueError(f"box {key} is not a canonical orbit representative")
            v = float(value)
            if kind == INDICATOR:
                if v != 1.0:
                    raise ValueError("indicator kind stores only value-1 boxes")
            elif not 0.0 <= v <= 1.0:
                raise ValueError(f"box {key}: value {v} outside [0, 1]")
            if v == 0.0:
                continue
            stored[key] = v
        self.k = k
        self.resolution = resolution
        self.kind = kind
        self.values = stored
        self._indexing = idx
        self._cache: dict[tuple[int, ...], float] = dict(stored)

    def eval_box(self, box: Sequence[int]) -> float:
        """Value on a raw (not necessarily canonical) box vector."""
        key = tuple(box)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if len(key) != self._indexing.n_coords:
            raise ValueError(f"box {key}: expected {self._indexing.n_coords} coordinates")
        if any(not 0 <= b < self.resolution for b in key):
            raise ValueError(f"box {key}: index out of range 0..{self.resolution - 1}")
        value = self.values.get(self._indexing.canonicalize(key), 0.0)
        self._cache[key] = value
        return value

    def eval_point(self, point: Sequence[float]) -> float:
        """Value at real coordinates, each in the half-open unit interval."""
        box = []
        for x in point:
            if not 0.0 <= x < 1.0:
                raise ValueError(f"coordinate {x} outside [0, 1)")
            # min() guards the corner where float rounding pushes x*l to l.
            box.append(min(int(x * self.resolution), self.resolution - 1))
        return self.eval_box(box)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StepHypergraphon)
            and self.k == other.k
            and self.resolution == other.resolution
            and self.kind == other.kind
            and self.values == other.values
        )

    def __repr__(self) -> str:
        return (
            f"StepHypergraphon(k={self.k}, l={self.resolution}, kind={self.kind!r}, "
            f"boxes={len(self.values)})"
        )


def constant_hypergraphon(k: int, p: float) -> StepHypergraphon:
    """The constant function p; indicator kind when p is 0 or 1."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"constant value {p} outside [0, 1]")
    zero_box = (0,) * (2**k - 1)
    if p == 0.0:
        return StepHypergraphon(k, 1, INDICATOR, {})
    if p == 1.0:
        return StepHypergraphon(k, 1, INDICATOR, {zero_box: 1.0})
    return StepHypergraphon(k, 1, PROJECTED, {zero_box: p})


def _edge_coordinate_map(pattern: UniformHypergraph, support: Sequence[tuple[int, ...]]):
    """Per edge: support index of each subset coordinate, in grid order.

    The order-preserving bijection from positions to an edge is plain
    indexing into the sorted edge tuple.
    """
    idx = subset_indexing(pattern.k)
    where = {s: i for i, s in enumerate(support)}
    out = []
    for e in pattern.edges:
        out.append(tuple(where[tuple(e[i] for i in positions)] for positions in idx.subsets))
    return out


def _integrand(assign: Sequence[int], coord_maps, w: StepHypergraphon) -> float:
    # Shared by the exact and Monte-Carlo paths so both round identically.
    value = 1.0
    for cmap in coord_maps:
        f = w.eval_box(tuple(assign[i] for i in cmap))
        if f == 0.0:
            return 0.0
        value *= f
    return value


def _check_density_args(pattern: UniformHypergraph, w: StepHypergraphon) -> None:
    if pattern.k != w.k:
        raise ValueError(f"arity mismatch: pattern k={pattern.k}, hypergraphon k={w.k}")


def exact_density(
    pattern: UniformHypergraph, w: StepHypergraphon, budget: int = 10**6
) -> float:
    """Exact grid sum of the density integral of ``pattern`` against ``w``.

    One coordinate per element of the simplicial support of the pattern;
    the integrand multiplies the box value of every edge. The box count
    l**s is checked against ``budget`` before any work. Compensated
    summation throughout.
    """
    _check_density_args(pattern, w)
    support = simplicial_support(pattern)
    s = len(support)
    l = w.resolution
    boxes = l**s
    if boxes > budget:
        raise BudgetError(f"exact density needs {boxes} grid boxes, budget is {budget}")
    if s == 0:
        return 1.0
    coord_maps = _edge_coordinate_map(pattern, support)
    acc = CompensatedSum()
    for assign in product(range(l), repeat=s):
        acc.add(_integrand(assign, coord_maps, w))
    return acc.total / boxes


def exact_density_grouped(
    pattern: UniformHypergraph,
    w: StepHypergraphon,
    groups: Sequence[Sequence[int]],
    budget: int = 10**6,
) -> float:
    """Iterated form of :func:`exact_density` over coordinate groups.

    ``groups`` partitions the support indices; summation nests group by
    group (innermost last), which is the finite shadow of integrating the
    coordinate groups in that order. Agrees with the flat sum to within
    accumulation error.
    """
    _check_density_args(pattern, w)
    support = simplicial_support(pattern)
    s = len(support)
    flat = [i for g in groups for i in g]
    if sorted(flat) != list(range(s)):
        raise ValueError("groups must partition the support indices")
    l = w.resolution
    if l**s > budget:
        raise BudgetError(f"exact density needs {l**s} grid boxes, budget is {budget}")
    if s == 0:
        return 1.0
    coord_maps = _edge_coordinate_map(pattern, support)
    assign = [0] * s

    def layer(gi: int) -> float:
        if gi == len(groups):
            return _integrand(assign, coord_maps, w)
        indices = groups[gi]
        acc = CompensatedSum()
        for combo in product(range(l), repeat=len(indices)):
            for j, i in zip(combo, indices):
                assign[i] = j
            acc.add(layer(gi + 1))
        return acc.total / l ** len(indices)

    return layer(0)


@dataclass(frozen=True)
class DensityEstimate:
    """Monte-Carlo density estimate with its sample standard error."""

    estimate: float
    standard_error: float
    n_samples: int
    seed: int


def mc_density(
    pattern: UniformHypergraph,
    w: StepHypergraphon,
    n_samples: int,
    seed: int,
    threads: int | None = None,
) -> DensityEstimate:
    """Monte-Carlo estimate of the density integral.

    Each sample index derives its own substream from (seed, "mc", index),
    so the estimate is a pure function of (seed, n_samples): thread count
    and scheduling cannot change a bit. Standard error is the ddof=1
    sample deviation over sqrt(n_samples).
    """
    _check_density_args(pattern, w)
    check_seed(seed)
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    support = simplicial_support(pattern)
    s = len(support)
    l = w.resolution
    coord_maps = _edge_coordinate_map(pattern, support)

    def chunk_values(lo: int, hi: int) -> list[float]:
        out = []
        for i in range(lo, hi):
            st = stream(seed, "mc", i)
            assign = [fraction_box(st.next_fraction(), l) for _ in range(s)]
            out.append(_integrand(assign, coord_maps, w))
        return out

    ranges = [(lo, min(lo + _MC_CHUNK, n_samples)) for lo in range(0, n_samples, _MC_CHUNK)]
    if threads and threads > 1 and len(ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda r: chunk_values(*r), ranges))
    else:
        chunks = [chunk_values(*r) for r in ranges]

    total = CompensatedSum()
    for chunk in chunks:
        for v in chunk:
            total.add(v)
    mean = total.total / n_samples
    ss = CompensatedSum()
    for chunk in chunks:
        for v in chunk:
            d = v - mean
            ss.add(d * d)
    sd = sqrt(max(ss.total, 0.0) / (n_samples - 1))
    return DensityEstimate(mean, sd / sqrt(n_samples), n_samples, seed)


@dataclass(frozen=True)
class LatentSample:
    """A W-random draw: the hypergraph plus every latent subset coordinate.

    ``latents`` maps each vertex subset of size 1..k (sorted tuple) to a
    64-bit fraction m standing for the uniform variate m / 2**64. An edge
    is present iff the indicator evaluates to 1 on the box vector read off
    the latents of its subsets, with boxes computed exactly as
    ``(m * l) >> 64``.
    """

    hypergraph: UniformHypergraph
    latents: dict[tuple[int, ...], int]
    seed: int

    def u_float(self, subset: tuple[int, ...]) -> float:
        return self.latents[tuple(subset)] * 2.0**-64


def sample_w_random(w: StepHypergraphon, n: int, seed: int) -> LatentSample:
    """Draw the n-vertex random hypergraph generated by an indicator ``w``.

    Every subset B with 1 <= |B| <= k gets an independent uniform latent
    derived from (seed, "latent", |B|, *B); the k-subset E becomes an edge
    iff w is 1 at the box vector of E's subset latents. Deterministic
    given (w, n, seed), independent of evaluation order.
    """
    if w.kind != INDICATOR:
        raise ValueError("sampling requires an indicator-kind hypergraphon")
    if n < 0:
        raise ValueError("n must be nonnegative")
    check_seed(seed)
    k, l = w.k, w.resolution
    latents: dict[tuple[int, ...], int] = {}
    for r in range(1, k + 1):
        for sub in combinations(range(n), r):
            latents[sub] = stream(seed, "latent", r, *sub).next_fraction()
    boxes = {sub: fraction_box(m, l) for sub, m in latents.items()}
    idx = subset_indexing(k)
    edges = []
    for e in combinations(range(n), k):
        vec = tuple(boxes[tuple(e[i] for i in positions)] for positions in idx.subsets)
        if w.eval_box(vec) == 1.0:
            edges.append(e)
    return LatentSample(UniformHypergraph(k, n, edges), latents, seed)


def project(w: StepHypergraphon, budget: int = 1 << 22) -> StepHypergraphon:
    """Average out the top (full-set) coordinate; projected kind.

    The result is represented on the full coordinate grid, constant in the
    top coordinate. Enumerates the whole grid, so l**(2**k - 1) is checked
    against ``budget`` first.
    """
    idx = subset_indexing(w.k)
    l = w.resolution
    m = idx.n_coords
    if l**m > budget:
        raise BudgetError(f"projection needs {l**m} grid boxes, budget is {budget}")
    values: dict[tuple[int, ...], float] = {}
    for key in product(range(l), repeat=m):
        if idx.canonicalize(key) != key:
            continue
        acc = CompensatedSum()
        for j in range(l):
            acc.add(w.eval_box(key[:-1] + (j,)))
        v = acc.total / l
        if v != 0.0:
            values[key] = v
    return StepHypergraphon(w.k, l, PROJECTED, values)


# ---------------------------------------------------------------------------
# HGON text format
#
#   HGON <k> <l> <kind> <s>        kind in {ind, proj}
#   <b_1> ... <b_{2^k-1}> <value>  (s lines, canonical orbit representatives)
#
# Duplicate or non-canonical orbit entries are parse errors.
# ---------------------------------------------------------------------------


def parse_hypergraphon(text: str | bytes) -> StepHypergraphon:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input: missing HGON header")
    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) != 5 or tokens[0] != "HGON":
        raise FormatError("malformed header: expected 'HGON <k> <l> <kind> <s>'", lineno)
    k = _parse_int(tokens[1], "arity k", lineno)
    l = _parse_int(tokens[2], "resolution l", lineno)
    kind = tokens[3]
    s = _parse_int(tokens[4], "entry count s", lineno)
    if kind not in (INDICATOR, PROJECTED):
        raise FormatError(f"kind must be 'ind' or 'proj', got {kind!r}", lineno)
    if not 1 <= k <= MAX_ARITY:
        raise FormatError(f"arity k={k} out of supported range 1..{MAX_ARITY}", lineno)
    if l < 1:
        raise FormatError("resolution l must be at least 1", lineno)
    body = lines[1:]
    if len(body) != s:
        raise FormatError(f"expected {s} entry lines, found {len(body)}", lineno)
    idx = subset_indexing(k)
    width = idx.n_coords
    values: dict[tuple[int, ...], float] = {}
    for elineno, line in body:
        tokens = line.split()
        if len(tokens) != width + 1:
            raise FormatError(f"expected {width} box indices and a value", elineno)
        key = tuple(_parse_int(t, "box index", elineno) for t in tokens[:width])
        if any(not 0 <= b < l for b in key):
            raise FormatError(f"box index out of range 0..{l - 1}", elineno)
        if idx.canonicalize(key) != key:
            raise FormatError(f"box {key} is not a canonical orbit representative", elineno)
        if key in values:
            raise FormatError(f"duplicate orbit entry {key}", elineno)
        try:
            value = float(tokens[width])
        except ValueError:
            raise FormatError(f"value {tokens[width]!r} is not a number", elineno) from None
        if kind == INDICATOR and value != 1.0:
            raise FormatError("indicator entries must have value 1", elineno)
        if not 0.0 <= value <= 1.0:
            raise FormatError(f"value {value} outside [0, 1]", elineno)
        values[key] = value
    return StepHypergraphon(k, l, kind, values)


def serialize_hypergraphon(w: StepHypergraphon) -> str:
    lines = [f"HGON {w.k} {w.resolution} {w.kind} {len(w.values)}"]
    for key in sorted(w.values):
        value = w.values[key]
        tail = "1" if w.kind == INDICATOR else format(value, ".17g")
        lines.append(" ".join(str(b) for b in key) + " " + tail)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# LAT text format: latents plus the sampled hypergraph.
#
#   LAT <k> <n> <seed>
#   <v_1> ... <v_r> <u-hex>        (one line per subset, size 1..k,
#                                   ordered by size then lexicographically;
#                                   u is a 64-bit fraction, 16 hex digits)
#   HG ...                         (embedded HG block)
# ---------------------------------------------------------------------------


def serialize_latents(sample: LatentSample) -> str:
    hg = sample.hypergraph
    lines = [f"LAT {hg.k} {hg.n_vertices} {sample.seed}"]
    for r in range(1, hg.k + 1):
        for sub in combinations(range(hg.n_vertices), r):
            lines.append(" ".join(str(v) for v in sub) + f" {sample.latents[sub]:016x}")
    return "\n".join(lines) + "\n" + serialize_hypergraph(hg)


def parse_latents(text: str | bytes) -> LatentSample:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input: missing LAT header")
    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) != 4 or tokens[0] != "LAT":
        raise FormatError("malformed header: expected 'LAT <k> <n> <seed>'", lineno)
    k = _parse_int(tokens[1], "arity k", lineno)
    n = _parse_int(tokens[2], "vertex count n", lineno)
    seed = _parse_int(tokens[3], "seed", lineno)
    if not 1 <= k <= MAX_ARITY:
        raise FormatError(f"arity k={k} out of supported range 1..{MAX_ARITY}", lineno)
    if n < 0:
        raise FormatError("n must be nonnegative", lineno)
    try:
        check_seed(seed)
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from None
    expected = sum(comb(n, r) for r in range(1, k + 1))
    body = lines[1:]
    if len(body) < expected:
        raise FormatError(f"expected {expected} latent lines before the HG block", lineno)
    latents: dict[tuple[int, ...], int] = {}
    for elineno, line in body[:expected]:
        tokens = line.split()
        if len(tokens) < 2:
            raise FormatError("expected subset members and a hex fraction", elineno)
        sub = tuple(_parse_int(t, "vertex id", elineno) for t in tokens[:-1])
        if not 1 <= len(sub) <= k:
            raise FormatError(f"subset size {len(sub)} outside 1..{k}", elineno)
        if any(not 0 <= v < n for v in sub):
            raise FormatError("subset member out of range", elineno)
        if tuple(sorted(set(sub))) != sub:
            raise FormatError(f"subset {sub} not strictly increasing", elineno)
        if sub in latents:
            raise FormatError(f"duplicate latent for subset {sub}", elineno)
        try:
            u = int(tokens[-1], 16)
        except ValueError:
            raise FormatError(f"{tokens[-1]!r} is not a hex fraction", elineno) from None
        if not 0 <= u < 1 << 64:
            raise FormatError("latent fraction must fit in 64 bits", elineno)
        latents[sub] = u
    if len(latents) != expected:
        raise FormatError("latent lines do not cover every subset exactly once", lineno)
    hg_text = "\n".join(line for _, line in body[expected:])
    hypergraph = parse_hypergraph(hg_text)
    if hypergraph.k != k or hypergraph.n_vertices != n:
        raise FormatError("embedded HG block disagrees with the LAT header", lineno)
    return LatentSample(hypergraph, latents, seed)
