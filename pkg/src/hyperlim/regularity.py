"""Hyperpartitions, cells, cylinder intersections, and regularity diagnostics.

An l-hyperpartition labels every r-subset of the vertex set with a class
in {0..l-1}, for each level r <= k. Subset counts are unordered (C(n,r))
throughout; all regularity ratios are invariant under that convention.
Level r = 1 carries no cylinder structure and is assessed by equitability
only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from math import comb, sqrt
from typing import Mapping, Sequence

from .core import (
    FormatError,
    MAX_ARITY,
    UniformHypergraph,
    _content_lines,
    _parse_int,
    subset_indexing,
)
from .hypergraphon import PROJECTED, LatentSample, StepHypergraphon
from .rng import check_seed, derive, fraction_box, stream

#: CellProfile: the class labels of every nonempty position-subset of a
#: k-subset, canonicalized under the symmetric-group coordinate action.
CellProfile = tuple[int, ...]

DEFAULT_DENSITY_GRID = (0.25, 0.5, 0.75)


class Hyperpartition:
    """Total labeling of all r-subsets, r = 1..k, into l classes each."""

    __slots__ = ("k", "n_vertices", "resolution", "levels")

    def __init__(
        self,
        k: int,
        n_vertices: int,
        resolution: int,
        levels: Sequence[Mapping[tuple[int, ...], int]],
    ):
        if not 1 <= k <= MAX_ARITY:
            raise ValueError(f"arity k={k} unsupported: must satisfy 1 <= k <= {MAX_ARITY}")
        if n_vertices < 0:
            raise ValueError("n_vertices must be nonnegative")
        if resolution < 1:
            raise ValueError("resolution l must be at least 1")
        if len(levels) != k:
            raise ValueError(f"expected {k} levels, got {len(levels)}")
        frozen = []
        for r, level in enumerate(levels, start=1):
            level = dict(level)
            expected = comb(n_vertices, r)
            if len(level) != expected:
                raise ValueError(f"level {r}: expected {expected} labeled subsets, got {len(level)}")
            for sub, label in level.items():
                if len(sub) != r or tuple(sorted(set(sub))) != sub:
                    raise ValueError(f"level {r}: {sub} is not a sorted {r}-subset")
                if any(not 0 <= v < n_vertices for v in sub):
                    raise ValueError(f"level {r}: {sub} out of vertex range")
                if not 0 <= label < resolution:
                    raise ValueError(f"level {r}: label {label} outside 0..{resolution - 1}")
            frozen.append(level)
        self.k = k
        self.n_vertices = n_vertices
        self.resolution = resolution
        self.levels = tuple(frozen)

    def label(self, subset: tuple[int, ...]) -> int:
        return self.levels[len(subset) - 1][subset]

    def class_hypergraph(self, r: int, j: int) -> UniformHypergraph:
        """The class P^j_r as an r-uniform hypergraph."""
        if not 1 <= r <= self.k:
            raise ValueError(f"level {r} outside 1..{self.k}")
        if not 0 <= j < self.resolution:
            raise ValueError(f"class {j} outside 0..{self.resolution - 1}")
        edges = [sub for sub, lab in self.levels[r - 1].items() if lab == j]
        return UniformHypergraph(r, self.n_vertices, sorted(edges))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Hyperpartition)
            and (self.k, self.n_vertices, self.resolution) ==
                (other.k, other.n_vertices, other.resolution)
            and self.levels == other.levels
        )

    def __repr__(self) -> str:
        return (
            f"Hyperpartition(k={self.k}, n={self.n_vertices}, l={self.resolution})"
        )


def random_hyperpartition(k: int, n: int, l: int, seed: int) -> Hyperpartition:
    """Independent uniform class labels for every subset, per level.

    Each label is derived from (seed, "hyperpartition", r, *subset), so
    the partition is a pure function of the seed, independent of
    iteration order.
    """
    check_seed(seed)
    levels = []
    for r in range(1, k + 1):
        levels.append(
            {
                sub: stream(seed, "hyperpartition", r, *sub).next_below(l)
                for sub in combinations(range(n), r)
            }
        )
    return Hyperpartition(k, n, l, levels)


def latent_hyperpartition(sample: LatentSample, l: int) -> Hyperpartition:
    """Box the latent coordinates of a W-random draw at resolution l.

    Label of subset B = floor(l * u_B), computed exactly on the 64-bit
    fractions. At the resolution of the sampled indicator, every cell is
    edge-pure by construction.
    """
    hg = sample.hypergraph
    levels = []
    for r in range(1, hg.k + 1):
        levels.append(
            {
                sub: fraction_box(sample.latents[sub], l)
                for sub in combinations(range(hg.n_vertices), r)
            }
        )
    return Hyperpartition(hg.k, hg.n_vertices, l, levels)


# -- cells ------------------------------------------------------------------


def cell_profile(partition: Hyperpartition, subset: tuple[int, ...]) -> CellProfile:
    """Canonical label profile of a k-subset.

    Two k-subsets share a profile iff some vertex alignment matches the
    classes of all their corresponding sub-subsets, so profiles index the
    partition's cells.
    """
    idx = subset_indexing(partition.k)
    raw = tuple(
        partition.label(tuple(subset[i] for i in positions)) for positions in idx.subsets
    )
    return idx.canonicalize(raw)


def induce_cells(partition: Hyperpartition) -> dict[tuple[int, ...], CellProfile]:
    """Profile of every k-subset of the vertex set."""
    if partition.n_vertices < partition.k:
        return {}
    return {
        sub: cell_profile(partition, sub)
        for sub in combinations(range(partition.n_vertices), partition.k)
    }


def _check_host_partition(host: UniformHypergraph, partition: Hyperpartition) -> None:
    if host.k != partition.k or host.n_vertices != partition.n_vertices:
        raise ValueError("host and partition disagree on arity or vertex count")


def cell_counts(
    host: UniformHypergraph, partition: Hyperpartition
) -> dict[CellProfile, tuple[int, int]]:
    """Per cell: (number of k-subsets, number of those that are edges)."""
    _check_host_partition(host, partition)
    counts: dict[CellProfile, list[int]] = {}
    for sub, profile in induce_cells(partition).items():
        entry = counts.setdefault(profile, [0, 0])
        entry[0] += 1
        if sub in host.edge_set:
            entry[1] += 1
    return {profile: (size, edges) for profile, (size, edges) in counts.items()}


def cell_density(
    host: UniformHypergraph, partition: Hyperpartition
) -> dict[CellProfile, Fraction]:
    """Exact edge density of every nonempty cell."""
    return {
        profile: Fraction(edges, size)
        for profile, (size, edges) in cell_counts(host, partition).items()
    }


def cell_approximation(
    host: UniformHypergraph, partition: Hyperpartition
) -> tuple[frozenset[CellProfile], Fraction]:
    """Majority-vote cell union and its symmetric-difference fraction.

    Includes exactly the cells with density strictly above 1/2, which
    minimizes |H triangle T| over all unions of cells (per-cell choices
    are independent; ties lose nothing by exclusion).
    """
    counts = cell_counts(host, partition)
    total = comb(host.n_vertices, host.k)
    chosen = []
    mismatch = 0
    for profile, (size, edges) in counts.items():
        if 2 * edges > size:
            chosen.append(profile)
            mismatch += size - edges
        else:
            mismatch += edges
    if total == 0:
        return frozenset(), Fraction(0)
    return frozenset(chosen), Fraction(mismatch, total)


def equitability(partition: Hyperpartition) -> dict[int, Fraction]:
    """Per level r: (largest class - smallest class) / C(n, r), exactly.

    All l classes count, including empty ones. The overall measure is the
    maximum over levels.
    """
    out = {}
    for r in range(1, partition.k + 1):
        total = comb(partition.n_vertices, r)
        if total == 0:
            out[r] = Fraction(0)
            continue
        sizes = [0] * partition.resolution
        for label in partition.levels[r - 1].values():
            sizes[label] += 1
        out[r] = Fraction(max(sizes) - min(sizes), total)
    return out


# -- cylinder intersections ---------------------------------------------------


@dataclass(frozen=True)
class CylinderIntersection:
    """r sides of arity r-1 on a common vertex set.

    An r-subset {a_1..a_r} is a member iff the left-out elements can be
    assigned bijectively to the sides: some permutation puts, for every i,
    the subset minus its i-th assigned element into side i. Checked by
    brute force over all r! assignments (r <= 4).
    """

    sides: tuple[UniformHypergraph, ...]

    def __post_init__(self):
        sides = tuple(self.sides)
        object.__setattr__(self, "sides", sides)
        r = len(sides)
        if not 2 <= r <= MAX_ARITY:
            raise ValueError(f"need 2..{MAX_ARITY} sides, got {r}")
        n = sides[0].n_vertices
        for b in sides:
            if b.k != r - 1:
                raise ValueError(f"side arity {b.k} != r-1 = {r - 1}")
            if b.n_vertices != n:
                raise ValueError("sides must share one vertex set")

    @property
    def arity(self) -> int:
        return len(self.sides)

    @property
    def n_vertices(self) -> int:
        return self.sides[0].n_vertices

    def contains(self, subset: tuple[int, ...]) -> bool:
        r = self.arity
        if len(subset) != r or tuple(sorted(set(subset))) != tuple(subset):
            raise ValueError(f"{subset} is not a sorted {r}-subset")
        if any(not 0 <= v < self.n_vertices for v in subset):
            raise ValueError(f"{subset} out of vertex range")
        minus = [subset[:j] + subset[j + 1 :] for j in range(r)]
        edge_sets = [b.edge_set for b in self.sides]
        for perm in permutations(range(r)):
            if all(minus[perm[i]] in edge_sets[i] for i in range(r)):
                return True
        return False

    @cached_property
    def members(self) -> frozenset[tuple[int, ...]]:
        return frozenset(
            sub
            for sub in combinations(range(self.n_vertices), self.arity)
            if self.contains(sub)
        )


def cylinder_membership(cyl: CylinderIntersection, subset: tuple[int, ...]) -> bool:
    return cyl.contains(subset)


def regularity_deviation(
    g: UniformHypergraph, cyl: CylinderIntersection, size_gate: float | Fraction
) -> Fraction | None:
    """|density of g - density of g inside the cylinder|, or None.

    None marks a skipped (too small) cylinder: assessment requires
    |L| >= size_gate * C(n, r).
    """
    if g.k != cyl.arity or g.n_vertices != cyl.n_vertices:
        raise ValueError("hypergraph and cylinder disagree on arity or vertex count")
    total = comb(g.n_vertices, g.k)
    members = cyl.members
    t = len(members)
    if t == 0 or Fraction(t, total) < size_gate:
        return None
    return abs(Fraction(len(g.edges), total) - Fraction(len(g.edge_set & members), t))


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of testing one hypergraph against a cylinder family."""

    mode: str
    epsilon: float
    tested: int
    admitted: int
    max_deviation: Fraction | None
    witness: CylinderIntersection | None = field(repr=False, default=None)


def check_regularity_family(
    g: UniformHypergraph,
    epsilon: float,
    family: Sequence[CylinderIntersection],
    mode: str = "exhaustive",
) -> RegularityReport:
    """Max admitted deviation over a provided cylinder family.

    The witness is the first cylinder attaining the maximum, present iff
    that maximum exceeds epsilon (the same epsilon gates cylinder size).
    """
    admitted = 0
    max_dev: Fraction | None = None
    argmax = None
    for cyl in family:
        dev = regularity_deviation(g, cyl, epsilon)
        if dev is None:
            continue
        admitted += 1
        if max_dev is None or dev > max_dev:
            max_dev = dev
            argmax = cyl
    witness = argmax if (max_dev is not None and max_dev > epsilon) else None
    return RegularityReport(mode, epsilon, len(family), admitted, max_dev, witness)


def sampled_cylinder_family(
    n: int,
    r: int,
    count: int,
    seed: int,
    density_grid: Sequence[float] = DEFAULT_DENSITY_GRID,
) -> list[CylinderIntersection]:
    """Seeded random cylinder intersections on n vertices at level r.

    Every side draws its density uniformly from the grid and then its
    (r-1)-subsets independently at that density; both draws come from
    labeled substreams, so the family is a pure function of the seed.
    """
    check_seed(seed)
    if not density_grid or any(not 0.0 <= q <= 1.0 for q in density_grid):
        raise ValueError("density_grid must be nonempty with entries in [0, 1]")
    family = []
    for m in range(count):
        sides = []
        for i in range(r):
            q = density_grid[stream(seed, "cylinder-density", m, i).next_below(len(density_grid))]
            threshold = int(q * 2.0**64)
            st = stream(seed, "cylinder-side", m, i)
            edges = [
                sub
                for sub in combinations(range(n), r - 1)
                if st.next_u64() < threshold
            ]
            sides.append(UniformHypergraph(r - 1, n, edges))
        family.append(CylinderIntersection(tuple(sides)))
    return family


def check_regularity_sampled(
    g: UniformHypergraph,
    epsilon: float,
    count: int,
    seed: int,
    density_grid: Sequence[float] = DEFAULT_DENSITY_GRID,
    planted: Sequence[CylinderIntersection] = (),
) -> RegularityReport:
    """Sampled regularity check: seeded random cylinders, planted first."""
    if g.k < 2:
        raise ValueError("level 1 has no cylinder structure; use equitability")
    for cyl in planted:
        if cyl.arity != g.k or cyl.n_vertices != g.n_vertices:
            raise ValueError("planted cylinder disagrees on arity or vertex count")
    family = list(planted) + sampled_cylinder_family(
        g.n_vertices, g.k, count, seed, density_grid
    )
    return check_regularity_family(g, epsilon, family, mode="sampled")


# -- total-independence diagnostic -------------------------------------------


@dataclass(frozen=True)
class IndependenceResult:
    """Worst observed product-vs-intersection gap over seeded partitions."""

    max_discrepancy: float
    bound: float
    trials: int
    seed: int
    discrepancies: tuple[float, ...]


def independence_test(
    k: int,
    n: int,
    l: int,
    subsets: Sequence[tuple[int, ...]] | None = None,
    seed: int = 0,
    trials: int = 4,
) -> IndependenceResult:
    """Finite analog of label independence across position-subsets.

    Per trial: draw a random l-hyperpartition and one target class per
    position-subset A_i; over all k-tuples of distinct vertices, compare
    the fraction landing in every chosen class simultaneously against the
    product of the per-subset fractions. Reports the max |gap| and the
    reference bound 4 * sqrt(p0 (1 - p0) / C(n, k)) with p0 = l**-len(subsets).
    """
    check_seed(seed)
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    if trials < 1:
        raise ValueError("trials must be positive")
    idx = subset_indexing(k)
    if subsets is None:
        subsets = idx.subsets
    subsets = [tuple(s) for s in subsets]
    if len(set(subsets)) != len(subsets):
        raise ValueError("position subsets must be distinct")
    for s in subsets:
        if not s or tuple(sorted(set(s))) != s or any(not 0 <= a < k for a in s):
            raise ValueError(f"{s} is not a sorted nonempty subset of positions 0..{k - 1}")

    p0 = float(l) ** -len(subsets)
    bound = 4.0 * sqrt(p0 * (1.0 - p0) / comb(n, k))
    discrepancies = []
    for t in range(trials):
        partition = random_hyperpartition(k, n, l, derive(seed, "independence-partition", t))
        targets = [
            stream(seed, "independence-class", t, i).next_below(l)
            for i in range(len(subsets))
        ]
        n_tuples = 0
        inter = 0
        singles = [0] * len(subsets)
        for tup in permutations(range(n), k):
            n_tuples += 1
            all_hit = True
            for i, positions in enumerate(subsets):
                proj = tuple(sorted(tup[a] for a in positions))
                if partition.label(proj) == targets[i]:
                    singles[i] += 1
                else:
                    all_hit = False
            if all_hit:
                inter += 1
        mu_inter = Fraction(inter, n_tuples)
        product_mu = Fraction(1)
        for c in singles:
            product_mu *= Fraction(c, n_tuples)
        discrepancies.append(abs(float(mu_inter - product_mu)))
    return IndependenceResult(max(discrepancies), bound, trials, seed, tuple(discrepancies))


def extract_step_hypergraphon(
    host: UniformHypergraph, partition: Hyperpartition
) -> StepHypergraphon:
    """Cell densities as a projected-kind grid at the partition resolution.

    Each nonempty cell's canonical profile is a box orbit (the level-k
    class is the top coordinate); its value is the exact cell density.
    Empty cells read 0. When the cells are edge-pure the values are
    exactly {0, 1} and agree with any indicator that generated them.
    """
    values = {
        profile: float(density)
        for profile, density in cell_density(host, partition).items()
        if density != 0
    }
    return StepHypergraphon(partition.k, partition.resolution, PROJECTED, values)


# ---------------------------------------------------------------------------
# HP text format
#
#   HP <k> <n> <l>
#   LEVEL <r>                      (for r = 1..k)
#   <v_1> ... <v_r> <label>        (C(n,r) lines, subsets in lexicographic
#                                   order)
# ---------------------------------------------------------------------------


def serialize_hyperpartition(partition: Hyperpartition) -> str:
    lines = [f"HP {partition.k} {partition.n_vertices} {partition.resolution}"]
    for r in range(1, partition.k + 1):
        lines.append(f"LEVEL {r}")
        level = partition.levels[r - 1]
        for sub in combinations(range(partition.n_vertices), r):
            lines.append(" ".join(str(v) for v in sub) + f" {level[sub]}")
    return "\n".join(lines) + "\n"


def parse_hyperpartition(text: str | bytes) -> Hyperpartition:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input: missing HP header")
    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) != 4 or tokens[0] != "HP":
        raise FormatError("malformed header: expected 'HP <k> <n> <l>'", lineno)
    k = _parse_int(tokens[1], "arity k", lineno)
    n = _parse_int(tokens[2], "vertex count n", lineno)
    l = _parse_int(tokens[3], "resolution l", lineno)
    if not 1 <= k <= MAX_ARITY:
        raise FormatError(f"arity k={k} out of supported range 1..{MAX_ARITY}", lineno)
    if n < 0 or l < 1:
        raise FormatError("need n >= 0 and l >= 1", lineno)
    pos = 1
    levels = []
    for r in range(1, k + 1):
        if pos >= len(lines):
            raise FormatError(f"missing 'LEVEL {r}' block", lineno)
        blineno, bline = lines[pos]
        if bline.split() != ["LEVEL", str(r)]:
            raise FormatError(f"expected 'LEVEL {r}', got {bline!r}", blineno)
        pos += 1
        level = {}
        for sub in combinations(range(n), r):
            if pos >= len(lines):
                raise FormatError(f"level {r}: missing line for subset {sub}", blineno)
            elineno, line = lines[pos]
            pos += 1
            tokens = line.split()
            if len(tokens) != r + 1:
                raise FormatError(f"expected {r} vertex ids and a label", elineno)
            got = tuple(_parse_int(t, "vertex id", elineno) for t in tokens[:r])
            if got != sub:
                raise FormatError(
                    f"subsets must appear in lexicographic order: expected {sub}, got {got}",
                    elineno,
                )
            label = _parse_int(tokens[r], "class label", elineno)
            if not 0 <= label < l:
                raise FormatError(f"class label {label} outside 0..{l - 1}", elineno)
            level[sub] = label
        levels.append(level)
    if pos != len(lines):
        raise FormatError("trailing content after the last level block", lines[pos][0])
    return Hyperpartition(k, n, l, levels)
