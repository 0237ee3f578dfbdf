"""Edge-removal experiments: destroy every copy of a pattern, cheaply.

The image sets of a pattern K in a host H form a small set cover /
hitting set instance: remove a set of host edges meeting every image and
no homomorphic copy of K survives. Greedy gives the usual ln-factor
guarantee; branch and bound certifies minimality on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import UniformHypergraph
from .homomorphism import HomImageSet, enumerate_hom_images, hom_count

Edge = tuple[int, ...]


def _greedy(images: list[frozenset[Edge]]) -> list[Edge]:
    chosen: list[Edge] = []
    remaining = list(images)
    while remaining:
        coverage: dict[Edge, int] = {}
        for img in remaining:
            for e in img:
                coverage[e] = coverage.get(e, 0) + 1
        best = min(coverage, key=lambda e: (-coverage[e], e))
        chosen.append(best)
        remaining = [img for img in remaining if best not in img]
    return sorted(chosen)


def greedy_hitting_set(images: HomImageSet) -> tuple[Edge, ...]:
    """Max-coverage greedy hitting set over the enumerated image sets.

    Ties break toward the lexicographically smallest edge, so the result
    is deterministic. Refuses truncated enumerations: a hitting set for a
    partial list certifies nothing.
    """
    if images.truncated:
        raise ValueError("image enumeration was truncated; hitting it proves nothing")
    return tuple(_greedy([set_ for set_ in images.images]))


def _packing_bound(uncovered: list[frozenset[Edge]]) -> int:
    # Edge-disjoint images each force a distinct removal.
    used: set[Edge] = set()
    bound = 0
    for img in uncovered:
        if not (img & used):
            bound += 1
            used |= img
    return bound


def exact_hitting_set(
    images: HomImageSet, budget: int = 24
) -> tuple[tuple[Edge, ...], bool]:
    """Minimum hitting set when the edge universe is small.

    Branch and bound seeded with the greedy solution, pruned by a
    disjoint-image packing lower bound. Instances whose candidate edge
    set exceeds `budget` fall back to greedy and report optimal=False.
    """
    if images.truncated:
        raise ValueError("image enumeration was truncated; hitting it proves nothing")
    image_list = sorted(images.images, key=lambda img: sorted(img))
    candidates = sorted({e for img in image_list for e in img})
    if len(candidates) > budget:
        return tuple(_greedy(image_list)), False

    best = _greedy(image_list)

    def search(uncovered: list[frozenset[Edge]], chosen: list[Edge]) -> None:
        nonlocal best
        if not uncovered:
            if len(chosen) < len(best):
                best = sorted(chosen)
            return
        if len(chosen) + _packing_bound(uncovered) >= len(best):
            return
        branch = min(uncovered, key=lambda img: (len(img), sorted(img)))
        for e in sorted(branch):
            chosen.append(e)
            search([img for img in uncovered if e not in img], chosen)
            chosen.pop()

    search(image_list, [])
    return tuple(best), True


@dataclass(frozen=True)
class RemovalResult:
    """What it cost to make the host pattern-free, and proof it worked."""

    removed: tuple[Edge, ...]
    removed_fraction: Fraction
    residual: Fraction
    method: str
    optimal: bool
    verified: bool
    n_images: int
    truncated: bool

    @property
    def residual_zero(self) -> bool:
        return self.residual == 0


def removal_experiment(
    pattern: UniformHypergraph,
    host: UniformHypergraph,
    mode: str = "exact",
    cap: int = 10**6,
    exact_budget: int = 24,
) -> RemovalResult:
    """Enumerate images, hit them, and re-count on the stripped host.

    The residual homomorphism density is recomputed from scratch on
    H minus the removed edges; `verified` demands both an untruncated
    enumeration and residual exactly zero.
    """
    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode {mode!r}: expected 'exact' or 'greedy'")
    images = enumerate_hom_images(pattern, host, cap=cap)
    image_list = sorted(images.images, key=lambda img: sorted(img))
    if mode == "exact" and not images.truncated:
        removed, optimal = exact_hitting_set(images, budget=exact_budget)
        method = "exact" if optimal else "greedy"
    else:
        removed = tuple(_greedy(image_list))
        optimal = not image_list and not images.truncated
        method = "greedy"

    stripped = host.without_edges(removed)
    residual_count = hom_count(pattern, stripped)
    if residual_count.domain_size == 0:
        residual = Fraction(0)
    else:
        residual = residual_count.density()
    total_slots = comb(host.n_vertices, host.k)
    fraction = Fraction(len(removed), total_slots) if total_slots else Fraction(0)
    return RemovalResult(
        removed=removed,
        removed_fraction=fraction,
        residual=residual,
        method=method,
        optimal=optimal,
        verified=(not images.truncated) and residual == 0,
        n_images=len(images.images),
        truncated=images.truncated,
    )
