"""Command-line surface: file I/O plumbing and the headline experiments.

Every command is a pure function of its flags. A single --seed feeds each
seeded command; internal randomness comes from labeled substreams
("convergence-sample", "regularity-sample", "regularity-cylinders", plus
the library's own labels), so outputs are bit-identical across runs and
across HYPERLIM_THREADS values.

Exit codes: 0 success, 2 input/parse error, 3 budget exceeded,
4 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from contextlib import nullcontext
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import (
    BudgetError,
    UniformHypergraph,
    parse_hypergraph,
    serialize_hypergraph,
)
from .homomorphism import hom_count, hom_density
from .hypergraphon import (
    StepHypergraphon,
    exact_density,
    mc_density,
    parse_hypergraphon,
    sample_w_random,
    serialize_latents,
)
from .regularity import (
    DEFAULT_DENSITY_GRID,
    cell_approximation,
    cell_counts,
    check_regularity_family,
    check_regularity_sampled,
    equitability,
    latent_hyperpartition,
    parse_hyperpartition,
    sampled_cylinder_family,
)
from .removal import removal_experiment
from .rng import check_seed, derive

CONVERGENCE_HEADER = ["K", "n", "rep", "t_H", "t_W", "abs_diff"]
REGULARITY_HEADER = ["kind", "level", "class", "value", "detail"]


def _real(x: float) -> str:
    return format(float(x), ".17g")


def _threads() -> int | None:
    raw = os.environ.get("HYPERLIM_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"HYPERLIM_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("HYPERLIM_THREADS must be at least 1")
    return value


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _out_stream(path: str | None):
    if path:
        return open(path, "w", encoding="utf-8", newline="")
    return nullcontext(sys.stdout)


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    with _out_stream(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"{what}: expected comma-separated integers, got {text!r}") from None
    if not values:
        raise ValueError(f"{what}: empty list")
    return values


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"--grid: expected comma-separated reals, got {text!r}") from None
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated bundle of experiment parameters."""

    kind: str
    w_path: str
    pattern_paths: tuple[str, ...] = ()
    ns: tuple[int, ...] = ()
    reps: int = 1
    seed: int = 0
    epsilon: float = 0.1
    resolution: int | None = None
    samples: int = 1
    budget: int = 10**6
    out: str | None = None

    def __post_init__(self):
        if self.kind not in ("convergence", "regularity"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        check_seed(self.seed)
        if any(n < 1 for n in self.ns):
            raise ValueError("every n must be positive")
        if self.reps < 1 or self.samples < 1 or self.budget < 1:
            raise ValueError("reps, sample counts, and budget must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.resolution is not None and self.resolution < 1:
            raise ValueError("resolution l must be at least 1")


def convergence_table(
    w: StepHypergraphon,
    patterns: list[tuple[str, UniformHypergraph]],
    ns: tuple[int, ...],
    reps: int,
    seed: int,
    budget: int = 10**6,
    threads: int | None = None,
) -> tuple[list[list[str]], dict[tuple[str, int], float]]:
    """Sampled t(K, H_n) against exact t(K, W), with per-(K, n) means.

    Sample sub-seeds come from (seed, "convergence-sample", K index, n,
    rep). Returns CSV body rows (data rows then a rep="mean" summary row
    per block) and the mean |diff| per (K id, n).
    """
    rows: list[list[str]] = []
    means: dict[tuple[str, int], float] = {}
    for ki, (kid, pattern) in enumerate(patterns):
        t_w = exact_density(pattern, w, budget=budget)
        for n in ns:
            diffs = []
            for rep in range(reps):
                sub_seed = derive(seed, "convergence-sample", ki, n, rep)
                sample = sample_w_random(w, n, sub_seed)
                t_h = hom_density(pattern, sample.hypergraph, threads=threads)
                diff = abs(float(t_h) - t_w)
                diffs.append(diff)
                rows.append([kid, str(n), str(rep), str(t_h), _real(t_w), _real(diff)])
            mean = sum(diffs) / len(diffs)
            means[(kid, n)] = mean
            rows.append([kid, str(n), "mean", "", "", _real(mean)])
    return rows, means


def regularity_table(
    w: StepHypergraphon,
    n: int,
    l: int,
    epsilon: float,
    cylinders: int,
    seed: int,
    density_grid: tuple[float, ...] = DEFAULT_DENSITY_GRID,
) -> tuple[list[list[str]], dict]:
    """One W-sample's partition diagnostics: equitability, regularity, cells.

    Samples H ~ W with latents under (seed, "regularity-sample"), boxes
    the latents at resolution l, then reports per-level equitability, a
    sampled regularity check of every class at levels 2..k (one cylinder
    family per level, derived from (seed, "regularity-cylinders", r)), and
    the cell-approximation error of H.
    """
    sample = sample_w_random(w, n, derive(seed, "regularity-sample"))
    partition = latent_hyperpartition(sample, l)
    rows: list[list[str]] = []
    summary: dict = {}

    eq = equitability(partition)
    for r in sorted(eq):
        rows.append(["equitability", str(r), "", str(eq[r]), ""])
    summary["equitability"] = eq

    witnesses: dict[tuple[int, int], bool] = {}
    deviations: dict[tuple[int, int], object] = {}
    for r in range(2, w.k + 1):
        family = sampled_cylinder_family(
            n, r, cylinders, derive(seed, "regularity-cylinders", r), density_grid
        )
        for j in range(l):
            g = partition.class_hypergraph(r, j)
            report = check_regularity_family(g, epsilon, family, mode="sampled")
            found = report.witness is not None
            witnesses[(r, j)] = found
            deviations[(r, j)] = report.max_deviation
            rows.append(
                [
                    "regularity",
                    str(r),
                    str(j),
                    "" if report.max_deviation is None else str(report.max_deviation),
                    f"tested={report.tested};admitted={report.admitted};witness={int(found)}",
                ]
            )
    summary["witnesses"] = witnesses
    summary["max_deviation"] = deviations

    _, err = cell_approximation(sample.hypergraph, partition)
    rows.append(["cell_error", "", "", str(err), ""])
    summary["cell_error"] = err
    return rows, summary


# -- subcommands --------------------------------------------------------------


def cmd_hom(args) -> int:
    pattern = parse_hypergraph(_read(args.pattern))
    host = parse_hypergraph(_read(args.host))
    result = hom_count(pattern, host, threads=_threads())
    print(f"hom={result.count} t={result.density()}")
    return 0


def cmd_density(args) -> int:
    pattern = parse_hypergraph(_read(args.pattern))
    w = parse_hypergraphon(_read(args.w))
    if args.mode == "exact":
        print(_real(exact_density(pattern, w, budget=args.budget)))
    else:
        est = mc_density(pattern, w, args.samples, args.seed, threads=_threads())
        print(_real(est.estimate))
        print(f"se={_real(est.standard_error)} samples={est.n_samples}", file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    w = parse_hypergraphon(_read(args.w))
    sample = sample_w_random(w, args.n, args.seed)
    text = serialize_hypergraph(sample.hypergraph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.latents:
        Path(args.latents).write_text(serialize_latents(sample), encoding="utf-8")
    return 0


def cmd_cells(args) -> int:
    host = parse_hypergraph(_read(args.host))
    partition = parse_hyperpartition(_read(args.partition))
    counts = cell_counts(host, partition)
    rows = [
        [":".join(str(c) for c in profile), str(size), str(edges), str(Fraction(edges, size))]
        for profile, (size, edges) in sorted(counts.items())
    ]
    _write_csv(args.out, ["profile", "size", "edges", "density"], rows)
    return 0


def cmd_regularity(args) -> int:
    g = parse_hypergraph(_read(args.host))
    grid = _parse_grid(args.grid)
    report = check_regularity_sampled(g, args.eps, args.M, args.seed, grid)
    row = [
        str(g.n_vertices),
        str(g.k),
        _real(args.eps),
        str(args.M),
        str(args.seed),
        str(report.tested),
        str(report.admitted),
        "" if report.max_deviation is None else str(report.max_deviation),
        str(int(report.witness is not None)),
    ]
    _write_csv(
        args.out,
        ["n", "r", "eps", "cylinders", "seed", "tested", "admitted", "max_deviation", "witness"],
        [row],
    )
    return 0


def cmd_removal(args) -> int:
    pattern = parse_hypergraph(_read(args.pattern))
    host = parse_hypergraph(_read(args.host))
    result = removal_experiment(
        pattern, host, mode=args.mode, cap=args.cap, exact_budget=args.budget
    )
    instance = args.id if args.id is not None else Path(args.host).stem
    row = [
        instance,
        str(len(host.edges)),
        str(result.n_images),
        result.method,
        str(len(result.removed)),
        str(result.removed_fraction),
        str(result.residual),
        str(int(result.verified)),
    ]
    _write_csv(
        args.out,
        ["instance", "edges", "images", "method", "removed", "fraction", "residual", "verified"],
        [row],
    )
    return 0 if result.verified else 4


def cmd_experiment_convergence(args) -> int:
    config = ExperimentConfig(
        kind="convergence",
        w_path=args.w,
        pattern_paths=tuple(args.patterns),
        ns=_parse_ints(args.ns, "--ns"),
        reps=args.reps,
        seed=args.seed,
        budget=args.budget,
        out=args.out,
    )
    w = parse_hypergraphon(_read(config.w_path))
    patterns = []
    seen: dict[str, int] = {}
    for path in config.pattern_paths:
        stem = Path(path).stem
        if stem in seen:
            seen[stem] += 1
            stem = f"{stem}.{seen[stem]}"
        else:
            seen[stem] = 0
        patterns.append((stem, parse_hypergraph(_read(path))))
    rows, _ = convergence_table(
        w, patterns, config.ns, config.reps, config.seed,
        budget=config.budget, threads=_threads(),
    )
    _write_csv(config.out, CONVERGENCE_HEADER, rows)
    return 0


def cmd_experiment_regularity(args) -> int:
    config = ExperimentConfig(
        kind="regularity",
        w_path=args.w,
        ns=(args.n,),
        seed=args.seed,
        epsilon=args.eps,
        resolution=args.l,
        samples=args.M,
        out=args.out,
    )
    w = parse_hypergraphon(_read(config.w_path))
    l = config.resolution if config.resolution is not None else w.resolution
    grid = _parse_grid(args.grid)
    rows, _ = regularity_table(w, args.n, l, config.epsilon, config.samples, config.seed, grid)
    _write_csv(config.out, REGULARITY_HEADER, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperlim",
        description="Finite-scale hypergraph limit computations: densities, "
        "sampling, partitions, removal.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", help="exact homomorphism count and density")
    p.add_argument("pattern", help="HG file for the pattern K")
    p.add_argument("host", help="HG file for the host H")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("density", help="density of a pattern in a step hypergraphon")
    p.add_argument("pattern", help="HG file for the pattern K")
    p.add_argument("w", help="HGON file for W")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=100_000, help="mc sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**6, help="max exact grid size")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sample", help="draw a W-random hypergraph")
    p.add_argument("w", help="HGON file for an indicator W")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write HG here instead of stdout")
    p.add_argument("--latents", help="also write the LAT file here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cells", help="cell sizes and densities of a hyperpartition")
    p.add_argument("host", help="HG file for H")
    p.add_argument("partition", help="HP file for the hyperpartition")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_cells)

    p = sub.add_parser("regularity", help="sampled regularity check of one hypergraph")
    p.add_argument("host", help="HG file for G")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--M", type=int, default=200, help="number of sampled cylinders")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default="0.25,0.5,0.75", help="side density grid")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_regularity)

    p = sub.add_parser("removal", help="hit every pattern image and verify")
    p.add_argument("pattern", help="HG file for K")
    p.add_argument("host", help="HG file for H")
    p.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    p.add_argument("--cap", type=int, default=10**6, help="max distinct images")
    p.add_argument("--budget", type=int, default=24, help="exact-mode candidate edge budget")
    p.add_argument("--id", help="instance id for the CSV (default: host file stem)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_removal)

    exp = sub.add_parser("experiment", help="headline experiments")
    esub = exp.add_subparsers(dest="experiment", required=True)

    p = esub.add_parser("convergence", help="t(K, sample) vs exact t(K, W) over n")
    p.add_argument("w", help="HGON file for an indicator W")
    p.add_argument("patterns", nargs="+", help="HG files for the patterns K")
    p.add_argument("--ns", default="20,40,80", help="comma-separated sample sizes")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**6, help="max exact grid size")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_experiment_convergence)

    p = esub.add_parser("regularity", help="latent-partition diagnostics of one W-sample")
    p.add_argument("w", help="HGON file for an indicator W")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--l", type=int, default=None, help="partition resolution (default: W's)")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--M", type=int, default=50, help="sampled cylinders per level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default="0.25,0.5,0.75", help="side density grid")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_experiment_regularity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
