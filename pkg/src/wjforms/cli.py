"""Command-line driver: reproduce the dimension/bound tables as CSV and
static SVG scatter plots, with a disk cache for basis expansions.

Every command writes deterministic CSV (stable row order, integers plain,
rationals as p/q) to --output or stdout.  Exit status: 0 on success, 1 on a
domain error such as an insufficient expansion order (the message names the
required value), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from wjforms import forms, polarity, slowgrowth, thetaquot
from wjforms.qseries import BeyondTruncation, QSeriesError


@dataclass
class RunConfig:
    command: str
    m: int | None = None
    m_max: int | None = None
    a: int = 0
    b: int | None = None
    order: int | None = None
    n_max: int = 3
    l_max: int | None = None
    quotient_factors: int = 5
    shift: int = 0
    twist: int = 0
    output: str | None = None
    out_dir: str = "figures"
    cache_dir: str | None = None
    list_specs: bool = False
    rows: list = field(default_factory=list)


class DomainError(Exception):
    pass


def _check_order(given: int | None, needed: int) -> int:
    if given is None:
        return needed
    if given < needed:
        raise DomainError(f"order {given} is insufficient; need at least {needed}")
    return given


def _emit_csv(config: RunConfig, header: list[str], rows: list[list]) -> None:
    def fmt(x) -> str:
        if isinstance(x, Fraction):
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(x)

    text = ",".join(header) + "\n"
    text += "".join(",".join(fmt(x) for x in row) + "\n" for row in rows)
    if config.output:
        with open(config.output, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommand implementations ----------------------------------------------


def cmd_basis(cfg: RunConfig) -> None:
    order = cfg.order if cfg.order is not None else polarity.min_polar_order(cfg.m)
    basis = forms.weight0_basis(cfg.m, order, cfg.cache_dir)
    rows = []
    for (a, b, c), form in basis:
        for (n, l), coeff in sorted(form.series.terms.items()):
            rows.append([a, b, c, n, l, coeff])
    _emit_csv(cfg, ["alpha", "beta", "gamma", "n", "l", "c"], rows)


def cmd_polar(cfg: RunConfig) -> None:
    rows = [[t.n, t.l, t.polarity] for t in polarity.enumerate_polar_terms(cfg.m)]
    _emit_csv(cfg, ["n", "l", "polarity"], rows)


def cmd_pm(cfg: RunConfig) -> None:
    ms = [cfg.m] if cfg.m else list(range(1, cfg.m_max + 1))
    rows = []
    for m in ms:
        order = _check_order(cfg.order, polarity.min_polar_order(m))
        rows.append([m, polarity.min_max_polarity(m, order, cfg.cache_dir)])
    _emit_csv(cfg, ["m", "p"], rows)


def cmd_pminus(cfg: RunConfig) -> None:
    rows = [[m, polarity.polarity_lower_bound(m)] for m in range(1, cfg.m_max + 1)]
    _emit_csv(cfg, ["m", "p_minus"], rows)


def cmd_pplus(cfg: RunConfig) -> None:
    rows = [[m, polarity.polarity_upper_bound(m)] for m in range(1, cfg.m_max + 1)]
    _emit_csv(cfg, ["m", "p_plus"], rows)


def cmd_jminus(cfg: RunConfig) -> None:
    rows = []
    for m in range(1, cfg.m_max + 1):
        per_b = [(slowgrowth.slow_dim_lower_bound(m, b), b) for b in range(1, isqrt(m) + 1)]
        best, best_b = max(per_b)
        rows.append([m, best, best_b])
    _emit_csv(cfg, ["m", "j_minus", "best_b"], rows)


def cmd_dims(cfg: RunConfig) -> None:
    ms = [cfg.m] if cfg.m else list(range(1, cfg.m_max + 1))
    rows = []
    for m in ms:
        bs = [cfg.b] if cfg.b else list(range(1, isqrt(m) + 1))
        order = _check_order(cfg.order, polarity.min_polar_order(m))
        for b in bs:
            dim = slowgrowth.slow_space_dimension(m, b, order, cfg.cache_dir)
            hat = (
                slowgrowth.has_unit_anchor_form(m, 0, b, order, cfg.cache_dir)
                if dim
                else False
            )
            rows.append([m, b, dim, int(hat)])
    _emit_csv(cfg, ["m", "b", "dim", "hat_nonempty"], rows)


def _leading_polar_scale(form) -> int:
    """Coefficient at the canonically first most-polar term, the reference
    normalization for a one-dimensional space (for the index-6 slow
    generator this is c(0,1) = 1)."""
    best = None
    for t in polarity.enumerate_polar_terms(form.index_m):
        c = form.coeff(t.n, t.l)
        if c and (best is None or (-t.polarity, t.n, t.l) < best[0]):
            best = ((-t.polarity, t.n, t.l), c)
    if best is None:
        raise DomainError("the generator has no polar term to normalize by")
    return best[1]


def _canonical_generator(cfg: RunConfig, order: int):
    """The slow generator about the anchor, with its normalizing scale."""
    m, a, b = cfg.m, cfg.a, cfg.b
    anchor = slowgrowth.PolarAnchor(m, a, b)
    if a == 0:
        vectors = slowgrowth.slow_space_vectors(m, b, order, cfg.cache_dir)
    else:
        vectors = slowgrowth.polarity_capped_vectors(m, anchor.polarity, order, cfg.cache_dir)
    if len(vectors) != 1:
        raise DomainError(
            f"the space about q^{a} y^{b} at index {m} has dimension "
            f"{len(vectors)}, not 1; use classify for multi-dimensional spaces"
        )
    combo = forms.combine_basis(m, order, vectors[0], cfg.cache_dir)
    return combo, _leading_polar_scale(combo)


def _anchored_generator(cfg: RunConfig, points) -> tuple[list[Fraction], int]:
    """Anchored sums of the canonical slow generator, as exact rationals."""
    anchor = slowgrowth.PolarAnchor(cfg.m, cfg.a, cfg.b)
    needed = max(
        slowgrowth.required_order(anchor, points), polarity.min_polar_order(cfg.m)
    )
    order = _check_order(cfg.order, needed)
    combo, scale = _canonical_generator(cfg, order)
    cf = combo.to_coefficient_function()
    sums = [
        Fraction(slowgrowth.anchor_sum(cf, anchor, n, l), scale) for (n, l) in points
    ]
    return sums, order


def cmd_f(cfg: RunConfig) -> None:
    l_max = cfg.l_max if cfg.l_max is not None else 2 * cfg.m
    points = slowgrowth.grid_points(cfg.n_max, l_max)
    sums, _ = _anchored_generator(cfg, points)
    rows = [[n, l, v] for (n, l), v in zip(points, sums)]
    _emit_csv(cfg, ["n", "l", "f"], rows)


def cmd_classify(cfg: RunConfig) -> None:
    anchor = slowgrowth.PolarAnchor(cfg.m, cfg.a, cfg.b)
    dim, samples = slowgrowth.conjectured_slow_dimension(
        cfg.m,
        cfg.a,
        cfg.b,
        n_max=cfg.n_max,
        l_max=cfg.l_max,
        order=cfg.order,
        cache_dir=cfg.cache_dir,
    )
    labels = ";".join(s.classification.value for s in samples) or "empty"
    _emit_csv(
        cfg,
        ["m", "a", "b", "polarity", "dim", "classes"],
        [[cfg.m, cfg.a, cfg.b, anchor.polarity, dim, labels]],
    )


def cmd_chi(cfg: RunConfig) -> None:
    m, b = cfg.m, cfg.b
    order = _check_order(cfg.order, polarity.min_polar_order(m) + 2)
    vectors = slowgrowth.slow_space_vectors(m, b, order, cfg.cache_dir)
    if len(vectors) == 1:
        form, scale = _canonical_generator(cfg, order)
    else:
        # no canonical slow generator: specialize the first basis monomial
        form = forms.weight0_basis(m, order, cfg.cache_dir)[0][1]
        scale = 1
    chi = slowgrowth.torsion_specialization(form, b, cfg.shift, cfg.twist)
    rows = []
    for qn in sorted(chi.terms):
        rows.append([qn, chi.q_den, *(Fraction(v, scale) for v in chi.terms[qn])])
    _emit_csv(cfg, ["exp_num", "exp_den", *[f"x{i}" for i in range(b)]], rows)


def cmd_quotients(cfg: RunConfig) -> None:
    ms = [cfg.m] if cfg.m else list(range(1, cfg.m_max + 1))
    if cfg.list_specs:
        rows = []
        for m in ms:
            bs = [cfg.b] if cfg.b else list(range(1, isqrt(m) + 1))
            for b in bs:
                for spec in thetaquot.enumerate_slow_quotients(m, b, cfg.quotient_factors):
                    rows.append(
                        [m, b, "+".join(map(str, spec.nums)), "+".join(map(str, spec.dens))]
                    )
        _emit_csv(cfg, ["m", "b", "nums", "dens"], rows)
        return
    rows = []
    for m in ms:
        bs = [cfg.b] if cfg.b else list(range(1, isqrt(m) + 1))
        order = _check_order(cfg.order, polarity.min_polar_order(m) + 1)
        for b in bs:
            specs = thetaquot.enumerate_slow_quotients(m, b, cfg.quotient_factors)
            dim_theta = thetaquot.span_dimension(specs, order)
            dim_slow = slowgrowth.slow_space_dimension(m, b, order, cfg.cache_dir)
            rows.append([m, b, dim_slow, dim_theta])
    _emit_csv(cfg, ["m", "b", "dim_slow", "dim_theta"], rows)


# -- figures -------------------------------------------------------------------


def _svg_scatter(path: str, title: str, points: list[tuple[int, int]]) -> None:
    """Minimal static scatter plot; integer-only geometry for determinism."""
    width, height, margin = 640, 400, 48
    xs = [p[0] for p in points] or [0]
    ys = [p[1] for p in points] or [0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(min(ys), 0), max(ys)
    x_span = max(x_hi - x_lo, 1)
    y_span = max(y_hi - y_lo, 1)

    def sx(x: int) -> int:
        return margin + (x - x_lo) * (width - 2 * margin) // x_span

    def sy(y: int) -> int:
        return height - margin - (y - y_lo) * (height - 2 * margin) // y_span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 16}" font-size="10">{x_lo}</text>',
        f'<text x="{width - margin}" y="{height - margin + 16}" text-anchor="end" '
        f'font-size="10">{x_hi}</text>',
        f'<text x="{margin - 4}" y="{sy(y_hi) + 4}" text-anchor="end" font-size="10">{y_hi}</text>',
        f'<text x="{margin - 4}" y="{sy(y_lo) + 4}" text-anchor="end" font-size="10">{y_lo}</text>',
    ]
    for (x, y) in points:
        parts.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="2" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_figures(cfg: RunConfig) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    m_exact = cfg.m_max or 30
    pm_points = [
        (m, polarity.min_max_polarity(m, None, cfg.cache_dir)) for m in range(1, m_exact + 1)
    ]
    _svg_scatter(
        os.path.join(cfg.out_dir, "min_max_polarity.svg"),
        "smallest maximal polarity of a nonzero form",
        pm_points,
    )
    _svg_scatter(
        os.path.join(cfg.out_dir, "polarity_upper_bound.svg"),
        "counting upper bound on the minimal maximal polarity",
        [(m, polarity.polarity_upper_bound(m)) for m in range(1, 1001)],
    )
    _svg_scatter(
        os.path.join(cfg.out_dir, "slow_dim_lower_bound.svg"),
        "best lower bound on the slow-space dimension",
        [
            (m, max(slowgrowth.slow_dim_lower_bound(m, b) for b in range(1, isqrt(m) + 1)))
            for m in range(2, 201)
        ],
    )
    dims_points = []
    for m in range(1, m_exact + 1):
        best = max(
            slowgrowth.slow_space_dimension(m, b, None, cfg.cache_dir)
            for b in range(1, isqrt(m) + 1)
        )
        dims_points.append((m, best))
    _svg_scatter(
        os.path.join(cfg.out_dir, "slow_dimensions.svg"),
        "largest slow-space dimension over anchors",
        dims_points,
    )
    sys.stdout.write(f"wrote 4 figures to {cfg.out_dir}\n")


# -- argument parsing ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wjforms",
        description="Exact computations with weight-0 weak Jacobi forms: "
        "basis expansions, polarity statistics, slow-growth dimensions, "
        "anchored coefficient sums, and theta quotients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, m_required=False, has_m_max=False):
        if has_m_max:
            p.add_argument("--m-max", type=int, help="compute for 1..m-max")
            p.add_argument("--m", type=int, help="single index instead of a range")
        else:
            p.add_argument("--m", type=int, required=m_required, help="form index")
        p.add_argument("--order", type=int, help="expansion order override")
        p.add_argument("--output", help="CSV output path (default stdout)")
        p.add_argument(
            "--cache-dir",
            default=os.environ.get("WJFORMS_CACHE_DIR"),
            help="basis expansion cache directory (env WJFORMS_CACHE_DIR)",
        )

    p = sub.add_parser("basis", help="expanded basis monomials of one index")
    common(p, m_required=True)

    p = sub.add_parser("polar", help="polar terms of one index")
    common(p, m_required=True)

    p = sub.add_parser("pm", help="exact smallest maximal polarity")
    common(p, has_m_max=True)

    p = sub.add_parser("pminus", help="lower bound ceil(m/6)")
    common(p, has_m_max=True)

    p = sub.add_parser("pplus", help="counting upper bound")
    common(p, has_m_max=True)

    p = sub.add_parser("jminus", help="slow-space dimension lower bounds")
    common(p, has_m_max=True)

    p = sub.add_parser("dims", help="slow-space dimensions and unit-anchor flags")
    common(p, has_m_max=True)
    p.add_argument("--b", type=int, help="single anchor power")

    p = sub.add_parser("f", help="anchored coefficient sums of the slow generator")
    common(p, m_required=True)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--l-max", type=int)

    p = sub.add_parser("classify", help="conjectural slow dimension about q^a y^b")
    common(p, m_required=True)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--l-max", type=int)

    p = sub.add_parser("chi", help="torus-point specialization of the slow generator")
    common(p, m_required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--twist", type=int, default=0)

    p = sub.add_parser("quotients", help="slow theta quotients and span dimensions")
    common(p, has_m_max=True)
    p.add_argument("--b", type=int, help="single anchor power")
    p.add_argument("--n-max", type=int, default=5, dest="quotient_factors",
                   help="maximum number of quotient factors")
    p.add_argument("--specs", action="store_true", dest="list_specs",
                   help="list the specs instead of dimensions")

    p = sub.add_parser("figures", help="write SVG scatter plots")
    p.add_argument("--m-max", type=int, help="range for the exact computations")
    p.add_argument("--out-dir", default="figures")
    p.add_argument(
        "--cache-dir",
        default=os.environ.get("WJFORMS_CACHE_DIR"),
        help="basis expansion cache directory (env WJFORMS_CACHE_DIR)",
    )
    return parser


_HANDLERS = {
    "basis": cmd_basis,
    "polar": cmd_polar,
    "pm": cmd_pm,
    "pminus": cmd_pminus,
    "pplus": cmd_pplus,
    "jminus": cmd_jminus,
    "dims": cmd_dims,
    "f": cmd_f,
    "classify": cmd_classify,
    "chi": cmd_chi,
    "quotients": cmd_quotients,
    "figures": cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(command=args.command)
    for name in vars(args):
        if hasattr(cfg, name):
            setattr(cfg, name, getattr(args, name))
    if cfg.command in ("pm", "pminus", "pplus", "jminus", "dims", "quotients"):
        if cfg.m is None and cfg.m_max is None:
            parser.error(f"{cfg.command} needs --m or --m-max")
    try:
        _HANDLERS[cfg.command](cfg)
    except (DomainError, QSeriesError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
