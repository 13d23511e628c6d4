"""Command-line front end.

    protoderiv plot bumps --n-range 1..3 --samples 257
    protoderiv verify lemma1 --pairs 100000 --seed 0
    protoderiv experiment graphical-limit --alpha 0.485 --k 1..30
    protoderiv experiment resolvent-dd --spec spec.json --y '' --h 1:1 --k 4..40

Global flags ``--seed``, ``--out DIR``, ``--format csv|json`` and
``--config path.json`` may appear before or after the subcommand.  Config
file values fill in whatever was not given explicitly on the command line.
Exit status is 1 iff a summary check fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bumps, limits, resolvent
from .operators import (ALPHA_MAX, LIP_T, OperatorSpec, eval_T, lipschitz_quotient,
                        monotonicity_gap, random_ball_points, random_pairs, saturating_pair)
from .report import ExperimentReport
from .seqspace import SparseVec, basis, norm, norm_sq, parse_vec

DEFAULT_ALPHAS = (0.0, 0.1, -0.1, ALPHA_MAX, -ALPHA_MAX)


def parse_range(text: str) -> tuple[int, int]:
    """``'4..40'`` -> ``(4, 40)``; a single integer is a one-point range."""
    lo, sep, hi = str(text).partition("..")
    lo_i = int(lo)
    hi_i = int(hi) if sep else lo_i
    if hi_i < lo_i:
        raise ValueError(f"empty range {text!r}")
    return lo_i, hi_i


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def ulps_apart(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / math.ulp(max(abs(a), abs(b)))


# -- plot bumps --------------------------------------------------------------

def cmd_plot_bumps(n_range: tuple[int, int] = (1, 3), samples: int = 257,
                   t_min: float = 0.0, t_max: float | None = None) -> tuple[ExperimentReport, str]:
    """Sample f_a..f_b on a uniform grid; return the report and an SVG plot."""
    a, b = n_range
    if a < 1 or b < a:
        raise ValueError(f"invalid bump range {a}..{b}")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if t_max is None:
        t_max = math.ldexp(1.0, -a + 2)
    if not 0.0 <= t_min < t_max:
        raise ValueError(f"invalid t interval [{t_min}, {t_max}]")
    ns = list(range(a, b + 1))
    config = {"n_range": [a, b], "samples": samples, "t_min": t_min, "t_max": t_max}
    rep = ExperimentReport("plot bumps", config)

    span = t_max - t_min
    ts = [t_min + span * j / (samples - 1) for j in range(samples)]
    for t in ts:
        row = {"t": t}
        for n in ns:
            row[f"f_{n}"] = bumps.f(n, t)
        rep.rows.append(row)

    knots = {}
    for n in ns:
        bp = bumps.breakpoints(n)
        knots[n] = [(t, bumps.f(n, t)) for t in bp]
    rep.extra["breakpoints"] = {str(n): [list(p) for p in pts] for n, pts in knots.items()}

    expected_ok = all(
        pts == [(bp[0], 0.0), (bp[1], bp[1]), (bp[2], bp[1]), (bp[3], 0.0)]
        for n, pts in knots.items() for bp in [bumps.breakpoints(n)]
    )
    rep.check("breakpoint_values", "bumps.BumpBranch continuity", expected_ok,
              "exact" if expected_ok else "mismatch")
    peak_ok = all(row[f"f_{n}"] <= math.ldexp(1.0, -n) for row in rep.rows for n in ns)
    rep.check("range", "bumps.f in [0, 2^-n]", peak_ok, peak_ok)
    worst = 0.0
    for r0, r1 in zip(rep.rows, rep.rows[1:]):
        dt = r1["t"] - r0["t"]
        for n in ns:
            worst = max(worst, abs(r1[f"f_{n}"] - r0[f"f_{n}"]) / dt)
    rep.check("lipschitz_2", "bumps Lipschitz-2 bound", worst <= 2.0, worst, 2.0)
    return rep, render_svg(knots, t_min, t_max)


def render_svg(knots: dict[int, list[tuple[float, float]]], t_min: float, t_max: float,
               width: int = 640, height: int = 320) -> str:
    """Polylines through the exact breakpoints of each f_n, clipped to [t_min, t_max]."""
    colors = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
    peak = max(v for pts in knots.values() for _, v in pts) or 1.0
    pad = 20

    def sx(t):
        return pad + (width - 2 * pad) * (t - t_min) / (t_max - t_min)

    def sy(v):
        return height - pad - (height - 2 * pad) * v / peak

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for j, (n, pts) in enumerate(sorted(knots.items())):
        path = [(t_min, bumps.f(n, t_min))] + [p for p in pts if t_min < p[0] < t_max]
        path.append((t_max, bumps.f(n, t_max)))
        coords = " ".join(f"{sx(t):.3f},{sy(v):.3f}" for t, v in path)
        color = colors[j % len(colors)]
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        lines.append(f'<text x="{width - 4 * pad}" y="{pad + 14 * (j + 1)}" fill="{color}" '
                     f'font-size="12">f_{n}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -- verify lemma1 -----------------------------------------------------------

def cmd_verify_lemma1(pairs: int = 100_000, seed: int = 0,
                      alphas: tuple[float, ...] = DEFAULT_ALPHAS) -> ExperimentReport:
    """Sampled certification of the Lipschitz and coercivity bounds for T and Id + alpha*T."""
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    alphas = [float(a) for a in alphas]
    rep = ExperimentReport("verify lemma1", {"pairs": pairs, "seed": seed, "alphas": alphas})
    rng = np.random.default_rng(seed)
    counter = OperatorSpec.counter_t()
    sample = random_pairs(rng, pairs)

    max_q = max(lipschitz_quotient(counter, x, y) for x, y in sample)
    bound = LIP_T + 1e-9
    c = rep.check("lipschitz_max", "operators.lipschitz_quotient <= sqrt(17)/2",
                  max_q <= bound, max_q, bound)
    rep.rows.append({"check": c.name, "alpha": "", "measured": max_q, "threshold": bound})

    x, y = saturating_pair()
    sat = lipschitz_quotient(counter, x, y)
    du = ulps_apart(sat, LIP_T)
    c = rep.check("lipschitz_saturation", "operators radial pair attains sqrt(17)/2",
                  du <= 4, sat, f"{LIP_T!r} +- 4 ulps")
    rep.rows.append({"check": c.name, "alpha": "", "measured": sat, "threshold": LIP_T})

    ball = random_ball_points(rng, pairs)
    ball.append(basis(1))
    ratio = min(norm(eval_T(p)) / (norm(p) / 2.0) for p in ball)
    c = rep.check("lower_bound_ratio", "operators ||T(x)|| >= ||x||/2 on the unit ball",
                  ratio >= 1.0 - 1e-12, ratio, 1.0 - 1e-12)
    rep.rows.append({"check": c.name, "alpha": "", "measured": ratio, "threshold": 1.0 - 1e-12})

    for a in alphas:
        spec = OperatorSpec.b_alpha(a)
        coercive = 1.0 - abs(a) * LIP_T
        slack = min(monotonicity_gap(spec, x, y) - coercive * norm_sq(x - y) for x, y in sample)
        c = rep.check(f"monotonicity_alpha={a!r}", "operators.monotonicity_gap lower bound",
                      slack >= -1e-12, slack, -1e-12)
        rep.rows.append({"check": c.name, "alpha": a, "measured": slack, "threshold": -1e-12})
    return rep


# -- graphical limit ---------------------------------------------------------

def cmd_graphical_limit(alpha: float = ALPHA_MAX, k_range: tuple[int, int] = (1, 30),
                        radii: tuple[float, ...] = (1.0, 0.5), dirs: int = 64,
                        seed: int = 0) -> ExperimentReport:
    """Residual lower bound and support escape for B_m, m = 2^k."""
    k_lo, k_hi = k_range
    ks = list(range(k_lo, k_hi + 1))
    ms = [math.ldexp(1.0, k) for k in ks]
    config = {"alpha": alpha, "k_range": [k_lo, k_hi], "radii": list(radii), "dirs": dirs, "seed": seed}
    rep = ExperimentReport("experiment graphical-limit", config)
    diags = limits.outer_limit_diagnostic(alpha, ms, radii, dirs, seed)
    for diag in diags:
        for d in diag.points:
            rep.rows.append({
                "m": diag.m, "x_norm": d.x_norm, "residual_norm": d.residual_norm,
                "lower_bound": d.residual_lower_bound,
                "min_support_index": d.min_support_index,
                "predicted_floor": d.predicted_support_floor,
            })

    rep.check("origin_in_graph", "limits inner-limit witness (0,0) in graph(B_m)",
              all(d.contains_origin for d in diags), sum(d.contains_origin for d in diags), len(diags))
    rep.check("residual_lower_bound", "limits ||B_m(x) - x|| >= |alpha| ||x||/2",
              all(d.residual_bound_holds() for d in diags),
              min((p.residual_norm - p.residual_lower_bound for d in diags for p in d.points
                   if 0 < p.x_norm <= d.m), default=0.0), -1e-12)
    rep.check("support_floor", "limits support escape: min index >= max(1, floor)",
              all(d.support_floor_holds() for d in diags), "all points")

    e1 = basis(1)
    e1_support = [limits.min_support_index(eval_T(e1 / m)) for m in ms]
    rep.check("support_escape_e1", "limits min support of T(e1/2^k) is k",
              e1_support == ks, e1_support, ks)
    e1_resid = [norm(limits.scaled_residual(alpha, m, e1)) for m in ms]
    rep.check("residual_e1", "limits ||B_m(e1) - e1|| >= |alpha|/2",
              all(r >= abs(alpha) / 2.0 for r in e1_resid), min(e1_resid), abs(alpha) / 2.0)
    worst = 0.0
    for k in ks:
        if k + 3 > k_hi:
            break
        lhs, rhs = limits.orthogonality_defect(alpha, math.ldexp(1.0, k), math.ldexp(1.0, k + 3), e1)
        worst = max(worst, ulps_apart(lhs, rhs))
    rep.check("orthogonality", "limits disjoint-window residuals are orthogonal",
              worst <= 2, worst, 2)
    return rep


# -- resolvent dd ------------------------------------------------------------

def cmd_resolvent_dd(spec: OperatorSpec, y: SparseVec, h: SparseVec,
                     k_range: tuple[int, int] = (4, 40), quot_tol: float = 1e-9,
                     identity_tol: float = 1e-9, expect: str | None = None) -> ExperimentReport:
    """Quotient trace of J_B at y in direction h plus the finite-tau identity column."""
    k_lo, k_hi = k_range
    config = {"spec": spec.to_json_obj(), "y": y.to_json_obj(), "h": h.to_json_obj(),
              "k_range": [k_lo, k_hi], "quot_tol": quot_tol, "identity_tol": identity_tol,
              "expect": expect}
    rep = ExperimentReport("experiment resolvent-dd", config)
    trace = resolvent.dd_probe(spec, y, h, k_lo, k_hi, quot_tol=quot_tol)

    coords = sorted({i for q in trace.quotients for i in q.support()})
    window = resolvent.WINDOW
    identity_vals = []
    for j, (k, tau, q) in enumerate(zip(trace.ks, trace.tau_grid, trace.quotients)):
        row = {"k": k, "tau": tau}
        for i in coords:
            row[f"q_{i}"] = q[i]
        row["tail_spread"] = trace.window_spreads[j - window + 1] if j >= window - 1 else None
        row["identity_check"] = None
        if spec.single_valued:
            eps = min(1e-12, 1e-3 * tau * identity_tol)
            try:
                chk = resolvent.identity_parts(spec, y, h, tau, eps, rhs_eps=1e-12)
            except resolvent.ResolventError:
                pass
            else:
                row["identity_check"] = chk.discrepancy
                identity_vals.append(chk.discrepancy)
        rep.rows.append(row)

    rep.extra["verdict"] = {
        "verdict": trace.verdict,
        "tail_spread": trace.tail_spread,
        "min_window_spread": min(trace.window_spreads, default=math.nan),
        "limit": trace.limit.to_json_obj() if trace.limit is not None else None,
        "note": trace.note,
    }
    if identity_vals:
        worst = max(identity_vals)
        rep.check("identity_finite_tau", "resolvent.quotient_resolvent_identity_check",
                  worst <= identity_tol, worst, identity_tol)
    if expect is not None:
        rep.check("verdict", "resolvent.QuotientTrace verdict", trace.verdict == expect,
                  trace.verdict, expect)
    return rep


# -- argument handling -------------------------------------------------------

DEFAULTS = {
    "plot_bumps": {"n_range": "1..3", "samples": 257, "t_min": 0.0, "t_max": None},
    "verify_lemma1": {"pairs": 100_000, "alphas": None},
    "graphical_limit": {"alpha": ALPHA_MAX, "k": "1..30", "radii": "1,0.5", "dirs": 64},
    "resolvent_dd": {"spec": None, "alpha": ALPHA_MAX, "y": "", "h": "1:1", "k": "4..40",
                     "quot_tol": 1e-9, "identity_tol": 1e-9, "expect": None},
}
GLOBAL_DEFAULTS = {"seed": 0, "out": "out", "format": "csv"}


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=d)
    parser.add_argument("--out", default=d, help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default=d)
    parser.add_argument("--config", default=d, help="JSON file; values apply where no flag is given")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="protoderiv")
    _global_flags(p, suppress=False)
    groups = p.add_subparsers(dest="group", required=True)

    plot = groups.add_parser("plot").add_subparsers(dest="cmd", required=True)
    sp = plot.add_parser("bumps", help="sample f_n and draw them")
    _global_flags(sp, True)
    sp.add_argument("--n-range", dest="n_range")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--t-min", dest="t_min", type=float)
    sp.add_argument("--t-max", dest="t_max", type=float)
    sp.set_defaults(key="plot_bumps")

    verify = groups.add_parser("verify").add_subparsers(dest="cmd", required=True)
    sp = verify.add_parser("lemma1", help="sampled certification of the bounds on T and Id + alpha*T")
    _global_flags(sp, True)
    sp.add_argument("--pairs", type=int)
    sp.add_argument("--alphas", help="comma-separated alpha values")
    sp.set_defaults(key="verify_lemma1")

    exp = groups.add_parser("experiment").add_subparsers(dest="cmd", required=True)
    sp = exp.add_parser("graphical-limit", help="diagnostics for graph(B_m), m = 2^k")
    _global_flags(sp, True)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--k")
    sp.add_argument("--radii")
    sp.add_argument("--dirs", type=int)
    sp.set_defaults(key="graphical_limit")

    sp = exp.add_parser("resolvent-dd", help="directional-derivative probe of J_B")
    _global_flags(sp, True)
    sp.add_argument("--spec", help="operator JSON file or inline JSON object")
    sp.add_argument("--alpha", type=float, help="shorthand for BAlpha(alpha) when --spec is absent")
    sp.add_argument("--y")
    sp.add_argument("--h")
    sp.add_argument("--k")
    sp.add_argument("--quot-tol", dest="quot_tol", type=float)
    sp.add_argument("--identity-tol", dest="identity_tol", type=float)
    sp.add_argument("--expect", choices=("converged", "oscillating", "inconclusive"))
    sp.set_defaults(key="resolvent_dd")
    return p


def _merge(args: argparse.Namespace) -> dict:
    explicit = {k: v for k, v in vars(args).items() if v is not None}
    file_cfg = {}
    if explicit.get("config"):
        path = Path(explicit["config"])
        try:
            file_cfg = json.loads(path.read_text())
        except OSError as exc:
            raise SystemExit(f"cannot read config {path}: {exc}")
    merged = dict(GLOBAL_DEFAULTS)
    merged.update(DEFAULTS[args.key])
    merged.update({k.replace("-", "_"): v for k, v in file_cfg.items()})
    merged.update(explicit)
    return merged


def _load_spec(value) -> OperatorSpec:
    if isinstance(value, dict):
        return OperatorSpec.from_json_obj(value)
    text = str(value).strip()
    if not text.startswith("{"):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise SystemExit(f"cannot read operator spec {value}: {exc}")
    return OperatorSpec.from_json_obj(json.loads(text))


def _vec(value) -> SparseVec:
    if isinstance(value, dict):
        return SparseVec.from_json_obj(value)
    return parse_vec(str(value))


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _merge(args)
    key = args.key
    out = Path(cfg["out"])
    svg = None
    if key == "plot_bumps":
        rep, svg = cmd_plot_bumps(parse_range(cfg["n_range"]), int(cfg["samples"]),
                                  float(cfg["t_min"]),
                                  None if cfg["t_max"] is None else float(cfg["t_max"]))
    elif key == "verify_lemma1":
        alphas = DEFAULT_ALPHAS if cfg["alphas"] is None else parse_floats(cfg["alphas"])
        rep = cmd_verify_lemma1(int(cfg["pairs"]), int(cfg["seed"]), alphas)
    elif key == "graphical_limit":
        rep = cmd_graphical_limit(float(cfg["alpha"]), parse_range(cfg["k"]),
                                  parse_floats(cfg["radii"]), int(cfg["dirs"]), int(cfg["seed"]))
    else:
        spec = (_load_spec(cfg["spec"]) if cfg["spec"] is not None
                else OperatorSpec.b_alpha(float(cfg["alpha"])))
        rep = cmd_resolvent_dd(spec, _vec(cfg["y"]), _vec(cfg["h"]), parse_range(cfg["k"]),
                               float(cfg["quot_tol"]), float(cfg["identity_tol"]), cfg["expect"])
    rep.config["seed"] = int(cfg["seed"])

    try:
        written = rep.write(out, cfg["format"])
        if svg is not None:
            p = out / "plot_bumps.svg"
            p.write_text(svg)
            written.append(p)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for c in rep.summary:
        print(c.line())
    for p in written:
        print(f"wrote {p}")
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
