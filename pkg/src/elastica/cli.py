"""Command-line front end.

Subcommands: constants, sample, energy, liyau, minimize, integrate, leafed,
classify.  Every run echoes its resolved configuration to stderr (suppress
with --quiet); the artifact goes to --out or stdout.  CSV carries floats at
17 significant digits (lossless round-trip), SVG at 6.

Exit codes: 0 success (and, for liyau, bound satisfied); 1 internal error or
violated bound; 2 input error; 3 infeasible construction.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .curves import (
    PlanarElastica,
    build_leafed,
    classify_closed,
    eval_k,
    eval_planar,
    figure_eight_modulus,
    leaf_spread_angle,
    sample_leafed,
    varpi_star,
)
from .discrete import (
    DiscreteCurve,
    curve_to_csv,
    liyau_check,
    load_curve_csv,
    normalized_energy,
)
from .elliptic import comp_E, comp_K
from .errors import DomainError, InfeasibleError, StepSizeError
from .minimize import (
    ClampedProblem,
    MinimizeOptions,
    PinnedProblem,
    minimize_clamped,
    minimize_pinned,
)
from .odeint import ElasticaState, integrate_elastica

__all__ = ["main"]

_FORMATS = {
    "constants": ("text", "json"),
    "sample": ("csv", "svg"),
    "energy": ("json", "text"),
    "liyau": ("json",),
    "minimize": ("csv",),
    "integrate": ("csv",),
    "leafed": ("csv", "svg"),
    "classify": ("json",),
}

# canonical curvature periods in arclength (aperiodic families use --range)
_PERIODS = {"circular": lambda m: 2.0 * math.pi,
            "wavelike": lambda m: 4.0 * comp_K(m),
            "orbitlike": lambda m: 2.0 * comp_K(m)}


def _g17(v: float) -> str:
    return f"{v:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _echo(args: argparse.Namespace, **extra) -> None:
    if args.quiet:
        return
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg.update(extra)
    print("config: " + json.dumps(cfg, sort_keys=True, default=str), file=sys.stderr)


def _note(args: argparse.Namespace, label: str, payload: dict) -> None:
    if not args.quiet:
        print(f"{label}: " + json.dumps(payload, sort_keys=True), file=sys.stderr)


def _svg_polyline(xy: np.ndarray, size: int = 512, margin: int = 16) -> str:
    """Single-polyline SVG with the curve autoscaled to fill a unit box."""
    lo = xy.min(axis=0)
    span = float(np.max(xy.max(axis=0) - lo))
    if span == 0.0:
        span = 1.0
    scale = (size - 2 * margin) / span
    pts = " ".join(
        f"{margin + (x - lo[0]) * scale:.6g},{size - margin - (y - lo[1]) * scale:.6g}"
        for x, y in xy
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'  <rect width="{size}" height="{size}" fill="white"/>\n'
        f'  <polyline points="{pts}" fill="none" stroke="black" stroke-width="1"/>\n'
        f"</svg>\n"
    )


def _read_kv(path: str) -> dict[str, str]:
    """key = value per line; '#' starts a comment; later keys win."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _vec(text: str, key: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise DomainError(f"{key}: could not parse vector from {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands

def cmd_constants(args) -> int:
    m = figure_eight_modulus()
    fields = [
        ("m_star", m),
        ("varpi_star", varpi_star()),
        ("psi", leaf_spread_angle()),
        ("K_mstar", comp_K(m)),
        ("E_mstar", comp_E(m)),
        ("four_pi_sq", 4.0 * math.pi**2),
    ]
    _echo(args)
    if args.format == "json":
        text = json.dumps({k: float(f"{v:.15g}") for k, v in fields}, indent=2) + "\n"
    else:
        text = "".join(f"{k} = {v:.15g}\n" for k, v in fields)
    _emit(text, args.out)
    return 0


def cmd_sample(args) -> int:
    e = PlanarElastica(args.family, m=args.m)  # validates family/m pairing
    if args.range is not None:
        s0, s1 = args.range
        if not s1 > s0:
            raise DomainError("--range needs A < B")
    elif args.family in _PERIODS:
        period = _PERIODS[args.family](args.m)
        s0, s1 = 0.0, args.periods * period
    else:
        s0, s1 = -8.0, 8.0  # aperiodic families: window around the loop
    _echo(args, s_range=[s0, s1])
    s = np.linspace(s0, s1, args.N + 1)
    x, y = eval_planar(e, s)
    if args.format == "svg":
        _emit(_svg_polyline(np.column_stack([x, y])), args.out)
        return 0
    k = eval_k(e, s)
    lines = ["s,x,y,k"]
    lines += [
        f"{_g17(si)},{_g17(xi)},{_g17(yi)},{_g17(ki)}" for si, xi, yi, ki in zip(s, x, y, k)
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_energy(args) -> int:
    rep = normalized_energy(load_curve_csv(args.input))
    _echo(args)
    payload = {"L": rep.L, "B": rep.B, "Bbar": rep.Bbar, "TC": rep.TC}
    if args.format == "text":
        text = "".join(f"{k} = {v:.17g}\n" for k, v in payload.items())
    else:
        text = json.dumps(payload) + "\n"
    _emit(text, args.out)
    return 0


def cmd_liyau(args) -> int:
    rep = liyau_check(load_curve_csv(args.input), eps=args.eps)
    _echo(args)
    payload = {
        "r": rep.r,
        "Bbar": rep.Bbar,
        "bound": rep.bound,
        "satisfied": rep.satisfied,
        "slack": rep.slack,
        "bound_kind": rep.bound_kind,
    }
    _emit(json.dumps(payload) + "\n", args.out)
    return 0 if rep.satisfied else 1


def _parse_problem(path: str, cli_seed: int | None):
    kv = _read_kv(path)
    known = {"P0", "P1", "V0", "V1", "L0", "N", "tol", "max_iters", "seed"}
    unknown = set(kv) - known
    if unknown:
        raise DomainError(f"unknown problem keys: {sorted(unknown)}")
    for key in ("P0", "P1", "L0", "N"):
        if key not in kv:
            raise DomainError(f"problem file needs {key}")
    P0, P1 = _vec(kv["P0"], "P0"), _vec(kv["P1"], "P1")
    L0, N = float(kv["L0"]), int(kv["N"])
    if ("V0" in kv) != ("V1" in kv):
        raise DomainError("clamped problems need both V0 and V1")
    if "V0" in kv:
        problem = ClampedProblem(P0, P1, L0, N, _vec(kv["V0"], "V0"), _vec(kv["V1"], "V1"))
    else:
        problem = PinnedProblem(P0, P1, L0, N)
    seed = int(kv["seed"]) if "seed" in kv else cli_seed
    opts = MinimizeOptions(
        tol=float(kv["tol"]) if "tol" in kv else None,
        max_iters=int(kv["max_iters"]) if "max_iters" in kv else 2000,
        seed=seed,
    )
    return problem, opts


def _run_minimize(problem, opts):
    solver = minimize_clamped if isinstance(problem, ClampedProblem) else minimize_pinned
    return solver(problem, opts)


def _run_minimize_seeded(payload):
    problem, opts, seed = payload
    return seed, _run_minimize(problem, MinimizeOptions(
        tol=opts.tol, max_iters=opts.max_iters, seed=seed, perturb_amp=opts.perturb_amp
    ))


def cmd_minimize(args) -> int:
    problem, opts = _parse_problem(args.problem, args.seed)
    _echo(args, problem_kind=type(problem).__name__, resolved_seed=opts.seed)
    if args.sweep is not None:
        if args.sweep < 1:
            raise DomainError("--sweep needs at least 1 seed")
        payloads = [(problem, opts, seed) for seed in range(args.sweep)]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                runs = dict(pool.map(_run_minimize_seeded, payloads))
        else:
            runs = dict(map(_run_minimize_seeded, payloads))
        for seed in sorted(runs):
            r = runs[seed]
            _note(args, f"seed {seed}", {
                "Bbar": r.Bbar, "converged": r.converged, "iterations": r.iterations,
            })
        result = min(runs.values(), key=lambda r: (not r.converged, r.Bbar))
    else:
        result = _run_minimize(problem, opts)
    _note(args, "result", {
        "B": result.B, "Bbar": result.Bbar, "grad_norm": result.grad_norm,
        "iterations": result.iterations, "converged": result.converged,
        "lambda_est": None if math.isnan(result.lambda_est) else result.lambda_est,
    })
    _emit(curve_to_csv(result.curve), args.out)
    log_path = args.log if args.log is not None else (args.out + ".log" if args.out else None)
    if log_path is not None:
        with open(log_path, "w", encoding="ascii") as fh:
            for row in result.log:
                fh.write(json.dumps(row) + "\n")
    return 0


def cmd_integrate(args) -> int:
    kv = _read_kv(args.ic)
    known = {"gamma", "d1", "d2", "d3", "lam", "s_end", "h"}
    unknown = set(kv) - known
    if unknown:
        raise DomainError(f"unknown IC keys: {sorted(unknown)}")
    missing = known - set(kv)
    if missing:
        raise DomainError(f"IC file needs {sorted(missing)}")
    state = ElasticaState(*(_vec(kv[k], k) for k in ("gamma", "d1", "d2", "d3")))
    lam, s_end, h = float(kv["lam"]), float(kv["s_end"]), float(kv["h"])
    _echo(args, lam=lam, s_end=s_end, h=h, dim=state.dim)
    t = integrate_elastica(state, lam, s_end, h)
    g = t.data[:, 0, :]
    kap = np.linalg.norm(t.data[:, 2, :], axis=1)
    if t.dim == 3:
        det = np.linalg.det(t.data[:, 1:4, :])
        z = g[:, 2]
    else:  # planar trajectories: z = 0 and det(d1,d2,d3) = 0 identically
        det = np.zeros(t.n_states)
        z = np.zeros(t.n_states)
    lines = ["s,x,y,z,kappa,det"]
    lines += [
        ",".join(_g17(v) for v in row)
        for row in zip(t.s, g[:, 0], g[:, 1], z, kap, det)
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_leafed(args) -> int:
    if args.dim == 2 and args.r % 2:
        raise InfeasibleError("planar odd r")
    le = build_leafed(args.r, args.dim)
    c = sample_leafed(le, args.N)
    _echo(args, total_vertices=len(c.vertices))
    if args.format == "svg":
        _emit(_svg_polyline(c.vertices[:, :2]), args.out)
    else:
        _emit(curve_to_csv(c), args.out)
    return 0


def cmd_classify(args) -> int:
    c = load_curve_csv(args.input)
    if c.dim == 3:
        # trajectory CSVs pad planar data with a z column; flatten it when it
        # carries no geometry (classification itself is a planar notion)
        z = c.vertices[:, 2]
        scale = max(float(np.sum(np.linalg.norm(np.diff(c.vertices, axis=0), axis=1))), 1.0)
        if np.max(np.abs(z - z[0])) <= 1e-9 * scale:
            c = DiscreteCurve(c.vertices[:, :2], closed=c.closed)
    res = classify_closed(c, tol=args.tol)
    _echo(args)
    payload = {"kind": res.kind, "fold": res.fold, "residual": res.residual}
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write the artifact here (default stdout)")
    common.add_argument("--format", help="output format (subcommand-specific; see below)")
    common.add_argument("--seed", type=int, help="PRNG seed where applicable")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for seed sweeps")
    common.add_argument("--quiet", action="store_true", help="suppress config/result echo")

    p = argparse.ArgumentParser(
        prog="elastica",
        description="Elastica curves: constants, sampling, energies, bounds, minimization.",
    )
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    sp = sub.add_parser("constants", parents=[common], help="print the leaf/figure-eight constants")
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("sample", parents=[common], help="sample a planar elastica: s,x,y,k CSV or SVG")
    sp.add_argument("--family", required=True,
                    choices=("linear", "circular", "wavelike", "orbitlike", "borderline"))
    sp.add_argument("--m", type=float, help="elliptic parameter m = k^2 (wavelike/orbitlike)")
    sp.add_argument("--N", type=int, default=512, help="sample count (emits N+1 rows)")
    sp.add_argument("--periods", type=float, default=1.0,
                    help="curvature periods to cover (periodic families)")
    sp.add_argument("--range", type=float, nargs=2, metavar=("A", "B"),
                    help="explicit arclength window (overrides --periods)")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("energy", parents=[common], help="L, B, Bbar, TC of a curve CSV")
    sp.add_argument("input", help="curve CSV (header s,x,y[,z], '# closed=...' marker)")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("liyau", parents=[common],
                        help="energy bound verdict for a closed curve CSV; exit 0 iff satisfied")
    sp.add_argument("input")
    sp.add_argument("--eps", type=float, help="multiplicity clustering radius (default 1e-3 L)")
    sp.set_defaults(func=cmd_liyau)

    sp = sub.add_parser("minimize", parents=[common],
                        help="solve a pinned/clamped problem file; solution CSV + JSONL log")
    sp.add_argument("problem", help="key=value file: P0 P1 [V0 V1] L0 N [tol max_iters seed]")
    sp.add_argument("--log", metavar="PATH",
                    help="convergence log path (default: OUT.log when --out is set)")
    sp.add_argument("--sweep", type=int, metavar="K",
                    help="run seeds 0..K-1 and keep the best result")
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("integrate", parents=[common],
                        help="integrate the elastica ODE from an IC file; s,x,y,z,kappa,det CSV")
    sp.add_argument("ic", help="key=value file: gamma d1 d2 d3 lam s_end h")
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("leafed", parents=[common], help="construct a closed r-leafed elastica")
    sp.add_argument("--r", type=int, required=True, help="leaf count (multiplicity)")
    sp.add_argument("--dim", type=int, required=True, choices=(2, 3))
    sp.add_argument("--N", type=int, default=512, help="vertices per leaf")
    sp.set_defaults(func=cmd_leafed)

    sp = sub.add_parser("classify", parents=[common],
                        help="classify a closed planar curve CSV as circle/figure-eight/other")
    sp.add_argument("input")
    sp.add_argument("--tol", type=float, default=1e-3, help="relative rms curvature misfit")
    sp.set_defaults(func=cmd_classify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    allowed = _FORMATS[args.subcommand]
    if args.format is None:
        args.format = allowed[0]
    elif args.format not in allowed:
        parser.error(f"{args.subcommand} supports --format {{{','.join(allowed)}}}")
    try:
        return args.func(args)
    except BrokenPipeError:
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (DomainError, StepSizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
