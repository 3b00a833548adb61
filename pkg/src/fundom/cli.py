"""Command-line entry point: fundom {trace,crit,domains,transform,render,verify}.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path

from . import store
from .config import COMMON, RunConfig, load_config, to_bool
from .errors import ConfigError, FundomError, NumericalFailure
from .funcval import FunctionId
from .geometry import Window
from .tracer import CurveKind, StepControl

log = logging.getLogger("fundom")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    """Raised by the argument parser instead of exiting, so main() owns the exit code."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # values such as "-6,4,-5,5" or "-2.5+1i" are arguments, not option names
        self._negative_number_matcher = re.compile(r"^-(\d|\.\d|i\b|inf)")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- parsing helpers

def parse_point(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j").replace("I", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_points(values) -> list:
    out = []
    for v in values:
        for part in v.split(";" if ";" in v else ","):
            if part.strip():
                out.append(parse_point(part))
    return out


def parse_window(text: str) -> Window:
    try:
        return Window.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def parse_fn(text: str) -> FunctionId:
    try:
        return FunctionId.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def parse_floats(text: str) -> list:
    out = []
    for p in text.split(","):
        p = p.strip().lower()
        if not p:
            continue
        if p.startswith("pi/"):
            out.append(math.pi / float(p[3:]))
        else:
            out.append(float("inf") if p == "inf" else float(p))
    return out


def _step_control(args) -> StepControl:
    kw = {k: getattr(args, k) for k in ("max_step", "min_step", "corrector_tol", "curvature_target", "max_points")
          if getattr(args, k, None) is not None}
    try:
        return StepControl(**kw)
    except ValueError as e:
        raise ConfigError(f"step control: {e}") from None


def _out_path(args, default_name: str) -> Path:
    return Path(args.out) if getattr(args, "out", None) else Path(args.out_dir) / default_name


def _run_config(args) -> RunConfig:
    skip = {"command", "func", "config", "seed", "threads", "out_dir", "fn", "window", "max_step", "min_step",
            "corrector_tol", "curvature_target", "max_points"}
    params = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        params[k] = v if isinstance(v, (int, float, str, bool, list)) else str(v)
    step = {k: getattr(args, k) for k in ("max_step", "min_step", "corrector_tol", "curvature_target", "max_points")
            if getattr(args, k, None) is not None}
    fn = getattr(args, "fn", None)
    win = getattr(args, "window", None)
    return RunConfig(args.command, fn.tag if fn else "", win.as_tuple() if win else (), args.seed, args.threads,
                     str(args.out_dir), step, params)


def _table(rows, header) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def _fmt_c(z: complex, digits: int = 10) -> str:
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


# ---------------------------------------------------------------- commands

def _curve_kind(args) -> CurveKind:
    if args.kind == "real-axis":
        return CurveKind.real_axis()
    if args.kind == "circle":
        if args.rho is None or args.rho <= 0:
            raise ConfigError("--kind circle needs --rho > 0")
        return CurveKind.circle(args.rho)
    if args.theta is None:
        raise ConfigError("--kind ray needs --theta")
    return CurveKind.ray(args.theta)


def _trace_components(fid, kind: CurveKind, window: Window, ctl: StepControl, grid: int):
    from .tracer.assembly import preimage_circle, preimage_ray, preimage_real_axis
    from .critpoints import crit_for
    if kind.variant == "PreimageRealAxis":
        return preimage_real_axis(fid, window, ctl, grid, crit=crit_for(fid, window))
    if kind.variant == "PreimageCircle":
        return preimage_circle(fid, kind.rho, window, ctl, grid)
    return preimage_ray(fid, kind.theta, window, ctl, grid)


def cmd_trace(args) -> int:
    if args.window is None:
        raise ConfigError("trace needs --window")
    ctl = _step_control(args)
    kind = _curve_kind(args)
    comps = _trace_components(args.fn, kind, args.window, ctl, args.grid)
    rows = [(i, c.color, c.image_interval, len(c.points), c.start.kind, c.end.kind, f"{c.arclength():.4g}",
             len(c.nodes)) for i, c in enumerate(comps)]
    print(_table(rows, ["#", "color", "image", "points", "start", "end", "length", "nodes"]))
    failures = len(getattr(comps, "failures", []))
    path = _out_path(args, f"curves_{args.fn.tag.lower()}_{args.kind}.json")
    store.save_curves(path, args.fn, list(comps), args.window,
                      {"kind": kind.to_dict(), "step_collapses": failures, "run": _run_config(args).to_dict()})
    print(f"{len(comps)} components, {failures} step collapses -> {path}")
    return EXIT_NUMERIC if failures > args.max_collapses else EXIT_OK


def cmd_crit(args) -> int:
    from . import critpoints as cp
    fid = args.fn
    if args.kind == "dzero" and fid.variant == "Gamma":
        pts = cp.gamma_crit_points(args.n if args.n is not None else 10)
    elif args.kind == "dzero" and fid.variant == "Zeta":
        if args.window is None:
            raise ConfigError("crit --fn zeta --kind dzero needs --window")
        pts = cp.zeta_prime_zeros(args.window)
    elif args.kind == "zero" and fid.variant == "Zeta":
        if args.window is not None:
            locs = cp.zeta_zeros_in_window(args.window)
            pts = [cp._make(fid, "f", z, cp.ZERO_OF_F, "") for z in locs]
        else:
            tmax = args.tmax if args.tmax is not None else 100.0
            pts = cp.zeta_trivial_zeros(args.n if args.n is not None else 10) + cp.zeta_nontrivial_zeros(tmax)
            if args.nontrivial_only:
                pts = [p for p in pts if p.location.imag > 0]
    elif args.kind == "one-point" and fid.variant == "Zeta":
        if args.window is None:
            raise ConfigError("crit --kind one-point needs --window")
        pts = cp.zeta_one_points(args.window)
    else:
        raise ConfigError(f"crit --kind {args.kind} is not available for {fid.tag}")
    from .funcval import evaluator
    ev = evaluator(fid)
    rows = []
    for p in pts:
        sign = ""
        if fid.variant == "Gamma":
            sign = "+" if ev(p.location)[0].real > 0 else "-"
        rows.append((p.label, _fmt_c(p.location, 12), f"{p.residual:.2e}", p.winding, p.simple, sign))
    print(_table(rows, ["label", "location", "residual", "winding", "simple", "sign f"]))
    nontrivial = sum(1 for p in pts if p.location.imag > 0)
    print(f"{len(pts)} points ({nontrivial} with t > 0)")
    path = _out_path(args, f"crit_{fid.tag.lower()}_{args.kind}.json")
    store.save_crit(path, fid, pts, {"run": _run_config(args).to_dict()})
    print(f"-> {path}")
    return EXIT_OK if all(p.simple for p in pts) else EXIT_VERIFY


def _build_atlas(args):
    from .acceptance import GAMMA_ATLAS_WINDOW, ZETA_ATLAS_TMAX
    from .domains import gamma_domains, zeta_domains
    ctl = _step_control(args)
    if args.fn.variant == "Gamma":
        return gamma_domains(args.window or GAMMA_ATLAS_WINDOW, ctl=ctl)
    if args.fn.variant == "Zeta":
        return zeta_domains(args.tmax if args.tmax is not None else ZETA_ATLAS_TMAX, ctl=ctl)
    raise ConfigError(f"no domain atlas for {args.fn.tag}")


def cmd_domains(args) -> int:
    from .domains import Atlas, domain_verify, zeta_strips, zeta_window
    if args.fn.variant == "Zeta" and not args.subdivide:
        from .acceptance import ZETA_ATLAS_TMAX
        t_max = args.tmax if args.tmax is not None else ZETA_ATLAS_TMAX
        strips = zeta_strips(t_max, _step_control(args))
        rows, ok = [], True
        for s in strips:
            r = s.summary()
            good = r["zeros"] == r["m"] + 1 and r["gamma_k0"] == 1
            ok &= good
            rows.append((r["k"], r["m"], r["zeros"], r["gamma_k0"], r["one_points"], r["branch_points"],
                         "ok" if good else "FAIL", " ".join(f"{t:.3f}" for t in r["zero_t"])))
        print(_table(rows, ["k", "m", "zeros", "Gamma_k0", "u", "v", "m+1", "zero heights"]))
        w = zeta_window(t_max)
        atlas = Atlas(args.fn, w, [], [c for s in strips for c in (s.lower_boundary, s.upper_boundary)],
                      strips, [], meta={"kind": "zeta-strips", "t_max": t_max})
        path = _out_path(args, f"strips_zeta_{t_max:g}.json")
        store.save_atlas(path, atlas)
        print(f"{len(strips)} strips -> {path}")
        return EXIT_OK if ok else EXIT_NUMERIC
    atlas = _build_atlas(args)
    rows, ok = [], True
    reports = {}
    for d in atlas.domains:
        r = domain_verify(d, args.n_samples, seed=args.seed)
        reports[d.label] = r.to_dict()
        ok &= r.passed
        rows.append((d.label, d.alias, f"{r.pass_rate:.3f}", r.n_targets, f"{r.max_slit_distance:.2e}",
                     f"{r.interior_max_error:.1e}", "PASS" if r.passed else "FAIL", d.slit.describe()[:60]))
    print(_table(rows, ["domain", "alias", "winding-1", "targets", "slit dist", "inverse err", "status", "slit"]))
    atlas.meta = dict(atlas.meta, verification_seed=args.seed)
    path = _out_path(args, f"atlas_{args.fn.tag.lower()}.json")
    store.save_atlas(path, atlas)
    Path(str(path) + ".verify.json").write_text(json.dumps(reports, sort_keys=True, indent=1) + "\n")
    print(f"{len(atlas.domains)} domains -> {path}")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_transform(args) -> int:
    from .covergroup import CoverGroup, GroupWord
    from .funcval import evaluator
    atlas = store.load_atlas(args.atlas) if args.atlas else _build_atlas(args)
    try:
        word = GroupWord.parse(args.word)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    points = parse_points(args.points)
    if not points:
        raise ConfigError("transform needs --points")
    group = CoverGroup(atlas)
    ev = evaluator(atlas.fid)
    rows, out = [], []
    for z in points:
        w = group.apply_word(word, z)
        dev = abs(ev(w)[0] - ev(z)[0])
        rows.append((_fmt_c(z), _leaf(atlas, z), _fmt_c(w, 14), _leaf(atlas, w), f"{dev:.2e}"))
        out.append({"input": [z.real, z.imag], "output": [w.real, w.imag], "fiber_deviation": dev})
    print(f"word {word}")
    print(_table(rows, ["z", "leaf(z)", "T(z)", "leaf(T z)", "|f(Tz)-f(z)|"]))
    if args.out:
        store.write_json(args.out, {"word": str(word), "results": out, "run": _run_config(args).to_dict()})
    return EXIT_OK


def _leaf(atlas, z) -> str:
    try:
        return atlas.locate(z)
    except FundomError as e:
        return type(e).__name__


def _scheme(args):
    from .render import ColorScheme, DEFAULT_BANDS
    if not args.bands and args.sectors is None:
        return ColorScheme()
    bands = tuple(parse_floats(args.bands)) if args.bands else DEFAULT_BANDS
    base = ColorScheme()
    palette = base.band_palette
    if len(bands) != len(palette):
        palette = tuple(palette[round(i * (len(palette) - 1) / max(1, len(bands) - 1))] for i in range(len(bands)))
    try:
        return ColorScheme(bands, args.sectors or base.sector_count, palette)
    except ValueError as e:
        raise ConfigError(f"color scheme: {e}") from None


def cmd_render(args) -> int:
    from . import render
    if args.window is None:
        raise ConfigError("render needs --window")
    stem = Path(args.out) if args.out else Path(args.out_dir) / f"{args.mode}_{args.fn.tag.lower()}"
    run = _run_config(args).to_dict()
    if args.mode == "color":
        scheme = _scheme(args)
        dc = render.domain_color(args.fn, args.window, args.width, args.height, scheme, args.threads)
        meta = dict(dc.meta, run=run)
        if args.islands is not None:
            meta["islands"] = render.band_islands(dc.band, args.islands, args.bounded)
            print(f"band {args.islands} islands{' (bounded)' if args.bounded else ''}: {meta['islands']}")
        path = render.save_png(stem.with_suffix(".png"), dc.rgb, meta)
        print(f"{args.width}x{args.height}, {dc.meta['error_pixels']} error pixels -> {path}")
        return EXIT_OK
    if args.mode == "sectors":
        alphas = parse_floats(args.alphas)
        dc, frames = render.sector_frames(args.fn, args.window, args.width, args.height, alphas, _scheme(args),
                                          args.threads)
        for k, (alpha, rgb, n) in enumerate(frames):
            path = render.save_png(Path(f"{stem}_alpha{k}.png"), rgb, dict(dc.meta, alpha=alpha, wedge_pixels=n,
                                                                          run=run))
            print(f"alpha = {alpha:.6g}: {n} wedge pixels -> {path}")
        return EXIT_OK
    # overlay
    comps, domains, markers = [], None, []
    for p in args.curves or []:
        comps += store.load_curves(p)[1]
    if args.atlas:
        atlas = store.load_atlas(args.atlas)
        domains = atlas.domains
        comps += list(atlas.components)
    from .critpoints import crit_for
    markers = [(z, "ZeroOfFPrime") for z in crit_for(args.fn, args.window)]
    if args.fn.variant == "Zeta":
        from .critpoints import zeta_zeros_in_window
        markers += [(z, "ZeroOfF") for z in zeta_zeros_in_window(args.window)]
    ctl = _step_control(args)
    radii = parse_floats(args.rho_list) if args.rho_list else [None]
    base = list(comps)
    if args.kind == "real-axis" and not args.curves and not args.atlas:
        base = list(_trace_components(args.fn, CurveKind.real_axis(), args.window, ctl, args.grid))
    status = EXIT_OK
    for k, rho in enumerate(radii):
        extra = []
        if rho is not None:
            extra = list(_trace_components(args.fn, CurveKind.circle(rho), args.window, ctl, args.grid))
        ov = render.curve_overlay(base + extra, args.window, args.width, args.height, domains, markers,
                                  title=f"{args.fn.tag}" + (f" rho={rho:g}" if rho is not None else ""))
        ov.meta["run"] = run
        if rho is not None:
            ov.meta["rho"] = rho
        out = stem if len(radii) == 1 else Path(f"{stem}_{k}")
        svg, png = ov.save(out)
        print(f"{len(base) + len(extra)} components -> {svg}, {png}")
    return status


def cmd_verify(args) -> int:
    from .acceptance import run_suite
    results = run_suite(args.suite, skip_stretch=args.skip_stretch, seed=args.seed, t_max=args.tmax)
    failed = [r for r in results if not r.passed and not r.skipped]
    skipped = [r for r in results if r.skipped]
    print(f"{len(results) - len(failed) - len(skipped)} passed, {len(failed)} failed, {len(skipped)} skipped")
    report = {"suite": args.suite, "seed": args.seed, "t_max": args.tmax, "results": [r.to_dict() for r in results]}
    path = _out_path(args, f"verify_{args.suite}.json")
    store.write_json(path, report)
    print(f"report -> {path}")
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--config", help="key=value config file ([common] and [<command>] sections)")
    p.add_argument("--seed", type=int, default=0, help="seed of every randomized sampler (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for data-parallel stages")
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument("--out", help="explicit output path (overrides --out-dir naming)")
    p.add_argument("-v", "--verbose", action="store_true")


def _fn_window(p, fn_default="zeta"):
    p.add_argument("--fn", type=parse_fn, default=fn_default,
                   help="gamma | zeta | gamma-partial:N | gamma-shift:A | gamma-plus-inv")
    p.add_argument("--window", type=parse_window, help="sigma_min,sigma_max,t_min,t_max")


def _step(p):
    g = p.add_argument_group("step control")
    g.add_argument("--max-step", type=float)
    g.add_argument("--min-step", type=float)
    g.add_argument("--corrector-tol", type=float)
    g.add_argument("--curvature-target", type=float)
    g.add_argument("--max-points", type=int)
    g.add_argument("--grid", type=int, default=64, help="seed grid size per side")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fundom", description="Fundamental domains of Gamma and zeta.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trace", help="trace pre-images of the real axis, a circle or a ray")
    _common(p), _fn_window(p), _step(p)
    p.add_argument("--kind", choices=["real-axis", "circle", "ray"], default="real-axis")
    p.add_argument("--rho", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--max-collapses", type=int, default=0, help="step collapses tolerated before exit code 3")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("crit", help="critical points, zeros and one-points")
    _common(p), _fn_window(p)
    p.add_argument("--kind", choices=["dzero", "zero", "one-point"], default="zero")
    p.add_argument("--n", type=int, help="number of x_n (Gamma) or trivial zeros (zeta)")
    p.add_argument("--tmax", type=float)
    p.add_argument("--nontrivial-only", action="store_true")
    p.set_defaults(func=cmd_crit)

    p = sub.add_parser("domains", help="build and verify a domain atlas")
    _common(p), _fn_window(p), _step(p)
    p.add_argument("--tmax", type=float)
    p.add_argument("--subdivide", action="store_true", help="zeta: split strips into Omega_{k,j}")
    p.add_argument("--n-samples", type=int, default=200, help="winding targets per domain")
    p.set_defaults(func=cmd_domains)

    p = sub.add_parser("transform", help="apply a covering-group word to points")
    _common(p), _fn_window(p), _step(p)
    p.add_argument("--atlas", help="atlas store (otherwise built from --fn/--window/--tmax)")
    p.add_argument("--tmax", type=float)
    p.add_argument("--word", required=True, help='letters such as "U1,U-2,H"')
    p.add_argument("--points", nargs="+", default=[], help="points such as 0.5+3i or -2+1i (comma or space separated)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("render", help="domain colouring, sector frames or curve overlays")
    _common(p), _fn_window(p), _step(p)
    p.add_argument("--mode", choices=["color", "sectors", "overlay"], default="color")
    p.add_argument("--width", type=int, default=1024)
    p.add_argument("--height", type=int, default=1024)
    p.add_argument("--bands", help="comma separated band radii ending with inf")
    p.add_argument("--sectors", type=int)
    p.add_argument("--islands", type=int, help="report connected components of this band")
    p.add_argument("--bounded", action="store_true", help="count only islands not touching the border")
    p.add_argument("--alphas", default="pi/30,pi/100,pi/1000")
    p.add_argument("--curves", nargs="*", help="curve stores to draw")
    p.add_argument("--atlas", help="atlas store whose domains are outlined")
    p.add_argument("--kind", choices=["real-axis", "none"], default="real-axis",
                   help="trace the real-axis pre-image when no store is given")
    p.add_argument("--rho-list", help="circle radii, one overlay each (e.g. 1.0,1.042,1.1)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    _common(p)
    p.add_argument("--suite", choices=["funcval", "gamma", "zeta", "all"], default="all")
    p.add_argument("--tmax", type=float, default=60.0, help="height of the zeta atlas checks")
    p.add_argument("--skip-stretch", action="store_true", help="skip the high-t stretch criterion")
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser, argv):
    """Parse argv, then re-parse with config-file values as defaults for the chosen subcommand."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    entries = load_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for e in entries:
        if e.section not in (COMMON, args.command):
            if e.section not in parser._subparsers._group_actions[0].choices:
                raise ConfigError(f"{e.source}:{e.line}: unknown section [{e.section}]")
            continue
        a = actions.get(e.key)
        if a is None or e.key in ("config", "help"):
            raise ConfigError(f"{e.source}:{e.line}: field {e.key}: not an option of '{args.command}'")
        if a.nargs == 0:
            defaults[e.key] = to_bool(e)
            continue
        try:
            value = a.type(e.value) if a.type else e.value
            if a.nargs in ("+", "*"):
                value = [a.type(v) if a.type else v for v in e.value.split()]
        except (argparse.ArgumentTypeError, ValueError) as err:
            raise ConfigError(f"{e.source}:{e.line}: field {e.key}: {err}") from None
        if a.choices is not None and value not in a.choices:
            raise ConfigError(f"{e.source}:{e.line}: field {e.key}: {e.value!r} not in {sorted(a.choices)}")
        defaults[e.key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except FundomError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
