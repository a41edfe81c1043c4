"""Command-line front end: spec I/O, pressure curves, freeze detection,
tilings, pins, sampling, the no-go classifier and Gibbs weights.

Every command writes its artifacts (CSV/JSON) plus a manifest.json with
parameter and checksum records into --out.  Exit codes: 0 success, 2 input
error, 3 resource-guard error, 64 usage.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .complexity import complexity_table, entropy_bounds
from .errors import FreezeshiftError, InputError, ResourceLimitError
from .gibbs import conditional_weights, full_support_rho, make_specification, metropolis_run
from .manifest import RunManifest
from .potential import generate_interaction
from .pressure import (
    PressureCurve,
    default_beta_grid,
    detect_freeze,
    fit_slant,
    renewal_pressure,
    torus_pressure_2d,
    transfer_pressure_1d,
)
from .recipes import parse_sequence_expression, potential_from_recipe, sequence_from_recipe
from .sequences import nogo_classify
from .specio import dumps_canonical, load_spec, spec_file_hash, spec_to_dict
from .subshift import BoxWindow, erg_box, generate_configuration, pattern_admissible, stat_box
from .tiling import OdometerOffset, pin_decomposition, tile_decomposition

USAGE_EXIT = 64
INPUT_EXIT = 2
RESOURCE_EXIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _out_dir(args):
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _finish(args, manifest, outputs):
    out = _out_dir(args)
    for path in outputs:
        manifest.add_output(path)
    manifest.write(os.path.join(out, "manifest.json"))


def _beta_grid(text):
    if text == "default":
        return default_beta_grid()
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"cannot parse beta grid {text!r}")


def _recipe_kwargs(args):
    kw = {}
    if getattr(args, "i_max", None) is not None:
        kw["i_max"] = args.i_max
    if getattr(args, "h_ref", None) not in (None, "auto"):
        kw["h_ref"] = float(args.h_ref)
    if getattr(args, "c", None) is not None:
        kw["c"] = args.c
    if getattr(args, "j_max", None) is not None:
        kw["j_max"] = args.j_max
    return kw


# -- commands ---------------------------------------------------------------


def cmd_spec_validate(args):
    spec = load_spec(args.spec)
    canonical = dumps_canonical(spec_to_dict(spec))
    sys.stdout.write(canonical)
    return 0


def cmd_lang_count(args):
    spec = load_spec(args.spec)
    table = complexity_table(spec, range(1, args.n + 1), width_cap=args.width_cap)
    out = _out_dir(args)
    path = os.path.join(out, "counts.csv")
    table.to_csv(path)
    manifest = RunManifest("lang count", {"n": args.n},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    for n in sorted(table.counts):
        print(f"{n},{table.counts[n]}")
    return 0


def cmd_entropy(args):
    spec = load_spec(args.spec)
    est = entropy_bounds(spec, args.n_max)
    doc = {"upper": est.upper, "lower": est.lower, "exact": est.exact,
           "provenance": est.provenance, "conditional": est.conditional,
           "units": "nats"}
    out = _out_dir(args)
    path = os.path.join(out, "entropy.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(doc))
    manifest = RunManifest("entropy", {"n_max": args.n_max},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(dumps_canonical(doc), end="")
    return 0


def cmd_potential_build(args):
    spec = load_spec(args.spec)
    seq = sequence_from_recipe(spec, args.recipe, **_recipe_kwargs(args))
    out = _out_dir(args)
    csv_path = os.path.join(out, "sequence.csv")
    seq.to_csv(csv_path, args.table_to)
    meta_path = os.path.join(out, "sequence.json")
    with open(meta_path, "w") as f:
        f.write(dumps_canonical(seq.metadata()))
    manifest = RunManifest("potential build",
                           {"recipe": args.recipe, "table_to": args.table_to},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [csv_path, meta_path])
    print(f"a_1={seq.value(1):.12g} a_{args.table_to}={seq.value(args.table_to):.12g}")
    return 0


def cmd_pressure_curve(args):
    spec = load_spec(args.spec)
    grid = _beta_grid(args.beta_grid)
    points = []
    if args.method == "renewal":
        seq = sequence_from_recipe(spec, args.recipe, **_recipe_kwargs(args))
        for beta in grid:
            points.append(renewal_pressure(seq, float(beta), args.n_terms, spec))
        meta = {"method": "renewal"}
    elif args.method == "torus":
        pot = potential_from_recipe(spec, args.recipe, args.radius,
                                    **_recipe_kwargs(args))
        for beta in grid:
            points.append(torus_pressure_2d(pot, float(beta), args.n_torus))
        meta = {"method": "torus", "n": args.n_torus, "R": args.radius}
    else:
        pot = potential_from_recipe(spec, args.recipe, args.radius,
                                    **_recipe_kwargs(args))
        for beta in grid:
            points.append(transfer_pressure_1d(pot, float(beta), tol=args.tol))
        meta = {"method": "transfer", "R": args.radius, "tol": args.tol}
    curve = PressureCurve(points, metadata=meta)
    out = _out_dir(args)
    path = os.path.join(out, "curve.csv")
    curve.to_csv(path)
    manifest = RunManifest("pressure curve",
                           {"recipe": args.recipe, "method": args.method,
                            "R": args.radius, "grid": args.beta_grid},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(f"wrote {len(points)} points to {path}")
    return 0


def cmd_freeze_detect(args):
    curve = PressureCurve.from_csv(args.curve)
    slant = fit_slant(curve, tail_fraction=args.tail_fraction)
    report = detect_freeze(curve, slant)
    doc = report.to_json_dict()
    doc["slant"] = {"s_hat": slant.s_hat, "h_hat": slant.h_hat,
                    "stderr": slant.stderr}
    out = _out_dir(args)
    path = os.path.join(out, "freeze.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(doc))
    manifest = RunManifest("freeze detect",
                           {"curve": os.path.basename(args.curve),
                            "tail_fraction": args.tail_fraction})
    _finish(args, manifest, [path])
    print(report.verdict, report.beta_c_interval)
    return 0


def cmd_tile(args):
    spec = load_spec(args.spec)
    window = stat_box(args.window, spec.dimension) if args.stat \
        else erg_box(args.window, spec.dimension)
    x = generate_configuration(spec, window, seed=args.seed)
    offsets = tuple(int(v) for v in args.offset.split(",")) if args.offset \
        else (0,) * spec.dimension
    off = OdometerOffset(offsets, depth=args.depth)
    tiling = tile_decomposition(spec, x, off)
    out = _out_dir(args)
    path = os.path.join(out, "tiling.json")
    with open(path, "w") as f:
        f.write(tiling.to_json() + "\n")
    manifest = RunManifest("tile", {"window": args.window, "seed": args.seed,
                                    "offset": list(offsets), "depth": args.depth},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(f"{len(tiling.tiles)} tiles, {len(tiling.margin)} margin sites")
    return 0


def cmd_pins(args):
    spec = load_spec(args.spec)
    if spec.sided != "one":
        raise InputError("pins require a one-sided spec")
    if args.word:
        from .subshift import Pattern
        word = Pattern.from_word([spec.alphabet.index(ch) for ch in args.word])
    else:
        word = generate_configuration(spec, erg_box(args.length), seed=args.seed)
    seq = pin_decomposition(spec, word)
    out = _out_dir(args)
    path = os.path.join(out, "pins.json")
    with open(path, "w") as f:
        f.write(seq.to_json() + "\n")
    manifest = RunManifest("pins", {"length": seq.length, "seed": args.seed},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(f"pins={seq.pins} margin_start={seq.margin_start}")
    return 0


def cmd_sample(args):
    spec = load_spec(args.spec)
    window = stat_box(args.window, spec.dimension) if args.stat \
        else erg_box(args.window, spec.dimension)
    x = generate_configuration(spec, window, seed=args.seed)
    assert pattern_admissible(spec, x)
    doc = {"offsets": [list(o) for o in x.offsets],
           "symbols": [spec.alphabet[v] for v in x.values],
           "seed": args.seed}
    out = _out_dir(args)
    path = os.path.join(out, "sample.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(doc))
    manifest = RunManifest("sample", {"window": args.window, "seed": args.seed},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print("".join(doc["symbols"]) if spec.dimension == 1 else f"wrote {path}")
    return 0


def cmd_nogo(args):
    if args.sequence:
        seq = parse_sequence_expression(args.sequence, dimension=args.d)
    else:
        spec = load_spec(args.spec)
        seq = sequence_from_recipe(spec, args.recipe, **_recipe_kwargs(args))
    report = nogo_classify(seq, d=args.d)
    out = _out_dir(args)
    path = os.path.join(out, "nogo.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(report.to_json_dict()))
    manifest = RunManifest("nogo", {"sequence": args.sequence,
                                    "recipe": args.recipe, "d": args.d})
    _finish(args, manifest, [path])
    print(report.verdict)
    return 0


def cmd_gibbs_weights(args):
    spec = load_spec(args.spec)
    seq = sequence_from_recipe(spec, args.recipe, **_recipe_kwargs(args))
    fam = generate_interaction(seq, spec, n_max=args.n_max)
    box = erg_box(args.box_len, spec.dimension)
    boundary_spec = load_spec(args.boundary_spec) if args.boundary_spec else spec
    # boundary: admissible configuration of the target covering the collar
    collar = 2 * args.n_max
    big = BoxWindow(box.kind, args.box_len + 2 * collar, spec.dimension)
    y_full = generate_configuration(boundary_spec, big, seed=args.seed)
    y_full = y_full.translate((-collar,) * spec.dimension)
    box_set = set(box.offsets())
    from .subshift import Pattern
    y = Pattern({off: val for off, val in zip(y_full.offsets, y_full.values)
                 if off not in box_set})
    fs = make_specification(fam, args.beta, box, y)
    probs = conditional_weights(fs)
    rho = full_support_rho(fam, args.beta * fam.s_norm)
    doc = {
        "beta": args.beta, "n_max": args.n_max, "rho": rho,
        "weights": {"".join(spec.alphabet[v] for v in p.values): w
                    for p, w in sorted(probs.items(),
                                       key=lambda kv: kv[0].values)},
    }
    out = _out_dir(args)
    path = os.path.join(out, "weights.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(doc))
    manifest = RunManifest("gibbs weights",
                           {"beta": args.beta, "n_max": args.n_max,
                            "box_len": args.box_len, "seed": args.seed},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(f"{len(probs)} weights, rho={rho:.6g}")
    return 0


def cmd_gibbs_sample(args):
    spec = load_spec(args.spec)
    pot = potential_from_recipe(spec, args.recipe, args.radius,
                                **_recipe_kwargs(args))
    state = metropolis_run(pot, args.beta, args.n_torus, args.steps,
                           seed=args.seed, burn_in=args.burn_in)
    doc = {"beta": args.beta, "n": args.n_torus, "steps": args.steps,
           "seed": args.seed, "rng": state.rng_algorithm,
           "inadmissible_mass": state.inadmissible_mass,
           "acceptance_rate": state.acceptance_rate,
           "symbol_frequencies": state.symbol_frequencies().tolist()}
    out = _out_dir(args)
    path = os.path.join(out, "chain.json")
    with open(path, "w") as f:
        f.write(dumps_canonical(doc))
    manifest = RunManifest("gibbs sample",
                           {"beta": args.beta, "steps": args.steps,
                            "seed": args.seed, "n": args.n_torus},
                           spec_hash=spec_file_hash(args.spec))
    _finish(args, manifest, [path])
    print(f"inadmissible mass {state.inadmissible_mass:.6g}")
    return 0


# -- parser ---------------------------------------------------------------


def build_parser():
    p = _Parser(prog="freezeshift",
                description="subshift freezing-transition toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="group")

    def add_common(sp, spec=True):
        if spec:
            sp.add_argument("--spec", required=True, help="spec JSON file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=1,
                        help="worker count (modules may ignore)")

    def add_recipe(sp):
        sp.add_argument("--recipe", default="thm34",
                        choices=["thm34", "thm51", "thm52", "cor53"])
        sp.add_argument("--i-max", type=int, default=None)
        sp.add_argument("--h-ref", default="auto")
        sp.add_argument("--c", type=float, default=None)
        sp.add_argument("--j-max", type=int, default=None)

    g = sub.add_parser("spec").add_subparsers(dest="action")
    sp = g.add_parser("validate")
    sp.add_argument("spec")
    sp.set_defaults(func=cmd_spec_validate)

    g = sub.add_parser("lang").add_subparsers(dest="action")
    sp = g.add_parser("count")
    add_common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--width-cap", type=int, default=22)
    sp.set_defaults(func=cmd_lang_count)

    sp = sub.add_parser("entropy")
    add_common(sp)
    sp.add_argument("--n-max", type=int, required=True)
    sp.set_defaults(func=cmd_entropy)

    g = sub.add_parser("potential").add_subparsers(dest="action")
    sp = g.add_parser("build")
    add_common(sp)
    add_recipe(sp)
    sp.add_argument("--table-to", type=int, default=64)
    sp.set_defaults(func=cmd_potential_build)

    g = sub.add_parser("pressure").add_subparsers(dest="action")
    sp = g.add_parser("curve")
    add_common(sp)
    add_recipe(sp)
    sp.add_argument("--R", dest="radius", type=int, default=10)
    sp.add_argument("--beta-grid", default="default")
    sp.add_argument("--method", default="transfer",
                    choices=["transfer", "renewal", "torus"])
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--n-terms", type=int, default=10 ** 6,
                    help="renewal truncation")
    sp.add_argument("--n-torus", type=int, default=4)
    sp.set_defaults(func=cmd_pressure_curve)

    g = sub.add_parser("freeze").add_subparsers(dest="action")
    sp = g.add_parser("detect")
    sp.add_argument("--curve", required=True)
    sp.add_argument("--tail-fraction", type=float, default=0.25)
    sp.add_argument("--out", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_freeze_detect)

    sp = sub.add_parser("tile")
    add_common(sp)
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--stat", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--offset", default=None, help="comma-separated phases")
    sp.add_argument("--depth", type=int, default=12)
    sp.set_defaults(func=cmd_tile)

    sp = sub.add_parser("pins")
    add_common(sp)
    sp.add_argument("--length", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--word", default=None)
    sp.set_defaults(func=cmd_pins)

    sp = sub.add_parser("sample")
    add_common(sp)
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--stat", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("nogo")
    sp.add_argument("--sequence", default=None)
    sp.add_argument("--spec", default=None)
    sp.add_argument("--recipe", default="thm34",
                    choices=["thm34", "thm51", "thm52", "cor53"])
    sp.add_argument("--i-max", type=int, default=None)
    sp.add_argument("--h-ref", default="auto")
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--j-max", type=int, default=None)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_nogo)

    g = sub.add_parser("gibbs").add_subparsers(dest="action")
    sp = g.add_parser("weights")
    add_common(sp)
    add_recipe(sp)
    sp.add_argument("--n-max", type=int, default=2)
    sp.add_argument("--box-len", type=int, default=4)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--boundary-spec", default=None)
    sp.set_defaults(func=cmd_gibbs_weights)
    sp = g.add_parser("sample")
    add_common(sp)
    add_recipe(sp)
    sp.add_argument("--R", dest="radius", type=int, default=1)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--n-torus", type=int, default=16)
    sp.add_argument("--steps", type=int, default=10 ** 5)
    sp.add_argument("--burn-in", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_gibbs_sample)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        sys.stderr.write(f"resource guard: {exc} "
                         f"(bound={exc.bound}, requested={exc.requested})\n")
        return RESOURCE_EXIT
    except FreezeshiftError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return INPUT_EXIT
    except FileNotFoundError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return INPUT_EXIT


if __name__ == "__main__":
    sys.exit(main())
