"""Command-line interface.

Exit codes: 0 ok, 1 usage or parse error, 2 unphysical state, 3 optimizer
did not reach the passive bound (best result still written).

Angles are given in degrees on the command line and converted to radians
internally. Every output starts with the resolved configuration.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .cmfile import (
    format_cm,
    format_table,
    format_transform,
    parse_cm,
    read_cm,
    write_table,
)
from .core import as_two_mode, to_db, validate_physical
from .coupling import sweep_logneg_surface
from .entanglement import analyze
from .errors import CmFormatError, GaussianStateError, UnphysicalStateError
from .metrology import (
    BLOCKS,
    SENSITIVITY_CURVES,
    RNG_ALGORITHM,
    default_delta_grid,
    entangled_basis,
    first_unphysical_delta,
    sensitivity_sweep,
    simulate,
    squeezed_basis,
)
from .passive import optimize_passive, waveplate_decomposition
from .symplectic import standard_form

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNPHYSICAL = 2
EXIT_NOT_CONVERGED = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for unphysical states
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args):
    cfg = {"version": __version__}
    for k, v in sorted(vars(args).items()):
        if k == "func":
            continue
        cfg[k] = v
    return cfg


def _header_lines(cfg):
    return [f"{k}: {v}" for k, v in cfg.items()]


def _load(path, basis):
    g = as_two_mode(read_cm(path)) if basis else read_cm(path)
    if basis == "rotate-45":
        g = entangled_basis(g)
    return g


def _variances(g):
    v = np.diag(g)
    return [float(x) for x in v], [float(x) for x in to_db(v)]


def _emit(args, cfg, payload, out=None):
    out = out or sys.stdout
    if args.format == "json":
        json.dump({"config": cfg, **payload}, out, indent=2, sort_keys=False, default=_json_default)
        out.write("\n")
        return
    for line in _header_lines(cfg):
        out.write(f"# {line}\n")
    for key, value in payload.items():
        if isinstance(value, dict):
            for k, v in value.items():
                out.write(f"{key}.{k}={_text(v)}\n")
        else:
            out.write(f"{key}={_text(value)}\n")


def _text(v):
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_text(x) for x in v)
    return str(v)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(type(o).__name__)


def cmd_validate(args):
    g = read_cm(args.path)
    verdict = validate_physical(g)
    cfg = _config(args)
    variances, variances_db = _variances(g)
    _emit(args, cfg, {
        "physical": verdict.physical,
        "min_eigenvalue": verdict.min_eigenvalue,
        "variances": variances,
        "variances_db": variances_db,
    })
    return EXIT_OK if verdict.physical else EXIT_UNPHYSICAL


def cmd_analyze(args):
    g = _load(args.path, args.basis)
    report = analyze(g)
    variances, variances_db = _variances(g)
    _emit(args, _config(args), {
        "report": report.to_dict(),
        "variances": variances,
        "variances_db": variances_db,
    })
    return EXIT_OK


def cmd_standard_form(args):
    g = _load(args.path, args.basis)
    sf = standard_form(g)
    m = sf.matrix()
    cfg = _config(args)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_cm(m, _header_lines(cfg)))
    variances, variances_db = _variances(m)
    _emit(args, cfg, {
        "a": sf.a,
        "b": sf.b,
        "c_plus": sf.c_plus,
        "c_minus": sf.c_minus,
        "symmetric": sf.symmetric,
        "local_transform": sf.local_transform.ravel().tolist(),
        "variances": variances,
        "variances_db": variances_db,
    })
    return EXIT_OK


def _default_output(path, suffix):
    stem, _ = os.path.splitext(path)
    return f"{stem}.{suffix}"


def cmd_optimize(args):
    g = _load(args.path, args.basis)
    before = analyze(g)
    result = optimize_passive(g, grid_steps=args.grid_steps)
    plates = waveplate_decomposition(result.transform)

    args.output = args.output or _default_output(args.path, "corrected.cmv")
    args.correction = args.correction or _default_output(args.path, "correction.smv")
    cfg = _config(args)
    text = format_cm(result.corrected, _header_lines(cfg))
    with open(args.output, "w") as fh:
        fh.write(text)
    with open(args.correction, "w") as fh:
        fh.write(format_transform(result.transform, plates.degrees(), _header_lines(cfg)))
    # report on exactly what was written so a re-analysis reproduces it
    written = parse_cm(text)
    after = analyze(written)
    q1, h, q2, common = plates.degrees()
    variances, variances_db = _variances(written)
    _emit(args, cfg, {
        "before": before.to_dict(),
        "after": after.to_dict(),
        "bound_nu_tilde": result.bound_nu_tilde,
        "achieved_nu_tilde": result.achieved_nu_tilde,
        "gap": result.gap,
        "converged": result.converged,
        "parameters_deg": [float(np.degrees(x)) for x in result.parameters],
        "waveplates_deg": {"quarter1": q1, "half": h, "quarter2": q2, "common_phase": common},
        "corrected_squeezed_basis": [float(x) for x in squeezed_basis(written).ravel()],
        "variances": variances,
        "variances_db": variances_db,
    })
    if not result.converged:
        print(f"optimizer stopped {result.gap:.3g} above the passive bound; best result written",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _grid(lo, hi, steps, name):
    if steps < 1:
        raise argparse.ArgumentTypeError(f"{name} steps must be >= 1")
    if steps == 1:
        return np.array([lo])
    if hi < lo:
        raise argparse.ArgumentTypeError(f"{name} range is empty")
    return np.linspace(lo, hi, steps)


def _deltas(args):
    if args.deltas:
        try:
            return np.array([float(x) for x in args.deltas.split(",")])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad delta list {args.deltas!r}") from None
    if args.delta_step <= 0 or args.delta_max < 0:
        raise argparse.ArgumentTypeError("delta grid needs delta-step > 0 and delta-max >= 0")
    return np.round(np.arange(0.0, args.delta_max + 1e-12, args.delta_step), 10)


def cmd_sweep(args):
    cfg = _config(args)
    if args.kind == "tilt-surface":
        a = _grid(args.a_min, args.a_max, args.a_steps, "a")
        th = np.radians(_grid(args.theta_min, args.theta_max, args.theta_steps, "theta"))
        table = sweep_logneg_surface(a, th)
        meta = {**cfg, "theta_unit": "rad", "rows": len(table)}
        columns = ["a", "theta", "log_negativity"]
        rows = table.tolist()
    else:
        baseline = None if args.baseline is None else read_cm(args.baseline)
        deltas = default_delta_grid() if (args.deltas is None and args.delta_max is None) else _deltas(args)
        res = sensitivity_sweep(baseline, SENSITIVITY_CURVES, deltas, sign=args.sign)
        meta = {**cfg, "deltas": len(deltas), "curves": len(SENSITIVITY_CURVES)}
        for block in BLOCKS:
            meta[f"first_unphysical {block}"] = _text(first_unphysical_delta(res, block, "all"))
        columns = ["block", "entry_set", "delta", "physical", "log_negativity", "delta_log_negativity"]
        rows = [[r.block, r.entry_set, r.delta, r.physical, r.log_negativity, r.delta_log_negativity]
                for r in res]
    if args.output:
        write_table(args.output, columns, rows, meta)
    else:
        sys.stdout.write(format_table(columns, rows, meta))
    return EXIT_OK


def cmd_simulate(args):
    g = read_cm(args.path)
    phases = np.radians(np.linspace(0.0, 360.0, args.phases, endpoint=False))
    res = simulate(g, args.samples, args.seed, phases, args.samples_per_phase,
                   args.zero_offdiag, rotate=args.basis == "rotate-45")
    os.makedirs(args.out_dir, exist_ok=True)
    cfg = {**_config(args), "rng": RNG_ALGORITHM}
    for tr in res.traces:
        rows = [[float(np.degrees(p)), v, vdb, an, andb]
                for p, v, vdb, an, andb in zip(tr.phases, tr.variances, tr.variances_db,
                                               tr.analytic, tr.analytic_db)]
        write_table(os.path.join(args.out_dir, f"trace_mode{tr.mode + 1}.tsv"),
                    ["phase_deg", "variance", "variance_db", "analytic", "analytic_db"], rows,
                    {**cfg, "mode": tr.mode + 1, "samples_per_phase": tr.samples_per_phase})
    with open(os.path.join(args.out_dir, "estimate.cmv"), "w") as fh:
        fh.write(format_cm(res.estimate, _header_lines(cfg)))
    variances, variances_db = _variances(res.estimate)
    payload = {
        "report": None if res.report is None else res.report.to_dict(),
        "estimate_physical": res.report is not None,
        "variances": variances,
        "variances_db": variances_db,
    }
    ext = "json" if args.format == "json" else "txt"
    with open(os.path.join(args.out_dir, f"report.{ext}"), "w") as fh:
        _emit(args, cfg, payload, fh)
    _emit(args, cfg, payload)
    return EXIT_OK if res.report is not None else EXIT_UNPHYSICAL


def build_parser():
    p = _Parser(prog="gaussent", description="Two-mode Gaussian state entanglement toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, basis=True):
        sp.add_argument("--format", choices=["text", "json"], default="text")
        if basis:
            sp.add_argument("--basis", choices=["as-is", "rotate-45"], default="as-is",
                            help="rotate-45 mixes the modes on a balanced beam splitter first")

    sp = sub.add_parser("validate", help="check a cmv1 file for physicality")
    sp.add_argument("path")
    common(sp, basis=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("analyze", help="entanglement report")
    sp.add_argument("path")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("standard-form", help="standard-form invariants and local transform")
    sp.add_argument("path")
    sp.add_argument("-o", "--output", help="write the standard-form CM here")
    common(sp)
    sp.set_defaults(func=cmd_standard_form)

    sp = sub.add_parser("optimize", help="passive correction maximizing entanglement")
    sp.add_argument("path")
    sp.add_argument("-o", "--output", help="corrected CM (default <input>.corrected.cmv)")
    sp.add_argument("--correction", help="transform and plate angles (default <input>.correction.smv)")
    sp.add_argument("--grid-steps", type=int, default=16)
    common(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("sweep", help="tilt surface or noise-sensitivity curves as TSV")
    sp.add_argument("kind", choices=["tilt-surface", "sensitivity"])
    sp.add_argument("-o", "--output")
    sp.add_argument("--a-min", type=float, default=1.0)
    sp.add_argument("--a-max", type=float, default=10.0)
    sp.add_argument("--a-steps", type=int, default=101)
    sp.add_argument("--theta-min", type=float, default=-90.0, help="degrees")
    sp.add_argument("--theta-max", type=float, default=90.0, help="degrees")
    sp.add_argument("--theta-steps", type=int, default=101)
    sp.add_argument("--baseline", help="squeezed-basis CM (default: measured untilted state)")
    sp.add_argument("--delta-max", type=float)
    sp.add_argument("--delta-step", type=float, default=0.005)
    sp.add_argument("--deltas", help="comma-separated explicit delta values")
    sp.add_argument("--sign", type=float, choices=[1.0, -1.0], default=1.0)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="simulated homodyne characterization")
    sp.add_argument("path", help="squeezed-basis CM")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--phases", type=int, default=64)
    sp.add_argument("--samples-per-phase", type=int, default=10_000)
    sp.add_argument("--zero-offdiag", action="store_true",
                    help="force the estimated intermodal block to zero")
    sp.add_argument("--out-dir", default="simulation")
    common(sp)
    sp.set_defaults(basis="rotate-45")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except CmFormatError as exc:
        print(f"{getattr(args, 'path', None) or args.baseline}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnphysicalStateError as exc:
        print(f"unphysical: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GaussianStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
