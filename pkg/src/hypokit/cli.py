"""Command-line front end.

Exit status: 0 success, 1 validation error (arguments, files, shapes),
2 numerical failure, 3 a property-violation report (a check ran and failed).

The HYPOKIT_THREADS environment variable caps BLAS/OpenMP parallelism; it is
applied before the numerical modules are imported, which is why all heavy
imports in this module are deferred into the command handlers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _apply_thread_cap() -> None:
    cap = os.environ.get("HYPOKIT_THREADS")
    if not cap:
        return
    for var in _THREAD_VARS:
        os.environ.setdefault(var, cap)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage errors to 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="hypokit", description="hypocoercivity analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--output", default=None, help="output path (default stdout)")

    sp = sub.add_parser("analyze", help="index audit + stability + short-time fit")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tol-kappa", type=float, default=None)
    sp.add_argument("--tol-rank", type=float, default=1e-10)
    sp.add_argument("--m-max", type=int, default=None)
    common(sp)

    sp = sub.add_parser("staircase", help="staircase form of the input pair")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tol-rank", type=float, default=1e-10)
    common(sp)

    sp = sub.add_parser("decay", help="propagator norm curve as CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tmax", type=float, default=3.0)
    sp.add_argument("--steps", type=int, default=300)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    common(sp)

    sp = sub.add_parser("gallery", help="emit a worked example matrix")
    sp.add_argument("--name", required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--blocks", type=int, default=None)
    sp.add_argument("--dim", type=int, default=None)
    common(sp)

    sp = sub.add_parser("lorentz", help="kinetic-equation analyses")
    lsub = sp.add_subparsers(dest="lorentz_command", required=True)

    lp = lsub.add_parser("kappa", help="mixing coercivity constant at cutoff M")
    lp.add_argument("--M", type=int, default=200)
    common(lp)

    lp = lsub.add_parser("lyapunov", help="weighted decay-rate margins for modes 1..N")
    lp.add_argument("--N", type=int, default=50)
    lp.add_argument("--M", type=int, default=64)
    lp.add_argument("--alpha", type=float, default=0.5)
    common(lp)

    lp = lsub.add_parser("constants", help="short-time constant pipeline")
    lp.add_argument("--M", type=int, default=128)
    common(lp)

    lp = lsub.add_parser("verify", help="cubic bound + envelope sandwich checks")
    lp.add_argument("--N", type=int, default=20)
    lp.add_argument("--M", type=int, default=64)
    lp.add_argument("--M-constants", type=int, default=128, dest="M_constants")
    lp.add_argument("--steps", type=int, default=50)
    common(lp)

    lp = lsub.add_parser("simulate", help="evolve a truncated field, report decay")
    lp.add_argument("--input", default=None, help="field JSON (or use --random)")
    lp.add_argument("--random", action="store_true", help="seeded random initial field")
    lp.add_argument("--N", type=int, default=16)
    lp.add_argument("--M", type=int, default=32)
    lp.add_argument("--seed", type=int, default=0)
    lp.add_argument("--tmax", type=float, default=30.0)
    lp.add_argument("--steps", type=int, default=20)
    lp.add_argument("--final-field", default=None, dest="final_field")
    common(lp)

    return p


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, path: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True), path)


def _load_matrix(path: str):
    from . import operator_core as core

    with open(path, "r", encoding="utf-8") as fh:
        return core.matrix_from_json(json.load(fh))


def _cmd_analyze(args) -> int:
    import numpy as np

    from . import decay, hc_index
    from . import operator_core as core
    from .errors import NoDecayError

    A = _load_matrix(args.input)
    dec = core.hermitian_split(A)
    audit = hc_index.equivalence_audit(
        dec, kappa_threshold=args.tol_kappa, m_max=args.m_max, rank_tol=args.tol_rank
    )
    gap = -core.spectral_abscissa(-A)
    t0 = min(max(1.0, 3.0 / gap), 1e5) if gap > 1e-8 else 1.0
    stab = decay.stability_check(A, t0)
    scale = max(core.spectral_norm(A), 1e-300)
    times = np.geomspace(1e-4 / scale, 10.0 / scale, 220)
    try:
        fit = decay.fit_short_time(decay.propagator_norm_curve(A, times)).to_json_dict()
    except NoDecayError:
        fit = None
    out = {
        "audit": audit.to_json_dict(),
        "stability": {"t0": t0, **stab.to_json_dict()},
        "short_time_fit": fit,
    }
    _emit_json(out, args.output)
    return 0 if audit.agree else 3


def _cmd_staircase(args) -> int:
    from . import operator_core as core
    from .staircase import build_staircase, verify_staircase

    A = _load_matrix(args.input)
    dec = core.hermitian_split(A)
    form = build_staircase(dec.R, dec.J, rank_tol=args.tol_rank)
    report = verify_staircase(form, dec.R, dec.J)
    out = form.to_json_dict()
    out["verification"] = report.to_json_dict()
    _emit_json(out, args.output)
    return 0 if report.ok else 3


def _cmd_decay(args) -> int:
    import numpy as np

    from . import decay

    A = _load_matrix(args.input)
    times = np.linspace(0.0, args.tmax, args.steps + 1)
    curve = decay.propagator_norm_curve(A, times)
    if args.format == "csv":
        _emit(curve.to_csv(), args.output)
    else:
        _emit_json(
            {"t": [float(t) for t in curve.times], "norm": [float(v) for v in curve.norms]},
            args.output,
        )
    return 0


def _cmd_gallery(args) -> int:
    from . import gallery
    from . import operator_core as core

    params = {}
    if args.k is not None:
        params["k"] = args.k
    if args.blocks is not None:
        params["blocks"] = args.blocks
    if args.dim is not None:
        params["dim"] = args.dim
    A = gallery.make_example(args.name, **params)
    _emit_json(core.matrix_to_json(A), args.output)
    return 0


def _cmd_lorentz(args) -> int:
    from . import lorentz

    cmd = args.lorentz_command
    if cmd == "kappa":
        _emit_json({"M": args.M, "kappa": lorentz.kappa_truncated(args.M)}, args.output)
        return 0

    if cmd == "lyapunov":
        margins = {
            str(n): lorentz.lyapunov_margin(n, args.alpha, lorentz.LAMBDA0, args.M)
            for n in range(1, args.N + 1)
        }
        worst = min(margins.values())
        _emit_json(
            {
                "M": args.M,
                "alpha": args.alpha,
                "lambda0": lorentz.LAMBDA0,
                "margins": margins,
                "min_margin": worst,
            },
            args.output,
        )
        return 0 if worst >= -1e-10 else 3

    if cmd == "constants":
        consts = lorentz.appendix_constants(args.M)
        out = consts.to_json_dict()
        out["relations_hold"] = consts.relations_hold()
        _emit_json(out, args.output)
        return 0 if consts.relations_hold() else 3

    if cmd == "verify":
        import numpy as np

        consts = lorentz.appendix_constants(args.M_constants)
        cubic = lorentz.cubic_bound_verify(args.N, args.M, consts, samples=args.steps)
        sandwich = lorentz.full_propagator_bounds(
            args.N, args.M, consts, np.linspace(0.0, consts.tau, args.steps)
        )
        _emit_json(
            {
                "constants": consts.to_json_dict(),
                "cubic_bound": cubic.to_json_dict(),
                "sandwich": sandwich.to_json_dict(),
            },
            args.output,
        )
        return 0 if cubic.ok and sandwich.ok else 3

    if cmd == "simulate":
        import numpy as np

        from .errors import PreconditionError

        if args.random:
            rng = np.random.default_rng(args.seed)
            field0 = lorentz.LorentzField.random(rng, args.N, args.M)
        elif args.input:
            with open(args.input, "r", encoding="utf-8") as fh:
                field0 = lorentz.field_from_json(json.load(fh))
        else:
            raise PreconditionError("simulate needs --input or --random")
        times = np.linspace(0.0, args.tmax, args.steps + 1)
        reports = lorentz.simulate_curve(field0, times)
        lines = ["t,distance,bound"]
        for rep in reports:
            lines.append(f"{rep.t:.17g},{rep.distance:.17g},{rep.bound:.17g}")
        _emit("\n".join(lines) + "\n", args.output)
        if args.final_field:
            final, _ = lorentz.simulate(field0, args.tmax)
            with open(args.final_field, "w", encoding="utf-8") as fh:
                json.dump(lorentz.field_to_json(final), fh, indent=2, sort_keys=True)
        ok = all(rep.bound_ok and rep.mass_ok for rep in reports)
        return 0 if ok else 3

    raise _UsageError(f"unknown lorentz subcommand {cmd!r}")


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"hypokit: {exc}", file=sys.stderr)
        return 1

    from .errors import (
        ContractViolationError,
        DimensionError,
        InvalidEntryError,
        NoDecayError,
        NotPSDError,
        NumericalError,
        PreconditionError,
        RangeError,
    )

    handlers = {
        "analyze": _cmd_analyze,
        "staircase": _cmd_staircase,
        "decay": _cmd_decay,
        "gallery": _cmd_gallery,
        "lorentz": _cmd_lorentz,
    }
    try:
        return handlers[args.command](args)
    except (DimensionError, InvalidEntryError, PreconditionError) as exc:
        print(f"hypokit: invalid input: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        print(f"hypokit: cannot read input: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, RangeError, NotPSDError, ContractViolationError, NoDecayError) as exc:
        print(f"hypokit: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
