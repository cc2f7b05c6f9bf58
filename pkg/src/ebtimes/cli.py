"""Command-line front end emitting JSON reports.

Exit codes: 0 success (including inapplicable bounds), 2 parse or parameter
error, 3 invalid channel, 4 numerical failure.
"""

import argparse
import hashlib
import inspect
import json
import math
import os
import sys
import warnings

import numpy as np
import scipy.linalg

from . import __version__
from .channel import (
    GALLERY,
    decode_matrix,
    from_json_dict,
    gallery,
    to_json_dict,
)
from .decoherence import BOUNDS, bound, poincare
from .errors import (
    ConvergenceError,
    EBTimesError,
    InvalidChannelError,
    NotAStateError,
    NotHermitianError,
    NotPositiveError,
    SingularChannelError,
)
from .linalg import DEFAULT_TOL, partial_trace
from .separability import eb_index_search, gurvits_ball, ppt_check
from .structure import classify

SCHEMA_VERSION = 1

EXIT_OK, EXIT_PARSE, EXIT_CHANNEL, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message, detail=None):
        super().__init__(message)
        self.code = code
        self.detail = detail or {}


# ---------------------------------------------------------------- helpers


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"malformed JSON in {path}: {exc}") from exc


def _load_channel(path, tol, require_cptp=True):
    obj = _read_json(path)
    try:
        phi = from_json_dict(obj, tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"not a channel description: {exc}") from exc
    if require_cptp and not phi.is_cptp:
        raise CliError(EXIT_CHANNEL, "input is not a CPTP map",
                       {"cp": phi.is_cp.value, "tp": phi.is_tp.value, "residuals": phi.residuals})
    return phi, obj


def _digest(phi, rep):
    t = np.ascontiguousarray(phi.transfer)
    return {"dim": phi.dim, "repr": rep, "checksum": hashlib.sha256(t.tobytes()).hexdigest()}


def _report(command, payload, tol, seed, phi=None, rep="transfer"):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "channel_digest": _digest(phi, rep) if phi is not None else None,
        "payload": payload,
        "tolerances": tol.as_dict(),
        "seed": seed,
    }


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"--{name} expects comma-separated numbers") from exc


def _diag_state(text, name):
    w = np.array(_floats(text, name))
    if w.size == 0 or np.any(w <= 0):
        raise CliError(EXIT_PARSE, f"--{name} needs positive entries")
    return np.diag(w / w.sum()).astype(complex)


# ---------------------------------------------------------------- commands


def cmd_classify(args, tol, seed):
    phi, obj = _load_channel(args.input, tol)
    st = classify(phi, tol, seed)
    payload = {
        "faithful": st.is_faithful,
        "irreducible": st.is_irreducible,
        "primitive": st.is_primitive,
        "fixed_dimension": st.fixed_dimension,
        "n_components": len(st.components),
        "periods": st.periods,
        "z": st.periods[0] if st.is_irreducible else None,
        "lcm_period": st.lcm_period,
        "peripheral_eigenvalues": [_cplx(z) for z in st.peripheral_eigenvalues],
        "sigma_tr_spectrum": [float(x) for x in np.linalg.eigvalsh(st.sigma_tr)],
    }
    return _report("classify", payload, tol, seed, phi, obj.get("repr", "transfer"))


def cmd_eb_index(args, tol, seed):
    phi, obj = _load_channel(args.input, tol)
    res = eb_index_search(phi, args.n_max, tol, seed)
    payload = res.as_dict(with_trace=args.trace)
    payload["theorem_bound"] = _finite(payload["theorem_bound"])
    if res.direct_sum is not None:
        payload["direct_sum"] = {"is_direct_sum": res.direct_sum.is_direct_sum, "reason": res.direct_sum.reason}
    return _report("eb-index", payload, tol, seed, phi, obj.get("repr", "transfer"))


def cmd_poincare(args, tol, seed):
    phi, obj = _load_channel(args.input, tol)
    data = poincare(phi, None, tol, seed)
    return _report("poincare", data.as_dict(), tol, seed, phi, obj.get("repr", "transfer"))


def cmd_sep_check(args, tol, seed):
    obj = _read_json(args.input)
    try:
        rho = decode_matrix(obj["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"expected {{\"matrix\": [[[re, im], ...], ...]}}: {exc}") from exc
    try:
        da, db = (int(x) for x in args.dims.split(","))
    except ValueError as exc:
        raise CliError(EXIT_PARSE, "--dims expects two integers a,b") from exc
    if da * db != rho.shape[0]:
        raise CliError(EXIT_PARSE, f"--dims {da},{db} do not match a {rho.shape[0]}x{rho.shape[0]} matrix")
    v = ppt_check(rho, (da, db), tol)
    out = {"ppt": v.as_dict()}
    verdict = v
    if not v.entangled:
        ra = partial_trace(rho, (da, db), "B")
        rb = partial_trace(rho, (da, db), "A")
        try:
            ball = gurvits_ball(rho, ra / np.trace(ra).real, rb / np.trace(rb).real, (da, db), tol)
            out["ball"] = ball.as_dict()
            verdict = ball
        except NotPositiveError:
            out["ball"] = None
    out["verdict"] = verdict.status
    return _report("sep-check", out, tol, seed)


def _generator(phi, args, tol):
    if args.generator:
        obj = _read_json(args.input)
        try:
            return decode_matrix(obj["matrices"][0])
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise CliError(EXIT_PARSE, f"generator file needs a matrix: {exc}") from exc
    if phi is None:
        return None
    sv = np.linalg.svd(phi.transfer, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        return "channel is singular and has no generator"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lg = scipy.linalg.logm(phi.transfer)
    return np.asarray(lg)


def _bound_kwargs(name, args, phi, gen, tol):
    """Keyword inputs for a catalog bound, or a string naming what is missing."""
    def sigma_default():
        if args.sigma_diag:
            return _diag_state(args.sigma_diag, "sigma-diag")
        if phi is None:
            return None
        return classify(phi, tol, args.seed_value).invariant_state

    def need(**kw):
        missing = [k for k, v in kw.items() if v is None]
        return kw if not missing else "missing inputs: " + ", ".join(missing)

    if name == "t_eb_lower":
        if isinstance(gen, str):
            return gen
        return "missing inputs: generator or channel" if gen is None else {"generator": gen}
    if name == "t_eb_upper":
        return need(K=args.K, gamma=args.gamma, sigma=sigma_default())
    if name == "t_ea_upper":
        om = _diag_state(args.omega_diag, "omega-diag") if args.omega_diag else None
        return need(sigma=sigma_default(), omega=om, lam=args.lam)
    if name in ("n_eb_upper_discrete", "n_eb_upper_ppt", "n_mu_upper", "n_mu_upper_hs"):
        return need(phi=phi)
    if name == "n_lea2_lower_reversible":
        return need(phi=phi, sigma=sigma_default())
    if name == "n_ea_lower_det":
        return need(phi=phi)
    if name == "n_eb_upper_rwa":
        return need(g=args.g, gamma=args.gamma)
    if name == "t_aqmc":
        if args.dimA is None and args.dimB is None:
            return "missing inputs: dimA or dimB"
        kw = need(K=args.K, gamma=args.gamma, eps=args.eps)
        if isinstance(kw, dict):
            kw.update(dimA=args.dimA, dimB=args.dimB)
        return kw
    if name == "t_aqmc_mlsi":
        return need(alpha1=args.alpha1, sigma=sigma_default(), eps=args.eps)
    if name == "t_aqmc_naive":
        return need(lam=args.lam, sigma=sigma_default(), eps=args.eps)
    raise CliError(EXIT_PARSE, f"unknown bound {name!r}")


def cmd_bounds(args, tol, seed):
    if not args.all and not args.bound:
        raise CliError(EXIT_PARSE, "give --bound NAME or --all")
    if args.bound and args.bound not in BOUNDS:
        raise CliError(EXIT_PARSE, f"unknown bound {args.bound!r}; known: {sorted(BOUNDS)}")
    phi = obj = None
    if args.input and not args.generator:
        phi, obj = _load_channel(args.input, tol)
    gen = _generator(phi, args, tol)
    names = sorted(BOUNDS) if args.all else [args.bound]
    reports = []
    for name in names:
        kw = _bound_kwargs(name, args, phi, gen, tol)
        if isinstance(kw, str):
            if not args.all and kw.startswith("missing"):
                raise CliError(EXIT_PARSE, f"{name}: {kw}")
            reports.append({"name": name, "value": "nan", "inputs": {}, "applicable": False, "reason": kw,
                            "extra": {}})
            continue
        if "tol" in inspect.signature(BOUNDS[name]).parameters:
            kw["tol"] = tol
        reports.append(bound(name, **kw).as_dict())
    payload = {"bounds": reports} if args.all else reports[0]
    rep = obj.get("repr", "transfer") if obj else "transfer"
    return _report("bounds", payload, tol, seed, phi, rep)


def _gallery_params(args):
    p = {}
    if args.name == "depolarizing":
        p = {"d": args.d if args.d is not None else 2, "p": args.p if args.p is not None else 0.5}
    elif args.name == "hadamard_cycle":
        p = {"d": args.d if args.d is not None else 3, "eps": args.eps if args.eps is not None else 0.5}
    elif args.name == "irreducible_period2":
        p = {"lam": args.lam if args.lam is not None else 0.5}
    elif args.name == "point":
        d = args.d if args.d is not None else 2
        if args.tau_diag:
            p = {"tau": _diag_state(args.tau_diag, "tau-diag")}
        else:
            tau = np.zeros((d, d), dtype=complex)
            tau[0, 0] = 1.0
            p = {"tau": tau}
    return p


def cmd_gallery(args, tol, seed):
    phi = gallery(args.name, **_gallery_params(args))
    obj = to_json_dict(phi)
    text = json.dumps(obj)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    payload = {"name": args.name, "out": args.out, "cptp": bool(phi.is_cptp)}
    if not args.out:
        payload["channel"] = obj
    return _report("gallery", payload, tol, seed, phi)


# ---------------------------------------------------------------- parser


def build_parser():
    ap = argparse.ArgumentParser(prog="ebtimes", description="Asymptotic structure and entanglement-breaking times.")
    ap.add_argument("--tol-psd", type=float, default=DEFAULT_TOL.psd)
    ap.add_argument("--tol-periph", type=float, default=DEFAULT_TOL.periph)
    ap.add_argument("--seed", type=int, default=None, help="overrides EBTIMES_SEED (default 0)")
    ap.add_argument("--json-indent", type=int, default=None)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="faithful / irreducible / primitive flags and periods")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eb-index", help="bracket the entanglement-breaking index")
    p.add_argument("input")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_eb_index)

    p = sub.add_parser("poincare", help="discrete Poincare data")
    p.add_argument("input")
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("sep-check", help="PPT and ball test on a bipartite state")
    p.add_argument("input")
    p.add_argument("--dims", required=True)
    p.set_defaults(func=cmd_sep_check)

    p = sub.add_parser("bounds", help="closed-form characteristic-time bounds")
    p.add_argument("input", nargs="?")
    p.add_argument("--bound", choices=sorted(BOUNDS))
    p.add_argument("--all", action="store_true")
    p.add_argument("--generator", action="store_true", help="input matrix is a generator, not a channel")
    for flag in ("--K", "--gamma", "--eps", "--alpha1", "--lam", "--g"):
        p.add_argument(flag, type=float, default=None)
    p.add_argument("--dimA", type=int, default=None)
    p.add_argument("--dimB", type=int, default=None)
    p.add_argument("--sigma-diag", default=None)
    p.add_argument("--omega-diag", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gallery", help="write an example channel as JSON")
    p.add_argument("name", choices=sorted(GALLERY))
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--tau-diag", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gallery)
    return ap


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("EBTIMES_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"EBTIMES_SEED={env!r} is not an integer") from exc


def _emit(obj, indent, stream):
    stream.write(json.dumps(obj, indent=indent) + "\n")


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        seed = _seed(args)
        args.seed_value = seed
        tol = DEFAULT_TOL.with_(psd=args.tol_psd, periph=args.tol_periph)
        report = args.func(args, tol, seed)
    except CliError as exc:
        _emit({"error": str(exc), "exit_code": exc.code, **exc.detail}, args.json_indent, sys.stderr)
        return exc.code
    except (InvalidChannelError, SingularChannelError) as exc:
        _emit({"error": str(exc), "exit_code": EXIT_CHANNEL}, args.json_indent, sys.stderr)
        return EXIT_CHANNEL
    except ConvergenceError as exc:
        _emit({"error": str(exc), "exit_code": EXIT_NUMERIC}, args.json_indent, sys.stderr)
        return EXIT_NUMERIC
    except (NotAStateError, NotHermitianError, NotPositiveError, EBTimesError, ValueError) as exc:
        _emit({"error": str(exc), "exit_code": EXIT_PARSE}, args.json_indent, sys.stderr)
        return EXIT_PARSE
    _emit(report, args.json_indent, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
