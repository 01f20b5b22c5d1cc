"""Command-line interface.

Every subcommand prints one JSON record (or CSV with ``--format csv``).
Exit codes: 0 success, 1 usage error, 2 invalid parameters / non-orthocentric
input, 3 quadrature failure, 4 Monte-Carlo disagreement (``|z| > 5``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cones, gauss, mc, simplex
from .errors import NotOrthocentric, OrthocentricError, QuadratureFailure
from .gfun import g
from .gram import ConeParams, parse_sign, signed_generators
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_QUADRATURE, EXIT_MC = 0, 1, 2, 3, 4
Z_LIMIT = 5.0
_LIST_FLAGS = ("--lambdas", "--eps", "--tau", "--face")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(s: str):
    s = s.strip()
    if not s:
        return []
    try:
        return [float(x) for x in s.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {s!r}") from exc


def _signs(s: str):
    s = s.strip()
    if not s:
        return []
    try:
        return [parse_sign(x) for x in s.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ints(s: str):
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated index list: {s!r}") from exc


def _join_negative_lists(argv):
    """Let ``--lambdas -1,1`` work although ``-1,1`` looks like an option."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _LIST_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _cone_params(args) -> ConeParams:
    lam = args.lambdas or []
    eps = args.eps if args.eps is not None else [1] * len(lam)
    if len(eps) != len(lam):
        raise UsageError("--eps must have as many entries as --lambdas")
    return ConeParams(args.lambda0, lam, eps)


def _cone_inputs(p: ConeParams):
    return {"lambda0": p.lambda0, "lambdas": list(p.lambdas), "eps": list(p.eps)}


def _seed(args) -> int:
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbits(63)
    return args.seed


def read_vertices(path) -> np.ndarray:
    """Read a vertex file: JSON array of arrays, or CSV with one vertex per row."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(text)
    else:
        rows = [[float(x) for x in r] for r in csv.reader(io.StringIO(text)) if r and r[0].strip()
                and not r[0].lstrip().startswith("#")]
    V = np.asarray(rows, dtype=float)
    if V.ndim != 2:
        raise UsageError("vertex file must contain equally long rows")
    return V


# ------------------------------------------------------------ subcommands

def cmd_gd(args):
    p = _cone_params(args)
    r = g(p, _quad(args))
    return {"inputs": _cone_inputs(p), "results": r.as_dict()}


def _face_from_args(s: simplex.CanonicalSimplex, args):
    if args.face is not None:
        return simplex.FaceSelector(args.face)
    if args.k is None:
        raise UsageError("give --face, --k or --all")
    if s.kind == simplex.ACUTE or not args.face_without_origin:
        return simplex.FaceSelector.with_special(args.k)
    return simplex.FaceSelector.without_special(args.k)


def _angle_row(s, face, quad):
    b = simplex.internal_angle(s, face, quad)
    c = simplex.external_angle(s, face, quad)
    return {"face": list(face.indices), "k": face.k, "beta": b.value,
            "beta_err": b.err_estimate, "gamma": c.value, "gamma_err": c.err_estimate}


def cmd_angles(args):
    quad = _quad(args)
    inputs = {}
    if args.vertices:
        V = read_vertices(args.vertices)
        cl = simplex.classify(V, args.tol)
        inputs["vertices"] = V.tolist()
        if not cl.is_orthocentric:
            raise NotOrthocentric(f"not orthocentric (residual {cl.residual:.3g})")
        s = cl.canonical
        inputs["classification"] = cl.as_dict()
    else:
        if args.cls is None or args.tau is None:
            raise UsageError("give --vertices or both --class and --tau")
        s = simplex.CanonicalSimplex(args.cls.capitalize(), args.tau)
    inputs.update({"class": s.kind, "tau": list(s.tau)})
    if args.all:
        rows = [_angle_row(s, f, quad) for k in range(s.d + 1) for f in s.faces(k)]
        return {"inputs": inputs, "results": {"rows": rows}}
    face = _face_from_args(s, args)
    return {"inputs": inputs, "results": _angle_row(s, face, quad)}


def cmd_classify(args):
    V = read_vertices(args.vertices)
    cl = simplex.classify(V, args.tol)
    return {"inputs": {"vertices": V.tolist(), "tol": args.tol}, "results": cl.as_dict()}


def cmd_conic_volumes(args):
    p = _cone_params(args)
    v = cones.conic_intrinsic_volumes(cones.OrthocentricCone(p.checked()), _quad(args))
    return {"inputs": _cone_inputs(p),
            "results": {"values": v.values.tolist(), "err_estimates": v.err_estimates.tolist()}}


def _gauss_spec(args):
    tau = args.tau if args.tau is not None else [1.0] * args.n
    return gauss.GaussianPolytopeSpec(args.d, args.n, tau)


def cmd_gauss_f(args):
    spec = _gauss_spec(args)
    f = gauss.expected_f_vector(spec)
    return {"inputs": {"d": spec.d, "n": spec.n, "tau": list(spec.tau)},
            "results": {"values": f.values.tolist(), "err_estimates": f.err_estimates.tolist()}}


def cmd_gauss_volume(args):
    spec = _gauss_spec(args)
    v = gauss.expected_volume(spec)
    return {"inputs": {"d": spec.d, "n": spec.n, "tau": list(spec.tau)}, "results": {"value": v}}


def _parallel(fn, args):
    """Run ``fn(n, stream)`` on ``--jobs`` streams and return results in stream order."""
    jobs = max(1, args.jobs)
    base = mc.RngStream(_seed(args), 0)
    sizes = [args.samples // jobs + (1 if i < args.samples % jobs else 0) for i in range(jobs)]
    streams = base.split(jobs)
    if jobs == 1:
        return [fn(sizes[0], streams[0])]
    with ThreadPoolExecutor(jobs) as ex:
        return list(ex.map(fn, sizes, streams))


def _compare(exact, est: mc.McEstimate, k=None):
    row = {"closed_form": exact, "mc": est.as_dict(), "z": est.z_score(exact)}
    if k is not None:
        row["k"] = k
    return row


def cmd_verify(args):
    quad = _quad(args)
    target = args.target
    rows = []
    inputs = {"target": target, "samples": args.samples}
    if target in ("gd", "solid-angle", "conic-volumes"):
        if args.lambda0 is None:
            raise UsageError(f"verify {target} needs --lambda0")
        p = _cone_params(args).checked()
        inputs.update(_cone_inputs(p))
        if target == "gd":
            exact = g(p, quad).value
            est = mc.pool(_parallel(lambda n, s: mc.orthant_probability(p, n, s), args))
            rows.append(_compare(exact, est))
        elif target == "solid-angle":
            exact = cones.solid_angle(p, quad).value
            G = signed_generators(p)
            est = mc.pool(_parallel(lambda n, s: mc.solid_angle(G, n, s), args))
            rows.append(_compare(exact, est))
        else:
            exact = cones.conic_intrinsic_volumes(p, quad).values
            G = signed_generators(p)
            parts = _parallel(lambda n, s: mc.conic_intrinsic_volumes(G, n, s), args)
            for k in range(p.d + 1):
                rows.append(_compare(float(exact[k]), mc.pool([pt[k] for pt in parts]), k))
    elif target in ("gauss-f", "gauss-volume"):
        if args.d is None or args.n is None:
            raise UsageError(f"verify {target} needs --d and --n")
        spec = _gauss_spec(args)
        if spec.d != 2:
            raise UsageError("Monte-Carlo polytope oracles are planar: use --d 2")
        inputs.update({"d": spec.d, "n": spec.n, "tau": list(spec.tau)})
        if target == "gauss-f":
            exact = gauss.expected_f_vector(spec).values
            est = mc.pool(_parallel(
                lambda n, s: mc.empirical_f_vector_2d(spec.n, spec.tau, n, s)[0], args))
            rows = [_compare(float(exact[k]), est, k) for k in range(2)]
        else:
            exact = gauss.expected_volume(spec)
            est = mc.pool(_parallel(
                lambda n, s: mc.empirical_volume_2d(spec.n, spec.tau, n, s), args))
            rows.append(_compare(exact, est))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown target {target}")
    zmax = max(abs(r["z"]) for r in rows)
    return {"inputs": inputs, "results": {"rows": rows, "max_abs_z": zmax,
                                          "agree": zmax <= Z_LIMIT}}


# ------------------------------------------------------------------ parser

def _add_common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.add_argument("--rel-tol", type=float, default=1e-10)


def _add_cone(p):
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--lambdas", type=_floats, default=[])
    p.add_argument("--eps", type=_signs, default=None,
                   help="signs as '+,-' or '1,-1' (default all +)")


def _add_gauss(p, need_d=True):
    p.add_argument("--d", type=int, required=need_d)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=_floats, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orthocentric", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gd", help="orthant probability g_d")
    _add_cone(p)
    _add_common(p)
    p.set_defaults(func=cmd_gd)

    p = sub.add_parser("angles", help="internal/external angles of an orthocentric simplex")
    p.add_argument("--class", dest="cls", choices=("acute", "obtuse", "rectangular"))
    p.add_argument("--tau", type=_floats)
    p.add_argument("--vertices", help="CSV or JSON vertex file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--face", type=_ints, help="canonical vertex indices of the face")
    p.add_argument("--k", type=int, help="face dimension")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--face-with-origin", "--with-special", action="store_true")
    grp.add_argument("--face-without-origin", "--without-special", action="store_true")
    p.add_argument("--all", action="store_true", help="table of all faces")
    _add_common(p)
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("classify", help="classify a vertex set")
    p.add_argument("--vertices", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("conic-volumes", help="conic intrinsic volumes of an orthocentric cone")
    _add_cone(p)
    _add_common(p)
    p.set_defaults(func=cmd_conic_volumes)

    p = sub.add_parser("gauss-f", help="expected f-vector of a Gaussian polytope")
    _add_gauss(p)
    _add_common(p)
    p.set_defaults(func=cmd_gauss_f)

    p = sub.add_parser("gauss-volume", help="expected volume of a Gaussian polytope")
    _add_gauss(p)
    _add_common(p)
    p.set_defaults(func=cmd_gauss_volume)

    p = sub.add_parser("verify", help="closed form vs Monte Carlo")
    p.add_argument("target", choices=("gd", "solid-angle", "conic-volumes", "gauss-f",
                                      "gauss-volume"))
    p.add_argument("--lambda0", type=float)
    p.add_argument("--lambdas", type=_floats, default=[])
    p.add_argument("--eps", type=_signs, default=None)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=_floats, default=None)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


# ------------------------------------------------------------------ output

def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def to_csv(record) -> str:
    buf = io.StringIO()
    res = record.get("results", {})
    if isinstance(res, dict) and "rows" in res:
        rows = [_flatten(r) for r in res["rows"]]
    else:
        rows = [_flatten(res)]
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _finite(o):
    """Non-finite floats (e.g. ``mu`` at a right-angle vertex) become ``null``."""
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    if isinstance(o, float) and not math.isfinite(o):
        return None
    return o


def dumps(record) -> str:
    """Deterministic JSON (sorted keys, strict: no NaN/Infinity literals)."""
    return json.dumps(_finite(record), sort_keys=True, default=_json_default, allow_nan=False)


def run(argv=None):
    """Execute the CLI; returns ``(exit_code, record)`` without printing."""
    code, record, _ = _run(argv)
    return code, record


def _run(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    record = {"command": argv}
    fmt = "json"
    try:
        args = build_parser().parse_args(_join_negative_lists(argv))
        fmt = args.format
        out = args.func(args)
        record.update(out)
        code = EXIT_OK
        if args.command == "verify" and not out["results"]["agree"]:
            code = EXIT_MC
        if getattr(args, "seed", None) is not None:
            record["seed"] = args.seed
    except UsageError as exc:
        record["error"] = {"type": "UsageError", "reason": str(exc)}
        code = EXIT_USAGE
    except QuadratureFailure as exc:
        record["error"] = {"type": type(exc).__name__, "reason": str(exc)}
        code = EXIT_QUADRATURE
    except OrthocentricError as exc:
        record["error"] = {"type": type(exc).__name__, "reason": str(exc)}
        code = EXIT_INVALID
    except (argparse.ArgumentTypeError, ValueError, OSError) as exc:
        record["error"] = {"type": "UsageError", "reason": str(exc)}
        code = EXIT_USAGE
    record["exit_code"] = code
    record["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    return code, record, fmt


def main(argv=None):
    code, record, fmt = _run(argv)
    if fmt == "csv" and "error" not in record:
        sys.stdout.write(to_csv(record))
    else:
        sys.stdout.write(dumps(record) + "\n")
    if "error" in record:
        print(f"error: {record['error']['reason']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
