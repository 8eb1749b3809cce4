"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 malformed input,
3 an input violated a mathematical precondition.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import kl
from .comparison import (
    ApartConditionFailure,
    AssumptionFailure,
    comparison_block,
    gamma_std,
)
from .functors import (
    InvalidDatum,
    PreconditionFailure,
    TranslationDatum,
    translate,
    verify_main_diagram,
)
from .kgroups import RealBlock, bz_derivative, padic_std, project_weight, real_std
from .multisegments import (
    MassBoundExceeded,
    Multisegment,
    WeightFunction,
    WeightMismatch,
    admissible_r,
    closure_order,
    enumerate_multisegments,
    integral_pieces,
    open_orbit,
    to_point,
)
from .vogan import is_full_rank, orbit_dimension
from .weyl import NotDominant, all_perms

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_phi(path: str) -> WeightFunction:
    data = _read_json(path)
    try:
        return WeightFunction.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path} is not a weight function: {exc}") from exc


def _load_multisegment(text: str) -> Multisegment:
    if Path(text).is_file():
        try:
            return Multisegment.from_json(_read_json(text))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{text} is not a multisegment: {exc}") from exc
    try:
        return Multisegment.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse multisegment {text!r}: {exc}") from exc


def _points(text: str) -> list:
    try:
        return [to_point(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad list of rationals {text!r}") from exc


def _perm(text: str) -> tuple[int, ...]:
    try:
        w = tuple(int(t) for t in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise InputError(f"bad permutation {text!r}") from exc
    if sorted(w) != list(range(1, len(w) + 1)):
        raise InputError(f"{text!r} is not a permutation of 1..n")
    return w


def _rat(text: str):
    try:
        return to_point(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def _emit(obj, args) -> None:
    if isinstance(obj, str):
        sys.stdout.write(obj if obj.endswith("\n") else obj + "\n")
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- subcommands


def _covers(orbits: list[Multisegment]) -> list[tuple[Multisegment, Multisegment]]:
    """Covering pairs ``(m, n)`` with ``m < n`` in the closure order."""
    up = closure_order(orbits)
    edges = []
    for m in orbits:
        above = up[m] - {m}
        for n in orbits:
            if n in above and not any(n in up[z] for z in above if z != n):
                edges.append((m, n))
    return edges


def _dot(orbits: list[Multisegment], edges) -> str:
    index = {m: i for i, m in enumerate(orbits)}
    lines = ["digraph closure {", "  rankdir=BT;"]
    for m in orbits:
        lines.append(f'  n{index[m]} [label="{m}\\ndim {orbit_dimension(m)}"];')
    for m, n in edges:
        lines.append(f"  n{index[m]} -> n{index[n]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_orbits(args) -> int:
    phi = _load_phi(args.phi)
    orbits = enumerate_multisegments(phi, mass_bound=args.mass_bound)
    if args.format == "dot" or args.dot:
        _emit(_dot(orbits, _covers(orbits)), args)
        return EXIT_OK
    full = {}
    for piece in integral_pieces(phi):
        full[piece] = bool(admissible_r(piece))
    rows = []
    for m in orbits:
        fr = is_full_rank(m, phi) if all(full.values()) else None
        rows.append({"multisegment": str(m), "segments": m.to_json()["segments"], "dim": orbit_dimension(m), "full_rank": fr})
    if args.format == "csv":
        _emit(_csv([["multisegment", "dim", "full_rank"]] + [[r["multisegment"], r["dim"], r["full_rank"]] for r in rows]), args)
    else:
        _emit({"phi": phi.to_json(), "count": len(rows), "orbits": rows}, args)
    return EXIT_OK


def cmd_poset(args) -> int:
    phi = _load_phi(args.phi)
    orbits = enumerate_multisegments(phi, mass_bound=args.mass_bound)
    edges = _covers(orbits)
    if args.format == "json":
        _emit({"nodes": [str(m) for m in orbits], "covers": [[str(a), str(b)] for a, b in edges]}, args)
    elif args.format == "csv":
        _emit(_csv([["lower", "upper"]] + [[str(a), str(b)] for a, b in edges]), args)
    else:
        _emit(_dot(orbits, edges), args)
    return EXIT_OK


def cmd_kl(args) -> int:
    n = args.n
    if n > args.n_bound:
        raise PreconditionFailure(f"n = {n} exceeds --n-bound {args.n_bound}")
    if args.x or args.w:
        if not (args.x and args.w):
            raise InputError("--x and --w go together")
        x, w = _perm(args.x), _perm(args.w)
        if len(x) != n or len(w) != n:
            raise InputError("permutations must have length n")
        p = kl.kl_poly(x, w)
        _emit({"x": list(x), "w": list(w), "poly": str(p), "coefficients": p.coefficients()}, args)
        return EXIT_OK
    perms = all_perms(n)
    rows = []
    for w in perms:
        for x in perms:
            p = kl.kl_poly(x, w)
            if p:
                rows.append((x, w, p))
    if args.format == "csv":
        _emit(_csv([["x", "w", "poly"]] + [["".join(map(str, x)), "".join(map(str, w)), str(p)] for x, w, p in rows]), args)
    else:
        _emit({"n": n, "polynomials": [{"x": list(x), "w": list(w), "poly": str(p)} for x, w, p in rows]}, args)
    return EXIT_OK


def cmd_compare(args) -> int:
    phi = _load_phi(args.phi)
    if phi.mass() > args.mass_bound:
        raise MassBoundExceeded(f"mass {phi.mass()} exceeds bound {args.mass_bound}")
    block = comparison_block(phi, _rat(args.eL), _rat(args.eR))
    if block.n > args.n_bound:
        raise PreconditionFailure(f"rank {block.n} exceeds --n-bound {args.n_bound}")
    _emit(block.to_json(), args)
    return EXIT_OK


def _block(args) -> RealBlock:
    return RealBlock(_points(args.lamL), _points(args.lamR))


def cmd_gamma(args) -> int:
    block = _block(args)
    labels = [block.coset(_perm(args.w))] if args.w else block.rep_labels()
    rows = [{"coset": list(c.w_min), "multisegment": str(gamma_std(block, c))} for c in labels]
    if args.format == "csv":
        _emit(_csv([["coset", "multisegment"]] + [["".join(map(str, r["coset"])), r["multisegment"]] for r in rows]), args)
    else:
        _emit({"block": str(block), "images": rows}, args)
    return EXIT_OK


def cmd_derive(args) -> int:
    m = _load_multisegment(args.m)
    out = bz_derivative(args.side, _rat(args.k), padic_std(m))
    if args.project:
        out = project_weight(out, _load_phi(args.project))
    _emit({"input": str(m), "side": args.side, "k": str(_rat(args.k)), "result": str(out), "json": out.to_json()}, args)
    return EXIT_OK


def cmd_translate(args) -> int:
    source = _block(args)
    target = RealBlock(_points(args.to_lamL or args.lamL), _points(args.to_lamR or args.lamR))
    d = TranslationDatum(source, target).validate()
    labels = [source.coset(_perm(args.w))] if args.w else source.rep_labels()
    rows = []
    for c in labels:
        img = translate(d, real_std(source, c))
        rows.append({"coset": list(c.w_min), "image": str(img), "json": img.to_json()})
    _emit({"source": str(source), "target": str(target), "kind": d.kind, "images": rows}, args)
    return EXIT_OK


def _all_cases(phi: WeightFunction):
    for k, v in phi.items:
        for c in range(1, v + 1):
            yield c, k, False
            yield c, k, True


def _verify_file(path: Path, args) -> dict:
    try:
        phi = _load_phi(str(path))
    except InputError as exc:
        return {"file": path.name, "error": str(exc), "cases": []}
    cases = []
    for c, k, left in _all_cases(phi):
        try:
            rep = verify_main_diagram(phi, c, k, _rat(args.eL), _rat(args.eR), left=left)
        except (PreconditionFailure, AssumptionFailure, ApartConditionFailure):
            continue
        cases.append({"c": c, "k": str(k), "case": rep["case"], "pass": rep["pass"], "labels": len(rep["labels"])})
    return {"file": path.name, "phi": str(phi), "cases": cases}


def cmd_verify(args) -> int:
    if args.batch:
        if not Path(args.batch).is_dir():
            raise InputError(f"{args.batch} is not a directory")
        files = sorted(Path(args.batch).glob("*.json"))
        with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
            results = list(pool.map(lambda p: _verify_file(p, args), files))
        total = sum(len(r["cases"]) for r in results)
        failed = sum(1 for r in results for c in r["cases"] if not c["pass"])
        bad_input = [r["file"] for r in results if "error" in r]
        _emit({"files": results, "cases": total, "failed": failed, "malformed": bad_input}, args)
        if failed:
            return EXIT_FAIL
        return EXIT_INPUT if bad_input else EXIT_OK
    if not (args.phi and args.c is not None and args.k is not None):
        raise InputError("verify needs --phi, --c and --k, or --batch")
    phi = _load_phi(args.phi)
    rep = verify_main_diagram(phi, args.c, _rat(args.k), _rat(args.eL), _rat(args.eR), left=args.left, method=args.method)
    _emit(rep, args)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_dims(args) -> int:
    if args.m:
        m = _load_multisegment(args.m)
        _emit({"multisegment": str(m), "dim": orbit_dimension(m)}, args)
        return EXIT_OK
    if not args.phi:
        raise InputError("dims needs --m or --phi")
    phi = _load_phi(args.phi)
    orbits = enumerate_multisegments(phi, mass_bound=args.mass_bound)
    top = open_orbit(phi)
    expected = sum(c * phi(p + 1) for p, c in phi.items)
    _emit(
        {
            "phi": str(phi),
            "dims": {str(m): orbit_dimension(m) for m in orbits},
            "open_orbit": str(top),
            "open_orbit_dim": orbit_dimension(top),
            "sum_phi_i_phi_i_plus_1": expected,
        },
        args,
    )
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glcompare", description="Multisegments, parabolic double cosets and the real/p-adic comparison.")
    p.add_argument("--mass-bound", type=int, default=16)
    p.add_argument("--n-bound", type=int, default=6)
    p.add_argument("--kl-cache", help="KL cache file, loaded if present and rewritten on exit")
    p.add_argument("--format", choices=("json", "csv", "dot"), default=None)
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("orbits", help="list orbits of a weight function")
    s.add_argument("--phi", required=True)
    s.add_argument("--dot", action="store_true", help="emit the closure order as DOT")
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("poset", help="closure order as a Hasse diagram")
    s.add_argument("--phi", required=True)
    s.set_defaults(func=cmd_poset, default_format="dot")

    s = sub.add_parser("kl", help="Kazhdan-Lusztig polynomials of S_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--x")
    s.add_argument("--w")
    s.set_defaults(func=cmd_kl)

    s = sub.add_parser("compare", help="dump the comparison block of a weight function")
    s.add_argument("--phi", required=True)
    s.add_argument("--eL", default="1/2")
    s.add_argument("--eR", default="-1/2")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("gamma", help="multisegments of the standard modules of a real block")
    s.add_argument("--lamL", required=True)
    s.add_argument("--lamR", required=True)
    s.add_argument("--w")
    s.set_defaults(func=cmd_gamma)

    s = sub.add_parser("derive", help="partial derivative of a standard module")
    s.add_argument("--m", required=True, help="multisegment text such as '[0,2]+2[1]' or a JSON file")
    s.add_argument("--k", required=True)
    s.add_argument("--side", choices=("left", "right"), default="left")
    s.add_argument("--project", help="weight function file to project onto")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("translate", help="translate standard modules between real blocks")
    s.add_argument("--lamL", required=True)
    s.add_argument("--lamR", required=True)
    s.add_argument("--to-lamL", dest="to_lamL")
    s.add_argument("--to-lamR", dest="to_lamR")
    s.add_argument("--w")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("verify", help="check the derivative/translation square")
    s.add_argument("--phi")
    s.add_argument("--c", type=int)
    s.add_argument("--k")
    s.add_argument("--eL", default="1/2")
    s.add_argument("--eR", default="-1/2")
    s.add_argument("--left", action="store_true")
    s.add_argument("--method", choices=("dual", "direct"), default="dual")
    s.add_argument("--batch", help="directory of weight function files; all cases of each are checked")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dims", help="orbit dimensions")
    s.add_argument("--m")
    s.add_argument("--phi")
    s.set_defaults(func=cmd_dims)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.mass_bound <= 0 or args.n_bound <= 0 or args.threads <= 0:
        print("error: bounds and thread count must be positive", file=sys.stderr)
        return EXIT_INPUT
    if args.format is None:
        args.format = getattr(args, "default_format", "json")
    if args.kl_cache and Path(args.kl_cache).is_file():
        try:
            kl.load_cache(args.kl_cache)
        except (ValueError, OSError) as exc:
            print(f"error: bad KL cache: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        code = args.func(args)
    except (InputError, WeightMismatch, NotDominant, InvalidDatum) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionFailure, AssumptionFailure, ApartConditionFailure, MassBoundExceeded) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.kl_cache:
        kl.save_cache(args.kl_cache)
    return code


if __name__ == "__main__":
    sys.exit(main())
