"""Command-line front end.

Subcommands:

* ``symbol``  -- print an exact Wigner symbol from the closed-form oracle.
* ``build``   -- build a diagram (symmetriser, cswap, crown, link, 3jm,
  4jm, 6j, theta, loop) and write it as JSON, with a correction-factor
  sidecar and optional DOT export.
* ``eval``    -- contract a diagram file (exact or float mode), optionally
  plugging basis states and simplifying first.
* ``verify``  -- run a manifest of cases, each built diagrammatically,
  corrected, and compared against both the stored expected value and the
  independent oracle.

Exit codes: 0 success, 1 verification failure, 2 usage/domain error,
3 rank cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .exact import ExactScalar, HalfInteger, RadicalNumber, radical_to_float
from .graph import Diagram, deserialize, serialize, to_dot
from .rewrite import DEFAULT_SIMPLIFY_RULES, simplify
from .tensor import RankCapExceeded, eval_diagram, plan_contraction, plug_basis
from .su2 import (
    CorrectionFactor,
    VertexSpec,
    corrected_spin_matrix,
    cswap_gadget,
    crown,
    exact_matrix,
    loop_network,
    network_6j,
    plug_vertex_arguments,
    symmetriser,
    theta_network,
    vertex_3jm,
    vertex_4jm,
    yutsis_link,
)
from .wigner import (
    invariant_loop,
    invariant_theta,
    triangle_ok,
    w3jm,
    w4jm,
    w6j,
    yutsis_matrix_3,
    yutsis_matrix_4,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RANK_CAP = 3


class CliError(Exception):
    """Domain/usage error; reported with exit code 2."""


def _spin(text: str) -> HalfInteger:
    try:
        return HalfInteger(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid spin {text!r}: {exc}") from None


def _spins(texts: Sequence[str]) -> list[HalfInteger]:
    return [_spin(t) for t in texts]


def _print_value(v: RadicalNumber) -> None:
    print(f"{v.serialize()}  (~ {radical_to_float(v):.12g})")


# -- symbol ---------------------------------------------------------------


def cmd_symbol(args: argparse.Namespace) -> int:
    kind = args.kind
    vals = _spins(args.spins)
    if kind == "3jm":
        if len(vals) != 6:
            raise CliError("3jm needs j1 j2 j3 m1 m2 m3")
        j1, j2, j3, m1, m2, m3 = vals
        if not triangle_ok(j1, j2, j3):
            raise CliError(f"({j1},{j2},{j3}) violates the triangle rule")
        for j, m in ((j1, m1), (j2, m2), (j3, m3)):
            if abs(m.twice) > j.twice or (j.twice + m.twice) % 2:
                raise CliError(f"m={m} is not a magnetic index for j={j}")
        _print_value(w3jm(j1, j2, j3, m1, m2, m3))
    elif kind == "4jm":
        if len(vals) != 9:
            raise CliError("4jm needs j1 j2 j3 j4 m1 m2 m3 m4 j")
        j1, j2, j3, j4, m1, m2, m3, m4, j = vals
        if not triangle_ok(j1, j2, j) or not triangle_ok(j, j3, j4):
            raise CliError(f"channel spin {j} violates the triangle rules")
        _print_value(w4jm(j1, j2, j3, j4, m1, m2, m3, m4, j))
    else:  # 6j
        if len(vals) != 6:
            raise CliError("6j needs j1 j2 j3 j4 j5 j6")
        j1, j2, j3, j4, j5, j6 = vals
        triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j3, j4, j5)]
        for t in triads:
            if not triangle_ok(*t):
                raise CliError(f"triad {tuple(str(x) for x in t)} violates the triangle rule")
        _print_value(w6j(j1, j2, j3, j4, j5, j6))
    return EXIT_OK


# -- build ----------------------------------------------------------------


def _build_object(kind: str, spins: list[str], orient: Optional[str]):
    """Returns (diagram, correction-or-None)."""
    if kind == "symmetriser":
        if len(spins) != 1:
            raise CliError("symmetriser needs one wire count")
        try:
            n = int(spins[0])
        except ValueError:
            raise CliError(f"wire count {spins[0]!r} is not an integer") from None
        return symmetriser(n), None
    if kind == "cswap":
        return cswap_gadget(), None
    if kind == "crown":
        if len(spins) != 1:
            raise CliError("crown needs one stage number")
        return crown(int(spins[0])), None
    if kind == "link":
        if len(spins) != 1:
            raise CliError("link needs one spin")
        return yutsis_link(_spin(spins[0])), None
    try:
        if kind == "3jm":
            if len(spins) != 3:
                raise CliError("3jm needs three spins")
            return vertex_3jm(VertexSpec(tuple(_spins(spins)), orient or "iio"))
        if kind == "4jm":
            if len(spins) != 5:
                raise CliError("4jm needs four leg spins and a channel spin")
            return vertex_4jm(_spins(spins[:4]), _spin(spins[4]), orient or "iioo")
        if kind == "6j":
            if len(spins) != 6:
                raise CliError("6j needs six spins")
            return network_6j(*_spins(spins))
        if kind == "theta":
            if len(spins) != 3:
                raise CliError("theta needs three spins")
            return theta_network(*_spins(spins))
        if kind == "loop":
            if len(spins) != 1:
                raise CliError("loop needs one spin")
            return loop_network(_spin(spins[0]))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    raise CliError(f"unknown build kind {kind!r}")


def _correction_dict(corr: CorrectionFactor) -> dict:
    return {
        "lambdas": corr.lambdas.serialize(),
        "norms": corr.norms.serialize(),
        "plug_norm": corr.plug_norm.serialize(),
        "value": corr.value.serialize(),
        "notes": list(corr.notes),
    }


def cmd_build(args: argparse.Namespace) -> int:
    result = _build_object(args.kind, args.spins, args.orient)
    d, corr = result if isinstance(result, tuple) else (result, None)
    doc = serialize(d)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {out}")
        if corr is not None:
            side = out.with_suffix(out.suffix + ".corrections.json")
            side.write_text(json.dumps(_correction_dict(corr), indent=2) + "\n")
            print(f"wrote {side}")
    else:
        print(json.dumps(doc, indent=2))
        if corr is not None:
            print(json.dumps(_correction_dict(corr), indent=2))
    if args.dot:
        Path(args.dot).write_text(to_dot(d))
        print(f"wrote {args.dot}")
    print(f"vertices: {len(d.vertices)}  edges: {len(d.edges)}  "
          f"inputs: {len(d.inputs)}  outputs: {len(d.outputs)}")
    return EXIT_OK


# -- eval -----------------------------------------------------------------


def _parse_plug(spec: str, d: Diagram) -> dict[int, int]:
    """'pos=bit,...' where pos indexes the boundary order inputs-then-outputs."""
    order = list(d.inputs) + list(d.outputs)
    assignment: dict[int, int] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            pos_s, bit_s = part.split("=")
            pos, bit = int(pos_s), int(bit_s)
        except ValueError:
            raise CliError(f"bad plug entry {part!r}; expected pos=bit") from None
        if not 0 <= pos < len(order):
            raise CliError(f"plug position {pos} out of range (diagram has {len(order)} wires)")
        if bit not in (0, 1):
            raise CliError(f"plug bit must be 0 or 1, got {bit}")
        assignment[order[pos]] = bit
    return assignment


def cmd_eval(args: argparse.Namespace) -> int:
    path = Path(args.file)
    if not path.exists():
        raise CliError(f"no such file: {path}")
    try:
        d = deserialize(json.loads(path.read_text()))
    except (json.JSONDecodeError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read diagram: {exc}") from None
    if args.plug:
        d = plug_basis(d, _parse_plug(args.plug, d))
    if args.simplify:
        d, trace = simplify(d, rules=DEFAULT_SIMPLIFY_RULES)
        print(json.dumps({"rewrite_trace": [
            {"rule": r, "site": list(s)} for r, s in trace.steps
        ]}))
    plan = plan_contraction(d, rank_cap=args.rank_cap, mode=args.mode)
    print(f"peak rank: {plan.peak_rank}  steps: {len(plan.steps)}")
    t = eval_diagram(d, mode=args.mode, plan=plan)
    if t.n_inputs == 0 and t.n_outputs == 0:
        v = t.scalar_value()
        if args.mode == "exact":
            try:
                print(f"value: {v.to_radical().serialize()}")
            except ValueError:
                print(f"value: {v.serialize()}")
            print(f"float: {v.to_complex():.12g}")
        else:
            print(f"value: {v:.12g}")
    else:
        m = t.to_matrix()
        print(f"matrix ({m.shape[0]} x {m.shape[1]}), rows = outputs, cols = inputs:")
        for row in m:
            if args.mode == "exact":
                print("  [" + ", ".join(x.serialize() for x in row) + "]")
            else:
                print("  [" + ", ".join(f"{x:.6g}" for x in row) + "]")
    return EXIT_OK


# -- verify ---------------------------------------------------------------


def _load_manifest(name: str) -> dict:
    p = Path(name)
    if p.exists():
        return json.loads(p.read_text())
    if name == "paper.json":
        return json.loads(resources.files("spinnet.data").joinpath("paper.json").read_text())
    raise CliError(f"no such manifest: {name}")


def _closed_value(d: Diagram, corr: CorrectionFactor, mode: str):
    """Corrected value of a closed diagram (RadicalNumber or float)."""
    raw = eval_diagram(d, mode=mode).scalar_value()
    if mode == "exact":
        return raw.to_radical() * corr.value
    return raw.real * radical_to_float(corr.value)


def _case_diagram_value(case: dict, mode: str):
    kind = case["kind"]
    if kind == "6j":
        d, corr = network_6j(*_spins(case["spins"]))
        return _closed_value(d, corr, mode)
    if kind == "3jm":
        orient = case.get("orientation", "iio")
        d, corr = vertex_3jm(VertexSpec(tuple(_spins(case["spins"])), orient))
        d = plug_vertex_arguments(d, corr, _spins(case["spins"]), _spins(case["ms"]), orient)
        return _closed_value(d, corr, mode)
    if kind == "4jm":
        orient = case.get("orientation", "iioo")
        spins = _spins(case["spins"])
        d, corr = vertex_4jm(spins, _spin(case["j"]), orient)
        d = plug_vertex_arguments(d, corr, spins, _spins(case["ms"]), orient)
        return _closed_value(d, corr, mode)
    if kind == "invariant":
        which = case["which"]
        if which == "loop":
            d, corr = loop_network(_spin(case["spins"][0]))
        elif which == "theta":
            d, corr = theta_network(*_spins(case["spins"]))
        else:
            raise CliError(f"unknown invariant {which!r}")
        return _closed_value(d, corr, mode)
    raise CliError(f"unknown case kind {kind!r}")


def _case_oracle_value(case: dict) -> Optional[RadicalNumber]:
    kind = case["kind"]
    if kind == "6j":
        return w6j(*_spins(case["spins"]))
    if kind == "3jm":
        return w3jm(*_spins(case["spins"]), *_spins(case["ms"]))
    if kind == "4jm":
        return w4jm(*_spins(case["spins"]), *_spins(case["ms"]), _spin(case["j"]))
    if kind == "invariant":
        if case["which"] == "loop":
            return invariant_loop(_spin(case["spins"][0]))
        return invariant_theta(*_spins(case["spins"]))
    return None


def _matrix_case(case: dict) -> tuple[bool, str]:
    builder = case["builder"]
    if builder == "3jm":
        orient = case.get("orientation", "iio")
        spins = _spins(case["spins"])
        d, corr = vertex_3jm(VertexSpec(tuple(spins), orient))
        got = corrected_spin_matrix(
            d, corr,
            [j for j, o in zip(spins, orient) if o == "i"],
            [j for j, o in zip(spins, orient) if o == "o"],
        )
        oracle = yutsis_matrix_3(spins, orient)
    elif builder == "4jm":
        orient = case.get("orientation", "iioo")
        spins = _spins(case["spins"])
        d, corr = vertex_4jm(spins, _spin(case["j"]), orient)
        got = corrected_spin_matrix(
            d, corr,
            [j for j, o in zip(spins, orient) if o == "i"],
            [j for j, o in zip(spins, orient) if o == "o"],
        )
        oracle = yutsis_matrix_4(spins, _spin(case["j"]), orient)
    elif builder == "symmetriser":
        m = exact_matrix(symmetriser(int(case["n"])))
        got, oracle = m, None
    elif builder == "cswap":
        got, oracle = exact_matrix(cswap_gadget()), None
    else:
        return False, f"unknown matrix builder {builder!r}"
    expected = [[RadicalNumber.deserialize(x) for x in row] for row in case["expected"]]
    if len(got) != len(expected) or any(len(a) != len(b) for a, b in zip(got, expected)):
        return False, f"shape mismatch: got {len(got)}x{len(got[0])}"
    for r, (ra, rb) in enumerate(zip(got, expected)):
        for c, (a, b) in enumerate(zip(ra, rb)):
            if a != b:
                return False, f"entry ({r},{c}): got {a.serialize()}, expected {b.serialize()}"
    if oracle is not None:
        for ra, rb in zip(got, oracle):
            for a, b in zip(ra, rb):
                if a != b:
                    return False, "matrix disagrees with the oracle"
    return True, "ok"


def _run_case(case: dict) -> tuple[bool, str]:
    try:
        if case["kind"] == "matrix":
            return _matrix_case(case)
        policy = case.get("policy", "exact")
        expected = RadicalNumber.deserialize(case["expected"])
        oracle = _case_oracle_value(case)
        if policy == "exact":
            got = _case_diagram_value(case, "exact")
            if got != expected:
                return False, f"got {got.serialize()}, expected {expected.serialize()}"
            if oracle is not None and got != oracle:
                return False, f"diagram {got.serialize()} disagrees with oracle {oracle.serialize()}"
            return True, f"value {got.serialize()}"
        if policy == "float":
            tol = float(case.get("tol", 1e-8))
            got = _case_diagram_value(case, "float")
            want = radical_to_float(expected)
            scale = max(abs(want), 1.0)
            if abs(got - want) > tol * scale:
                return False, f"got {got!r}, expected {want!r} (tol {tol})"
            if oracle is not None and abs(got - radical_to_float(oracle)) > tol * scale:
                return False, f"diagram {got!r} disagrees with oracle {radical_to_float(oracle)!r}"
            return True, f"value {got:.12g}"
        return False, f"unknown policy {policy!r}"
    except RankCapExceeded:
        raise
    except CliError as exc:
        return False, str(exc)
    except (ValueError, KeyError, NotImplementedError) as exc:
        return False, f"{type(exc).__name__}: {exc}"


def cmd_verify(args: argparse.Namespace) -> int:
    manifest = _load_manifest(args.manifest)
    cases = manifest.get("cases", [])
    if args.only:
        cases = [c for c in cases if c.get("kind") == args.only]
    if not cases:
        raise CliError("manifest has no (matching) cases")
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_run_case, cases))
    failures = 0
    for case, (ok, detail) in zip(cases, results):
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        src = case.get("source", "")
        print(f"[{status}] {case.get('id', '?'):32s} {detail}" + (f"  ({src})" if src else ""))
    print(f"{len(cases) - failures}/{len(cases)} cases passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinnet", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    # Let arguments like "-1/2" pass as negative spins, not option flags.
    spin_matcher = re.compile(r"^-\d+(/\d+|\.\d+)?$")

    ps = sub.add_parser("symbol", help="print an exact Wigner symbol")
    ps._negative_number_matcher = spin_matcher
    ps.add_argument("kind", choices=["3jm", "4jm", "6j"])
    ps.add_argument("spins", nargs="+")
    ps.set_defaults(func=cmd_symbol)

    pb = sub.add_parser("build", help="build a diagram and write it as JSON")
    pb.add_argument("kind", choices=[
        "symmetriser", "cswap", "crown", "link", "3jm", "4jm", "6j", "theta", "loop"
    ])
    pb.add_argument("spins", nargs="*")
    pb.add_argument("--orient", help="leg orientation string, e.g. iio")
    pb.add_argument("--out", help="output diagram JSON file")
    pb.add_argument("--dot", help="also write a DOT rendering")
    pb.set_defaults(func=cmd_build)

    pe = sub.add_parser("eval", help="contract a diagram file")
    pe.add_argument("file")
    pe.add_argument("--mode", choices=["exact", "float"], default="exact")
    pe.add_argument("--plug", help="basis plugs, e.g. '0=1,1=0' (wire positions)")
    pe.add_argument("--rank-cap", type=int, default=None)
    pe.add_argument("--simplify", action="store_true")
    pe.set_defaults(func=cmd_eval)

    pv = sub.add_parser("verify", help="run a verification manifest")
    pv.add_argument("manifest", nargs="?", default="paper.json")
    pv.add_argument("--only", help="restrict to one case kind")
    pv.add_argument("--jobs", type=int, default=None)
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RankCapExceeded as exc:
        print(f"rank cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RANK_CAP


if __name__ == "__main__":
    sys.exit(main())
