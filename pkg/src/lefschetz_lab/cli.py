"""Command-line driver: ``lefschetz-lab <command> <fixture.json> [options]``.

Exit codes: 0 checks passed / positive verdict, 3 obstructed or negative
finding on a valid run, 1 input error, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from numbers import Rational
from pathlib import Path

from . import __version__
from .errors import InvariantViolation, LefschetzLabError, PreconditionError, StructuralError
from .exterior import Form
from .fixtures import FixtureDocument, load_fixture
from .linalg import QMatrix, qstr

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_OBSTRUCTED = 0, 1, 2, 3

COMMANDS = ("validate", "cohomology", "identities", "ladder", "figure", "lefschetz", "crosscheck")


# -- serialization helpers ---------------------------------------------------

def form_json(w: Form) -> list:
    return [[qstr(c), list(idx)] for idx, c in sorted(w.coeffs.items())]


def matrix_json(M: QMatrix | None):
    if M is None:
        return None
    return [[qstr(x) for x in row] for row in M.to_dense()]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Rational):
        return qstr(x)
    if isinstance(x, Form):
        return form_json(x)
    if isinstance(x, QMatrix):
        return matrix_json(x)
    return str(x)


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def dumps_envelope(fixture: str, command: str, code: int, result: dict) -> str:
    # envelope metadata keeps native types; every mathematical scalar is a string
    env = {"tool": "lefschetz-lab", "version": __version__, "fixture": fixture,
           "command": command, "exit_code": code, "result": _jsonable(result)}
    return json.dumps(env, sort_keys=True, indent=2) + "\n"


# -- context -------------------------------------------------------------------

class Context:
    def __init__(self, doc: FixtureDocument):
        self.doc = doc
        self._C = self._contact = self._S = None

    @property
    def C(self):
        if self._C is None:
            self._C = self.doc.complex()
        return self._C

    @property
    def contact(self):
        from .sasakian import contact_structure

        if self._contact is None:
            self._contact = contact_structure(self.C, self.doc.eta_form())
        return self._contact

    def structure(self, required: bool = True):
        """Sasakian structure from the fixture (diagnostic when axioms fail)."""
        from .sasakian import sasakian_check

        if self._S is None:
            m = self.doc.metric_structure()
            if m is None:
                if required:
                    raise PreconditionError("this command needs a metric in the fixture")
                return None
            self._S = sasakian_check(self.C, self.contact, m, self.doc.phi, strict=False)
        if required and not self._S.verified:
            raise PreconditionError(
                f"this command needs a verified Sasakian structure; failed axioms: {', '.join(self._S.report.failed())}")
        return self._S


# -- commands --------------------------------------------------------------------

def cmd_validate(ctx: Context, args) -> tuple[dict, int]:
    C = ctx.C
    out: dict = {"jacobi": "ok", "dim": C.dim}
    if ctx.doc.eta is None:
        return out, EXIT_OK
    out["reeb"] = list(ctx.contact.xi)
    S = ctx.structure(required=False)
    if S is None:
        return out, EXIT_OK
    out["axioms"] = {r.name: {"passed": r.passed, "witness": r.witness} for r in S.report.results}
    out["sasakian"] = S.verified
    return out, EXIT_OK if S.verified else EXIT_OBSTRUCTED


def cmd_cohomology(ctx: Context, args) -> tuple[dict, int]:
    C = ctx.C
    return {"betti": C.betti_numbers(), "cochain_dims": C.dimensions(),
            "euler_characteristic": sum((-1) ** p * b for p, b in enumerate(C.betti_numbers()))}, EXIT_OK


def cmd_identities(ctx: Context, args) -> tuple[dict, int]:
    from .identities import crosscheck_a_vs_i1, verify_catalog, verify_tachibana

    S = ctx.structure(required=not args.diagnostic)
    if S is None:
        raise PreconditionError("identities need a metric in the fixture")
    reports = verify_catalog(S)
    out: dict = {"diagnostic": not S.verified, "identities": {}}
    for r in reports:
        entry = {"statement": r.statement, "passed": r.passed,
                 "per_degree": r.per_degree}
        if r.counterexample:
            ce = r.counterexample
            entry["counterexample"] = {"label": ce.label, "degree": ce.degree,
                                       "basis_form": list(ce.basis_form), "residual": ce.residual}
        out["identities"][r.id] = entry
    all_ok = all(r.passed for r in reports)
    if S.verified:
        out["a_vs_i1_adjoint"] = crosscheck_a_vs_i1(S)
        out["harmonic_properties"] = {p: verify_tachibana(S, p) for p in range(S.dim + 1)}
        all_ok = all_ok and out["a_vs_i1_adjoint"] and all(
            all(v.values()) for v in out["harmonic_properties"].values())
        if not all_ok:
            raise InvariantViolation("an identity failed on a verified Sasakian structure")
        return out, EXIT_OK
    out["failed"] = [r.id for r in reports if not r.passed]
    return out, EXIT_OK if all_ok else EXIT_OBSTRUCTED


def cmd_ladder(ctx: Context, args) -> tuple[dict, int]:
    from .ladder import ladder_trace

    S = ctx.structure()
    degrees = [args.degree] if args.degree is not None else list(range(S.n + 1))
    out = {}
    for p in degrees:
        if not 0 <= p <= S.n:
            raise PreconditionError(f"--degree must lie in 0..{S.n}")
        traces = []
        for w in S.hodge.harmonic_basis(p):
            tr = ladder_trace(S, w)
            if not tr.passed:
                raise StructuralError(f"ladder check failed: {[k for k, v in tr.checks.items() if not v]}")
            traces.append({
                "nodes": [{"degree": nd.degree, "nu": nd.nu, "family": str(nd.family), "form": nd.form}
                          for nd in tr.nodes],
                "steps": tr.steps,
                "interleaved": [{"degree": nd.degree, "nu": nd.nu, "family": str(nd.family)}
                                for nd in tr.interleaved],
                "checks": tr.checks,
            })
        out[p] = traces
    return {"n": S.n, "traces": out}, EXIT_OK


def figure_tsv(fd) -> str:
    lines = ["# nodes", "p\tnu\tfamily\tdim"]
    lines += [f"{p}\t{qstr(v)}\t{f}\t{d}" for p, v, f, d in fd.nodes]
    lines += ["# edges", "p1\tnu1\tp2\tnu2\toperator"]
    lines += [f"{p1}\t{qstr(v1)}\t{p2}\t{qstr(v2)}\t{op}" for p1, v1, _, p2, v2, _, op in fd.edges]
    return "\n".join(lines) + "\n"


def cmd_figure(ctx: Context, args) -> tuple[dict, int]:
    from .ladder import admissible_values, figure_data

    S = ctx.structure()
    fd = figure_data(S)
    for p, v, f, _ in fd.nodes:
        if v not in admissible_values(S.n, p, f):
            raise InvariantViolation(f"node ({p}, {v}, {f}) outside the admissible grid")
    out = {
        "n": fd.n,
        "nodes": [{"p": p, "nu": v, "family": str(f), "dim": d} for p, v, f, d in fd.nodes],
        "edges": [{"p1": a, "nu1": b, "p2": d, "nu2": e, "operator": op} for a, b, _, d, e, _, op in fd.edges],
        "_tsv": figure_tsv(fd),
    }
    return out, EXIT_OK


def cmd_lefschetz(ctx: Context, args) -> tuple[dict, int]:
    from .lefschetz import OBSTRUCTED, bilinear_form, relation, verdict

    C, contact = ctx.C, ctx.contact
    S = ctx.structure(required=False)
    reports = {p: relation(C, contact, p) for p in range(contact.n + 1)}
    v = verdict(C, contact, S if S is not None and S.verified else None, reports)
    rel = {}
    for p, r in reports.items():
        B = bilinear_form(C, contact, p, r.representatives)
        rel[p] = {
            "classification": r.classification,
            "domain_full": r.domain_full,
            "well_defined": r.well_defined,
            "bijective": r.bijective,
            "constraint_dim": r.constraint_basis.ncols,
            "matrix": r.matrix,
            "bilinear_form": B,
        }
    out = {
        "relations": rel,
        "parity": {p: {"betti": b, "even": e} for p, (b, e) in v.parity.items()},
        "verdict": v.overall,
        "reasons": v.reasons,
        "crosschecked_with_metric": v.crosschecked,
    }
    return out, EXIT_OBSTRUCTED if v.overall == OBSTRUCTED else EXIT_OK


def cmd_crosscheck(ctx: Context, args) -> tuple[dict, int]:
    from .lefschetz import lef_matrix_harmonic, metric_independence_check, relation
    from .sasakian import sasakian_check

    S = ctx.structure()
    C, contact = ctx.C, ctx.contact
    out: dict = {"degrees": {}}
    S2 = None
    if args.metric2:
        doc2 = load_fixture(args.metric2)
        if doc2.dim != ctx.doc.dim or doc2.lie_algebra().diff1 != ctx.doc.lie_algebra().diff1:
            raise PreconditionError("--metric2 fixture describes a different Lie algebra")
        if doc2.eta_form() != ctx.doc.eta_form():
            raise PreconditionError("--metric2 fixture has a different contact form")
        m2 = doc2.metric_structure()
        if m2 is None:
            raise PreconditionError("--metric2 fixture has no metric")
        S2 = sasakian_check(C, contact, m2, doc2.phi, strict=True)
        out["metric2"] = doc2.name
    ok = True
    for p in range(S.n + 1):
        if S2 is None:
            M = lef_matrix_harmonic(S, p)
            R = relation(C, contact, p).matrix
            agree = R is not None and M == R
            out["degrees"][p] = {"harmonic": M, "relation": R, "agree": agree}
        else:
            agree, res = metric_independence_check(C, contact, p, S, S2)
            out["degrees"][p] = {"harmonic": lef_matrix_harmonic(S, p), "harmonic2": lef_matrix_harmonic(S2, p),
                                 "relation": relation(C, contact, p).matrix, "agree": agree}
        ok = ok and agree
    out["star_route_codifferential"] = S.hodge.star_crosscheck_delta()
    ok = ok and all(out["star_route_codifferential"].values())
    if not ok:
        raise InvariantViolation("metric route and relation route disagree")
    return out, EXIT_OK


HANDLERS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "identities": cmd_identities,
    "ladder": cmd_ladder,
    "figure": cmd_figure,
    "lefschetz": cmd_lefschetz,
    "crosscheck": cmd_crosscheck,
}


def _text_summary(cmd: str, result: dict) -> str:
    if cmd == "cohomology":
        return "betti: " + " ".join(map(str, result["betti"])) + "\n"
    if cmd == "lefschetz":
        lines = [f"p={p}: {r['classification']}" for p, r in result["relations"].items()]
        lines += [f"b{p}={x['betti']} {'even' if x['even'] else 'odd'}" for p, x in result["parity"].items()]
        lines.append(f"verdict: {result['verdict']}")
        lines += [f"  {r}" for r in result["reasons"]]
        return "\n".join(lines) + "\n"
    if cmd == "identities":
        return "".join(f"({k}) {'pass' if v['passed'] else 'FAIL'}  {v['statement']}\n"
                       for k, v in result["identities"].items())
    if cmd == "validate":
        lines = ["jacobi: ok"]
        if "reeb" in result:
            lines.append("reeb: " + " ".join(qstr(x) for x in result["reeb"]))
        for name, a in result.get("axioms", {}).items():
            lines.append(f"{name}: {'ok' if a['passed'] else 'FAIL ' + (a['witness'] or '')}")
        return "\n".join(lines) + "\n"
    return dumps_report(result)


class UsageError(LefschetzLabError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for invariant violations here
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lefschetz-lab",
                 description="Exact checks of Sasakian identities and the contact Hard Lefschetz property.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("fixture", help="fixture JSON file (or the name of a bundled fixture, e.g. heis3.json)")
    ap.add_argument("--degree", type=int, default=None)
    ap.add_argument("--metric2", default=None, help="second fixture supplying another compatible metric")
    ap.add_argument("--out", default=None, help="write the report (or TSV for `figure`) here")
    ap.add_argument("--json", action="store_true", help="emit the JSON report on stdout")
    ap.add_argument("--diagnostic", action="store_true",
                    help="run `identities` on a structure that fails the Sasakian axioms")
    return ap


def run(argv=None) -> tuple[int, str, str]:
    """Returns (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
        doc = load_fixture(args.fixture)
        result, code = HANDLERS[args.command](Context(doc), args)
    except (InvariantViolation, StructuralError) as exc:
        return EXIT_INTERNAL, "", f"internal invariant violation: {exc}\n"
    except LefschetzLabError as exc:
        return EXIT_INPUT, "", f"error: {type(exc).__name__}: {exc}\n"
    tsv = result.pop("_tsv", None)
    report = dumps_envelope(doc.name, args.command, code, result)
    text = report if args.json else (tsv if tsv is not None else _text_summary(args.command, result))
    if args.out:
        try:
            Path(args.out).write_text(tsv if tsv is not None and not args.json else report,
                                      encoding="utf-8")
        except OSError as exc:
            return EXIT_INPUT, "", f"error: cannot write {args.out}: {exc.strerror}\n"
        if not args.json:
            text = ""
    return code, text, ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
