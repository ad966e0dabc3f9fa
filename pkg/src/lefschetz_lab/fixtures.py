"""JSON fixtures: a Lie algebra in Salamon form plus contact/metric data.

Schema::

    {
      "name": "heis3",
      "dim": 3,
      "diff1": {"3": [["-2", 1, 2]]},      # de^3 = -2 e^12
      "eta": [["1", 3]],                   # eta = e^3
      "metric": "identity",                # or a dim x dim Gram matrix of <e^i, e^j>
      "phi": [[...], ...],                 # optional, column j = phi(E_j)
      "orientation": 1                     # optional, +1 or -1
    }

Rationals are JSON integers or strings ``"p"`` / ``"p/q"``.  Indices are 1-based.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from numbers import Rational
from pathlib import Path

from .complex import InvariantComplex, LieAlgebraSpec, build_complex, salamon
from .errors import FixtureError
from .exterior import Form
from .hodge import MetricStructure

_RATIONAL = re.compile(r"-?\d+(/\d+)?")


def parse_rational(x, path: str) -> Rational:
    if isinstance(x, bool):
        raise FixtureError(f"expected a rational, got {x!r}", path)
    if isinstance(x, int):
        return x
    if isinstance(x, str) and _RATIONAL.fullmatch(x.strip()):
        s = x.strip()
        if "/" in s and int(s.split("/")[1]) == 0:
            raise FixtureError(f"zero denominator in {x!r}", path)
        v = Fraction(s)
        return v.numerator if v.denominator == 1 else v
    raise FixtureError(f"malformed rational {x!r} (expected an integer or \"p/q\")", path)


def _index(x, dim: int, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FixtureError(f"index must be an integer, got {x!r}", path)
    if not 1 <= x <= dim:
        raise FixtureError(f"index {x} out of range 1..{dim}", path)
    return x


def _matrix(x, dim: int, path: str) -> list[list[Rational]]:
    if not isinstance(x, list) or len(x) != dim:
        raise FixtureError(f"expected a {dim}x{dim} matrix", path)
    out = []
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != dim:
            raise FixtureError(f"row must have {dim} entries", f"{path}[{i}]")
        out.append([parse_rational(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return out


@dataclass
class FixtureDocument:
    name: str
    dim: int
    diff1: dict[int, list[tuple[Rational, int, int]]]
    eta: list[tuple[Rational, int]] | None
    metric: str | list[list[Rational]] | None
    phi: list[list[Rational]] | None = None
    orientation: int = 1

    def lie_algebra(self) -> LieAlgebraSpec:
        return salamon(self.name, self.dim, self.diff1)

    def complex(self) -> InvariantComplex:
        return build_complex(self.lie_algebra())

    def eta_form(self) -> Form:
        if self.eta is None:
            raise FixtureError("fixture has no contact form", "eta")
        coeffs: dict = {}
        for c, i in self.eta:
            coeffs[(i,)] = coeffs.get((i,), 0) + c
        return Form(self.dim, 1, coeffs)

    def metric_structure(self) -> MetricStructure | None:
        if self.metric is None:
            return None
        if self.metric == "identity":
            return MetricStructure.identity(self.dim, self.orientation)
        return MetricStructure(self.metric, self.orientation)


def parse_fixture(text: str) -> FixtureDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise FixtureError("top level must be an object")
    for key in ("name", "dim", "diff1"):
        if key not in doc:
            raise FixtureError("missing required field", key)
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise FixtureError("must be a non-empty string", "name")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise FixtureError(f"must be a positive integer, got {dim!r}", "dim")

    raw = doc["diff1"]
    if not isinstance(raw, dict):
        raise FixtureError("must map generator index to a list of [coeff, i, j]", "diff1")
    diff1: dict[int, list] = {}
    for key, terms in raw.items():
        path = f"diff1.{key}"
        try:
            k = int(key)
        except ValueError:
            raise FixtureError(f"generator key {key!r} is not an integer", path) from None
        _index(k, dim, path)
        if not isinstance(terms, list):
            raise FixtureError("must be a list of [coeff, i, j]", path)
        out = []
        for t, term in enumerate(terms):
            tp = f"{path}[{t}]"
            if not isinstance(term, list) or len(term) != 3:
                raise FixtureError("term must be [coeff, i, j]", tp)
            c = parse_rational(term[0], f"{tp}[0]")
            i, j = _index(term[1], dim, f"{tp}[1]"), _index(term[2], dim, f"{tp}[2]")
            if i == j:
                raise FixtureError(f"repeated index {i}", tp)
            if i > j:
                i, j, c = j, i, -c
            out.append((c, i, j))
        diff1[k] = out

    eta = None
    if doc.get("eta") is not None:
        if not isinstance(doc["eta"], list):
            raise FixtureError("must be a list of [coeff, i]", "eta")
        eta = []
        for t, term in enumerate(doc["eta"]):
            tp = f"eta[{t}]"
            if not isinstance(term, list) or len(term) != 2:
                raise FixtureError("term must be [coeff, i]", tp)
            eta.append((parse_rational(term[0], f"{tp}[0]"), _index(term[1], dim, f"{tp}[1]")))

    metric = doc.get("metric")
    if metric is not None and metric != "identity":
        metric = _matrix(metric, dim, "metric")
    phi = _matrix(doc["phi"], dim, "phi") if doc.get("phi") is not None else None
    orientation = doc.get("orientation", 1)
    if orientation not in (1, -1) or isinstance(orientation, bool):
        raise FixtureError(f"must be 1 or -1, got {orientation!r}", "orientation")
    return FixtureDocument(name, dim, diff1, eta, metric, phi, orientation)


def load_fixture(path: str | Path) -> FixtureDocument:
    p = Path(path)
    if not p.exists():
        bundled = resources.files("lefschetz_lab") / "data" / p.name
        if p.parent == Path(".") and bundled.is_file():
            return parse_fixture(bundled.read_text(encoding="utf-8"))
        raise FixtureError(f"no such fixture file: {path}")
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FixtureError(f"cannot read {path}: {exc}") from exc
    return parse_fixture(text)


def bundled_fixture(name: str) -> FixtureDocument:
    fname = name if name.endswith(".json") else f"{name}.json"
    res = resources.files("lefschetz_lab") / "data" / fname
    if not res.is_file():
        raise FixtureError(f"no bundled fixture named {name!r}")
    return parse_fixture(res.read_text(encoding="utf-8"))


def bundled_names() -> list[str]:
    root = resources.files("lefschetz_lab") / "data"
    return sorted(r.name[:-5] for r in root.iterdir() if r.name.endswith(".json"))
