"""Self-describing textual formats for multicomplexes, operator series,
deformation retracts, and polyvector structures.

The line formats are versioned, whitespace-separated, and canonical: degrees
ascend, operator indices ascend, entries sort by (source degree, row,
column), rationals print in lowest terms as p or p/q.  A parse of a printed
document reproduces the object exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .complexes import Multicomplex
from .derham import PolyVector
from .errors import ParseError
from .exactla import rat
from .gauge import OperatorSeries
from .graded import GradedMap, GradedVectorSpace
from .transfer import DeformationRetract

MULTICOMPLEX_HEADER = "multicx multicomplex v1"
SERIES_HEADER = "multicx series v1"
RETRACT_HEADER = "multicx retract v1"
STRUCTURE_FORMAT = "multicx structure v1"


def format_rational(x: Fraction) -> str:
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def _degree_lines(space: GradedVectorSpace, out):
    for k, d in space.dims.items():
        out.append("%d %d" % (k, d))


def _entry_lines(f: GradedMap, out):
    for k, r, c, v in f.entries():
        out.append("%d %d %d %s" % (k, r, c, format_rational(v)))


class _Lines:
    """Cursor over meaningful lines, tracking numbers for error messages."""

    def __init__(self, text):
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                self.items.append((no, line))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        no, line = self.peek()
        if line is None:
            raise ParseError("unexpected end of document")
        self.pos += 1
        return no, line

    def expect(self, want):
        no, line = self.next()
        if line != want:
            raise ParseError("expected %r, found %r" % (want, line), no)


def _parse_int(token, no, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError("bad %s %r" % (what, token), no)


def _parse_rational(token, no):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError("bad rational %r" % token, no)


def _parse_degrees(lines, terminators):
    dims = {}
    while True:
        no, line = lines.peek()
        if line is None or line in terminators or line.split()[0] in terminators:
            break
        no, line = lines.next()
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("degree lines need two fields", no)
        deg = _parse_int(parts[0], no, "degree")
        dim = _parse_int(parts[1], no, "dimension")
        if deg in dims:
            raise ParseError("degree %d repeated" % deg, no)
        if dim <= 0:
            raise ParseError("dimension must be positive", no)
        dims[deg] = dim
    return dims


def _parse_entries(lines, terminators):
    entries = []
    while True:
        no, line = lines.peek()
        if line is None:
            break
        head = line.split()[0]
        if line in terminators or head in terminators:
            break
        no, line = lines.next()
        parts = line.split()
        if len(parts) != 4:
            raise ParseError("entry lines need four fields", no)
        k = _parse_int(parts[0], no, "source degree")
        r = _parse_int(parts[1], no, "row")
        c = _parse_int(parts[2], no, "column")
        v = _parse_rational(parts[3], no)
        entries.append((k, r, c, v))
    return entries


def print_multicomplex(m: Multicomplex, meta=None) -> str:
    out = [MULTICOMPLEX_HEADER]
    for key, value in (meta or {}).items():
        out.append("meta %s %s" % (key, value))
    out.append("degrees")
    _degree_lines(m.space, out)
    for n in range(m.order + 1):
        out.append("operator %d" % n)
        _entry_lines(m.delta(n), out)
    out.append("end")
    return "\n".join(out) + "\n"


def parse_multicomplex(text: str):
    """Returns (multicomplex, meta dict)."""
    lines = _Lines(text)
    no, header = lines.next()
    if header != MULTICOMPLEX_HEADER:
        raise ParseError("not a multicomplex document (header %r)" % header, no)
    meta = {}
    while True:
        no, line = lines.peek()
        if line is None or not line.startswith("meta "):
            break
        lines.next()
        parts = line.split(None, 2)
        if len(parts) < 3:
            raise ParseError("meta lines need a key and a value", no)
        meta[parts[1]] = parts[2]
    lines.expect("degrees")
    dims = _parse_degrees(lines, {"operator", "end"})
    space = GradedVectorSpace(dims)
    ops = {}
    last = -1
    while True:
        no, line = lines.peek()
        if line == "end":
            lines.next()
            break
        if line is None:
            raise ParseError("missing end marker")
        no, line = lines.next()
        parts = line.split()
        if parts[0] != "operator" or len(parts) != 2:
            raise ParseError("expected an operator section, found %r" % line, no)
        n = _parse_int(parts[1], no, "operator index")
        if n <= last:
            raise ParseError("operator indices must increase", no)
        last = n
        entries = _parse_entries(lines, {"operator", "end"})
        try:
            ops[n] = GradedMap.from_entries(space, space, 2 * n - 1, entries)
        except Exception as exc:
            raise ParseError("operator %d: %s" % (n, exc), no)
    deltas = [ops.get(n, GradedMap.zero(space, space, 2 * n - 1))
              for n in range(last + 1)]
    if not deltas:
        deltas = [GradedMap.zero(space, space, -1)]
    if lines.peek()[1] is not None:
        raise ParseError("trailing content after end", lines.peek()[0])
    return Multicomplex(space, deltas), meta


def print_series(s: OperatorSeries) -> str:
    out = [SERIES_HEADER, "space"]
    _degree_lines(s.space, out)
    for n in sorted(s.coeffs):
        out.append("coefficient %d degree %d" % (n, s.coeffs[n].degree))
        _entry_lines(s.coeffs[n], out)
    out.append("end")
    return "\n".join(out) + "\n"


def parse_series(text: str) -> OperatorSeries:
    lines = _Lines(text)
    no, header = lines.next()
    if header != SERIES_HEADER:
        raise ParseError("not a series document (header %r)" % header, no)
    lines.expect("space")
    space = GradedVectorSpace(_parse_degrees(lines, {"coefficient", "end"}))
    coeffs = {}
    while True:
        no, line = lines.next()
        if line == "end":
            break
        parts = line.split()
        if parts[0] != "coefficient" or len(parts) != 4 or parts[2] != "degree":
            raise ParseError("expected a coefficient section, found %r" % line, no)
        n = _parse_int(parts[1], no, "power")
        degree = _parse_int(parts[3], no, "degree")
        entries = _parse_entries(lines, {"coefficient", "end"})
        coeffs[n] = GradedMap.from_entries(space, space, degree, entries)
    return OperatorSeries(space, coeffs)


_RETRACT_MAPS = ("proj", "incl", "homotopy", "dbig", "dsmall")


def print_retract(r: DeformationRetract) -> str:
    out = [RETRACT_HEADER, "big"]
    _degree_lines(r.big, out)
    out.append("small")
    _degree_lines(r.small, out)
    for name, f in zip(_RETRACT_MAPS,
                       (r.proj, r.incl, r.homotopy, r.d_big, r.d_small)):
        out.append("map %s" % name)
        _entry_lines(f, out)
    out.append("end")
    return "\n".join(out) + "\n"


def parse_retract(text: str) -> DeformationRetract:
    lines = _Lines(text)
    no, header = lines.next()
    if header != RETRACT_HEADER:
        raise ParseError("not a retract document (header %r)" % header, no)
    lines.expect("big")
    big = GradedVectorSpace(_parse_degrees(lines, {"small"}))
    lines.expect("small")
    small = GradedVectorSpace(_parse_degrees(lines, {"map"}))
    seen = {}
    for want in _RETRACT_MAPS:
        no, line = lines.next()
        parts = line.split()
        if parts[:2] != ["map", want]:
            raise ParseError("expected 'map %s', found %r" % (want, line), no)
        seen[want] = _parse_entries(lines, {"map", "end"})
    lines.expect("end")
    shapes = {
        "proj": (big, small, 0), "incl": (small, big, 0),
        "homotopy": (big, big, 1), "dbig": (big, big, -1),
        "dsmall": (small, small, -1),
    }
    maps = {}
    for name, (src, tgt, deg) in shapes.items():
        maps[name] = GradedMap.from_entries(src, tgt, deg, seen[name])
    return DeformationRetract(big=big, small=small, proj=maps["proj"],
                              incl=maps["incl"], homotopy=maps["homotopy"],
                              d_big=maps["dbig"], d_small=maps["dsmall"])


def polyvector_to_terms(p: PolyVector):
    """JSON-ready term list; indices are 1-based in the file format."""
    out = []
    for (alpha, J), c in p.terms.items():
        out.append({
            "coefficient": format_rational(c),
            "monomial": list(alpha),
            "indices": [j + 1 for j in J],
        })
    return out


def polyvector_from_terms(terms, dim: int) -> PolyVector:
    acc = {}
    for t in terms:
        try:
            coeff = Fraction(t["coefficient"])
            alpha = tuple(int(e) for e in t["monomial"])
            indices = tuple(int(j) - 1 for j in t["indices"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError("bad polyvector term %r: %s" % (t, exc))
        if len(alpha) != dim:
            raise ParseError("monomial %r does not have %d exponents" % (t["monomial"], dim))
        key = (alpha, indices)
        acc[key] = acc.get(key, Fraction(0)) + coeff
    return PolyVector(dim, acc)


def print_structure(dim: int, bivector: PolyVector, vector=None) -> str:
    doc = {"format": STRUCTURE_FORMAT, "dim": dim,
           "bivector": polyvector_to_terms(bivector)}
    if vector is not None and not vector.is_zero:
        doc["vector"] = polyvector_to_terms(vector)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_structure(text: str, dim=None):
    """Returns (dim, bivector, vector-or-None)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("structure file is not valid JSON: %s" % exc)
    if not isinstance(doc, dict) or "bivector" not in doc:
        raise ParseError("structure file needs a 'bivector' term list")
    file_dim = doc.get("dim", dim)
    if file_dim is None:
        raise ParseError("structure file lacks 'dim' and no dimension was given")
    file_dim = int(file_dim)
    if dim is not None and file_dim != dim:
        raise ParseError("structure dim %d conflicts with requested %d" % (file_dim, dim))
    bivector = polyvector_from_terms(doc["bivector"], file_dim)
    vector = None
    if doc.get("vector"):
        vector = polyvector_from_terms(doc["vector"], file_dim)
    return file_dim, bivector, vector
