"""Command line front end.

Subcommands wire the full pipelines together and emit deterministic reports:

  validate  <file>                       relation check with witnesses
  analyze   <file> [--pages R] [--seed S]  homology, transfer, degeneration,
                                           gauge verdict, three-way agreement
  geometry  --kind poisson|jacobi|basic --dim m --trunc D --structure <file>
  generate  --profile a|b|c --seed S     instance generators, file on stdout

Exit codes: 0 every check passed, 1 a mathematical check failed (the report
carries the witness), 2 input error.  The only environment hook is
MULTICX_OUTDIR, the directory where geometry writes its multicomplex file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import formats
from .complexes import validate_multicomplex
from .derham import (
    FormAlgebra,
    basic_subcomplex,
    jacobi_defects,
    jacobi_multicomplex,
    poisson_mixed_complex,
    schouten,
    structure_order_ladder,
)
from .errors import MulticxError, NotJacobi, NotPoisson, ParseError
from .gauge import NoGauge, check_gauge_hodge, find_gauge
from .generators import generate
from .graded import homology
from .spectral import degenerates_at_one, page, total_complex
from .transfer import alternative_retract, build_retract, check_hodge_data
from random import Random


@dataclass
class Check:
    name: str
    passed: bool
    witness: str = ""
    details: dict = field(default_factory=dict)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def add(self, name, passed, witness="", **details):
        self.checks.append(Check(name=name, passed=bool(passed),
                                 witness=str(witness), details=details))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "checks": [{"name": c.name, "passed": c.passed,
                        "witness": c.witness, "details": c.details}
                       for c in self.checks],
            "tables": self.tables,
            "notes": self.notes,
            "elapsed": self.elapsed,
        }

    def to_text(self) -> str:
        out = ["report for %s" % self.command]
        for key, value in sorted(self.inputs.items()):
            out.append("  input %s = %s" % (key, value))
        for name, table in sorted(self.tables.items()):
            out.append("  table %s:" % name)
            if isinstance(table, dict):
                for key in sorted(table, key=str):
                    out.append("    %s: %s" % (key, table[key]))
            else:
                out.append("    %s" % (table,))
        for c in self.checks:
            line = "  %s %s" % ("PASS" if c.passed else "FAIL", c.name)
            if c.witness and not c.passed:
                line += " (witness: %s)" % c.witness
            out.append(line)
            for key in sorted(c.details):
                out.append("    %s: %s" % (key, c.details[key]))
        for key in sorted(self.notes):
            out.append("  note %s: %s" % (key, self.notes[key]))
        out.append("result: %s" % ("all checks passed" if self.ok else "FAILURES PRESENT"))
        return "\n".join(out) + "\n"


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))


def cmd_validate(path: str) -> Report:
    report = Report(command="validate", inputs={"file": path})
    started = time.time()
    m, meta = formats.parse_multicomplex(_read(path))
    report.notes.update(meta)
    report.tables["dimensions"] = dict(m.space.dims)
    rep = validate_multicomplex(m)
    report.add("multicomplex relations", rep.ok, rep.describe() if not rep.ok else "",
               operators=m.order + 1)
    report.elapsed = round(time.time() - started, 6)
    return report


def cmd_analyze(path: str, pages=None, seed=None) -> Report:
    report = Report(command="analyze", inputs={"file": path})
    started = time.time()
    m, meta = formats.parse_multicomplex(_read(path))
    report.notes.update(meta)
    report.notes["retract"] = "deterministic leftmost-pivot splitting"
    report.tables["dimensions"] = dict(m.space.dims)
    rep = validate_multicomplex(m)
    report.add("multicomplex relations", rep.ok, rep.describe() if not rep.ok else "")
    if not rep.ok:
        report.elapsed = round(time.time() - started, 6)
        return report
    report.tables["homology"] = dict(homology(m.delta(0)).dims)

    retract, _ = build_retract(m.space, m.delta(0))
    hodge = check_hodge_data(retract, m)
    transferred = hodge.transfer.transferred
    report.tables["transferred nonzero weights"] = [
        n for n in range(1, transferred.order + 1)
        if not transferred.delta(n).is_zero]
    report.add("transferred operators vanish", hodge.ok,
               "" if hodge.ok else "weight %d" % hodge.witness)

    t = total_complex(m)
    bound = t.stabilization_bound()
    if pages is not None:
        bound = min(bound, pages)
    page_dims = {}
    for r in range(1, bound + 1):
        pg = page(t, r)
        page_dims["page %d" % r] = {str(k): v for k, v in pg.dims_table().items()}
    report.tables["page dimensions"] = page_dims
    degen = degenerates_at_one(t)
    report.add("degenerates at page one", degen.ok,
               "" if degen.ok else "page %d at (level, total degree) = (%d, %d)" % degen.witness)

    gauge = find_gauge(m)
    found = not isinstance(gauge, NoGauge)
    report.add("gauge series exists", found,
               "" if found else "obstructed at weight %d" % gauge.witness)
    if found:
        report.notes["gauge"] = " | ".join(formats.print_series(gauge).strip().splitlines())
        report.add("gauge series conjugates the differential",
                   check_gauge_hodge(gauge, m).ok)

    agree = (hodge.ok == degen.ok == found)
    report.add("three-way agreement", agree,
               "" if agree else "hodge=%s degeneration=%s gauge=%s"
               % (hodge.ok, degen.ok, found))

    if seed is not None:
        rng = Random(seed)
        match = True
        for _ in range(2):
            alt = alternative_retract(m.space, m.delta(0), rng)
            if check_hodge_data(alt, m).ok != hodge.ok:
                match = False
        report.add("randomized retracts agree", match, seed=seed)
    report.elapsed = round(time.time() - started, 6)
    return report


def _write_output(name: str, text: str) -> str:
    outdir = os.environ.get("MULTICX_OUTDIR", ".")
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def cmd_geometry(kind: str, dim: int, trunc: int, structure_path: str) -> Report:
    report = Report(command="geometry",
                    inputs={"kind": kind, "dim": dim, "trunc": trunc,
                            "structure": structure_path})
    started = time.time()
    _, bivector, vector = formats.parse_structure(_read(structure_path), dim)
    weighted = kind in ("jacobi", "basic")
    algebra = FormAlgebra(dim, trunc, weight=weighted)
    report.notes["truncation"] = ("weight |alpha| + |I| <= %d" % trunc) if weighted \
        else ("polynomial degree |alpha| <= %d" % trunc)

    if kind == "poisson":
        bracket = schouten(bivector, bivector)
        report.add("bivector brackets to zero", bracket.is_zero,
                   "" if bracket.is_zero else "[w, w] has terms %s"
                   % formats.polyvector_to_terms(bracket))
        if not bracket.is_zero:
            report.elapsed = round(time.time() - started, 6)
            return report
        geo = poisson_mixed_complex(bivector, algebra)
        for name in ("square of the induced operator vanishes",
                     "differential anticommutes with the induced operator",
                     "weight-one gauge identity"):
            report.add(name, True)
    else:
        if vector is None:
            raise ParseError("kind %r needs a 'vector' term list in the structure" % kind)
        first, second = jacobi_defects(bivector, vector)
        ok = first.is_zero and second.is_zero
        witness = ""
        if not first.is_zero:
            witness = "[w, w] - 2 e ^ w has terms %s" % formats.polyvector_to_terms(first)
        elif not second.is_zero:
            witness = "[e, w] has terms %s" % formats.polyvector_to_terms(second)
        report.add("structure equations hold", ok, witness)
        if not ok:
            report.elapsed = round(time.time() - started, 6)
            return report
        if kind == "jacobi":
            geo = jacobi_multicomplex(bivector, vector, algebra)
            report.add("five multicomplex relations", True)
            report.add("bracket identity [i(w), delta] = 2 i(e) i(w)", True)
            report.add("quadratic gauge identity", True)
        else:
            geo = basic_subcomplex(bivector, vector, algebra)
            report.add("basic subcomplex is stable and squares to zero", True)
            report.add("restricted gauge identity", True)

    m = geo.multicomplex
    rep = validate_multicomplex(m)
    report.add("multicomplex relations", rep.ok, rep.describe() if not rep.ok else "")
    report.tables["dimensions"] = dict(m.space.dims)
    report.tables["homology"] = dict(homology(m.delta(0)).dims)

    degen = degenerates_at_one(total_complex(m))
    report.add("degenerates at page one", degen.ok,
               "" if degen.ok else "page %d at (level, total degree) = (%d, %d)" % degen.witness)

    ladder = structure_order_ladder(bivector, vector if kind != "poisson" else None)
    report.add("differential has order exactly one",
               ladder.d_at_most_1 and not ladder.d_at_most_0)
    report.add("induced operator has order at most two", ladder.delta1_at_most_2)
    report.notes["induced operator order at most one"] = str(ladder.delta1_at_most_1)
    if ladder.delta2_at_most_3 is not None:
        report.add("weight-two operator has order at most three", ladder.delta2_at_most_3)

    stem = os.path.splitext(os.path.basename(structure_path))[0]
    meta = {"generator": "geometry-%s" % kind, "structure": stem}
    path = _write_output("%s-%s.mcx" % (stem, kind), formats.print_multicomplex(m, meta))
    report.notes["multicomplex file"] = path
    report.elapsed = round(time.time() - started, 6)
    return report


def cmd_generate(profile: str, seed: int) -> str:
    m = generate(profile, seed)
    meta = {"generator": "profile-%s" % profile, "seed": seed}
    return formats.print_multicomplex(m, meta)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="multicx",
        description="exact homotopy theory of multicomplexes and polynomial "
                    "de Rham complexes of Poisson and Jacobi structures")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check the defining relations")
    p_validate.add_argument("file")
    p_validate.add_argument("--json", action="store_true")

    p_analyze = sub.add_parser("analyze", help="full homotopy analysis")
    p_analyze.add_argument("file")
    p_analyze.add_argument("--pages", type=int, default=None)
    p_analyze.add_argument("--seed", type=int, default=None)
    p_analyze.add_argument("--json", action="store_true")

    p_geo = sub.add_parser("geometry", help="build a de Rham multicomplex")
    p_geo.add_argument("--kind", required=True, choices=["poisson", "jacobi", "basic"])
    p_geo.add_argument("--dim", required=True, type=int)
    p_geo.add_argument("--trunc", required=True, type=int)
    p_geo.add_argument("--structure", required=True)
    p_geo.add_argument("--json", action="store_true")

    p_gen = sub.add_parser("generate", help="emit a generated instance")
    p_gen.add_argument("--profile", required=True, choices=["a", "b", "c"])
    p_gen.add_argument("--seed", required=True, type=int)

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            report = cmd_validate(args.file)
        elif args.command == "analyze":
            report = cmd_analyze(args.file, pages=args.pages, seed=args.seed)
        elif args.command == "geometry":
            report = cmd_geometry(args.kind, args.dim, args.trunc, args.structure)
        elif args.command == "generate":
            sys.stdout.write(cmd_generate(args.profile, args.seed))
            return 0
    except ParseError as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return 2
    except (NotPoisson, NotJacobi) as exc:
        sys.stderr.write("structure check failed: %s\n" % exc)
        return 1
    except MulticxError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(report.to_text())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
