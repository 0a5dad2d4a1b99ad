"""Batch front end: JSON problem files in, reports out.

A problem file is a single JSON document::

    {
      "version": "1",
      "task": "cohomology" | "minimal-model" | "loop-model" | "suspend"
             | "glue" | "gamma" | "ss" | "check-admissible",
      "algebras":  { name: algebra-spec, ... },
      "morphisms": { name: morphism-spec, ... },
      "complexes": { name: {"vertices": [...], "maximal": [[...], ...]} },
      "systems":   { name: system-spec, ... },
      "task_args": { ... task specific names ... },
      "parameters": {"upto": n, "cutoff": n}
    }

Algebra specs: ``{"type": "free", "generators": [["x", 2], ...],
"differential": {gen: [[coeff, {gen: exp, ...}], ...]}, "cutoff": n}``,
``{"type": "power-quotient", "degree": d, "power": p, "cutoff": n}``,
``{"type": "point", "cutoff": n}``, ``{"type": "product", "factors": [a, b]}``,
``{"type": "tensor", "factors": [a, b], "cutoff": n}``,
``{"type": "simplex-forms", "dim": n, "total_degree": D, "cutoff": n}`` and
``{"type": "truncated", ...}`` (the explicit table form the CLI itself emits).

Morphism specs give explicit matrices (rows of rational literals, degree
keyed) or ``{"type": "face-restriction", "source": a, "target": b, "face": i}``.
System specs are ``{"type": "explicit", "base": K, "fibers": {simplex: alg},
"restrictions": {"simplex|face": morphism-spec-or-name}}`` or
``{"type": "forms", "base": K, "total_degree": D, "cutoff": n,
"tensor_with": alg}``.

Rational literals are ``"p/q"`` strings or integers; decimal notation is
rejected everywhere.  Exit codes: 0 success, 1 mathematical check failure,
2 input error.  The machine-readable report section is canonical JSON and is
byte-identical across runs on the same input; timing goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Optional

from . import cdga, gluing, localsys, polyforms, specseq, sullivan
from .cdga import DGMorphism, FreeCDGA, TruncatedDGA
from .errors import CdgaError, CutoffTooSmallError, InputError, PreconditionError
from .exactlin import QMatrix, format_rat
from .graded import FreeGCA

TASKS = (
    "cohomology",
    "minimal-model",
    "loop-model",
    "suspend",
    "glue",
    "gamma",
    "ss",
    "check-admissible",
)

SCHEMA_VERSION = "1"


def _rat(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"rational literals must be integers or 'p/q' strings, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational literal {x!r}: {exc}") from exc
    raise InputError(f"bad rational literal {x!r}")


def _matrix(rows: list, nrows: int, ncols: int) -> QMatrix:
    if len(rows) != nrows:
        raise InputError(f"matrix has {len(rows)} rows, expected {nrows}")
    data = []
    for row in rows:
        if len(row) != ncols:
            raise InputError(f"matrix row has {len(row)} entries, expected {ncols}")
        data.append([_rat(v) for v in row])
    return QMatrix.from_rows(data, ncols) if nrows else QMatrix.zero(0, ncols)


def _simplex_key(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).split(","))
    except ValueError as exc:
        raise InputError(f"bad simplex key {text!r}") from exc


class Problem:
    """Parsed and resolved problem file.

    ``default_cutoff`` (the --cutoff flag) fills in missing algebra cutoffs.
    """

    def __init__(self, doc: dict, default_cutoff: Optional[int] = None):
        if not isinstance(doc, dict):
            raise InputError("problem file must be a JSON object")
        if doc.get("version") != SCHEMA_VERSION:
            raise InputError(f"unsupported schema version {doc.get('version')!r}")
        self.default_cutoff = default_cutoff
        self.task = doc.get("task")
        if self.task not in TASKS:
            raise InputError(f"unknown task {self.task!r}; choose one of {', '.join(TASKS)}")
        self.parameters = dict(doc.get("parameters", {}))
        self.task_args = dict(doc.get("task_args", {}))
        self.free_algebras: dict[str, FreeCDGA] = {}
        self.algebras: dict[str, TruncatedDGA] = {}
        self._algebra_specs = dict(doc.get("algebras", {}))
        self.complexes: dict[str, polyforms.SimplicialComplexK] = {}
        for name, spec in doc.get("complexes", {}).items():
            self.complexes[name] = polyforms.SimplicialComplexK.from_maximal(
                [tuple(s) for s in spec["maximal"]]
            )
        for name in self._algebra_specs:
            self._resolve_algebra(name, [])
        self.morphisms: dict[str, DGMorphism] = {}
        for name, spec in doc.get("morphisms", {}).items():
            self.morphisms[name] = self._build_morphism(spec)
        self.systems: dict[str, localsys.FiniteLocalSystem] = {}
        for name, spec in doc.get("systems", {}).items():
            self.systems[name] = self._build_system(spec)

    def algebra(self, name) -> TruncatedDGA:
        if name not in self.algebras:
            raise InputError(f"unknown algebra {name!r}")
        return self.algebras[name]

    def morphism(self, name) -> DGMorphism:
        if name not in self.morphisms:
            raise InputError(f"unknown morphism {name!r}")
        return self.morphisms[name]

    def system(self, name) -> "localsys.FiniteLocalSystem":
        if name not in self.systems:
            raise InputError(f"unknown system {name!r}")
        return self.systems[name]

    # -- algebras --------------------------------------------------------
    def _resolve_algebra(self, name: str, stack: list) -> TruncatedDGA:
        if name in self.algebras:
            return self.algebras[name]
        if name in stack:
            raise InputError(f"algebra {name!r} is defined in terms of itself")
        spec = self._algebra_specs.get(name)
        if spec is None:
            raise InputError(f"unknown algebra {name!r}")
        kind = spec.get("type")
        cutoff = spec.get("cutoff", self.default_cutoff)
        if kind == "free":
            gens = [(g[0], int(g[1])) for g in spec.get("generators", [])]
            gca = FreeGCA(gens)
            diff = {}
            for gname, terms in spec.get("differential", {}).items():
                diff[gname] = _element(gca, terms)
            free = FreeCDGA(gca, diff)
            self.free_algebras[name] = free
            if cutoff is None:
                raise InputError(f"free algebra {name!r} needs a cutoff")
            alg = cdga.truncate(free, int(cutoff))
        elif kind == "power-quotient":
            alg = cdga.power_quotient_dga(int(spec["degree"]), int(spec["power"]), int(cutoff))
        elif kind == "point":
            alg = cdga.point_dga(int(cutoff))
        elif kind == "product":
            parts = [self._resolve_algebra(n, stack + [name]) for n in spec["factors"]]
            if len(parts) != 2:
                raise InputError("product takes exactly two factors")
            alg = cdga.direct_sum(parts[0], parts[1], cutoff=int(cutoff) if cutoff else None)
        elif kind == "tensor":
            parts = [self._resolve_algebra(n, stack + [name]) for n in spec["factors"]]
            if len(parts) != 2:
                raise InputError("tensor takes exactly two factors")
            alg = cdga.tensor_product(parts[0], parts[1], cutoff=int(cutoff) if cutoff else None)
        elif kind == "simplex-forms":
            alg = polyforms.forms_dga(
                int(spec["dim"]),
                int(spec["total_degree"]),
                cutoff=int(cutoff) if cutoff is not None else None,
            )
        elif kind == "truncated":
            alg = _parse_truncated(spec)
        else:
            raise InputError(f"unknown algebra type {kind!r}")
        alg.name = alg.name or name
        self.algebras[name] = alg
        return alg

    # -- morphisms ---------------------------------------------------------
    def _build_morphism(self, spec) -> DGMorphism:
        if isinstance(spec, str):
            if spec not in self.morphisms:
                raise InputError(f"unknown morphism {spec!r}")
            return self.morphisms[spec]
        kind = spec.get("type", "matrices")
        src = self.algebras[spec["source"]]
        tgt = self.algebras[spec["target"]]
        if kind == "face-restriction":
            mats = polyforms.face_restriction_matrices(src, tgt, int(spec["face"]))
            return DGMorphism(src, tgt, mats, check="none")
        if kind == "matrices":
            cap = min(src.cutoff, tgt.cutoff)
            mats = []
            given = spec.get("matrices", {})
            for k in range(cap + 1):
                rows = given.get(str(k))
                if rows is None:
                    mats.append(QMatrix.zero(tgt.dim(k), src.dim(k)))
                else:
                    mats.append(_matrix(rows, tgt.dim(k), src.dim(k)))
            return DGMorphism(src, tgt, mats, check="auto")
        raise InputError(f"unknown morphism type {kind!r}")

    # -- systems --------------------------------------------------------------
    def _build_system(self, spec) -> localsys.FiniteLocalSystem:
        kind = spec.get("type", "explicit")
        base = self.complexes[spec["base"]]
        if kind == "forms":
            sys_ = localsys.forms_system(
                base,
                int(spec["total_degree"]),
                cutoff=int(spec["cutoff"]) if spec.get("cutoff") is not None else None,
            )
            factor = spec.get("tensor_with")
            if factor:
                sys_ = localsys.tensor_system(
                    sys_, self.algebras[factor], cutoff=int(spec["cutoff"])
                )
            return sys_
        if kind == "explicit":
            fibers = {}
            for key, alg_name in spec["fibers"].items():
                fibers[_simplex_key(key)] = self.algebras[alg_name]
            restr = {}
            for key, morph in spec.get("restrictions", {}).items():
                skey, face = key.rsplit("|", 1)
                restr[(_simplex_key(skey), int(face))] = self._build_morphism(morph)
            e = localsys.FiniteLocalSystem(base, fibers, restr)
            problems = localsys.validate(e)
            if problems:
                raise InputError("invalid local system: " + problems[0])
            return e
        raise InputError(f"unknown system type {kind!r}")


def _element(gca: FreeGCA, terms) -> Any:
    out = gca.zero()
    for coeff, expo in terms:
        mono = [0] * gca.ngens
        for gname, e in expo.items():
            mono[gca.index[gname]] = int(e)
        out = out + _rat(coeff) * gca.element({tuple(mono): Fraction(1)})
    return out


def _parse_truncated(spec) -> TruncatedDGA:
    dims = [int(x) for x in spec["dims"]]
    cutoff = len(dims) - 1
    unit = tuple(_rat(x) for x in spec["unit"])
    diff_mats = []
    dd = spec.get("diff", {})
    for k in range(cutoff):
        entries = {}
        for r, c, v in dd.get(str(k), []):
            entries[(int(r), int(c))] = _rat(v)
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))
    table = {}
    for i, a, j, b, vec in spec.get("mult", []):
        table[(int(i), int(a), int(j), int(b))] = tuple(_rat(x) for x in vec)
    return cdga.from_tables(
        cutoff,
        dims,
        unit,
        diff_mats,
        table,
        labels=spec.get("labels"),
        check=True,
        name=spec.get("name", ""),
    )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def emit_free(f: FreeCDGA, cutoff: int) -> dict:
    gens = [[g.name, g.degree] for g in f.gca.generators]
    diff = {}
    for g in f.gca.generators:
        img = f.diff[g.name]
        if img.is_zero():
            continue
        diff[g.name] = [
            [format_rat(c), {f.gca.generators[i].name: e for i, e in enumerate(m) if e}]
            for m, c in sorted(img.terms.items())
        ]
    return {"type": "free", "generators": gens, "differential": diff, "cutoff": cutoff}


def emit_truncated(a: TruncatedDGA) -> dict:
    diff = {}
    for k in range(a.cutoff):
        rows = sorted(a.d_matrix(k).entries.items())
        if rows:
            diff[str(k)] = [[r, c, format_rat(v)] for (r, c), v in rows]
    mult = []
    for i in range(a.cutoff + 1):
        for j in range(i, a.cutoff + 1 - i):
            for x in range(a.dim(i)):
                for y in range(a.dim(j)):
                    if i == j and y < x:
                        continue
                    try:
                        vec = a.product_basis(i, x, j, y)
                    except CutoffTooSmallError:
                        continue
                    mult.append([i, x, j, y, [format_rat(v) for v in vec]])
    return {
        "type": "truncated",
        "name": a.name,
        "dims": list(a.dims),
        "unit": [format_rat(v) for v in a.unit],
        "labels": [list(l) for l in a.labels],
        "diff": diff,
        "mult": mult,
    }


def _poly_str(f: FreeCDGA, name: str) -> str:
    return repr(f.diff[name])


# ---------------------------------------------------------------------------
# tasks
# ---------------------------------------------------------------------------

def _need(problem: Problem, key: str, flags) -> Any:
    if key == "upto" and flags.upto is not None:
        return flags.upto
    if key == "cutoff" and flags.cutoff is not None:
        return flags.cutoff
    if key in problem.task_args:
        return problem.task_args[key]
    if key in problem.parameters:
        return problem.parameters[key]
    raise InputError(f"missing parameter {key!r}")


def task_cohomology(problem: Problem, flags) -> tuple[int, dict]:
    alg = problem.algebra(_need(problem, "algebra", flags))
    upto = int(_need(problem, "upto", flags))
    h = cdga.cohomology(alg, upto)
    products = []
    for p in range(upto + 1):
        for q in range(p, upto + 1 - p):
            for i in range(h.dims[p]):
                for j in range(h.dims[q]):
                    if p == q and j < i:
                        continue
                    cls = h.cup(p, i, q, j)
                    if any(v != 0 for v in cls):
                        products.append(
                            [[p, i], [q, j], [format_rat(v) for v in cls]]
                        )
    result = {
        "dims": h.dims,
        "representatives": {
            str(k): [[format_rat(v) for v in rep] for rep in h.reps[k]]
            for k in range(upto + 1)
        },
        "nonzero_products": products,
    }
    return 0, result


def task_minimal_model(problem: Problem, flags) -> tuple[int, dict]:
    target = problem.algebra(_need(problem, "target", flags))
    upto = int(_need(problem, "upto", flags))
    res = sullivan.minimal_model(target, upto)
    gens = [[g.name, g.degree] for g in res.model.gca.generators]
    diffs = {g.name: _poly_str(res.model, g.name) for g in res.model.gca.generators}
    result = {
        "generators": gens,
        "differentials": diffs,
        "built_upto": res.built_upto,
        "model": emit_free(res.model, target.cutoff),
    }
    return 0, result


def task_loop_model(problem: Problem, flags) -> tuple[int, dict]:
    name = _need(problem, "model", flags)
    if name not in problem.free_algebras:
        raise InputError("loop-model needs a free algebra input")
    base = problem.free_algebras[name]
    lm = sullivan.loop_model(base)
    upto = problem.task_args.get("upto", problem.parameters.get("upto"))
    result = {
        "generators": [[g.name, g.degree] for g in lm.gca.generators],
        "differentials": {g.name: repr(lm.diff[g.name]) for g in lm.gca.generators},
        "model": emit_free(lm, int(upto) + 2 if upto is not None else 6),
    }
    if upto is not None:
        t = cdga.truncate(lm, int(upto) + 1)
        result["cohomology_dims"] = cdga.cohomology_dims(t, int(upto))
    return 0, result


def task_suspend(problem: Problem, flags) -> tuple[int, dict]:
    m = problem.algebra(_need(problem, "model", flags))
    upto = int(_need(problem, "upto", flags))
    s = gluing.suspension_model(m, upto)
    h = cdga.cohomology(s.carrier, upto - 1)
    vanishing = True
    for p in range(1, upto):
        for q in range(p, upto - p):
            for i in range(h.dims[p]):
                for j in range(h.dims[q]):
                    if any(v != 0 for v in h.cup(p, i, q, j)):
                        vanishing = False
    result = {
        "carrier_dims": list(s.carrier.dims),
        "cohomology_dims": h.dims,
        "positive_products_vanish": vanishing,
        "algebra": emit_truncated(s.carrier),
    }
    return 0, result


def task_glue(problem: Problem, flags) -> tuple[int, dict]:
    f = problem.morphism(_need(problem, "f", flags))
    g = problem.morphism(_need(problem, "g", flags))
    upto = int(_need(problem, "upto", flags))
    fp = gluing.fiber_product(f, g, upto)
    h = cdga.cohomology_dims(fp.carrier, upto - 1)
    result = {"carrier_dims": list(fp.carrier.dims), "cohomology_dims": h}
    verify = None
    code = 0
    if flags.verify:
        rep = gluing.mayer_vietoris(fp, upto - 1)
        verify = {
            "exact": rep.ok(),
            "connecting_ranks": [rep.connecting_rank(k) for k in range(upto - 1)],
            "failures": rep.failures,
        }
        if not rep.ok():
            code = 1
    return code, {"result": result, "verify": verify}


def task_gamma(problem: Problem, flags) -> tuple[int, dict]:
    e = problem.system(_need(problem, "system", flags))
    upto = int(_need(problem, "upto", flags))
    g = localsys.global_sections(e, upto)
    result = {
        "dims": list(g.dims),
        "cohomology_dims": cdga.cohomology_dims(g, upto - 1) if upto >= 1 else [],
    }
    return 0, result


def task_ss(problem: Problem, flags) -> tuple[int, dict]:
    e = problem.system(_need(problem, "system", flags))
    p_max = int(_need(problem, "p_max", flags))
    q_max = int(_need(problem, "q_max", flags))
    fc = specseq.skeletal_filtration(e, p_max + q_max + 1)
    tower = specseq.PageTower(fc)
    e2 = {}
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            e2[f"{p},{q}"] = tower.entry(2, p, q)[0]
    r_inf = tower.infinity_page_index()
    einf = {}
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            einf[f"{p},{q}"] = tower.entry(r_inf, p, q)[0]
    result = {"E2": e2, "Einfty": einf, "p_bound": fc.p_bound}
    verify = None
    code = 0
    if flags.verify:
        rep = specseq.e2_check(e, p_max, q_max)
        totals = specseq.einfty_vs_target(e, min(p_max + q_max, fc.algebra.cutoff - 1))
        verify = {
            "e2_matches_local_coefficients": rep.ok(),
            "e2_mismatches": [[list(k), a, b] for (k, a, b) in rep.mismatches],
            "einfty_matches_target": totals.ok(),
            "einfty_mismatches": totals.mismatches,
        }
        if not rep.ok() or not totals.ok():
            code = 1
    return code, {"result": result, "verify": verify}


def task_check_admissible(problem: Problem, flags) -> tuple[int, dict]:
    n_max = int(_need(problem, "n_max", flags))
    budget = int(problem.task_args.get("samples", 20))
    seed = int(problem.task_args.get("seed", 0))
    rep = polyforms.check_admissible_axioms(n_max, sample_budget=budget, seed=seed)
    result = {
        "unit_dimension_zero": rep.axiom_unit_dimension_zero,
        "polynomial_exterior_split": rep.axiom_polynomial_exterior_split,
        "acyclicity": rep.axiom_acyclicity,
        "extendability": rep.axiom_extendability,
        "no_zero_divisor_equation": rep.axiom_no_zero_divisor_equation,
        "samples": rep.samples,
        "failures": rep.failures,
    }
    return (0 if rep.ok() else 1), result


TASK_RUNNERS = {
    "cohomology": task_cohomology,
    "minimal-model": task_minimal_model,
    "loop-model": task_loop_model,
    "suspend": task_suspend,
    "glue": task_glue,
    "gamma": task_gamma,
    "ss": task_ss,
    "check-admissible": task_check_admissible,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def run(path: str, flags) -> tuple[int, dict, float]:
    """Execute one problem file; returns (exit code, report, seconds)."""
    t0 = time.monotonic()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    problem = Problem(doc, default_cutoff=flags.cutoff)
    task = flags.task or problem.task
    if task not in TASKS:
        raise InputError(f"unknown task {task!r}")
    if flags.task and flags.task != problem.task:
        problem.task = flags.task
    code, payload = TASK_RUNNERS[task](problem, flags)
    if "result" in payload and set(payload) <= {"result", "verify"}:
        result = payload["result"]
        verify = payload["verify"]
    else:
        result = payload
        verify = None
    report = {
        "version": SCHEMA_VERSION,
        "task": task,
        "echo": {"task_args": problem.task_args, "parameters": problem.parameters},
        "result": result,
        "verify": verify,
    }
    return code, report, time.monotonic() - t0


def machine_section(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"))


def human_section(report: dict) -> str:
    lines = [f"task: {report['task']}"]
    result = report["result"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in value:
                walk(f"{prefix}{k}.", value[k])
        elif isinstance(value, list) and len(value) > 8:
            lines.append(f"{prefix[:-1]}: [{len(value)} entries]")
        else:
            lines.append(f"{prefix[:-1]}: {value}")

    walk("", result)
    if report.get("verify") is not None:
        walk("verify.", report["verify"])
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    task = None
    if argv and argv[0] in TASKS:
        task = argv.pop(0)
    parser = argparse.ArgumentParser(
        prog="cdgalab",
        description="exact-arithmetic computations with DG algebras, local systems and spectral sequences",
    )
    parser.add_argument("file", help="JSON problem file")
    parser.add_argument("--upto", type=int, default=None)
    parser.add_argument("--cutoff", type=int, default=None)
    parser.add_argument("--format", choices=("human", "machine"), default="human")
    parser.add_argument("--verify", action="store_true")
    flags = parser.parse_args(argv)
    flags.task = task
    try:
        code, report, seconds = run(flags.file, flags)
    except (InputError, PreconditionError, CutoffTooSmallError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CdgaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if flags.format == "machine":
        print(machine_section(report))
    else:
        print(human_section(report))
    print(f"elapsed: {seconds:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
