"""Batch front end: load JSON jobs, run verifications, emit reports.

Every subcommand produces a deterministic report (JSON or aligned text):
no timestamps, no filesystem paths, keys sorted, the seed echoed back.
Exit status 0 means every check passed, 1 means a mathematical check
failed (the report carries the witness), 2 means the input or the
options were unusable.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import fixtures as fx
from .algebra import (p1_chart_operator_discrepancy, p1_polyvector_presheaf,
                      p1_slice_ranks)
from .complexes import (Complex, betti_numbers, chain_map_from_json,
                        complex_from_json, complex_to_json, homology,
                        homology_map, is_quasi_iso, novikov_q_expansion_complex,
                        novikov_q_expansion_map, telescope,
                        telescope_comparison)
from .linalg import rank
from .errors import (AxiomFailure, BadSequence, CosimplicialIdentityFailure,
                     CutoffTooSmall, FunctorialityFailure, InputError,
                     NotAComplex, RingMismatch, ShapeMismatch, UnknownFixture,
                     UnsupportedRing)
from .involutive import (build_cover_functions, check_weak_cover_conditions,
                         cover_monotonicity_report, grid_points, parse_poly,
                         symplectic_names)
from .polyvec import bv_axiom_check
from .presheaf import (TOP, cech, inclusion_exclusion, induction_pipeline,
                       nerve_cosimplicial, presheaf_from_json,
                       presheaf_to_json, tot, tw, tw_to_tot, verify_descent,
                       whitney_section)
from .scalars import QQ

COMMANDS = ("validate", "homology", "cech", "tot", "tw", "compare", "descent",
            "incl-excl", "bv-check", "p1-demo", "covers-check", "telescope",
            "emit-fixture")

_INPUT_FAULTS = (InputError, UnknownFixture, CutoffTooSmall, UnsupportedRing,
                 ShapeMismatch, RingMismatch, NotAComplex, BadSequence)


@dataclass
class JobSpec:
    """One batch job: a subcommand plus its resolved options."""

    command: str
    input_path: str | None = None
    out_path: str | None = None
    fmt: str = "json"
    weight_cutoff: int | None = None
    laurent_cutoff: int | None = None
    novikov_den: int | None = None
    novikov_e: Fraction | None = None
    seed: int = 0
    degree_window: tuple | None = None
    threads: int = 1
    fixture_name: str | None = None


# ---------------------------------------------------------------------------
# small helpers


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def _load_presheaf(job, default_fixture="triangle-boundary", check=True):
    if job.input_path is None:
        return fx.emit_fixture(default_fixture, seed=job.seed)
    return presheaf_from_json(_load_json(job.input_path), check=check)


def _window(table, win):
    if win is None:
        return dict(table)
    lo, hi = win
    return {n: v for n, v in table.items() if lo <= n <= hi}


def _betti_json(table, win=None):
    return {str(n): v for n, v in sorted(_window(table, win).items())}


def _check(check_id, ok, **detail):
    return {"id": check_id, "ok": bool(ok), **detail}


def _maps_agree(f_mat, g_mat):
    return (f_mat - g_mat).is_zero()


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (options_echo, checks, payload)


def _cmd_validate(job):
    F = _load_presheaf(job, check=False)
    checks = []
    try:
        F.validate()
        checks.append(_check("restriction-functoriality", True))
    except FunctorialityFailure as exc:
        checks.append(_check("restriction-functoriality", False,
                             witness=str(exc.args[0])))
    try:
        nerve_cosimplicial(F).validate()
        checks.append(_check("nerve-cosimplicial", True))
    except CosimplicialIdentityFailure as exc:
        checks.append(_check("nerve-cosimplicial", False,
                             witness=str(exc.args[0])))
    return {}, checks, None


def _cmd_homology(job):
    if job.input_path is None:
        c = fx.circle_complex()
    else:
        c = complex_from_json(_load_json(job.input_path))
    rep = homology(c)
    body = rep.to_json()
    if rep.kind == "betti":
        body["betti"] = _betti_json(
            {int(k): v for k, v in body["betti"].items()}, job.degree_window)
    return ({"degree_window": list(job.degree_window)}
            if job.degree_window else {}), \
        [_check("homology-table", True, **body)], None


def _cmd_cech(job):
    F = _load_presheaf(job)
    C = cech(F)
    rep = homology(C.cx)
    body = rep.to_json()
    if rep.kind == "betti":
        body["betti"] = _betti_json(
            {int(k): v for k, v in body["betti"].items()}, job.degree_window)
    return {}, [_check("cech-table", True, **body)], None


def _tot_checks(F):
    C, T = cech(F), tot(F)
    to_cech = T.to_cech()
    cert = is_quasi_iso(to_cech)
    same = betti_numbers(T.cx) == betti_numbers(C.cx)
    checks = [_check("totalization-iso", cert.ok and same,
                     tot_betti=_betti_json(betti_numbers(T.cx)),
                     cech_betti=_betti_json(betti_numbers(C.cx)))]
    if F.has_top:
        taug, caug = T.augmentation(), C.augmentation()
        ok = all(_maps_agree(to_cech.mat(n) @ taug.mat(n), caug.mat(n))
                 for n in F.value(TOP).degrees())
        checks.append(_check("tot-augmentation-intertwines", ok))
    return checks


def _tw_checks(F, cutoff):
    T = tot(F)
    W = tw(F, cutoff)
    integ = tw_to_tot(W, T)
    cert = is_quasi_iso(integ)
    checks = [_check("integration-quasi-iso", cert.ok,
                     witness_degree=cert.witness_degree)]
    section = whitney_section(T, W)
    exact = True
    for n in T.cx.degrees():
        m = integ.mat(n) @ section.mat(n)
        for j in range(T.cx.dim(n)):
            col = m.column(j)
            if col != {j: Fraction(1)}:
                exact = False
    checks.append(_check("whitney-section-exact", exact))
    stable = betti_numbers(W.cx) == betti_numbers(tw(F, cutoff + 1).cx)
    checks.append(_check("betti-stability", stable,
                         weight_cutoff=cutoff,
                         betti=_betti_json(betti_numbers(W.cx))))
    return checks


def _cmd_tot(job):
    F = _load_presheaf(job)
    return {}, _tot_checks(F), None


def _cmd_tw(job):
    F = _load_presheaf(job)
    cutoff = job.weight_cutoff if job.weight_cutoff is not None else F.n_sets
    return {"weight_cutoff": cutoff}, _tw_checks(F, cutoff), None


def _cmd_compare(job):
    F = _load_presheaf(job)
    cutoff = job.weight_cutoff if job.weight_cutoff is not None else F.n_sets
    return {"weight_cutoff": cutoff}, \
        _tot_checks(F) + _tw_checks(F, cutoff), None


def _cmd_descent(job):
    F = _load_presheaf(job)
    rep = verify_descent(F)
    return {}, [_check("descent-quasi-iso", rep.ok, **rep.to_json())], None


def _cmd_incl_excl(job):
    bundled = job.input_path is None
    F = _load_presheaf(job, default_fixture="three-edge")
    dec = inclusion_exclusion(F)
    checks = [_check("inclusion-exclusion-iso", dec.ok)]
    if bundled:
        pf, pg, aug_rest, aug_int = fx.triangle_pipeline_data()
        rep = induction_pipeline(pf, pg, aug_rest, aug_int)
        checks.append(_check("induction-pipeline", rep.ok,
                             comparison_ok=rep.theta_ok,
                             composite_ok=rep.composite_ok))
    return {}, checks, None


def _cmd_bv_check(job):
    try:
        count = bv_axiom_check(nvars=2, max_degree=3)
        checks = [_check("bv-axioms", True, instances=count)]
    except AxiomFailure as exc:
        axiom, detail = exc.args[0]
        checks = [_check("bv-axioms", False, axiom=axiom,
                         witness=list(detail))]
    return {"nvars": 2, "max_degree": 3}, checks, None


def _cmd_p1_demo(job):
    window = job.laurent_cutoff if job.laurent_cutoff is not None else 4
    F = p1_polyvector_presheaf(window)
    table = {n: b for n, b in betti_numbers(cech(F).cx).items() if b}
    checks = [_check("p1-cech-betti", table == {0: 1, 1: 3},
                     betti=_betti_json(table))]
    slices = p1_slice_ranks(window)
    checks.append(_check("p1-slice-oracle",
                         slices == {0: (1, 0), 1: (3, 0)},
                         kernel_cokernel={str(k): list(v)
                                          for k, v in sorted(slices.items())}))
    rows = p1_chart_operator_discrepancy(window)
    shape_ok = all(r["difference"] == f"2*x^{r['field_exponent'] - 1}"
                   for r in rows)
    checks.append(_check("p1-chart-discrepancy", shape_ok, rows=rows))
    return {"laurent_cutoff": window}, checks, None


_DEFAULT_COVER_JOB = {
    "pairs": 1,
    "sequences": [["q1 - 1", "q1 - 1/2", "q1 - 1/3"]],
    "sets": ["q1"],
    "grid": [["-2", "2", "1/2"], ["-2", "2", "1/2"]],
    "smoothing": {
        "mode": "intersection",
        "deltas": ["1/100", "1/200"],
        "f1": ["q1 - 1", "q1 - 1/2"],
        "f2": ["p1 - 1", "p1 - 1/2"],
    },
}


def _cmd_covers_check(job):
    data = (_load_json(job.input_path) if job.input_path is not None
            else _DEFAULT_COVER_JOB)
    try:
        pairs = int(data["pairs"])
        names = symplectic_names(pairs)
        seqs = [[parse_poly(s, names) for s in seq]
                for seq in data["sequences"]]
        cutters = [parse_poly(s, names) for s in data["sets"]]
        ranges = [tuple(Fraction(x) for x in r) for r in data["grid"]]
        smoothing = data.get("smoothing")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed covers job: {exc}") from exc
    if len(ranges) != 2 * pairs:
        raise InputError("grid must have one range per symplectic variable")
    grid = grid_points(ranges)
    preds = [(lambda pt, c=c: c(pt) <= 0) for c in cutters]
    rep = check_weak_cover_conditions(seqs, grid, preds)
    checks = [_check("weak-cover-bullets", rep.ok,
                     bracket_checked=rep.bracket_checked,
                     violations=rep.violations)]
    if smoothing is not None:
        try:
            mode = smoothing["mode"]
            deltas = [Fraction(d) for d in smoothing["deltas"]]
            f1s = [parse_poly(s, names) for s in smoothing["f1"]]
            f2s = [parse_poly(s, names) for s in smoothing["f2"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed smoothing block: {exc}") from exc
        gs = build_cover_functions(f1s, f2s, mode, deltas)
        mono = cover_monotonicity_report(gs, grid)
        checks.append(_check("stage-monotonicity", mono.ok,
                             violations=mono.violations,
                             step_bounds=mono.step_bounds))
    return {"pairs": pairs, "grid_size": len(grid)}, checks, None


def _cmd_telescope(job):
    if job.input_path is not None:
        data = _load_json(job.input_path)
        try:
            terms = [complex_from_json(t) for t in data["terms"]]
            maps = [chain_map_from_json(terms[i], terms[i + 1], m)
                    for i, m in enumerate(data["maps"])]
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed telescope diagram: {exc}") from exc
        tel = telescope(terms, maps)
        if terms[0].ring == QQ:
            tb = betti_numbers(tel.cx)
            lb = betti_numbers(terms[-1])
            nz = {n: b for n, b in tb.items() if b}
            nzl = {n: b for n, b in lb.items() if b}
            return {}, [_check("telescope-stabilization", nz == nzl,
                               telescope_betti=_betti_json(nz),
                               last_term_betti=_betti_json(nzl))], None
        rep = homology(tel.cx)
        return {}, [_check("telescope-table", True, **rep.to_json())], None
    den = job.novikov_den if job.novikov_den is not None else 1
    exp = job.novikov_e if job.novikov_e is not None else Fraction(3)
    length = job.weight_cutoff if job.weight_cutoff is not None else 4
    if den < 1 or exp <= 0 or length < 1:
        raise InputError("telescope options out of range")
    terms, maps = fx.novikov_telescope_terms(den, exp, length)
    tel = telescope(terms, maps)
    rep = homology(tel.cx)
    m = rep.truncation_order
    if length <= m:
        raise InputError(
            f"telescope length {length} cannot certify vanishing past the "
            f"truncation order {m}; use at least {m + 1} terms")
    # no class survives: a comparison spanning the full truncation order
    # induces zero on homology, so nothing has valuation-zero persistence
    t1, t2, comp = telescope_comparison(terms, maps, length - m, length)
    q1 = novikov_q_expansion_complex(t1.cx)
    q2 = novikov_q_expansion_complex(t2.cx)
    induced, _, _ = homology_map(novikov_q_expansion_map(comp, q1, q2), 0)
    pure = rank(induced) == 0
    return {"novikov_den": den, "novikov_e": str(exp), "length": length}, \
        [_check("telescope-pure-torsion", pure,
                induced_rank=rank(induced), **rep.to_json())], None


def _cmd_emit_fixture(job):
    if job.fixture_name is None:
        raise InputError("emit-fixture needs a fixture name")
    obj = fx.emit_fixture(job.fixture_name, seed=job.seed)
    payload = (complex_to_json(obj) if isinstance(obj, Complex)
               else presheaf_to_json(obj))
    return {"fixture": job.fixture_name, "seed": job.seed}, [], payload


_BODIES = {
    "validate": _cmd_validate,
    "homology": _cmd_homology,
    "cech": _cmd_cech,
    "tot": _cmd_tot,
    "tw": _cmd_tw,
    "compare": _cmd_compare,
    "descent": _cmd_descent,
    "incl-excl": _cmd_incl_excl,
    "bv-check": _cmd_bv_check,
    "p1-demo": _cmd_p1_demo,
    "covers-check": _cmd_covers_check,
    "telescope": _cmd_telescope,
    "emit-fixture": _cmd_emit_fixture,
}


# ---------------------------------------------------------------------------
# report assembly


def run(job: JobSpec):
    """Execute one job; returns (report dict, exit code)."""
    options, checks, payload = _BODIES[job.command](job)
    report = {
        "command": job.command,
        "seed": job.seed,
        "threads": job.threads,
        "options": options,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }
    if payload is not None:
        # fixture emission: the artifact itself is the output, directly
        # consumable by --input elsewhere
        report = payload
    return report, 0 if report.get("ok", True) else 1


def render_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_text(report):
    if "checks" not in report:
        return render_json(report)
    lines = [f"descentlab {report['command']}",
             f"seed {report['seed']}  threads {report['threads']}"]
    if report["options"]:
        opts = "  ".join(f"{k}={report['options'][k]}"
                         for k in sorted(report["options"]))
        lines.append(f"options: {opts}")
    width = max((len(c["id"]) for c in report["checks"]), default=0)
    for c in report["checks"]:
        detail = {k: v for k, v in c.items() if k not in ("id", "ok")}
        tail = f"  {json.dumps(detail, sort_keys=True)}" if detail else ""
        lines.append(f"{'PASS' if c['ok'] else 'FAIL'} "
                     f"{c['id']:<{width}}{tail}")
    lines.append(f"overall: {'PASS' if report['ok'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render(report, fmt):
    return render_text(report) if fmt == "text" else render_json(report)


# ---------------------------------------------------------------------------
# argument handling


def _window_arg(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("degree window looks like lo:hi")
    try:
        return (int(lo), int(hi))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _fraction_arg(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parser():
    top = argparse.ArgumentParser(
        prog="descentlab",
        description="exact homological-algebra constructions and checks")
    sub = top.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "emit-fixture":
            p.add_argument("fixture", help="bundled fixture name")
        p.add_argument("--input", default=None,
                       help="input JSON (bundled fixture when omitted)")
        p.add_argument("--out", default=None, help="write report here")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--weight-cutoff", type=int, default=None)
        p.add_argument("--laurent-cutoff", type=int, default=None)
        p.add_argument("--novikov-den", type=int, default=None)
        p.add_argument("--novikov-e", type=_fraction_arg, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--degree-window", type=_window_arg, default=None)
    return top


def _threads_from_env():
    raw = os.environ.get("DESCENTLAB_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError as exc:
        raise InputError(f"DESCENTLAB_THREADS must be an integer: {raw!r}") \
            from exc
    if threads < 1:
        raise InputError("DESCENTLAB_THREADS must be at least 1")
    return threads


def job_from_args(args) -> JobSpec:
    return JobSpec(
        command=args.command,
        input_path=args.input,
        out_path=args.out,
        fmt=args.format,
        weight_cutoff=args.weight_cutoff,
        laurent_cutoff=args.laurent_cutoff,
        novikov_den=args.novikov_den,
        novikov_e=args.novikov_e,
        seed=args.seed,
        degree_window=args.degree_window,
        threads=_threads_from_env(),
        fixture_name=getattr(args, "fixture", None),
    )


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        job = job_from_args(args)
        report, code = run(job)
    except _INPUT_FAULTS as exc:
        print(f"descentlab: {exc}", file=sys.stderr)
        return 2
    except (FunctorialityFailure, CosimplicialIdentityFailure) as exc:
        print(f"descentlab: input is not a presheaf: {exc}", file=sys.stderr)
        return 2
    text = render(report, job.fmt)
    if job.out_path:
        try:
            with open(job.out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"descentlab: cannot write report: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
