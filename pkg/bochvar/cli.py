"""
cli.py — Command-line entry point of the Bochvar workbench.

    bochvar eval --algebra wke "J1(x)" --set x=H
    bochvar check --algebra wke "x & (x | y) = x"
    bochvar consequence "J1(x) |- y"
    bochvar theorem --agreement --depth 3
    bochvar classify b4+b2.alg
    bochvar verify-corpus --size 6

Every subcommand accepts --json for the machine-readable form of its
result. Exit codes: 0 success, 1 failed verification or invalid input,
2 usage error; `classify` exits with the code of its verdict.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

from pydantic import BaseModel
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from bochvar.algebra_core import evaluate, holds_quasi_identity, load_algebra, parse_map
from bochvar.amalgam import (
    AmalgamClass,
    AmalgamFailure,
    VFormation,
    amalgamate,
    congruence_extension_check,
    verify_amalgam,
)
from bochvar.classify import build_retraction, classify
from bochvar.config import configure_logging, load_settings
from bochvar.corpus import basis_equivalence_check, print_basis_report, print_corpus_report, run_corpus
from bochvar.errors import BochvarError, ValuationError
from bochvar.hilbert import check_derivation, load_derivation, soundness_scan
from bochvar.matrix_logic import (
    check_deduction_instance,
    consequence,
    deduction_sweep,
    is_theorem,
    matrix_of,
    theoremhood_agreement,
    witness_passivity,
)
from bochvar.plonka import (
    attach_J,
    decompose,
    enumerate_bca,
    load_system,
    system_conditions,
    system_to_text,
    verify_decomposition_conditions,
)
from bochvar.reports import (
    AgreementResult,
    AlgebraSummary,
    AmalgamResult,
    Check,
    CheckResult,
    ClassificationResult,
    ComposeResult,
    ConsequenceResult,
    DecompositionResult,
    DeductionResult,
    DeductionSweepResult,
    DerivationResult,
    EnumeratedAlgebra,
    EnumerationResult,
    EvalResult,
    MapModel,
    PassivityResult,
    RetractionResult,
    SoundnessResult,
)
from bochvar.terms import parse_quasi_identity, parse_rule, parse_term, render_term

log = logging.getLogger(__name__)

console = Console()
errors  = Console(stderr=True)

MARK = {True: "[green]✓[/green]", False: "[red]✗[/red]"}


def emit(args: argparse.Namespace, result: BaseModel, render: Callable[[], None]) -> None:
    """JSON on --json, rich text otherwise; both carry the same fields."""
    if args.json:
        print(result.model_dump_json(indent=2))
    else:
        render()


def write_output(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
        log.info(f"wrote {path}")


# ──────────────────────────────────────────────────────────────────
# TERMS AND ALGEBRAS
# ──────────────────────────────────────────────────────────────────

def parse_assignments(A, items: list[str]) -> dict[str, int]:
    valuation = {}
    for item in items:
        name, sep, label = item.partition("=")
        if not sep or not name.strip():
            raise ValuationError(f"expected `name=element`, got {item!r}")
        valuation[name.strip()] = A.index(label.strip())
    return valuation


def cmd_eval(args) -> int:
    A = load_algebra(args.algebra)
    t = parse_term(args.term)
    v = parse_assignments(A, args.set)
    value = evaluate(A, t, v)
    result = EvalResult(algebra=A.name, term=render_term(t),
                        valuation={k: A.label(x) for k, x in sorted(v.items())}, value=A.label(value))
    emit(args, result, lambda: console.print(result.value))
    return 0


def cmd_check(args) -> int:
    A = load_algebra(args.algebra)
    q = parse_quasi_identity(args.statement)
    if args.passivity:
        verdict = witness_passivity(q, A)
        result = PassivityResult(algebra=A.name, statement=str(q), witnessed=verdict.holds,
                                 realized=verdict.labelled())
        emit(args, result, lambda: console.print(
            f"{MARK[result.witnessed]} antecedents never realized in {A.name}" if result.witnessed
            else f"{MARK[False]} antecedents realized at {verdict.describe()}"
        ))
        return 0 if verdict.holds else 1

    verdict = holds_quasi_identity(A, q)
    result = CheckResult.of(str(q), verdict)
    emit(args, result, lambda: console.print(
        f"{MARK[True]} holds in {A.name}" if verdict.holds
        else f"{MARK[False]} counterexample {verdict.describe()}"
    ))
    return 0 if verdict.holds else 1


def cmd_consequence(args) -> int:
    M = matrix_of(load_algebra(args.algebra))
    rule = parse_rule(args.query)
    verdict = consequence(M, rule.premises, rule.conclusion)
    result = ConsequenceResult(
        matrix=M.describe(), premises=[render_term(p) for p in rule.premises],
        conclusion=render_term(rule.conclusion), holds=verdict.holds, counterexample=verdict.labelled(),
    )
    emit(args, result, lambda: console.print(
        f"{MARK[True]} {rule} holds in {M.describe()}" if verdict.holds
        else f"{MARK[False]} {rule} fails at {verdict.describe()}"
    ))
    return 0 if verdict.holds else 1


def cmd_theorem(args) -> int:
    if args.agreement:
        report = AgreementResult.of(theoremhood_agreement(args.depth, args.vars))
        emit(args, report, lambda: render_agreement(report))
        return 0 if report.agrees else 1
    if not args.formula:
        args.parser.error("a formula is required unless --agreement is given")
    M = matrix_of(load_algebra(args.algebra))
    phi = parse_term(args.formula)
    verdict = is_theorem(M, phi)
    result = ConsequenceResult(matrix=M.describe(), premises=[], conclusion=render_term(phi),
                               holds=verdict.holds, counterexample=verdict.labelled())
    emit(args, result, lambda: console.print(
        f"{MARK[True]} theorem of {M.describe()}" if verdict.holds
        else f"{MARK[False]} not a theorem: {verdict.describe()}"
    ))
    return 0 if verdict.holds else 1


def render_agreement(report: AgreementResult) -> None:
    color = "green" if report.agrees else "red"
    console.print(Panel(
        f"[bold]THEOREMHOOD AGREEMENT[/bold]\n\n"
        f"  Matrices      : {', '.join(report.matrices)}\n"
        f"  Bound         : depth ≤ {report.max_depth}, variables {' '.join(report.variables)}\n"
        f"  Terms         : {report.terms} in {report.classes} semantic class(es)\n"
        f"  Theorems      : {' / '.join(str(n) for n in report.theorems)}\n"
        f"  Discrepancies : [{color}]{len(report.discrepancies)}[/{color}]",
        border_style=color,
        subtitle="bounded evidence, not a decision procedure",
    ))
    for d in report.discrepancies[:20]:
        console.print(f"  [red]✗[/red] {d.representative} ({d.terms} term(s)): {d.theorem}")


def cmd_deduction(args) -> int:
    M = matrix_of(load_algebra(args.algebra))
    if args.sweep:
        report = DeductionSweepResult.of(deduction_sweep(M, args.depth, args.vars))
        emit(args, report, lambda: render_deduction_sweep(report))
        return 0 if report.holds else 1
    if args.psi is None or args.phi is None:
        args.parser.error("psi and phi are required unless --sweep is given")
    premises = [parse_term(p) for p in args.premise]
    psi, phi = parse_term(args.psi), parse_term(args.phi)
    agrees = check_deduction_instance(M, premises, psi, phi)
    result = DeductionResult(matrix=M.describe(), premises=[render_term(p) for p in premises],
                             psi=render_term(psi), phi=render_term(phi), agrees=agrees)
    emit(args, result, lambda: console.print(
        f"{MARK[agrees]} Γ, ψ ⊢ φ and Γ ⊢ J2 ψ -> J2 φ {'agree' if agrees else 'disagree'}"
    ))
    return 0 if agrees else 1


def render_deduction_sweep(report: DeductionSweepResult) -> None:
    color = "green" if report.holds else "red"
    console.print(Panel(
        f"[bold]DEDUCTION THEOREM SWEEP[/bold]\n\n"
        f"  Matrix     : {report.matrix}\n"
        f"  Bound      : depth ≤ {report.max_depth}, variables {' '.join(report.variables)}\n"
        f"  Classes    : {report.classes}\n"
        f"  Triples    : {report.triples} covering {report.instances} instance(s)\n"
        f"  Mismatches : [{color}]{report.mismatches}[/{color}]",
        border_style=color,
    ))
    for v in report.violations:
        console.print(f"  [red]✗[/red] {v['premise'] or '∅'} ; {v['psi']} ⊢ {v['phi']}")


def cmd_prove_check(args) -> int:
    verdict = check_derivation(load_derivation(args.path))
    result = DerivationResult.of(verdict)

    def render():
        for note in result.notes:
            console.print(f"  [dim]{note}[/dim]")
        console.print(f"{MARK[result.valid]} {result.name}: {verdict.describe()}")

    emit(args, result, render)
    return 0 if result.valid else 1


# ──────────────────────────────────────────────────────────────────
# SUMS AND DECOMPOSITIONS
# ──────────────────────────────────────────────────────────────────

def render_checks(checks: list[Check]) -> None:
    t = Table(box=box.SIMPLE, show_header=True, header_style="bold cyan")
    t.add_column("Condition", min_width=40)
    t.add_column("", justify="center")
    t.add_column("Detail", style="dim")
    for c in checks:
        t.add_row(c.check, MARK[c.passed], c.detail)
    console.print(t)


def cmd_compose(args) -> int:
    S = load_system(args.path)
    A = attach_J(S)
    result = ComposeResult(system=S.name, algebra=AlgebraSummary.of(A),
                           conditions=[Check.of(c) for c in system_conditions(S)], algebra_text=A.to_text())
    write_output(args.output, result.algebra_text)

    def render():
        render_checks(result.conditions)
        console.print(result.algebra_text, highlight=False, end="")

    emit(args, result, render)
    return 0


def cmd_decompose(args) -> int:
    A = load_algebra(args.algebra)
    d = decompose(A)
    result = DecompositionResult.of(d, verify_decomposition_conditions(d))
    write_output(args.output, system_to_text(d.system))

    def render():
        t = Table(box=box.SIMPLE, title=f"Fibers of {A.name}", title_style="bold",
                  header_style="bold cyan")
        t.add_column("Index")
        t.add_column("Elements")
        t.add_column("Designated a_i")
        for f in result.fibers:
            t.add_row(f.index, " ".join(f.elements), f.designated)
        console.print(t)
        render_checks(result.conditions)

    emit(args, result, render)
    return 0 if all(c.passed for c in result.conditions) else 1


# ──────────────────────────────────────────────────────────────────
# CLASSIFICATION, RETRACTION, AMALGAMATION
# ──────────────────────────────────────────────────────────────────

def cmd_classify(args) -> int:
    A = load_algebra(args.algebra)
    c = classify(A)
    result = ClassificationResult.of(c)

    def render():
        lines = [f"[bold]{result.verdict}[/bold]"]
        if result.reason:
            lines.append(f"  reason      : {result.reason}")
        if c.witness:
            lines.append(f"  witness     : {c.witness.describe()}")
        lines.append(f"  axioms      : {result.axioms or 'all hold'}")
        lines.append(f"  short basis : {result.short_basis or 'all hold'}")
        lines.append(f"  separation  : {result.separation}")
        console.print(Panel("\n".join(lines), title=A.name, border_style="cyan"))

    emit(args, result, render)
    return result.exit_code


def cmd_retract(args) -> int:
    A = load_algebra(args.algebra)
    r = build_retraction(A)
    result = RetractionResult(algebra=A.name, atom=A.label(r.atom), r=MapModel.of(r.r), iota=MapModel.of(r.iota))
    emit(args, result, lambda: console.print(
        f"atom {result.atom}\nr : {r.r.describe()}\nι : {r.iota.describe()}", highlight=False
    ))
    return 0


def cmd_amalgamate(args) -> int:
    A, B, C = (load_algebra(ref) for ref in (args.A, args.B, args.C))
    v = VFormation(A, B, C, parse_map(A, B, args.i), parse_map(A, C, args.j))
    cls = AmalgamClass(args.cls)
    outcome = amalgamate(v, cls)
    if isinstance(outcome, AmalgamFailure):
        result = AmalgamResult(cls=cls.value, valid=False, reason=outcome.reason)
        emit(args, result, lambda: console.print(f"{MARK[False]} {outcome.reason}"))
        return 1

    problem = verify_amalgam(v, outcome.D, outcome.h, outcome.k, cls)
    result = AmalgamResult(
        cls=cls.value, valid=problem is None, pairs=outcome.pairs, reason=problem or "",
        amalgam=AlgebraSummary.of(outcome.D), h=MapModel.of(outcome.h), k=MapModel.of(outcome.k),
        algebra_text=outcome.D.to_text(),
    )
    write_output(args.output, result.algebra_text)

    def render():
        console.print(f"{MARK[result.valid]} amalgam with {outcome.D.size} element(s) "
                      f"from {result.pairs} compatible pair(s){': ' + problem if problem else ''}")
        console.print(f"h : {outcome.h.describe()}", highlight=False)
        console.print(f"k : {outcome.k.describe()}", highlight=False)
        if not args.output:
            console.print(result.algebra_text, highlight=False, end="")

    emit(args, result, render)
    return 0 if result.valid else 1


def cmd_enumerate(args) -> int:
    found = enumerate_bca(args.max_size, args.workers)
    rows = [EnumeratedAlgebra(name=A.name, size=A.size, verdict=str(classify(A).verdict)) for A in found]
    by_size: dict[int, int] = {}
    for r in rows:
        by_size[r.size] = by_size.get(r.size, 0) + 1
    result = EnumerationResult(max_size=args.max_size, count=len(rows), by_size=by_size, algebras=rows)

    def render():
        t = Table(box=box.SIMPLE, title=f"Bochvar algebras up to size {args.max_size}",
                  title_style="bold", header_style="bold cyan")
        t.add_column("Name")
        t.add_column("Size", justify="right")
        t.add_column("Verdict")
        for r in rows:
            t.add_row(r.name, str(r.size), r.verdict)
        console.print(t)
        console.print(f"[bold]{result.count}[/bold] algebra(s)")

    emit(args, result, render)
    return 0


# ──────────────────────────────────────────────────────────────────
# CORPUS AND SWEEPS
# ──────────────────────────────────────────────────────────────────

def cmd_verify_corpus(args) -> int:
    if args.basis:
        report = basis_equivalence_check(args.size or 6, args.mutations, args.seed, args.workers)
        emit(args, report, lambda: print_basis_report(report, console))
        return 0 if report.ok else 1
    report = run_corpus(args.size, args.claim or None, args.workers)
    emit(args, report, lambda: print_corpus_report(report, console))
    return 0 if report.ok else 1


def cmd_soundness(args) -> int:
    seed = load_settings().seed if args.seed is None else args.seed
    report = SoundnessResult.of(soundness_scan(args.depth, args.vars, args.per_schema, seed))

    def render():
        color = "green" if report.violations == 0 else "red"
        console.print(Panel(
            f"[bold]SOUNDNESS SCAN[/bold]\n\n"
            f"  Bound      : depth ≤ {report.max_depth}, variables {' '.join(report.variables)}\n"
            f"  Instances  : {report.instances} ({report.per_schema} per schema, seed {report.seed})\n"
            f"  Violations : [{color}]{report.violations}[/{color}]",
            border_style=color,
        ))
        for s in report.schemas:
            for bad in s.violations:
                console.print(f"  [red]✗[/red] [{s.schema_id}] {bad}")

    emit(args, report, render)
    return 0 if report.violations == 0 else 1


def cmd_cep_check(args) -> int:
    report = congruence_extension_check()
    ok = report.extension_fails and report.quotient_is_b2 and report.quotient_in_nbca and report.bruteforce_agrees

    def render():
        console.print(Panel(
            f"[bold]RELATIVE CONGRUENCE EXTENSION (NBCA)[/bold]\n\n"
            f"  θ on b4                  : {report.theta}\n"
            f"  b4/θ ≅ b2                : {MARK[report.quotient_is_b2]}\n"
            f"  b4/θ in NBCA             : {MARK[report.quotient_in_nbca]}\n"
            f"  congruences of b4+b2     : {report.congruences} "
            f"(partition scan agrees {MARK[report.bruteforce_agrees]})\n"
            f"  NBCA-congruences         : {len(report.relative)}\n"
            f"  containing (na, 1)       : {', '.join(report.containing_pair) or 'none'}\n"
            f"  proper ones among them   : {report.proper_containing}\n\n"
            f"  extension fails          : {MARK[report.extension_fails]}",
            border_style="green" if ok else "red",
        ))

    emit(args, report, render)
    return 0 if ok else 1


# ──────────────────────────────────────────────────────────────────
# PARSER
# ──────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the machine-readable result")

    parser = argparse.ArgumentParser(prog="bochvar", description="Bochvar external logic workbench")
    parser.add_argument("--log-level", "-l", help="Root log level (default from BOCHVAR_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: str, handler, summary: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=summary, description=summary)
        p.set_defaults(handler=handler, parser=p)
        return p

    p = command("eval", cmd_eval, "Evaluate a term under a valuation")
    p.add_argument("term")
    p.add_argument("--algebra", "-a", default="wke", help="Built-in name or algebra file")
    p.add_argument("--set", "-s", action="append", default=[], metavar="VAR=ELEM")

    p = command("check", cmd_check, "Check an identity or quasi-identity exhaustively")
    p.add_argument("statement")
    p.add_argument("--algebra", "-a", default="wke")
    p.add_argument("--passivity", action="store_true", help="Check that no valuation realizes the antecedents")

    p = command("consequence", cmd_consequence, "Decide `premises |- conclusion` in ⟨A, {1}⟩")
    p.add_argument("query")
    p.add_argument("--algebra", "-a", default="wke")

    p = command("theorem", cmd_theorem, "Theoremhood in ⟨A, {1}⟩, or the bounded agreement report")
    p.add_argument("formula", nargs="?")
    p.add_argument("--algebra", "-a", default="wke")
    p.add_argument("--agreement", action="store_true", help="Compare theoremhood in wke and b4+b2")
    p.add_argument("--depth", "-d", type=int, default=3)
    p.add_argument("--vars", "-k", type=int, default=2)

    p = command("deduction", cmd_deduction, "Deduction theorem: Γ, ψ ⊢ φ against Γ ⊢ J2 ψ -> J2 φ")
    p.add_argument("psi", nargs="?")
    p.add_argument("phi", nargs="?")
    p.add_argument("--premise", "-p", action="append", default=[])
    p.add_argument("--algebra", "-a", default="wke")
    p.add_argument("--sweep", action="store_true", help="Check every instance up to the bound")
    p.add_argument("--depth", "-d", type=int, default=3)
    p.add_argument("--vars", "-k", type=int, default=2)

    p = command("prove-check", cmd_prove_check, "Verify a Hilbert derivation file")
    p.add_argument("path")

    p = command("compose", cmd_compose, "Build the Bochvar algebra of a direct system file")
    p.add_argument("path")
    p.add_argument("--output", "-o", help="Write the algebra file here")

    p = command("decompose", cmd_decompose, "Decompose an algebra into its fibers")
    p.add_argument("algebra")
    p.add_argument("--output", "-o", help="Write the direct system file here")

    p = command("classify", cmd_classify, "Place an algebra in the chain JBA ⊂ NBCA ⊂ BCA")
    p.add_argument("algebra")

    p = command("retract", cmd_retract, "Retraction of a fixpoint-free algebra onto b2")
    p.add_argument("algebra")

    p = command("amalgamate", cmd_amalgamate, "Amalgamate a V-formation in BCA or NBCA")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("C")
    p.add_argument("--class", dest="cls", choices=[c.value for c in AmalgamClass], default="bca")
    p.add_argument("--i", required=True, metavar="MAP", help="Embedding A → B as `a->b ...`")
    p.add_argument("--j", required=True, metavar="MAP", help="Embedding A → C as `a->c ...`")
    p.add_argument("--output", "-o", help="Write the amalgam's algebra file here")

    p = command("enumerate", cmd_enumerate, "Enumerate Bochvar algebras up to isomorphism")
    p.add_argument("--max-size", "-n", type=int, default=6)
    p.add_argument("--workers", "-w", type=int)

    p = command("verify-corpus", cmd_verify_corpus, "Run the claim corpus (or the basis equivalence check)")
    p.add_argument("--size", "-n", type=int, help="Largest enumerated algebra in scope")
    p.add_argument("--claim", "-c", action="append", default=[], help="Run only this claim id (repeatable)")
    p.add_argument("--basis", action="store_true", help="Compare the three membership tests instead")
    p.add_argument("--mutations", "-m", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", "-w", type=int)

    p = command("soundness", cmd_soundness, "Sample axiom instances and check they are theorems")
    p.add_argument("--depth", "-d", type=int, default=2)
    p.add_argument("--vars", "-k", type=int, default=2)
    p.add_argument("--per-schema", "-m", type=int, default=50)
    p.add_argument("--seed", type=int)

    command("cep-check", cmd_cep_check, "Relative congruence extension counterexample on b4+b2")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except BochvarError as e:
        errors.print(f"[red]error:[/red] {e}", highlight=False)
        return 1


if __name__ == "__main__":
    sys.exit(main())
