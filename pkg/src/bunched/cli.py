"""Command-line interface: ``bunched check | prove | invert | model-check | closure-lab | corpus-run``.

Exit status: 0 on success, 1 when a check or verification fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import admissible
from .algebra import PowersetAlgebra, all_valuations, check_bi_axioms, interp_sequent, load_pcm, parse_valuation, sequent_atoms
from .bterm import RuleSet, load_ruleset
from .calculus import CalculusConfig, Derivation, check_derivation
from .closure import MooreClosure, build_closed_algebra, ideal_violation, load_basis, RefusedConstruction, strength_violation
from .corpus import Entry, load_corpus
from .errors import KernelError, MalformedInput
from .interchange import dump, dumps, from_document
from .parsing import parse_sequent
from .search import cut_eliminate, prove_cf
from .syntax import Sequent, ctx_at_path

OK, FAILED, MALFORMED = 0, 1, 2


def render_tree(d: Derivation, indent: str = "") -> str:
    lines = [f"{indent}{d.rule.value}: {d.conclusion}"]
    for p in d.premises:
        lines.append(render_tree(p, indent + "  "))
    return "\n".join(lines)


def load(path) -> Derivation:
    """A derivation file, or a corpus entry file holding one."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "derivation" in doc and "conclusion" not in doc:
        doc = doc["derivation"]
    return from_document(doc)


def _config(args, cut: bool = False) -> CalculusConfig:
    rules = load_ruleset(args.rules) if getattr(args, "rules", None) else RuleSet()
    return CalculusConfig(rules, bool(getattr(args, "s4", False)), cut)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_check(args) -> int:
    d = load(args.derivation)
    verdict = check_derivation(d, _config(args, args.allow_cut))
    if verdict:
        print(f"accepted: {d.conclusion} (height {d.height}, {d.size()} nodes)")
        return OK
    _err(str(verdict))
    return FAILED


def cmd_prove(args) -> int:
    s = parse_sequent(args.sequent)
    cfg = _config(args)
    d = prove_cf(s, cfg, args.depth)
    if d is None:
        _err(f"no cut-free derivation of {s} within depth {args.depth}")
        return FAILED
    verdict = check_derivation(d, cfg)
    if not verdict:  # a search bug; never hand out an unchecked derivation
        _err(f"internal error: search output {verdict}")
        return FAILED
    if args.emit:
        dump(d, args.emit)
        print(render_tree(d))
    else:
        print(dumps(d))
    _err(f"proved {s} (height {d.height})")
    return OK


INVERSION_RULES = ("sepL", "andL", "trueL", "empL", "boxIdemp", "wandR", "implR")


def cmd_invert(args) -> int:
    d = load(args.derivation)
    cfg = _config(args, cut=not d.is_cut_free())
    verdict = check_derivation(d, cfg)
    if not verdict:
        _err(f"input {verdict}")
        return FAILED
    if args.rule == "wandR":
        out = admissible.invert_wand_r(d)
    elif args.rule == "implR":
        out = admissible.invert_impl_r(d)
    else:
        if args.path is None:
            raise MalformedInput(f"--path is required for {args.rule}")
        ctx, _ = ctx_at_path(d.lhs, args.path)
        out = admissible.INVERSION_NAMES[args.rule](d, ctx, cfg.struct_rules)
    verdict = check_derivation(out, cfg)
    if not verdict:
        _err(f"inversion output {verdict}")
        return FAILED
    if args.emit:
        dump(out, args.emit)
        print(render_tree(out))
    else:
        print(dumps(out))
    _err(f"{d.conclusion} (height {d.height}) => {out.conclusion} (height {out.height})")
    return OK


def _sequent_or_derivation(text: str) -> Sequent:
    path = Path(text)
    if "|-" not in text and path.exists():
        return load(path).conclusion
    return parse_sequent(text)


def cmd_model_check(args) -> int:
    pcm = load_pcm(args.pcm)
    alg = PowersetAlgebra(pcm)
    s = _sequent_or_derivation(args.target)
    if args.valuation:
        val = parse_valuation(Path(args.valuation).read_text(encoding="utf-8"), alg.ops)
        missing = sequent_atoms(s) - set(val)
        if missing:
            raise MalformedInput(f"valuation lacks atoms: {', '.join(sorted(missing))}")
        vals = [val]
    else:
        vals = all_valuations(alg, sorted(sequent_atoms(s)))
    tried = 0
    for v in vals:
        tried += 1
        if not interp_sequent(s, alg, v):
            shown = ", ".join(f"{k} = {alg.show(x)}" for k, x in sorted(v.items()))
            print(f"false: {s} under {shown or 'the empty valuation'}")
            return FAILED
    print(f"true: {s} in {alg.name} ({tried} valuation{'s' if tried != 1 else ''})")
    return OK


def cmd_closure_lab(args) -> int:
    pcm = load_pcm(args.pcm)
    mc = MooreClosure(load_basis(args.basis, pcm))
    print(f"closed sets ({len(mc.closed)}): " + " ".join(mc.show(X) for X in mc.closed))
    sv, iv = strength_violation(mc), ideal_violation(mc)
    print(f"strong: {'true' if sv is None else 'false, e.g. X = %s, Y = %s' % tuple(map(mc.show, sv))}")
    print(f"exponential ideal: {'true' if iv is None else 'false, e.g. X = %s, Y = %s' % tuple(map(mc.show, iv))}")
    try:
        alg = build_closed_algebra(mc)
    except RefusedConstruction as e:
        print(f"refused: {e.reason}: " + ", ".join(mc.show(X) for X in e.witness))
        return FAILED
    report = check_bi_axioms(alg)
    print(report.render(mc.show))
    return OK if report.ok else FAILED


def run_entry(e: Entry) -> tuple[bool, str]:
    """Whether a corpus entry meets its expectation, and a one-line detail."""
    verdict = check_derivation(e.derivation, e.config)
    if e.kind == "kernel":
        accepted = bool(verdict)
        detail = "accepted" if accepted else str(verdict)
        return accepted == (e.expect == "accept"), detail
    if not verdict:
        return False, f"input {verdict}"
    cfg = e.config.without_cut()
    out = cut_eliminate(e.derivation, cfg, e.depth)
    if out is None:
        return False, f"no cut-free derivation within depth {e.depth}"
    if not (out.is_cut_free() and out.conclusion == e.derivation.conclusion and check_derivation(out, cfg)):
        return False, "cut elimination output failed the kernel"
    return True, f"cut-free, height {out.height}"


def cmd_corpus_run(args) -> int:
    start = time.perf_counter()
    entries = load_corpus(args.dir)
    if not entries:
        raise MalformedInput(f"no corpus entries under {args.dir}")
    passed = 0
    width = max(len(e.name) for e in entries)
    for e in entries:
        ok, detail = run_entry(e)
        passed += ok
        print(f"{'PASS' if ok else 'FAIL'}  {e.name:<{width}}  {e.expect:<8}  {detail}")
    print(f"{passed}/{len(entries)} passed in {time.perf_counter() - start:.2f}s")
    return OK if passed == len(entries) else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bunched", description="Proof checking, search and models for bunched logic.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="kernel-check a derivation file")
    c.add_argument("derivation")
    c.add_argument("--rules", help="structural rule file")
    c.add_argument("--s4", action="store_true")
    c.add_argument("--allow-cut", action="store_true")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("prove", help="search for a cut-free derivation")
    c.add_argument("sequent")
    c.add_argument("--rules")
    c.add_argument("--s4", action="store_true")
    c.add_argument("--depth", type=int, default=12)
    c.add_argument("--emit", help="write the derivation here instead of standard output")
    c.set_defaults(func=cmd_prove)

    c = sub.add_parser("invert", help="apply an admissible inversion")
    c.add_argument("derivation")
    c.add_argument("--rule", required=True, choices=INVERSION_RULES)
    c.add_argument("--path", help="frame path of the principal formula, e.g. R,L;")
    c.add_argument("--rules")
    c.add_argument("--s4", action="store_true")
    c.add_argument("--emit")
    c.set_defaults(func=cmd_invert)

    c = sub.add_parser("model-check", help="evaluate a sequent in a PCM powerset algebra")
    c.add_argument("pcm")
    c.add_argument("target", help="sequent text or derivation file")
    c.add_argument("--valuation")
    c.set_defaults(func=cmd_model_check)

    c = sub.add_parser("closure-lab", help="closed sets of a basis and their BI algebra")
    c.add_argument("pcm")
    c.add_argument("basis")
    c.set_defaults(func=cmd_closure_lab)

    c = sub.add_parser("corpus-run", help="run a corpus directory")
    c.add_argument("dir")
    c.set_defaults(func=cmd_corpus_run)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits 2 on usage errors, 0 on --help
        return int(e.code or 0)
    try:
        return args.func(args)
    except (MalformedInput, KernelError, json.JSONDecodeError, UnicodeDecodeError) as e:
        _err(f"malformed input: {e}")
        return MALFORMED
    except OSError as e:
        _err(f"cannot read input: {e}")
        return MALFORMED


if __name__ == "__main__":
    sys.exit(main())
