"""Command-line front end.

Every verb prints ``key: value`` lines (followed by a result block where one
applies).  Exit status: 0 success, 1 bounded UNSAT from ``sat``, 2 usage or
input errors, 3 when ``sat`` stops on its budget or enumeration guard.
"""
from __future__ import annotations

import argparse
import sys

from . import cfg, expr, graph, modelfind, reduce, sat

EXIT_OK, EXIT_UNSAT, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2, 3

_BACKENDS = {"enum": "enumeration", "cnf": "cnf"}


class CliError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _load_expr(path):
    text = _read(path)
    try:
        return expr.parse_expression(text)
    except expr.ExprSyntaxError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_structure(path):
    try:
        return graph.parse_structure(_read(path))
    except graph.StructureSyntaxError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_grammar(path):
    try:
        return cfg.parse_grammar(_read(path))
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def _kv(out, key, value):
    out.append(f"{key}: {value}")


def _expr_file(e, header=()):
    return "".join(f"{line}\n" for line in header) + expr.render_expression(e) + "\n"


def _structure_file(s, header=()):
    return "".join(f"{line}\n" for line in header) + graph.render_structure(s)


# -- verbs ------------------------------------------------------------------

def cmd_eval(args, out):
    e = _load_expr(args.expr)
    structure = _load_structure(args.structure)
    try:
        result = graph.evaluate(e, structure, args.strategy)
    except graph.UnknownRelationError as exc:
        raise CliError(exc.args[0]) from None
    _kv(out, "expression", expr.render_expression(e))
    _kv(out, "strategy", args.strategy)
    _kv(out, "pairs", len(result))
    first = next(iter(result), None)
    _kv(out, "witness", graph.format_pair(first) if first is not None else "none")
    _kv(out, "result", str(result))
    return EXIT_OK


def cmd_sat(args, out):
    e = _load_expr(args.expr)
    bounds = modelfind.Bounds(args.max_size, args.budget_ms)
    backend = _BACKENDS[args.backend]
    if args.dimacs_out:
        _write(args.dimacs_out, sat.export_dimacs(modelfind.encode_cnf(e, args.max_size)))
    report = modelfind.check_finite_sat(e, bounds, backend)
    _kv(out, "expression", expr.render_expression(e))
    _kv(out, "backend", backend)
    _kv(out, "max_size", args.max_size)
    _kv(out, "verdict", report.summary())
    _kv(out, "explored", report.explored)
    if report.reason:
        _kv(out, "reason", report.reason)
    if report.is_sat:
        # re-check before printing; check_finite_sat already did, this guards the CLI path
        witness = graph.is_satisfied(e, report.structure)
        if witness != report.witness:
            raise AssertionError("reported witness does not match evaluation")
        _kv(out, "witness", graph.format_pair(witness))
        out.append(graph.render_structure(report.structure).rstrip("\n"))
        return EXIT_OK
    return EXIT_UNSAT if report.verdict == modelfind.UNSAT_UP_TO else EXIT_TIMEOUT


def cmd_degree(args, out):
    e = _load_expr(args.expr)
    deg = expr.difference_degree(e)
    names = sorted(expr.relation_names(e))
    _kv(out, "degree", deg)
    _kv(out, "names", ",".join(names))
    _kv(out, "intersection", "yes" if expr.uses_intersection(e) else "no")
    _kv(out, "in_DA2", "yes" if deg <= 2 else "no")
    _kv(out, "in_DA1_2", "yes" if deg <= 2 and len(names) == 1 else "no")
    return EXIT_OK


def cmd_cfg2da(args, out):
    g = _load_grammar(args.grammar)
    try:
        red = reduce.grammar_to_expression(g)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _write(args.out, _expr_file(red.expression, red.map_lines()))
    _kv(out, "vocabulary", ",".join(red.vocabulary))
    _kv(out, "degree", expr.difference_degree(red.expression))
    for line in red.map_lines():
        out.append(line)
    _kv(out, "written", args.out)
    return EXIT_OK


def cmd_witness(args, out):
    g = _load_grammar(args.grammar)
    word = cfg.parse_word(args.word, g)
    try:
        structure = reduce.witness_structure(g, word)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    red = reduce.grammar_to_expression(g)
    _write(args.out, _structure_file(structure, red.map_lines()))
    _kv(out, "word", " ".join(word))
    _kv(out, "domain_size", len(graph.active_domain(structure)))
    _kv(out, "witness", graph.format_pair((0, reduce.INFINITY)))
    _kv(out, "written", args.out)
    return EXIT_OK


def cmd_nonmember(args, out):
    g = _load_grammar(args.grammar)
    try:
        word = cfg.find_nonmember_word(g, args.max_len)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _kv(out, "max_len", args.max_len)
    _kv(out, "word", " ".join(word) if word is not None else "none")
    return EXIT_OK


def cmd_reduce(args, out):
    e = _load_expr(args.expr)
    names = [n.strip() for n in args.names.split(",") if n.strip()]
    try:
        vocab = expr.Vocabulary(names)
        red = (reduce.reduce_to_two(e, vocab) if args.to == "two"
               else reduce.reduce_full(e, vocab))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _write(args.out, _expr_file(red.expression, red.map_lines()))
    _kv(out, "target", args.to)
    _kv(out, "vocabulary", ",".join(red.vocabulary))
    _kv(out, "degree", f"{expr.difference_degree(e)} -> {expr.difference_degree(red.expression)}")
    for line in red.map_lines():
        out.append(line)
    _kv(out, "written", args.out)
    if args.model_in:
        if not args.model_out:
            raise CliError("--model-in needs --model-out")
        K = _load_structure(args.model_in)
        missing = set(K.vocabulary) - set(vocab)
        if missing:
            raise CliError(f"model uses names outside --names: {sorted(missing)}")
        K = graph.Structure({n: K[n] if n in K.vocabulary else () for n in vocab}, vocab)
        b, c = red.name_map["b"], red.name_map["c"]
        J = reduce.model_to_two(K, vocab, b, c)
        if args.to == "one":
            J = reduce.model_to_one(J, b, c, red.name_map["a"])
        _write(args.model_out, _structure_file(J, red.map_lines()))
        source = graph.evaluate(e, K)
        target = graph.evaluate(red.expression, J)
        if source != target:
            raise AssertionError("transformed model does not preserve the expression result")
        _kv(out, "model_written", args.model_out)
        _kv(out, "result", str(target))
    return EXIT_OK


def cmd_dimacs(args, out):
    e = _load_expr(args.expr)
    formula = modelfind.encode_cnf(e, args.size)
    _write(args.out, sat.export_dimacs(formula))
    _kv(out, "variables", formula.num_vars)
    _kv(out, "clauses", len(formula.clauses))
    _kv(out, "written", args.out)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser():
    p = _Parser(prog="downward", description="Downward relation algebra toolkit")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", help="evaluate an expression on a structure")
    s.add_argument("--expr", required=True)
    s.add_argument("--structure", required=True)
    s.add_argument("--strategy", choices=graph.STRATEGIES, default="pairs")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sat", help="bounded finite-satisfiability search")
    s.add_argument("--expr", required=True)
    s.add_argument("--max-size", type=_positive, required=True)
    s.add_argument("--backend", choices=sorted(_BACKENDS), default="cnf")
    s.add_argument("--budget-ms", type=_nonneg, default=0)
    s.add_argument("--dimacs-out")
    s.set_defaults(func=cmd_sat)

    s = sub.add_parser("degree", help="difference degree and fragment membership")
    s.add_argument("--expr", required=True)
    s.set_defaults(func=cmd_degree)

    s = sub.add_parser("cfg2da", help="grammar to expression")
    s.add_argument("--grammar", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cfg2da)

    s = sub.add_parser("witness", help="witness structure for a word outside the language")
    s.add_argument("--grammar", required=True)
    s.add_argument("--word", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("nonmember", help="least word outside the language")
    s.add_argument("--grammar", required=True)
    s.add_argument("--max-len", type=_positive, required=True)
    s.set_defaults(func=cmd_nonmember)

    s = sub.add_parser("reduce", help="rewrite to two names or one name")
    s.add_argument("--expr", required=True)
    s.add_argument("--names", required=True, help="comma-separated ordered vocabulary")
    s.add_argument("--to", choices=("two", "one"), required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--model-in")
    s.add_argument("--model-out")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("dimacs", help="export the CNF encoding at one domain size")
    s.add_argument("--expr", required=True)
    s.add_argument("--size", type=_positive, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_dimacs)
    return p


def run(argv):
    """Run one command; returns ``(exit_status, report_text)``."""
    out = []
    try:
        args = build_parser().parse_args(argv)
        status = args.func(args, out)
    except CliError as exc:
        return EXIT_ERROR, f"error: {exc}\n"
    return status, "\n".join(out) + "\n"


def main(argv=None):
    status, text = run(sys.argv[1:] if argv is None else argv)
    (sys.stderr if status == EXIT_ERROR else sys.stdout).write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
