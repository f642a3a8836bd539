"""Command-line entry point: ``udblend <command> ...`` or ``python -m udblend``.

Every flag can also come from a TOML file given with ``--config``; keys of
the table named after the subcommand (dashes or underscores) set defaults
and explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .blend import DEFAULT_ROOT_FALLBACK, blend_treebank
from .conllu import (
    AlignmentError,
    ConlluError,
    InvariantError,
    read_conllu,
    serialize_conllu,
    split_folds,
    validate_tree,
    write_conllu,
)
from .enhance import DEFAULT_ALLOWED_LABELS, DEFAULT_FILTERS, FILTERS, RuleConfig, enhance_treebank
from .evaluate import CONVENTIONS, METRICS, evaluate, format_reports
from .graph import InfeasibleGraphError
from .search import ParserGroup, count_combinations, format_ranking, realize, search_best

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _log(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


# -- subcommands --------------------------------------------------------------


def cmd_blend(args) -> int:
    paths = _csv(args.inputs)
    if not paths:
        raise UsageError("--inputs needs at least one file")
    inputs = [read_conllu(p) for p in paths]
    out = blend_treebank(inputs, donor=args.donor, root_fallback=args.root_fallback, jobs=args.jobs)
    _emit(serialize_conllu(out), args.output)
    _log(args, f"blended {len(paths)} inputs, {len(out)} sentences")
    return 0


def _parse_group(spec: str) -> tuple[str, list[str]]:
    name, sep, paths = spec.partition("=")
    if not sep or not name or not _csv(paths):
        raise UsageError(f"--group expects NAME=path1,path2,...; got {spec!r}")
    return name, _csv(paths)


def cmd_search(args) -> int:
    specs = args.group or args.config_group or []
    if not specs:
        raise UsageError("search needs at least one --group")
    if args.dev is None:
        raise UsageError("search needs --dev")
    groups = []
    for spec in specs:
        name, paths = _parse_group(spec)
        groups.append(ParserGroup(name, tuple(read_conllu(p) for p in paths)))
    dev = read_conllu(args.dev)
    _log(args, f"evaluating {count_combinations(groups)} combinations")
    best, report, ranking = search_best(
        groups, dev, jobs=args.jobs, conventions=CONVENTIONS[args.conventions], root_fallback=args.root_fallback
    )
    if args.report:
        _emit(format_ranking(ranking), args.report)
    if args.output:
        write_conllu(blend_treebank(realize(best, groups), root_fallback=args.root_fallback), args.output)
    print(f"{best}\tLAS={report.f1:.2f}")
    return 0


def cmd_enhance(args) -> int:
    rules = set(_csv(args.rules))
    unknown = rules - {"head", "children"}
    if unknown:
        raise UsageError(f"unknown rules: {', '.join(sorted(unknown))}")
    filters = _csv(args.filters)
    for f in filters:
        if f not in FILTERS:
            raise UsageError(f"unknown filter {f!r}; registered: {', '.join(FILTERS.names())}")
    cfg = RuleConfig(
        enable_head="head" in rules,
        enable_children="children" in rules,
        enabled_filters=tuple(filters),
        allowed_labels=tuple(_csv(args.allowed_labels)),
    )
    tb = read_conllu(args.input, require_tree=True)
    _emit(serialize_conllu(enhance_treebank(tb, cfg)), args.output)
    return 0


def cmd_evaluate(args) -> int:
    metrics = _csv(args.metrics)
    bad = [m for m in metrics if m not in METRICS]
    if bad:
        raise UsageError(f"unknown metrics {bad}; choose from {', '.join(METRICS)}")
    gold = read_conllu(args.gold)
    system = read_conllu(args.system)
    reports = evaluate(gold, system, metrics, CONVENTIONS[args.conventions])
    _emit(format_reports(reports, args.format), args.output)
    return 0


def cmd_split_folds(args) -> int:
    tb = read_conllu(args.input)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        folds = split_folds(tb, args.k)
    except ValueError as e:
        raise UsageError(str(e)) from None
    for i, (train, heldout) in enumerate(folds, 1):
        write_conllu(train, outdir / f"fold{i}.train.conllu")
        write_conllu(heldout, outdir / f"fold{i}.heldout.conllu")
    _log(args, f"wrote {args.k} folds to {outdir}")
    return 0


def cmd_validate(args) -> int:
    tb = read_conllu(args.input)
    found = 0
    for i, s in enumerate(tb, 1):
        for v in validate_tree(s):
            found += 1
            print(f"{s.sent_id or '#' + str(i)}\t{v.token if v.token is not None else '-'}\t{v.kind}\t{v.detail}")
    _log(args, f"{len(tb)} sentences, {found} violations")
    return EXIT_DATA if found else 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress progress messages")
    common.add_argument("--config", help="TOML file with default values per subcommand")

    p = _Parser(prog="udblend", description="Blend, enhance and evaluate dependency treebanks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("blend", parents=[common], help="blend parser outputs into consensus trees")
    b.add_argument("--inputs", required=True, help="comma-separated CoNLL-U files")
    b.add_argument("--output", help="output file (default: stdout)")
    b.add_argument("--donor", type=int, default=0, help="input whose non-syntactic columns are copied")
    b.add_argument("--root-fallback", default=DEFAULT_ROOT_FALLBACK)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_blend)

    s = sub.add_parser("search", parents=[common], help="search the best blend combination")
    s.add_argument("--group", action="append", help="NAME=path1,path2,... (repeatable)")
    s.add_argument("--dev", help="development gold CoNLL-U")
    s.add_argument("--report", help="write the ranked TSV report here")
    s.add_argument("--output", help="write the best blend of the dev inputs here")
    s.add_argument("--metric", choices=["las"], default="las")
    s.add_argument("--conventions", choices=sorted(CONVENTIONS), default="conll18")
    s.add_argument("--root-fallback", default=DEFAULT_ROOT_FALLBACK)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_search, config_group=None)

    e = sub.add_parser("enhance", parents=[common], help="add enhanced arcs with the rule system")
    e.add_argument("--input", required=True)
    e.add_argument("--output")
    e.add_argument("--rules", default="head,children", help="subset of head,children")
    e.add_argument("--filters", default=",".join(DEFAULT_FILTERS), help="ordered filter names ('' for none)")
    e.add_argument("--allowed-labels", default=",".join(DEFAULT_ALLOWED_LABELS))
    e.set_defaults(func=cmd_enhance)

    v = sub.add_parser("evaluate", parents=[common], help="score a system file against gold")
    v.add_argument("--gold", required=True)
    v.add_argument("--system", required=True)
    v.add_argument("--metrics", default="las,mlas,blex,elas,slas,upos,xpos,ufeats,lemma")
    v.add_argument("--format", choices=["tsv", "json"], default="tsv")
    v.add_argument("--conventions", choices=sorted(CONVENTIONS), default="conll18")
    v.add_argument("--output")
    v.set_defaults(func=cmd_evaluate)

    f = sub.add_parser("split-folds", parents=[common], help="contiguous k-fold jackknifing split")
    f.add_argument("--k", type=int, default=5)
    f.add_argument("--input", required=True)
    f.add_argument("--outdir", required=True)
    f.set_defaults(func=cmd_split_folds)

    c = sub.add_parser("validate", parents=[common], help="report tree violations")
    c.add_argument("--input", required=True)
    c.set_defaults(func=cmd_validate)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in argv if a in subparsers.choices), None)
    if not known.config or command is None:
        return
    with open(known.config, "rb") as fh:
        data = tomllib.load(fh)
    section = data.get(command, {})
    sub = subparsers.choices[command]
    dests = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in section.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            raise UsageError(f"config key {key!r} is not an option of {command!r}")
        if dest == "group":
            # appended flags would extend a list default instead of replacing it
            dest = "config_group"
            value = [value] if isinstance(value, str) else list(value)
        elif isinstance(value, list):
            value = ",".join(map(str, value))
        defaults[dest] = value
    sub.set_defaults(**defaults)
    # config values satisfy required options
    for a in sub._actions:
        if a.dest in defaults:
            a.required = False


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:  # argparse: --help, --version and usage errors
            return e.code if isinstance(e.code, int) else EXIT_USAGE
        return args.func(args)
    except UsageError as e:
        print(f"udblend: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConlluError, AlignmentError, InfeasibleGraphError, OSError, tomllib.TOMLDecodeError) as e:
        print(f"udblend: {e}", file=sys.stderr)
        return EXIT_DATA
    except (InvariantError, AssertionError) as e:
        print(f"udblend: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
