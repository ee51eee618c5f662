"""
Command-line interface

Exit status: 0 when the verdict holds (or the command succeeded), 1 when
it does not, 2 on usage, parse or model errors.
"""
import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import ValidationError

from teamata import __version__
from teamata.core.config import config
from teamata.core.errors import DslError, TeamataError
from teamata.core.logger import setup_logging
from teamata.models.lts import Lts
from teamata.models.sync import SyncType, SyncTypeSpec
from teamata.models.system import System
from teamata.services.comm import Mode, deadlock_states, describe_failure, is_receptive, is_responsive
from teamata.services.compose import CompositionPlan, check_preservation, compose
from teamata.services.featured import Property, check_product, productwise_check, project_fsys
from teamata.services.pdl import Formula, check
from teamata.services.realise import Inconclusive, realise_pipeline
from teamata.services.teams import team, uniform_spec
from teamata.utils.dot import export_dot
from teamata.utils.dsl import ModelDocument, load_file, parse_formula, parse_sync_type
from teamata.utils.helpers import format_path, format_set, format_state
from teamata.utils.printer import print_system
from teamata.utils.reports import (
    CompositionReport, PdlReport, ProductsReport, RealisationReport, TeamReport, VerdictReport,
)

OK, FAILED, ERROR = 0, 1, 2


def _mode(args: argparse.Namespace) -> Mode:
    return Mode.WEAK if args.weak else Mode(config.analysis.default_mode)


def _emit(args: argparse.Namespace, report, lines: Sequence[str]):
    if args.json:
        print(report.to_line())
    else:
        for line in lines:
            print(line)


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")
    logger.info("wrote {}", path)


def _sync_type_arg(text: str) -> SyncType:
    try:
        return parse_sync_type(text)
    except DslError as exc:
        raise argparse.ArgumentTypeError(f"bad synchronisation type '{text}': {exc.message}") from None


def _selected(args: argparse.Namespace) -> Tuple[str, System, SyncTypeSpec]:
    doc = load_file(args.file, default_type=args.default_type)
    system, spec = doc.system(args.system)
    if args.default_type is not None:
        spec = uniform_spec(system, args.default_type).merged(spec)
    return args.system or next(iter(doc.systems)), system, spec


def cmd_team(args: argparse.Namespace) -> int:
    name, system, spec = _selected(args)
    ta = team(system, spec)
    if args.dot:
        _write(Path(args.dot), export_dot(ta.lts, name))
    reach = ta.reachable_part
    lines = [f"team {name}: {len(reach.states)} reachable states, {len(reach.transitions)} transitions"]
    lines.extend(f"  {format_state(s)} --{label}--> {format_state(t)}" for s, label, t in reach.sorted_transitions())
    _emit(args, TeamReport.of(name, ta), lines)
    return OK


def _check(args: argparse.Namespace, prop: str) -> int:
    name, system, spec = _selected(args)
    mode = _mode(args)
    checker = is_receptive if prop == "receptive" else is_responsive
    result = checker(system, spec, mode)
    lines = [f"{name} is {'' if result.holds else 'not '}{mode.value}ly {prop}"]
    lines.extend(f"  {describe_failure(f)}" for f in result.failures)
    _emit(args, VerdictReport.of(name, prop, mode.value, result), lines)
    return OK if result.holds else FAILED


def cmd_check_rcp(args: argparse.Namespace) -> int:
    return _check(args, "receptive")


def cmd_check_rsp(args: argparse.Namespace) -> int:
    return _check(args, "responsive")


def cmd_check_deadlock(args: argparse.Namespace) -> int:
    name, system, spec = _selected(args)
    stuck = deadlock_states(team(system, spec))
    lines = [f"{name} is {'not ' if stuck else ''}deadlock-free"]
    lines.extend(f"  deadlock at {format_state(s)}" for s in stuck)
    _emit(args, VerdictReport.deadlocks(name, stuck), lines)
    return FAILED if stuck else OK


def cmd_realise(args: argparse.Namespace) -> int:
    doc = load_file(args.file, default_type=args.default_type)
    model = doc.global_model(args.model)
    name = args.model or next(iter(doc.globals))
    outcome = realise_pipeline(model.signature, model.spec, model)
    report = RealisationReport.of(name, outcome)
    lines = [f"{name}: {report.outcome}"]
    for component, blocks in report.partitions.items():
        lines.append(f"  ≡{component}: " + " ".join("{" + ",".join(b) + "}" for b in blocks))
    if isinstance(outcome, Inconclusive):
        lines.extend(f"  {v.detail}" for v in outcome.report.violations[:args.limit])
        _emit(args, report, lines)
        return FAILED
    lines.append(
        f"  team {outcome.team_states} states, model {outcome.model_states} states, "
        f"{'isomorphic' if outcome.isomorphic else 'bisimilar, not isomorphic'}"
    )
    lines.extend(f"  {s} ~ {t}" for s, t in report.relation)
    if args.emit:
        _write(Path(args.emit), print_system(f"{name}Local", outcome.system, model.spec) + "\n")
    _emit(args, report, lines)
    return OK


def cmd_compose(args: argparse.Namespace) -> int:
    parts = []
    for path in args.files:
        doc = load_file(path)
        parts.extend(doc.system(n) for n in doc.systems)
    interface_doc = load_file(args.interface_sts)
    if interface_doc.interface is None:
        raise DslError(f"{args.interface_sts}: no interface declared")
    plan = CompositionPlan(tuple(parts), interface_doc.interface)
    mode = _mode(args)
    report = check_preservation(plan, mode)
    if args.emit:
        system, spec = compose(plan)
        _write(Path(args.emit), print_system("Composed", system, spec) + "\n")
    summary = CompositionReport.of(report, plan.interface)
    lines = [
        f"composed {format_set(summary.components)} over interface {format_set(summary.interface)}: "
        f"{summary.team_states} reachable states, {summary.team_transitions} transitions",
    ]
    for verdict in report.interface_verdicts:
        status = "met" if verdict.satisfied else "not met"
        lines.append(f"  {verdict.requirement} {mode.value}ly {status}")
    lines.extend(f"  {describe_failure(s)}" for s in report.interface_starved)
    lines.append(f"communication properties {'preserved' if report.holds else 'not established'}")
    _emit(args, summary, lines)
    return OK if report.holds else FAILED


def _product(text: str) -> List[str]:
    return [f.strip() for f in text.split(",") if f.strip()]


def cmd_project(args: argparse.Namespace) -> int:
    doc = load_file(args.file)
    fsys, fst = doc.featured_system(args.system)
    product = check_product(_product(args.product), fsys.features, fsys.feature_model)
    system = project_fsys(fsys, product)
    spec = fst.at(product)
    name = args.system or next(iter(doc.systems))
    if args.dot:
        _write(Path(args.dot), export_dot(team(system, spec).lts, name))
    print(print_system(name, system, spec))
    return OK


def cmd_products_check(args: argparse.Namespace) -> int:
    doc = load_file(args.file)
    fsys, fst = doc.featured_system(args.system)
    name = args.system or next(iter(doc.systems))
    mode = _mode(args)
    verdicts = productwise_check(fsys, fst, Property(args.property), mode)
    report = ProductsReport.of(name, args.property, mode.value, verdicts)
    lines = [
        f"  {format_set(p)}: {'holds' if v.holds else 'fails'}"
        for p, v in verdicts.items()
    ]
    lines.insert(0, f"{name}: {args.property} ({mode.value}) over {len(verdicts)} products")
    _emit(args, report, lines)
    return OK if report.holds else FAILED


def _pdl_target(doc: ModelDocument, name: Optional[str]) -> Lts:
    if name is None:
        if doc.globals:
            return doc.global_model().lts
        system, spec = doc.system()
        return team(system, spec).lts
    if name in doc.globals:
        return doc.global_model(name).lts
    system, spec = doc.system(name)
    return team(system, spec).lts


def cmd_pdl(args: argparse.Namespace) -> int:
    doc = load_file(args.file)
    formulas: Dict[str, Formula] = dict(doc.formulas)
    if args.formula:
        formulas[Path(args.formula).stem] = parse_formula(Path(args.formula).read_text(encoding="utf-8"))
    if not formulas:
        raise DslError("no formula given")
    lts = _pdl_target(doc, args.model)
    name = args.model or next(iter(doc.globals or doc.systems))
    results = [(fname, str(f), check(lts, f)) for fname, f in formulas.items()]
    lines = []
    for fname, text, result in results:
        lines.append(f"{fname}: {'holds' if result.holds else 'fails'}  {text}")
        if result.path is not None:
            lines.append(f"  path: {format_path(result.path)}")
    report = PdlReport.of(name, results)
    _emit(args, report, lines)
    return OK if report.holds else FAILED


def cmd_dot(args: argparse.Namespace) -> int:
    doc = load_file(args.file)
    lts = _pdl_target(doc, args.model)
    name = args.model or next(iter(doc.globals or doc.systems))
    text = export_dot(lts, name)
    if args.output:
        _write(Path(args.output), text)
    else:
        print(text, end="")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamata", description="Team automata toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="log level (default from configuration)")
    parser.add_argument("--json-logs", action="store_true", help="log records as JSON lines")
    parser.add_argument("--json", action="store_true", help="print the structured report instead of text")
    parser.add_argument("--workers", type=int, help="thread pool size for independent checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable, help_text: str, system: bool = True) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.set_defaults(handler=handler)
        if system:
            cmd.add_argument("file", help="model document")
            cmd.add_argument("--system", help="system name (default: the first one)")
        return cmd

    def default_type(cmd: argparse.ArgumentParser):
        cmd.add_argument(
            "--default-type", type=_sync_type_arg, metavar="TYPE",
            help="type for actions without a sync clause, e.g. '[1,1]->[1,*]'",
        )

    cmd = command("team", cmd_team, "build the team automaton")
    cmd.add_argument("--dot", help="write the team as DOT")
    default_type(cmd)

    for name, handler, what in (
        ("check-rcp", cmd_check_rcp, "receptiveness"),
        ("check-rsp", cmd_check_rsp, "responsiveness"),
    ):
        cmd = command(name, handler, f"check {what}")
        cmd.add_argument("--weak", action="store_true", help="weak instead of strict compliance")
        default_type(cmd)

    default_type(command("check-deadlock", cmd_check_deadlock, "list reachable deadlocks"))

    cmd = command("realise", cmd_realise, "realise a global model", system=False)
    cmd.add_argument("file", help="model document")
    cmd.add_argument("--model", help="global model name (default: the first one)")
    cmd.add_argument("--emit", help="write the synthesised system")
    cmd.add_argument("--limit", type=int, default=5, help="violations to print")
    default_type(cmd)

    cmd = command("compose", cmd_compose, "compose systems and check the interface", system=False)
    cmd.add_argument("files", nargs="+", help="documents whose systems are the parts")
    cmd.add_argument("--interface-sts", required=True, help="document with the interface block")
    cmd.add_argument("--weak", action="store_true", help="weak instead of strict compliance")
    cmd.add_argument("--emit", help="write the composed system")

    cmd = command("project", cmd_project, "project a featured system onto a product")
    cmd.add_argument("--product", required=True, help="comma-separated features")
    cmd.add_argument("--dot", help="write the product's team as DOT")

    cmd = command("products-check", cmd_products_check, "check every valid product")
    cmd.add_argument("--property", choices=[p.value for p in Property], default=Property.RECEPTIVE.value)
    cmd.add_argument("--weak", action="store_true", help="weak instead of strict compliance")

    cmd = command("pdl", cmd_pdl, "evaluate dynamic-logic formulas", system=False)
    cmd.add_argument("file", help="model document")
    cmd.add_argument("--model", help="global model or system (default: first global, else first team)")
    cmd.add_argument("--formula", help="file holding one formula")

    cmd = command("dot", cmd_dot, "export a global model or team as DOT", system=False)
    cmd.add_argument("file", help="model document")
    cmd.add_argument("--model", help="global model or system")
    cmd.add_argument("-o", "--output", help="output file (default: stdout)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK

    setup_logging(args.log_level, args.json_logs or None)
    if args.workers is not None:
        config.analysis.max_workers = max(1, args.workers)
    try:
        return args.handler(args)
    except (TeamataError, ValidationError, OSError) as exc:
        print(f"teamata: error: {exc}", file=sys.stderr)
        return ERROR
