"""Module for the ``fairino`` command line interface."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import __version__
from .checkers import check_property, property_label, reports_to_dict
from .mms import mms_values
from .model import Instance, allocation_to_dict, parse_allocation, parse_instance, serialize_instance
from .oracle import oracle_solve
from .reductions import (
    FAMILIES,
    PARTITION_VARIANTS,
    gen_counterexample,
    reduce_equitable_coloring,
    reduce_partition,
    reduce_rainbow_coloring,
)
from .solvers import solve
from .sweeps import SOLVERS, verify_solver
from .type_definitions import (
    BudgetExceededError,
    Budgets,
    FairnessReport,
    InstanceError,
    ReductionError,
    SolveOutcome,
    WrongClassError,
)
from .utils import parse_alpha


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2
EXIT_NOT_APPLICABLE = 3

GENERATORS = (*FAMILIES, *PARTITION_VARIANTS, "equitable_coloring", "rainbow_coloring")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"Cannot read {path}: {exc.strerror}.") from exc


def _load_instance(args: argparse.Namespace) -> Instance:
    return parse_instance(_read(args.instance))


def _budgets(args: argparse.Namespace) -> Budgets:
    return Budgets.uniform(args.budget) if args.budget is not None else Budgets()


def _emit(args: argparse.Namespace, data: Dict[str, Any], text: str) -> None:
    print(json.dumps(data, indent=2) if args.json else text)


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", path)


def outcome_to_dict(inst: Instance, outcome: SolveOutcome) -> Dict[str, Any]:
    """JSON-ready representation of a solver outcome."""
    witness = allocation_to_dict(inst, outcome.witness) if outcome.witness is not None else None
    return {"status": outcome.status, "note": outcome.note, "allocation": witness}


def _outcome_code(outcome: SolveOutcome) -> int:
    return {"witness": EXIT_OK, "none_exists": EXIT_NEGATIVE}.get(outcome.status, EXIT_NOT_APPLICABLE)


def _describe_outcome(inst: Instance, outcome: SolveOutcome) -> str:
    lines = [f"{outcome.status}: {outcome.note}"]
    if outcome.witness is not None:
        for agent, bundle in enumerate(outcome.witness.sorted_bundles()):
            lines.append(f"  agent {inst.agent_name(agent)}: {', '.join(inst.goods[good] for good in bundle) or '-'}")
    return "\n".join(lines)


def _check_reports(args: argparse.Namespace, inst: Instance) -> Dict[str, FairnessReport]:
    allocation = parse_allocation(inst, _read(args.allocation))
    alpha = parse_alpha(args.alpha)
    budgets = _budgets(args)
    properties = args.property or ["ef1"]
    return {label: check_property(inst, allocation, label, alpha=alpha, budgets=budgets) for label in properties}


def _check_command(args: argparse.Namespace) -> int:
    inst = _load_instance(args)
    reports = _check_reports(args, inst)
    holds = all(report.holds for report in reports.values())
    lines = []
    for label, report in reports.items():
        lines.append(f"{label}: {'holds' if report.holds else 'fails'}")
        lines += [f"  {violation.explanation}" for violation in report.violations]
    _emit(args, {"holds": holds, "reports": reports_to_dict(reports)}, "\n".join(lines))
    return EXIT_OK if holds else EXIT_NEGATIVE


def _solve_command(args: argparse.Namespace) -> int:
    inst = _load_instance(args)
    outcome = solve(
        inst,
        args.property,
        po=args.po,
        alpha=parse_alpha(args.alpha),
        budgets=_budgets(args),
        force_oracle=args.force_oracle,
        dump_network=args.dump_network,
    )
    if outcome.witness is not None:
        _write(args.output, json.dumps(allocation_to_dict(inst, outcome.witness)))
    _emit(args, outcome_to_dict(inst, outcome), _describe_outcome(inst, outcome))
    return _outcome_code(outcome)


def _oracle_command(args: argparse.Namespace) -> int:
    inst = _load_instance(args)
    properties = [label.strip() for label in args.properties.split(",") if label.strip()]
    outcome = oracle_solve(inst, properties, budgets=_budgets(args))
    if outcome.witness is not None:
        _write(args.output, json.dumps(allocation_to_dict(inst, outcome.witness)))
    _emit(args, outcome_to_dict(inst, outcome), _describe_outcome(inst, outcome))
    return _outcome_code(outcome)


def _mms_value_command(args: argparse.Namespace) -> int:
    inst = _load_instance(args)
    result = mms_values(inst, _budgets(args), bruteforce=args.bruteforce)
    data = {
        "mu": list(result.mu),
        "partitions": [allocation_to_dict(inst, w)["bundles"] if w is not None else None for w in result.witnesses],
    }
    text = "\n".join(f"agent {inst.agent_name(i)}: {mu}" for i, mu in enumerate(result.mu))
    _emit(args, data, text)
    return EXIT_OK


def _split(text: Optional[str]) -> List[str]:
    return [part.strip() for part in (text or "").split(",") if part.strip()]


def _generate_command(args: argparse.Namespace) -> int:
    family = args.family
    if family in PARTITION_VARIANTS:
        try:
            weights = [int(weight) for weight in _split(args.weights)]
        except ValueError as exc:
            raise ReductionError(f"Invalid weights: {args.weights!r}.") from exc
        inst = reduce_partition(weights, family)
    elif family == "equitable_coloring":
        edges = [tuple(_split(edge)) for edge in args.edge or []]
        if any(len(edge) != 2 for edge in edges):
            raise ReductionError("Every --edge needs two vertices, e.g. `--edge a,b`.")
        inst = reduce_equitable_coloring(_split(args.vertices), edges, args.k)  # type: ignore[arg-type]
    elif family == "rainbow_coloring":
        inst = reduce_rainbow_coloring(_split(args.vertices), [_split(edge) for edge in args.hyperedge or []], args.k)
    else:
        params: Dict[str, Any] = {}
        if args.alpha is not None:
            params["alpha"] = args.alpha
        for name in ("ell", "x", "y", "n"):
            if getattr(args, name) is not None:
                params[name] = getattr(args, name)
        inst = gen_counterexample(family, **params)
    text = serialize_instance(inst)
    if args.output:
        _write(args.output, text)
    else:
        print(text)
    return EXIT_OK


def _verify_command(args: argparse.Namespace) -> int:
    mismatches = verify_solver(
        args.solver, args.cases, args.seed, agents=args.agents, goods=args.goods, budgets=_budgets(args)
    )
    data = {
        "solver": args.solver,
        "cases": args.cases,
        "seed": args.seed,
        "mismatches": [mismatch.to_dict() for mismatch in mismatches],
    }
    _emit(args, data, f"{args.solver}: {len(mismatches)} mismatches in {args.cases} cases (seed {args.seed})")
    return EXIT_OK if not mismatches else EXIT_NEGATIVE


def _report_command(args: argparse.Namespace) -> int:
    from .report import render_report

    inst = _load_instance(args)
    allocation = parse_allocation(inst, _read(args.allocation))
    reports = _check_reports(args, inst)
    render_report(inst, allocation, reports, args.output)
    print(args.output)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, *, instance: bool = True) -> None:
    if instance:
        parser.add_argument("--instance", required=True, help="Instance file (JSON).")
    parser.add_argument("--budget", type=int, default=None, help="Limit of every exhaustive search.")
    parser.add_argument("--json", action="store_true", help="Print the result as JSON.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging on stderr (-v, -vv).")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``fairino`` command."""
    parser = argparse.ArgumentParser(
        prog="fairino", description="Fair and efficient completions of partially frozen allocations."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="Check properties of a complete allocation.")
    _add_common(check)
    check.add_argument("--allocation", required=True, help="Allocation file (JSON).")
    check.add_argument("--property", action="append", help="Property to check; repeat for more (default ef1).")
    check.add_argument("--alpha", default="1", help="Factor for alpha_mms, as p/q.")
    check.set_defaults(handler=_check_command)

    solve_parser = commands.add_parser("solve", help="Find a completion with the best solver for the class.")
    _add_common(solve_parser)
    solve_parser.add_argument("--property", required=True, help="ef, ef1, prop, prop1, mms, alpha_mms:p/q, mnw or po.")
    solve_parser.add_argument("--po", action="store_true", help="Also require Pareto optimality.")
    solve_parser.add_argument("--alpha", default="1", help="Factor for mms, as p/q.")
    solve_parser.add_argument("--force-oracle", action="store_true", help="Skip the structural solvers.")
    solve_parser.add_argument("--dump-network", action="store_true", help="Log the flow network of binary solvers.")
    solve_parser.add_argument("-o", "--output", help="Write the witness allocation to this file.")
    solve_parser.set_defaults(handler=_solve_command)

    mms = commands.add_parser("mms-value", help="Maximin shares of every agent.")
    _add_common(mms)
    mms.add_argument("--bruteforce", action="store_true", help="Enumerate completions even for binary or lex.")
    mms.set_defaults(handler=_mms_value_command)

    generate = commands.add_parser("generate", help="Write a reduction gadget or counterexample instance.")
    generate.add_argument("--family", required=True, choices=GENERATORS)
    generate.add_argument("--weights", help="Partition weights, comma separated.")
    generate.add_argument("--vertices", help="Vertex names, comma separated.")
    generate.add_argument("--edge", action="append", help="An edge `u,v`; repeat for more.")
    generate.add_argument("--hyperedge", action="append", help="A hyperedge `u,v,w`; repeat for more.")
    generate.add_argument("--k", type=int, default=2, help="Number of colors.")
    generate.add_argument("--alpha", default=None, help="Factor of the alpha-MMS families, as p/q.")
    generate.add_argument("--ell", type=int, default=None, help="Unit goods of no_alpha_mms_additive.")
    generate.add_argument("--x", type=int, default=None, help="Numerator bound of no_alpha_mms_binary.")
    generate.add_argument("--y", type=int, default=None, help="Denominator bound of no_alpha_mms_binary.")
    generate.add_argument("--n", type=int, default=None, help="Agents of no_alpha_mms_binary.")
    generate.add_argument("-o", "--output", help="Write the instance to this file instead of stdout.")
    generate.add_argument("-v", "--verbose", action="count", default=0)
    generate.set_defaults(handler=_generate_command)

    oracle = commands.add_parser("oracle", help="Exhaustive search for a completion.")
    _add_common(oracle)
    oracle.add_argument("--properties", required=True, help="Comma separated properties, e.g. `ef1,po`.")
    oracle.add_argument("-o", "--output", help="Write the witness allocation to this file.")
    oracle.set_defaults(handler=_oracle_command)

    verify = commands.add_parser("verify", help="Sweep a solver against the oracle on seeded random instances.")
    _add_common(verify, instance=False)
    verify.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    verify.add_argument("--cases", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--agents", type=int, default=None, help="Largest number of agents.")
    verify.add_argument("--goods", type=int, default=None, help="Largest number of goods.")
    verify.set_defaults(handler=_verify_command)

    report = commands.add_parser("report", help="Render a PDF certificate of an allocation (needs the pdf extra).")
    _add_common(report)
    report.add_argument("--allocation", required=True, help="Allocation file (JSON).")
    report.add_argument("--property", action="append", help="Property to certify; repeat for more (default ef1).")
    report.add_argument("--alpha", default="1", help="Factor for alpha_mms, as p/q.")
    report.add_argument("-o", "--output", required=True, help="The PDF file to write.")
    report.set_defaults(handler=_report_command)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line interface.

    :param argv: Arguments without the program name, ``sys.argv[1:]`` if None.
    :return: 0 when the property holds or a witness is found, 1 when it fails or no completion exists, 2 on input
        errors and 3 when no exact answer is available (wrong class, unmet preconditions or budget exceeded).
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT_ERROR
    _configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (WrongClassError, BudgetExceededError) as exc:
        print(f"fairino: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except (ValueError, ImportError) as exc:
        print(f"fairino: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main() -> None:
    """Entry point of the ``fairino`` console script."""
    sys.exit(run_command())


if __name__ == "__main__":
    main()
