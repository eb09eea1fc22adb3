import argparse
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional

import pandas as pd
from pydantic import ValidationError
from termcolor import colored

from buymanylab.beta import (
    beta_ic_check,
    beta_partition_check,
    beta_revenue_report,
    verify_beta_buy_many,
)
from buymanylab.compression import compress
from buymanylab.config import DEFAULT_CONFIG, LabConfig
from buymanylab.data_generators import generator_registry
from buymanylab.engine import best_response
from buymanylab.errors import (
    CapacityError,
    InstanceValidationError,
    SetSystemSamplingError,
    SolverError,
)
from buymanylab.io import (
    Instance,
    ReportTable,
    dump_json,
    instance_document,
    load_instance,
    menu_document,
)
from buymanylab.lp import opt_buy_one, opt_single_parameter
from buymanylab.models import Semantics
from buymanylab.perturbation import (
    ATOM_COLUMNS,
    PerturbationMode,
    PerturbationSpec,
    epsilon_prime,
    perturb,
    run_continuity_experiment,
)
from buymanylab.pricing import (
    REVENUE_COLUMNS,
    best_bundle_price,
    best_item_pricing,
    revenue_table,
)
from buymanylab.selftest import run_selftest
from buymanylab.utils.logger import set_verbosity
from buymanylab.verification import closure, expand_item_pricing, verify_buy_many

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3
EXIT_SOLVER = 4

CLOSURE_COLUMNS = ["entry", "payment", "outcomes", "policy_steps"]
STAGE_COLUMNS = ["stage", "entries"]

CSV_EPILOG = f"""\
CSV columns (--format csv):
  revenue, pricing   {", ".join(REVENUE_COLUMNS)}
  closure            {", ".join(CLOSURE_COLUMNS)}
  compress           {", ".join(STAGE_COLUMNS)}
  continuity         epsilon, {", ".join(ATOM_COLUMNS)}

Exit codes: 0 success, 1 usage error or failed self-test, 2 invalid input,
3 capacity limit exceeded, 4 LP solver failure.
"""


class LabArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(args: argparse.Namespace, payload: Any, table: Optional[pd.DataFrame] = None) -> None:
    if args.format == "csv" and table is not None:
        text = ReportTable(table).to_csv()
    else:
        text = dump_json(payload)
    if args.out:
        Path(args.out).write_text(text)
        print(colored(f"Wrote {args.out}", "green"), file=sys.stderr)
    else:
        sys.stdout.write(text)


def _config(args: argparse.Namespace) -> LabConfig:
    return DEFAULT_CONFIG.with_overrides(
        tolerance=args.tolerance, policy_budget=args.policy_budget
    )


def _instance(args: argparse.Namespace) -> Instance:
    return load_instance(Path(args.instance))


def _semantics(args: argparse.Namespace, instance: Instance) -> Semantics:
    return Semantics(args.semantics) if args.semantics else instance.menu.semantics


def cmd_revenue(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    semantics = _semantics(args, instance)
    table = revenue_table(instance.menu, instance.distribution, semantics, config)
    rev = float((table["prob"] * table["payment"]).sum()) if len(instance.menu) else 0.0
    print(round(rev, 12))
    if args.out:
        _emit(
            args,
            {"semantics": semantics.value, "revenue": rev, "atoms": table.to_dict("records")},
            table,
        )
    return EXIT_OK


def cmd_bestresponse(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    if not 0 <= args.atom < len(instance.distribution):
        raise InstanceValidationError(
            f"atom {args.atom} outside 0..{len(instance.distribution) - 1}", path="atom"
        )
    semantics = _semantics(args, instance)
    valuation = instance.distribution.atoms[args.atom].valuation
    response = best_response(valuation, instance.menu, semantics, config)
    _emit(
        args,
        {
            "atom": args.atom,
            "semantics": semantics.value,
            "utility": response.utility,
            "payment": response.payment,
            "first_entry": response.first_entry,
            "outcome": response.outcome.describe(),
            "policy": response.policy.describe() if response.policy is not None else None,
        },
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    result = verify_buy_many(instance.menu, instance.n, config)
    status = colored("holds", "green") if result.holds else colored("violated", "red")
    print(f"Buy-many constraint {status}", file=sys.stderr)
    _emit(
        args,
        {
            "holds": result.holds,
            "witness": result.witness.describe() if result.witness is not None else None,
            "witness_outcome": (
                result.witness_outcome.describe() if result.witness_outcome is not None else None
            ),
            "outcomes_checked": result.outcomes_checked,
            "policies_enumerated": result.policies_enumerated,
        },
    )
    return EXIT_OK


def cmd_closure(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    induced = closure(instance.menu, instance.n, config)
    entries = [
        {"outcome": e.outcome.describe(), "policy": e.policy.describe()} for e in induced.entries
    ]
    table = pd.DataFrame(
        [
            {
                "entry": idx,
                "payment": e.outcome.payment,
                "outcomes": len(e.outcome.allocation),
                "policy_steps": len(e.policy.buying_states()),
            }
            for idx, e in enumerate(induced.entries)
        ],
        columns=CLOSURE_COLUMNS,
    )
    _emit(
        args,
        {"n": induced.n, "policies_enumerated": induced.policies_enumerated, "entries": entries},
        table,
    )
    return EXIT_OK


def cmd_lp_opt(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    if args.single_parameter:
        posted = opt_single_parameter(
            instance.distribution, assume_single_parameter=args.assume, config=config
        )
        _emit(args, {"price": posted.price, "revenue": posted.revenue})
        return EXIT_OK
    optimal = opt_buy_one(instance.distribution, config)
    print(colored(f"Optimal buy-one revenue {optimal.revenue:.10g}", "green"), file=sys.stderr)
    _emit(
        args,
        instance_document(
            Instance(n=instance.n, distribution=instance.distribution, menu=optimal.menu)
        )
        | {"revenue": optimal.revenue},
    )
    return EXIT_OK


def cmd_pricing(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    pricing = best_item_pricing(
        instance.distribution, config, seed=args.seed, restarts=args.restarts
    )
    bundle = best_bundle_price(instance.distribution, config)
    menu = expand_item_pricing(pricing.prices, config)
    table = revenue_table(menu, instance.distribution, Semantics.BUY_MANY, config)
    if pricing.heuristic:
        logger.warning("Item pricing search was heuristic; the revenue is a lower bound")
    _emit(
        args,
        {
            "prices": list(pricing.prices),
            "revenue": pricing.revenue,
            "heuristic": pricing.heuristic,
            "bundle_price": bundle.price,
            "bundle_revenue": bundle.revenue,
            "menu": menu_document(menu),
        },
        table,
    )
    return EXIT_OK


def cmd_compress(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    menu, report = compress(instance.menu, instance.distribution, args.eps, config)
    colour = "green" if report.target_met else "yellow"
    print(
        colored(
            f"{report.original_size} -> {report.compressed_size} entries via {report.route.value}",
            colour,
        ),
        file=sys.stderr,
    )
    table = pd.DataFrame(
        [{"stage": k, "entries": v} for k, v in report.stage_counts.items()],
        columns=STAGE_COLUMNS,
    )
    _emit(args, {"report": report.model_dump(mode="json"), "menu": menu_document(menu)}, table)
    return EXIT_OK


def cmd_perturb(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    spec = PerturbationSpec(epsilon=args.eps, mode=args.mode, seed=args.seed)
    perturbed, coupling = perturb(instance.distribution, spec, config)
    logger.info(
        f"Coupled {len(coupling)} atoms; eps' = {epsilon_prime(args.eps, instance.n):.6g}"
    )
    _emit(
        args,
        instance_document(Instance(n=instance.n, distribution=perturbed, menu=instance.menu)),
    )
    return EXIT_OK


def cmd_continuity(args: argparse.Namespace, config: LabConfig) -> int:
    instance = _instance(args)
    reports, tables = [], []
    for eps in args.eps:
        spec = PerturbationSpec(epsilon=eps, mode=args.mode, seed=args.seed)
        report = run_continuity_experiment(
            instance.distribution,
            spec,
            instance.menu,
            with_reference_opt=not args.no_reference,
            config=config,
        )
        reports.append(report.model_dump(mode="json"))
        tables.append(report.to_table().assign(epsilon=eps))
    table = pd.concat(tables, ignore_index=True)[["epsilon"] + ATOM_COLUMNS]
    _emit(args, {"reports": reports}, table)
    return EXIT_OK


GEN_PARAMS = [
    "n",
    "eps",
    "delta",
    "s",
    "b",
    "count",
    "value_cap",
    "collections",
    "collection_size",
    "collection_overlap",
    "atoms",
    "entries",
    "valuation",
    "retry_budget",
]


def cmd_gen(args: argparse.Namespace, config: LabConfig) -> int:
    generator = generator_registry.get(args.kind)
    params = {k: getattr(args, k) for k in GEN_PARAMS if getattr(args, k) is not None}
    if args.perturbed:
        params["perturbed"] = True
    document = generator.generate(seed=args.seed, **params)
    _emit(args, document)
    return EXIT_OK


def cmd_beta(args: argparse.Namespace, config: LabConfig) -> int:
    verification = verify_beta_buy_many(
        args.grid_step, adaptive_step=args.adaptive_step, config=config
    )
    revenue_report = beta_revenue_report(args.points, args.fine_points)
    partition = beta_partition_check(args.grid_step)
    ic = None if args.skip_ic else beta_ic_check(args.ic_step)
    holds = verification.holds and partition.exhaustive and (ic is None or ic.holds)
    print(
        colored(
            f"Worst case {verification.worst_case_payment} vs posted {revenue_report.bundle_price:.4f}; "
            f"min margin {verification.min_margin:.4f}; revenue {revenue_report.revenue_fine:.5f}",
            "green" if holds else "red",
        ),
        file=sys.stderr,
    )
    _emit(
        args,
        {
            "verification": verification.model_dump(mode="json"),
            "revenue": revenue_report.model_dump(mode="json"),
            "partition": partition.model_dump(mode="json"),
            "ic": ic.model_dump(mode="json") if ic is not None else None,
        },
    )
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace, config: LabConfig) -> int:
    report = run_selftest(args.seed, config)
    for check in report.checks:
        mark = colored("PASS", "green") if check.passed else colored("FAIL", "red")
        print(f"{mark} {check.name} {check.detail}", file=sys.stderr)
    if args.out:
        _emit(args, report.model_dump(mode="json"))
    return EXIT_OK if report.passed else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, default=None, help="Write the output to this file")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=DEFAULT_CONFIG.tolerance)
    common.add_argument("--policy-budget", type=int, default=None)
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    with_instance = argparse.ArgumentParser(add_help=False)
    with_instance.add_argument("--instance", type=str, required=True, help="Instance JSON file")

    semantics = argparse.ArgumentParser(add_help=False)
    semantics.add_argument(
        "--semantics",
        choices=[s.value for s in Semantics],
        default=None,
        help="Override the menu's own semantics",
    )

    parser = LabArgumentParser(
        description="Buy-many mechanism lab command-line interface",
        epilog=CSV_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=LabArgumentParser)

    def add(name: str, handler, help: str, parents: List[argparse.ArgumentParser]):
        sub = subparsers.add_parser(
            name,
            help=help,
            parents=[common, *parents],
            epilog=CSV_EPILOG,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sub.set_defaults(handler=handler)
        return sub

    add("revenue", cmd_revenue, "Expected revenue of the instance menu", [with_instance, semantics])

    sub = add(
        "bestresponse", cmd_bestresponse, "Best response of one atom", [with_instance, semantics]
    )
    sub.add_argument("--atom", type=int, default=0)

    add("verify", cmd_verify, "Check the buy-many constraint", [with_instance])
    add("closure", cmd_closure, "Induced buy-one menu of adaptive strategies", [with_instance])

    sub = add("lp-opt", cmd_lp_opt, "Revenue-optimal buy-one menu", [with_instance])
    sub.add_argument("--single-parameter", action="store_true", help="Best posted price")
    sub.add_argument(
        "--assume", action="store_true", help="Skip the proportional-valuation check"
    )

    sub = add("pricing", cmd_pricing, "Best item pricing and bundle price", [with_instance])
    sub.add_argument("--restarts", type=int, default=4)

    sub = add("compress", cmd_compress, "Compress the instance menu", [with_instance])
    sub.add_argument("--eps", type=float, required=True)

    modes = [m.value for m in PerturbationMode if m is not PerturbationMode.EXPLICIT]
    sub = add("perturb", cmd_perturb, "Emit a coupled perturbed instance", [with_instance])
    sub.add_argument("--eps", type=float, required=True)
    sub.add_argument("--mode", choices=modes, default=PerturbationMode.SCALAR.value)

    sub = add("continuity", cmd_continuity, "Revenue continuity experiment", [with_instance])
    sub.add_argument("--eps", type=float, action="append", required=True, help="May repeat")
    sub.add_argument("--mode", choices=modes, default=PerturbationMode.SCALAR.value)
    sub.add_argument("--no-reference", action="store_true", help="Skip the buy-one LP on D'")

    sub = add("gen", cmd_gen, "Generate an instance family", [])
    sub.add_argument("kind", choices=generator_registry.kinds())
    sub.add_argument("--n", type=int)
    sub.add_argument("--eps", type=float)
    sub.add_argument("--delta", type=float)
    sub.add_argument("--s", type=int)
    sub.add_argument("--b", type=int)
    sub.add_argument("--count", type=int)
    sub.add_argument("--value-cap", type=int)
    sub.add_argument("--collections", type=int)
    sub.add_argument("--collection-size", type=int)
    sub.add_argument("--collection-overlap", type=int)
    sub.add_argument("--atoms", type=int)
    sub.add_argument("--entries", type=int)
    sub.add_argument("--valuation", type=str)
    sub.add_argument("--retry-budget", type=int)
    sub.add_argument("--perturbed", action="store_true", help="Counterexample: emit D'")

    sub = add("beta", cmd_beta, "Beta(1,2) two-item example checks", [])
    sub.add_argument("--grid-step", type=float, default=1e-3)
    sub.add_argument("--adaptive-step", type=float, default=0.05)
    sub.add_argument("--points", type=int, default=10_000)
    sub.add_argument("--fine-points", type=int, default=1_000_000)
    sub.add_argument("--ic-step", type=float, default=1e-2)
    sub.add_argument("--skip-ic", action="store_true")

    add("selftest", cmd_selftest, "Run the oracle checks", [])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    set_verbosity(args.verbose)
    try:
        config = _config(args)
        return args.handler(args, config)
    except CapacityError as e:
        print(colored(f"Capacity error: {e}", "red"), file=sys.stderr)
        return EXIT_CAPACITY
    except SetSystemSamplingError as e:
        print(colored(f"Sampling failed: {e}", "red"), file=sys.stderr)
        return EXIT_CAPACITY
    except SolverError as e:
        print(colored(f"Solver failed: {e}", "red"), file=sys.stderr)
        return EXIT_SOLVER
    except (InstanceValidationError, ValidationError, ValueError, FileNotFoundError) as e:
        print(colored(f"Invalid input: {e}", "red"), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
