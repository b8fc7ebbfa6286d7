import argparse
import json
import logging
import sys
from collections.abc import Callable
from dataclasses import replace

import numpy as np

from algebra.algebra_exception import AlgebraException
from algebra.psum import GtildeMode, gtilde, gtilde_brute_scaled
from bethe.bethe_exception import BetheException
from bethe.model import XXXChain
from bethe.solver import SolveReport, continue_in_twist, solve
from bethe.state import BetheState
from cli.cli_exception import CliException, ConfigError, StateNotFound
from cli.config import RUN_CONFIG_SCHEMA, OutputFormat, RunConfig, load_config, with_overrides
from cli.report import ReportWriter, check_record, rejected_record, result_record, state_record
from cli.verify import LEMMA_GROUPS, CheckResult, run_checks, scaled_err
from formfactor.diagonal import ff_diagonal, norm_squared
from formfactor.eigenvalue import tau_of
from formfactor.formfactor_exception import AllZero, FormFactorException
from formfactor.local import ff_local
from formfactor.offdiagonal import ff_offdiagonal
from formfactor.scalar_product import scalar_product_with_cond
from oracle.oracle_exception import OracleException
from utils.json_utils import to_json

logger = logging.getLogger(name=__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_SOLUTION = 2
EXIT_ALL_ZERO = 3

TOL_SUM_RULE = 1e-10
TOL_LEMMA = 1e-10
LEMMA_GAMMA = 0.5


def solve_states(config: RunConfig) -> SolveReport:
    a, b = config.sector
    solver = config.solver
    seeds = None
    if solver.seeds is not None:
        seeds = [(np.array(u, dtype=complex), np.array(v, dtype=complex)) for u, v in solver.seeds]
    return solve(
        config.model.build(),
        a,
        b,
        twist=config.twist,
        modes=solver.modes,
        seeds=seeds,
        tol=solver.tol,
        n_random=solver.n_random,
        rng_seed=config.seed,
        max_iter=solver.max_iter,
    )


def lookup(states: list[BetheState], label: str) -> BetheState:
    for state in states:
        if state.label == label:
            return state
    raise StateNotFound(label, [state.label for state in states])


def selected_states(config: RunConfig, states: list[BetheState]) -> list[BetheState]:
    return [lookup(states, label) for label in config.task.states] if config.task.states else states


def selected_pairs(config: RunConfig, states: list[BetheState], include_equal: bool = False) -> list[tuple[BetheState, BetheState]]:
    if config.task.pairs:
        return [(lookup(states, first), lookup(states, second)) for first, second in config.task.pairs]
    return [(c, b) for c in states for b in states if include_equal or c is not b]


def cmd_solve(config: RunConfig, writer: ReportWriter) -> int:
    report = solve_states(config)
    for state in report.states:
        writer.write(state_record(state))
    for rejected in report.rejected:
        writer.write(rejected_record(rejected))
    writer.write({"record": "summary", "found": len(report.states), "rejected": len(report.rejected), "failed_seeds": len(report.failures)})
    return EXIT_OK if report.found else EXIT_NO_SOLUTION


def cmd_ff_diag(config: RunConfig, writer: ReportWriter) -> int:
    report = solve_states(config)
    if not report.found:
        return EXIT_NO_SOLUTION
    for state in selected_states(config, report.states):
        norm = norm_squared(state)
        for z in config.task.z:
            results = [ff_diagonal(s, z, state) for s in config.task.s]
            for result in results:
                writer.write(result_record(result))
            if set(config.task.s) == {1, 2, 3}:
                expected = tau_of(state.absorbed(), z) * norm
                error = abs(sum(r.value for r in results) - expected) / max(abs(expected), 1e-300)
                writer.write(check_record("s-sum", error, TOL_SUM_RULE, states=[state.label], z=z))
    return EXIT_OK


def cmd_ff_offdiag(config: RunConfig, writer: ReportWriter) -> int:
    report = solve_states(config)
    if not report.found:
        return EXIT_NO_SOLUTION
    for stateC, stateB in selected_pairs(config, report.states):
        for z in config.task.z:
            results = [ff_offdiagonal(s, z, stateC, stateB) for s in config.task.s]
            for result in results:
                writer.write(result_record(result))
            if set(config.task.s) == {1, 2, 3}:
                reference = max(max(abs(r.value) for r in results), 1e-300)
                error = abs(sum(r.value for r in results)) / reference
                writer.write(check_record("s-sum", error, TOL_SUM_RULE, states=[stateC.label, stateB.label], z=z))
    return EXIT_OK


def cmd_scalar_product(config: RunConfig, writer: ReportWriter) -> int:
    report = solve_states(config)
    if not report.found:
        return EXIT_NO_SOLUTION
    kappa = config.task.kappa
    for stateC, stateB in selected_pairs(config, report.states):
        twisted = continue_in_twist(stateC.absorbed(), kappa)
        product = scalar_product_with_cond(twisted, stateB)
        writer.write(
            {
                "record": "scalar-product",
                "states": [stateC.label, stateB.label],
                "twist": to_json(kappa.kappas),
                "value": to_json(product.value),
                "cond": to_json(product.cond),
                "notes": [note.message for note in product.notes],
            }
        )
    return EXIT_OK


def cmd_local(config: RunConfig, writer: ReportWriter) -> int:
    if not isinstance(config.model.build(), XXXChain) or not config.twist.is_identity:
        raise ConfigError("$.model", "local form factors need an untwisted chain")
    report = solve_states(config)
    if not report.found:
        return EXIT_NO_SOLUTION
    sites = config.task.sites or tuple(range(1, len(config.model.xi) + 1))
    for stateC, stateB in selected_pairs(config, report.states, include_equal=True):
        for m in sites:
            for s in config.task.s:
                writer.write(result_record(ff_local(s, m, stateC, stateB)))
    return EXIT_OK


def write_checks(results: list[CheckResult], writer: ReportWriter, failed: list[str] | None = None) -> int:
    failed = list(failed or [])
    for result in results:
        writer.write(
            check_record(
                result.name,
                result.error,
                result.tolerance,
                passed=result.passed,
                group=result.group,
                identity=result.identity,
                scale=result.scale,
                control=result.expect_failure,
                seconds=result.seconds,
                detail=result.detail,
            )
        )
    failed += [result.name for result in results if not result.passed]
    writer.write({"record": "summary", "checks": len(results), "failed": failed})
    return EXIT_OK if not failed else EXIT_FAILURE


def cmd_verify(config: RunConfig | None, seed: int, writer: ReportWriter) -> int:
    return write_checks(run_checks(seed), writer)


def cmd_lemma(config: RunConfig | None, seed: int, writer: ReportWriter) -> int:
    """Partition-sum checks, plus one brute against closed comparison at the configured size."""
    n = config.task.lemma_n if config else 4
    c = config.model.c if config else 1.0
    rng = np.random.default_rng(seed)
    xi = rng.normal(size=n) + 1j * rng.normal(size=n)
    eta = rng.normal(size=n) + 1j * rng.normal(size=n)
    brute = gtilde_brute_scaled(xi, eta, LEMMA_GAMMA, c)
    closed = gtilde(xi, eta, LEMMA_GAMMA, c, GtildeMode.CLOSED)
    error = scaled_err(closed, brute)
    record = check_record("gtilde-lemma-n", error, TOL_LEMMA, n=n, brute=brute.value, closed=closed, scale=brute.scale)
    writer.write(record)
    return write_checks(run_checks(seed, LEMMA_GROUPS), writer, failed=[] if record["passed"] else ["gtilde-lemma-n"])


CONFIG_COMMANDS: dict[str, Callable[[RunConfig, ReportWriter], int]] = {
    "solve": cmd_solve,
    "ff-diag": cmd_ff_diag,
    "ff-offdiag": cmd_ff_offdiag,
    "scalar-product": cmd_scalar_product,
    "local": cmd_local,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su3-formfactors", description="Form factors of diagonal monodromy entries in SU(3)-invariant integrable models")
    parser.add_argument("command", choices=[*CONFIG_COMMANDS, "verify", "lemma", "schema"])
    parser.add_argument("--config", metavar="PATH", help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="random seed, overrides the configuration")
    parser.add_argument("--out", metavar="PATH", default=None, help="report file, standard output by default")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(name)s %(levelname)s %(message)s", stream=sys.stderr)

    try:
        config = None
        if args.config:
            config = with_overrides(load_config(args.config), args.seed, args.out, args.format)
        elif args.command in CONFIG_COMMANDS:
            raise ConfigError("$", f"command {args.command} needs --config")

        if args.command == "schema":
            text = json.dumps(RUN_CONFIG_SCHEMA, indent=2) + "\n"
            if args.out:
                with open(args.out, "w", encoding="utf-8") as stream:
                    stream.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK

        seed = args.seed if args.seed is not None else (config.seed if config else 0)
        path = config.output.path if config else args.out
        fmt = config.output.format if config else OutputFormat(args.format or OutputFormat.JSON.value)
        with ReportWriter(path, fmt) as writer:
            if args.command == "verify":
                return cmd_verify(config, seed, writer)
            if args.command == "lemma":
                return cmd_lemma(config, seed, writer)
            return CONFIG_COMMANDS[args.command](replace(config, seed=seed), writer)
    except AllZero as e:
        logger.error("%s", e)
        return EXIT_ALL_ZERO
    except CliException as e:
        logger.error("%s", e)
        return EXIT_FAILURE
    except (AlgebraException, BetheException, FormFactorException, OracleException) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILURE
