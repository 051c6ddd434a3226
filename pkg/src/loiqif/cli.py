"""Command-line front end.

Commands: analyze, compare, multirun, loop, capacity, witness-check.
Exit codes: 0 success, 2 input error (parse/config/format), 3 enumeration
cap exceeded, 1 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass

from .analysis import (
    LoopAnalysis,
    leaks_same_information,
    loop_analyze,
    multi_run,
)
from .lang import (
    ACTIVE,
    PASSIVE,
    AttackerConfig,
    EnumerationCapError,
    Program,
    config_from_json,
    loi,
    low_projection,
    parse,
)
from .measures import (
    Distribution,
    MeasureReport,
    channel_capacity,
    conditional_entropy,
    distribution_from_json,
    entropy,
    format_real,
    measure_report,
    measure_report_to_json,
)
from .ordering import (
    InternalInvariantError,
    OrderWitness,
    Relation,
    compare,
    equivalence_audit,
    order_result_to_json,
    verify_witness,
    witness_from_json,
)
from .partition import (
    Domain,
    Partition,
    QifError,
    block_count,
    partition_to_json,
)


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the analyze command reports for one program."""

    program_id: str
    partition: Partition
    measures: MeasureReport
    distribution_id: str
    mode: str
    warnings: tuple[str, ...]
    leakage_bits: float


def analysis_report_to_json(r: AnalysisReport) -> dict:
    return {
        "program": r.program_id,
        "mode": r.mode,
        "distribution": r.distribution_id,
        "partition": partition_to_json(r.partition),
        "measures": measure_report_to_json(r.measures),
        "leakage_bits": format_real(r.leakage_bits),
        "warnings": list(r.warnings),
    }


# ---------------------------------------------------------------------------
# Shared plumbing

def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise QifError(f"{path}: not valid JSON: {exc}") from None


def _load_program(path: str) -> Program:
    return parse(_read_text(path))


def _load_config(args) -> AttackerConfig:
    cfg = config_from_json(_read_json(args.config))
    if getattr(args, "budget", None):
        cfg = AttackerConfig(cfg.high_vars, cfg.low_vars, cfg.observed_vars,
                             cfg.mode, args.budget, cfg.enumeration_cap)
    return cfg


def _resolve_distribution(args, domain: Domain) -> tuple[Distribution, str]:
    if args.uniform:
        return Distribution.uniform(domain), "uniform"
    mu = distribution_from_json(_read_json(args.dist))
    if mu.domain != domain:
        raise QifError(f"{args.dist}: distribution domain does not match the "
                       f"program's {domain.size} enumerated atoms")
    return mu, args.dist


def _partition_text(x: Partition) -> str:
    if x.domain.size <= 64:
        return str(x)
    sizes = Counter(len(b) for b in x.blocks)
    shape = ",".join(f"{s}x{c}" for s, c in sorted(sizes.items(), reverse=True))
    return f"<{block_count(x)} blocks over {x.domain.size} atoms; sizes {shape}>"


def _distribution_text(mu: Distribution) -> str:
    support = [(a, m) for a, m in mu.items() if m > 0]
    if len(support) <= 16:
        return "{" + ", ".join(f"{a}: {m}" for a, m in support) + "}"
    return f"<{len(support)} atoms with positive mass>"


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2))


# ---------------------------------------------------------------------------
# analyze

PASSIVE_LEAKAGE_NOTE = (
    "passive attacker: leakage is the conditional entropy of the partition "
    "given the low inputs, H(partition JOIN lows) - H(lows); it is not the "
    "plain partition entropy reported as H")


def _analysis_report(program_id: str, part: Partition, domain: Domain,
                     cfg: AttackerConfig, mu: Distribution, dist_id: str,
                     guesses: int) -> AnalysisReport:
    warnings: list[str] = []
    if cfg.mode == PASSIVE and cfg.low_vars:
        leak = conditional_entropy(part, low_projection(domain, cfg), mu)
        warnings.append(PASSIVE_LEAKAGE_NOTE)
    else:
        leak = entropy(part, mu)
    return AnalysisReport(
        program_id=program_id,
        partition=part,
        measures=measure_report(part, mu, max_tries=guesses),
        distribution_id=dist_id,
        mode=cfg.mode,
        warnings=tuple(warnings),
        leakage_bits=leak,
    )


def _print_report(r: AnalysisReport) -> None:
    print(f"program: {r.program_id}")
    print(f"mode: {r.mode}")
    print(f"distribution: {r.distribution_id}")
    print(f"partition: {_partition_text(r.partition)}")
    print(f"blocks: {block_count(r.partition)}")
    print(f"leakage (bits): {format_real(r.leakage_bits)}")
    m = r.measures
    print(f"entropy H (bits): {format_real(m.entropy_bits)}")
    for n, g in m.guess_prob.items():
        print(f"G_{n}: {g}")
    print(f"expected guesses NG: {m.expected_guesses}")
    print(f"min-entropy leakage ME (bits): {format_real(m.me_leakage_bits)}")
    print(f"guessing-entropy leakage GE: {m.ge_leakage}")
    print(f"ME' (bits): {format_real(m.me_prime_bits)}")
    print(f"GE': {m.ge_prime}")
    print(f"channel capacity (bits): {format_real(m.channel_capacity_bits)}")
    for w in r.warnings:
        print(f"warning: {w}")


def cmd_analyze(args) -> int:
    program = _load_program(args.program)
    cfg = _load_config(args)
    domain, part = loi(program, cfg)
    mu, dist_id = _resolve_distribution(args, domain)
    report = _analysis_report(args.program, part, domain, cfg, mu, dist_id,
                              args.guesses)
    if args.json:
        _emit_json(analysis_report_to_json(report))
    else:
        _print_report(report)
    return 0


# ---------------------------------------------------------------------------
# compare

_RELATION_TEXT = {
    Relation.EQUAL: "equal (same partition)",
    Relation.COARSER_THAN: "coarser-than (P1 strictly below P2: P2 refines P1)",
    Relation.FINER_THAN: "finer-than (P2 strictly below P1: P1 refines P2)",
    Relation.INCOMPARABLE: "incomparable (neither refines the other)",
}


def _print_witness(label: str, w: OrderWitness) -> None:
    block = "{" + ",".join(str(a) for a in w.violated_block) + "}"
    print(f"witness refuting {label}: n={w.n}, split block {block}")
    print(f"  distribution: {_distribution_text(w.distribution)}")


def cmd_compare(args) -> int:
    p1 = _load_program(args.program1)
    p2 = _load_program(args.program2)
    cfg = _load_config(args)
    _, x = loi(p1, cfg)
    _, y = loi(p2, cfg)
    result = compare(x, y)
    audit = equivalence_audit(x, y, trials=args.trials, seed=args.seed)
    if args.json:
        obj = order_result_to_json(result)
        obj["partition1"] = partition_to_json(x)
        obj["partition2"] = partition_to_json(y)
        obj["audit"] = {
            "samples": audit.samples,
            "violations": len(audit.violations),
            "x_ahead": audit.x_ahead,
            "y_ahead": audit.y_ahead,
        }
        _emit_json(obj)
    else:
        print(f"P1: {_partition_text(x)}")
        print(f"P2: {_partition_text(y)}")
        print(f"relation: {_RELATION_TEXT[result.relation]}")
        if result.witness_xy:
            _print_witness("P1 <= P2", result.witness_xy)
        if result.witness_yx:
            _print_witness("P2 <= P1", result.witness_yx)
        print(f"audit: {audit.samples} samples, {len(audit.violations)} violations"
              + (f", strict disagreements {audit.x_ahead} P1-ahead / "
                 f"{audit.y_ahead} P2-ahead"
                 if result.relation is Relation.INCOMPARABLE else ""))
    return 0


# ---------------------------------------------------------------------------
# multirun

def _parse_run_assignment(text: str) -> dict[str, int]:
    values: dict[str, int] = {}
    for piece in text.split(","):
        name, sep, value = piece.partition("=")
        if not sep or not name.strip():
            raise QifError(f"bad --run assignment {text!r}: expected name=value")
        try:
            values[name.strip()] = int(value, 0)
        except ValueError:
            raise QifError(f"bad --run value in {text!r}") from None
    return values


def cmd_multirun(args) -> int:
    program = _load_program(args.program)
    cfg = _load_config(args)
    if cfg.mode != ACTIVE:
        raise QifError("multirun models an attacker choosing low inputs; "
                       "the configuration must be in active mode")
    low_names = {n for n, _, _ in cfg.low_vars}
    runs = []
    for text in args.run:
        values = _parse_run_assignment(text)
        missing = low_names - set(values)
        if missing:
            raise QifError(f"--run {text!r} leaves low variable(s) "
                           f"{sorted(missing)} unassigned")
        runs.append(values)

    domain = None
    parts = []
    for values in runs:
        d, part = loi(program, cfg.with_low_values(values))
        domain = d
        parts.append(part)
    joined = multi_run(parts)
    same_info, pair = (True, None) if len(parts) == 1 else leaks_same_information(parts)
    mu, dist_id = _resolve_distribution(args, domain)
    report = measure_report(joined, mu, max_tries=args.guesses)

    if args.json:
        _emit_json({
            "program": args.program,
            "runs": [{"low_values": values, "partition": partition_to_json(part)}
                     for values, part in zip(runs, parts)],
            "join": partition_to_json(joined),
            "same_information": same_info,
            "witness_pair": list(pair) if pair else None,
            "distribution": dist_id,
            "measures": measure_report_to_json(report),
        })
    else:
        for values, part in zip(runs, parts):
            assigned = ",".join(f"{n}={v}" for n, v in sorted(values.items()))
            print(f"run [{assigned}]: {_partition_text(part)}")
        print(f"join: {_partition_text(joined)}")
        if pair:
            print(f"same information every run: no (runs {pair[0]} and {pair[1]} "
                  "are incomparable)")
        else:
            print("same information every run: yes")
        print(f"distribution: {dist_id}")
        print(f"entropy H of join (bits): {format_real(report.entropy_bits)}")
        for n, g in report.guess_prob.items():
            print(f"G_{n}: {g}")
        print(f"expected guesses NG: {report.expected_guesses}")
        print(f"channel capacity (bits): {format_real(report.channel_capacity_bits)}")
    return 0


# ---------------------------------------------------------------------------
# loop

def _loop_to_json(analysis: LoopAnalysis, direct: Partition) -> dict:
    return {
        "iteration_partitions": [partition_to_json(w) for w in analysis.w_partitions],
        "chain": [partition_to_json(w) for w in analysis.w_chain],
        "collision": partition_to_json(analysis.collision),
        "result": partition_to_json(analysis.result),
        "iterations_analyzed": analysis.iterations_analyzed,
        "stabilized": analysis.stabilized,
        "matches_direct_loi": analysis.result == direct,
        "direct_loi": partition_to_json(direct),
    }


def cmd_loop(args) -> int:
    program = _load_program(args.program)
    cfg = _load_config(args)
    analysis = loop_analyze(program, cfg, args.max_iter)
    _, direct = loi(program, cfg)
    matches = analysis.result == direct
    if args.json:
        _emit_json(_loop_to_json(analysis, direct))
    else:
        for i, w in enumerate(analysis.w_partitions):
            print(f"W_{i}: {_partition_text(w)}")
        for i, w in enumerate(analysis.w_chain):
            print(f"W_<={i}: {_partition_text(w)}")
        print(f"collision C: {_partition_text(analysis.collision)}")
        print(f"result: {_partition_text(analysis.result)}")
        print(f"iterations analyzed: {analysis.iterations_analyzed}"
              f" (stabilized: {'yes' if analysis.stabilized else 'no'})")
        print(f"direct loi: {_partition_text(direct)}")
        if analysis.stabilized:
            print(f"cross-check result == direct loi: {'pass' if matches else 'FAIL'}")
        else:
            print("cross-check result == direct loi: skipped "
                  "(chain not stabilized; raise --max-iter)")
    # a stabilized chain disagreeing with the direct partition is a bug;
    # an unstabilized one is just an under-approximation and was reported
    if analysis.stabilized and not matches:
        raise InternalInvariantError("loop analysis disagrees with direct loi")
    return 0


# ---------------------------------------------------------------------------
# capacity

def cmd_capacity(args) -> int:
    program = _load_program(args.program)
    cfg = _load_config(args)
    _, part = loi(program, cfg)
    if args.json:
        _emit_json({
            "program": args.program,
            "blocks": block_count(part),
            "channel_capacity_bits": format_real(channel_capacity(part)),
        })
    else:
        print(f"partition: {_partition_text(part)}")
        print(f"blocks: {block_count(part)}")
        print(f"channel capacity (bits): {format_real(channel_capacity(part))}")
    return 0


# ---------------------------------------------------------------------------
# witness-check

def cmd_witness_check(args) -> int:
    p1 = _load_program(args.program1)
    p2 = _load_program(args.program2)
    cfg = _load_config(args)
    _, x = loi(p1, cfg)
    _, y = loi(p2, cfg)
    w = witness_from_json(_read_json(args.witness))
    if args.direction == "xy":
        verified = verify_witness(w, x, y)
        claim = "P1 <= P2"
    else:
        verified = verify_witness(w, y, x)
        claim = "P2 <= P1"
    if args.json:
        _emit_json({"direction": args.direction, "claim_refuted": claim,
                    "verified": verified})
    else:
        print(f"witness against {claim}: "
              f"{'verified' if verified else 'NOT verified'}")
    return 0


# ---------------------------------------------------------------------------
# argument wiring

def _add_common(p: argparse.ArgumentParser, with_dist: bool = False) -> None:
    p.add_argument("--config", required=True, metavar="FILE",
                   help="attacker configuration (JSON)")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--budget", type=int, metavar="STEPS",
                   help="override the per-run statement budget")
    if with_dist:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--dist", metavar="FILE",
                           help="input distribution (JSON, exact rationals)")
        group.add_argument("--uniform", action="store_true",
                           help="uniform distribution over the enumerated atoms")
        p.add_argument("--guesses", type=int, default=4, metavar="N",
                       help="report G_1..G_N (default 4)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="loiqif",
        description="Quantitative information flow analysis of while-programs "
                    "via partitions of the secret input space.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="all measures of one program")
    p.add_argument("program", help="program source file")
    _add_common(p, with_dist=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="order two programs' partitions")
    p.add_argument("program1")
    p.add_argument("program2")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0, help="audit RNG seed")
    p.add_argument("--trials", type=int, default=200,
                   help="audit sample count (default 200)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("multirun", help="joined knowledge of several runs")
    p.add_argument("program")
    _add_common(p, with_dist=True)
    p.add_argument("--run", action="append", required=True, metavar="ASSIGN",
                   help='low values for one run, e.g. --run "l=5" (repeatable)')
    p.set_defaults(func=cmd_multirun)

    p = sub.add_parser("loop", help="per-iteration chain analysis of a loop")
    p.add_argument("program")
    _add_common(p)
    p.add_argument("--max-iter", type=int, default=None, metavar="N",
                   help="cap on analyzed iteration counts")
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("capacity", help="channel capacity of a program")
    p.add_argument("program")
    _add_common(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("witness-check", help="re-verify an order witness")
    p.add_argument("program1")
    p.add_argument("program2")
    _add_common(p)
    p.add_argument("--witness", required=True, metavar="FILE",
                   help="witness JSON as emitted by compare --json")
    p.add_argument("--direction", choices=("xy", "yx"), default="xy",
                   help="which refinement claim the witness refutes "
                        "(xy: P1 <= P2)")
    p.set_defaults(func=cmd_witness_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalInvariantError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return 1
    except EnumerationCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except QifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
