"""Program-level analyses on top of partitions.

* ``multi_run`` — the combined knowledge of several runs is the join of
  their partitions.
* ``leaks_same_information`` — a batch of runs carries one fixed piece
  of information iff no two of them are incomparable.
* ``self_compose`` — builds one program whose partition is the join of
  two programs' partitions, by sequencing variable-disjoint copies fed
  from a shared prelude.
* ``loop_analyze`` — reconstructs a loop's partition from per-iteration
  observation kernels joined into a chain, cut down by the collision
  partition that merges inputs indistinguishable because they produce
  the same output at different iteration counts.
* ``program_capacity`` — channel capacity of a program's partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lang import (
    Assign,
    AttackerConfig,
    Binary,
    BoolLit,
    Expr,
    If,
    IntLit,
    Observable,
    Program,
    Seq,
    Skip,
    Stmt,
    Unary,
    Var,
    While,
    assigned_vars,
    enumerate_domain,
    initial_store,
    loi,
    read_vars,
    run_counting_loop,
    validate_program,
)
from .measures import channel_capacity
from .partition import Atom, Domain, Partition, QifError, join, kernel, leq, meet


class AnalysisError(QifError):
    """The analysis preconditions do not hold for this input."""


def multi_run(partitions: Sequence[Partition]) -> Partition:
    """Join of the partitions of several runs: what all of them together
    reveal."""
    if not partitions:
        raise AnalysisError("multi_run needs at least one partition")
    acc = partitions[0]
    for p in partitions[1:]:
        acc = join(acc, p)
    return acc


def leaks_same_information(runs: Sequence[Partition]) -> tuple[bool, tuple[int, int] | None]:
    """True when the runs form a chain (each pair comparable), i.e. the
    program keeps revealing the same information; otherwise False with
    the first pair (i, j) whose join sits strictly above both."""
    if len(runs) < 2:
        raise AnalysisError("need at least two runs to compare")
    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            if not leq(runs[i], runs[j]) and not leq(runs[j], runs[i]):
                return False, (i, j)
    return True, None


# ---------------------------------------------------------------------------
# Self-composition

def _rename_expr(e: Expr, suffix: str) -> Expr:
    if isinstance(e, (IntLit, BoolLit)):
        return e
    if isinstance(e, Var):
        return Var(e.name + suffix)
    if isinstance(e, Unary):
        return Unary(e.op, _rename_expr(e.operand, suffix))
    return Binary(e.op, _rename_expr(e.left, suffix), _rename_expr(e.right, suffix))


def _rename_stmt(s: Stmt, suffix: str, widths: dict[str, int]) -> Stmt:
    if isinstance(s, Skip):
        return s
    if isinstance(s, Assign):
        expr = _rename_expr(s.expr, suffix)
        # A declared variable loses its config-backed width under the new
        # name, so the wrap-on-assignment semantics is made explicit.
        if s.name in widths:
            expr = Binary("&", expr, IntLit((1 << widths[s.name]) - 1))
        return Assign(s.name + suffix, expr)
    if isinstance(s, Seq):
        return Seq(tuple(_rename_stmt(sub, suffix, widths) for sub in s.stmts))
    if isinstance(s, If):
        return If(_rename_expr(s.cond, suffix),
                  _rename_stmt(s.then_branch, suffix, widths),
                  _rename_stmt(s.else_branch, suffix, widths))
    if isinstance(s, While):
        return While(_rename_expr(s.cond, suffix),
                     _rename_stmt(s.body, suffix, widths))
    raise TypeError(f"not a statement: {s!r}")


def self_compose(p1: Program, p2: Program, cfg: AttackerConfig
                 ) -> tuple[Program, AttackerConfig]:
    """Sequence two variable-disjoint copies of the programs.

    Each copy works on its own suffixed variables; a prelude copies every
    configured variable into the copy's alias, so the copies share inputs
    but never interfere.  Returns the composed program and the matching
    configuration (same secrets, both copies' outputs observed).  For
    runs that terminate within budget, the composed program's partition
    is exactly the join of the two programs' partitions.
    """
    validate_program(p1, cfg)
    validate_program(p2, cfg)
    widths = cfg.widths()
    vocabulary = (set(widths) | read_vars(p1) | assigned_vars(p1)
                  | read_vars(p2) | assigned_vars(p2))
    suffixes = ("__1", "__2")
    for name in vocabulary:
        for suffix in suffixes:
            if name + suffix in vocabulary:
                raise AnalysisError(
                    f"renaming collision: {name + suffix!r} already in use")

    declared_order = [n for n, _ in cfg.high_vars] + [n for n, _, _ in cfg.low_vars]
    stmts: list[Stmt] = []
    for program, suffix in zip((p1, p2), suffixes):
        stmts.extend(Assign(n + suffix, Var(n)) for n in declared_order)
        body = _rename_stmt(program.body, suffix, widths)
        stmts.extend(body.stmts) if isinstance(body, Seq) else stmts.append(body)
    composed = Program(Seq(tuple(stmts)))

    observed = tuple(o + suffixes[0] for o in cfg.observed_vars) + \
        tuple(o + suffixes[1] for o in cfg.observed_vars)
    composed_cfg = AttackerConfig(
        high_vars=cfg.high_vars,
        low_vars=cfg.low_vars,
        observed_vars=observed,
        mode=cfg.mode,
        step_budget=2 * cfg.step_budget + 2 * len(declared_order) + 2,
        enumeration_cap=cfg.enumeration_cap,
    )
    return composed, composed_cfg


# ---------------------------------------------------------------------------
# Loop analysis

@dataclass(frozen=True)
class LoopAnalysis:
    """Per-iteration decomposition of a loop's partition.

    ``w_partitions[i]`` distinguishes inputs by their output when the
    loop finishes in exactly i iterations (everything else pooled);
    ``w_chain[i]`` is the join of the first i+1 of those.  ``collision``
    merges inputs whose runs produce the same output at two or more
    different iteration counts (inputs that never resolve form one
    block).  ``result`` is the meet of the final chain element with the
    collision partition and equals the program's partition whenever the
    chain stabilized.
    """

    domain: Domain
    w_partitions: tuple[Partition, ...]
    w_chain: tuple[Partition, ...]
    collision: Partition
    result: Partition
    iterations_analyzed: int
    stabilized: bool


def _find_top_level_loop(s: Stmt) -> While | None:
    if isinstance(s, While):
        return s
    if isinstance(s, Seq):
        for sub in s.stmts:
            if isinstance(sub, While):
                return sub
            if isinstance(sub, Seq):
                found = _find_top_level_loop(sub)
                if found is not None:
                    return found
    return None


_ELSEWHERE = "<other iteration count>"


def loop_analyze(p: Program, cfg: AttackerConfig,
                 max_iterations: int | None = None) -> LoopAnalysis:
    """Analyze the first top-level while loop of the program.

    ``max_iterations`` caps the chain length; the default, one past the
    size of the largest high-variable range, suffices for loops driven
    by a single enumerated secret.
    """
    loop = _find_top_level_loop(p.body)
    if loop is None:
        raise AnalysisError("no top-level while loop to analyze")
    if max_iterations is None:
        max_iterations = (1 << max((b for _, b in cfg.high_vars), default=0)) + 1
    if max_iterations < 1:
        raise AnalysisError("max_iterations must be >= 1")

    validate_program(p, cfg)
    domain = enumerate_domain(cfg)
    traces: dict[Atom, tuple[Observable, int | None]] = {
        a: run_counting_loop(p, initial_store(cfg, a), cfg, loop)
        for a in domain.atoms
    }
    resolved_by = max((it for _, it in traces.values() if it is not None), default=0)

    def w_partition(i: int) -> Partition:
        return kernel(domain, lambda a: traces[a][0] if traces[a][1] == i else _ELSEWHERE)

    w_parts = [w_partition(0)]
    chain = [w_parts[0]]
    n = 0
    stabilized = False
    while n < max_iterations:
        n += 1
        w_parts.append(w_partition(n))
        chain.append(join(chain[-1], w_parts[-1]))
        if chain[-1] == chain[-2] and n >= resolved_by:
            stabilized = True
            break

    collision = _collision_partition(domain, traces)
    result = meet(chain[-1], collision)
    return LoopAnalysis(
        domain=domain,
        w_partitions=tuple(w_parts),
        w_chain=tuple(chain),
        collision=collision,
        result=result,
        iterations_analyzed=n,
        stabilized=stabilized,
    )


def _collision_partition(domain: Domain,
                         traces: dict[Atom, tuple[Observable, int | None]]) -> Partition:
    """Transitive closure of "same output from different iteration
    counts": an output seen at two or more counts pulls all its inputs
    into one block; everything else stays on its own.  Inputs that never
    resolved share a single block."""
    by_output: dict[Observable, list[Atom]] = {}
    counts: dict[Observable, set[int]] = {}
    unresolved: list[Atom] = []
    for a in domain.atoms:
        obs, iterations = traces[a]
        if iterations is None:
            unresolved.append(a)
            continue
        by_output.setdefault(obs, []).append(a)
        counts.setdefault(obs, set()).add(iterations)
    blocks: list[list[Atom]] = []
    for obs, atoms in by_output.items():
        if len(counts[obs]) >= 2:
            blocks.append(atoms)
        else:
            blocks.extend([a] for a in atoms)
    if unresolved:
        blocks.append(unresolved)
    return Partition(domain, blocks)


def program_capacity(p: Program, cfg: AttackerConfig) -> float:
    """Channel capacity of the program: log2 of its partition's block count."""
    _, part = loi(p, cfg)
    return channel_capacity(part)
