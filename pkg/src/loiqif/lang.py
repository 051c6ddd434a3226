"""A small imperative while-language and its observation semantics.

Grammar (C-like expression syntax, ``//`` comments)::

    program   := stmt*
    stmt      := 'skip' ';'
               | IDENT '=' expr ';'
               | 'if' '(' expr ')' stmt ('else' stmt)?
               | 'while' '(' expr ')' stmt
               | '{' stmt* '}'
    expr      := precedence-ordered binary/unary operators over
                 integer literals (decimal, 0x hex, leading-0 octal),
                 'true'/'false', and variables:
                 || && | ^ & (== !=) (< <= > >=) (<< >>) (+ -) (* / %)
                 and unary ! - ~

Values are integers (booleans are 1/0).  A variable declared in the
attacker configuration has a bit width; assignments to it wrap modulo
2^width (unsigned).  Undeclared variables are unbounded.  Division,
modulo and shifts use Python integer semantics; division or modulo by
zero and negative or absurdly large shift counts are runtime faults.
Both operands of ``&&``/``||`` are always evaluated (expressions have no
side effects, so short-circuiting would be unobservable anyway).

Running a program on an initial store yields an ``Observable``: the
observed variables' final values on normal termination, a single
non-termination class when the step budget runs out, or a single
runtime-error class on a fault.

``loi`` interprets a program as a partition of the secret space: it
enumerates the attacker-facing input atoms (values of the high variables
when the attacker fixes the lows; (low, high) pairs for an eavesdropper),
evaluates the program on each, and returns the kernel of the resulting
observable map — atoms are indistinguishable exactly when the program
output looks the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .measures import Distribution, conditional_entropy, entropy
from .partition import Atom, Domain, DomainMismatchError, Partition, QifError, kernel


class ParseError(QifError):
    """Syntax error with position and the tokens that would have been accepted."""

    def __init__(self, message: str, line: int, col: int,
                 expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.expected = expected


class ConfigError(QifError):
    """Attacker configuration or program/configuration mismatch."""


class EnumerationCapError(QifError):
    """The input space to enumerate exceeds the configured cap."""


# ---------------------------------------------------------------------------
# Abstract syntax

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = IntLit | BoolLit | Var | Unary | Binary


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    name: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    then_branch: "Stmt"
    else_branch: "Stmt"


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"


Stmt = Skip | Assign | Seq | If | While


@dataclass(frozen=True)
class Program:
    body: Stmt


# ---------------------------------------------------------------------------
# Lexer

_KEYWORDS = frozenset({"skip", "if", "else", "while", "true", "false"})
_TWO_CHAR = frozenset({"==", "!=", "<=", ">=", "<<", ">>", "&&", "||"})
_ONE_CHAR = frozenset("+-*/%&|^~!<>=(){};")


@dataclass(frozen=True)
class _Token:
    kind: str   # "ident", "int", "eof", or the symbol/keyword text itself
    text: str
    line: int
    col: int
    value: int = 0


def _tokenize(source: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col, i = 1, 1, 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = word if word in _KEYWORDS else "ident"
            toks.append(_Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isalnum():
                j += 1
            text = source[i:j]
            try:
                if text.lower().startswith("0x"):
                    value = int(text, 16)
                elif text.startswith("0") and len(text) > 1:
                    value = int(text, 8)
                else:
                    value = int(text, 10)
            except ValueError:
                raise ParseError(f"bad integer literal '{text}'",
                                 start_line, start_col) from None
            toks.append(_Token("int", text, start_line, start_col, value))
            col += j - i
            i = j
            continue
        two = source[i:i + 2]
        if two in _TWO_CHAR:
            toks.append(_Token(two, two, start_line, start_col))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR:
            toks.append(_Token(c, c, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unknown character {c!r}", line, col)
    toks.append(_Token("eof", "<end of input>", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser (recursive descent, one binary-operator level per precedence tier)

_BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",), ("&&",), ("|",), ("^",), ("&",),
    ("==", "!="), ("<", "<=", ">", ">="), ("<<", ">>"),
    ("+", "-"), ("*", "/", "%"),
)


class _Parser:
    def __init__(self, toks: list[_Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def advance(self) -> _Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected '{kind}' but found '{tok.text}'",
                             tok.line, tok.col, expected=(kind,))
        return self.advance()

    def program(self) -> Program:
        stmts: list[Stmt] = []
        while self.peek().kind != "eof":
            self._append(stmts, self.statement())
        return Program(Seq(tuple(stmts)))

    @staticmethod
    def _append(stmts: list[Stmt], s: Stmt) -> None:
        # Brace blocks carry no scope; splicing them into the enclosing
        # list keeps statement sequences flat and printing stable.
        if isinstance(s, Seq):
            stmts.extend(s.stmts)
        else:
            stmts.append(s)

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "skip":
            self.advance()
            self.expect(";")
            return Skip()
        if tok.kind == "ident":
            self.advance()
            self.expect("=")
            e = self.expression()
            self.expect(";")
            return Assign(tok.text, e)
        if tok.kind == "if":
            self.advance()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then_branch = self.statement()
            else_branch: Stmt = Skip()
            if self.peek().kind == "else":
                self.advance()
                else_branch = self.statement()
            return If(cond, then_branch, else_branch)
        if tok.kind == "while":
            self.advance()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return While(cond, self.statement())
        if tok.kind == "{":
            self.advance()
            stmts: list[Stmt] = []
            while self.peek().kind != "}":
                if self.peek().kind == "eof":
                    raise ParseError("unterminated block: expected '}'",
                                     tok.line, tok.col, expected=("}",))
                self._append(stmts, self.statement())
            self.advance()
            if not stmts:
                return Skip()
            return stmts[0] if len(stmts) == 1 else Seq(tuple(stmts))
        raise ParseError(
            f"expected a statement but found '{tok.text}'", tok.line, tok.col,
            expected=("skip", "if", "while", "{", "identifier"))

    def expression(self, level: int = 0) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.expression(level + 1)
        while self.peek().kind in ops:
            op = self.advance().kind
            left = Binary(op, left, self.expression(level + 1))
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind in ("!", "-", "~"):
            self.advance()
            return Unary(tok.kind, self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(tok.value)
        if tok.kind == "true":
            self.advance()
            return BoolLit(True)
        if tok.kind == "false":
            self.advance()
            return BoolLit(False)
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text)
        if tok.kind == "(":
            self.advance()
            e = self.expression()
            self.expect(")")
            return e
        raise ParseError(
            f"expected an expression but found '{tok.text}'", tok.line, tok.col,
            expected=("integer", "true", "false", "identifier", "("))


def parse(source: str) -> Program:
    parser = _Parser(_tokenize(source))
    return parser.program()


# ---------------------------------------------------------------------------
# Source formatting (re-parseable; used when emitting composed programs)

_PREC = {op: lvl + 1 for lvl, ops in enumerate(_BINARY_LEVELS) for op in ops}
_UNARY_PREC = len(_BINARY_LEVELS) + 1


def expr_to_source(e: Expr, parent: int = 0, right_operand: bool = False) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = expr_to_source(e.operand, _UNARY_PREC)
        return f"{e.op}{inner}"
    level = _PREC[e.op]
    text = (f"{expr_to_source(e.left, level)} {e.op} "
            f"{expr_to_source(e.right, level, right_operand=True)}")
    if level < parent or (level == parent and right_operand):
        return f"({text})"
    return text


def _stmt_to_lines(s: Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(s, Skip):
        return [pad + "skip;"]
    if isinstance(s, Assign):
        return [pad + f"{s.name} = {expr_to_source(s.expr)};"]
    if isinstance(s, Seq):
        out: list[str] = []
        for sub in s.stmts:
            out.extend(_stmt_to_lines(sub, indent))
        return out
    if isinstance(s, If):
        lines = [pad + f"if ({expr_to_source(s.cond)}) {{"]
        lines.extend(_stmt_to_lines(s.then_branch, indent + 1))
        if isinstance(s.else_branch, Skip):
            lines.append(pad + "}")
        else:
            lines.append(pad + "} else {")
            lines.extend(_stmt_to_lines(s.else_branch, indent + 1))
            lines.append(pad + "}")
        return lines
    if isinstance(s, While):
        lines = [pad + f"while ({expr_to_source(s.cond)}) {{"]
        lines.extend(_stmt_to_lines(s.body, indent + 1))
        lines.append(pad + "}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def program_to_source(p: Program) -> str:
    return "\n".join(_stmt_to_lines(p.body, 0)) + "\n"


# ---------------------------------------------------------------------------
# Variable census

def read_vars(node) -> set[str]:
    """Names read anywhere in an expression or statement."""
    if isinstance(node, Program):
        return read_vars(node.body)
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (IntLit, BoolLit, Skip)):
        return set()
    if isinstance(node, Unary):
        return read_vars(node.operand)
    if isinstance(node, Binary):
        return read_vars(node.left) | read_vars(node.right)
    if isinstance(node, Assign):
        return read_vars(node.expr)
    if isinstance(node, Seq):
        out: set[str] = set()
        for s in node.stmts:
            out |= read_vars(s)
        return out
    if isinstance(node, If):
        return read_vars(node.cond) | read_vars(node.then_branch) | read_vars(node.else_branch)
    if isinstance(node, While):
        return read_vars(node.cond) | read_vars(node.body)
    raise TypeError(f"not an AST node: {node!r}")


def assigned_vars(node) -> set[str]:
    """Names assigned anywhere in a statement."""
    if isinstance(node, Program):
        return assigned_vars(node.body)
    if isinstance(node, Skip):
        return set()
    if isinstance(node, Assign):
        return {node.name}
    if isinstance(node, Seq):
        out: set[str] = set()
        for s in node.stmts:
            out |= assigned_vars(s)
        return out
    if isinstance(node, If):
        return assigned_vars(node.then_branch) | assigned_vars(node.else_branch)
    if isinstance(node, While):
        return assigned_vars(node.body)
    raise TypeError(f"not a statement: {node!r}")


# ---------------------------------------------------------------------------
# Attacker configuration

ACTIVE = "active"
PASSIVE = "passive"

DEFAULT_BUDGET = 1_000_000
DEFAULT_CAP = 1 << 20


@dataclass(frozen=True)
class AttackerConfig:
    """Who the attacker is: which variables are secret, which they
    control or see, and how runs are bounded.

    In active mode the attacker picks the low inputs, so every low
    variable carries a fixed value and the enumerated atoms are the high
    values.  In passive mode low values are enumerated too and atoms are
    (low, high) pairs; a low variable with a fixed value is pinned to it.
    """

    high_vars: tuple[tuple[str, int], ...]
    low_vars: tuple[tuple[str, int, int | None], ...] = ()
    observed_vars: tuple[str, ...] = ()
    mode: str = ACTIVE
    step_budget: int = DEFAULT_BUDGET
    enumeration_cap: int = DEFAULT_CAP

    def __post_init__(self):
        object.__setattr__(self, "high_vars", tuple((str(n), int(b)) for n, b in self.high_vars))
        object.__setattr__(self, "low_vars",
                           tuple((str(n), int(b), None if v is None else int(v))
                                 for n, b, v in self.low_vars))
        if not self.observed_vars:
            object.__setattr__(self, "observed_vars",
                               tuple(n for n, _, _ in self.low_vars))
        else:
            object.__setattr__(self, "observed_vars", tuple(self.observed_vars))
        if self.mode not in (ACTIVE, PASSIVE):
            raise ConfigError(f"mode must be '{ACTIVE}' or '{PASSIVE}', got {self.mode!r}")
        if self.step_budget < 1:
            raise ConfigError("step budget must be positive")
        names: set[str] = set()
        for name, bits in self.high_vars:
            if bits < 1:
                raise ConfigError(f"high variable {name!r} needs a width >= 1")
            if name in names:
                raise ConfigError(f"variable {name!r} declared twice")
            names.add(name)
        for name, bits, value in self.low_vars:
            if bits < 1:
                raise ConfigError(f"low variable {name!r} needs a width >= 1")
            if name in names:
                raise ConfigError(f"variable {name!r} declared twice")
            names.add(name)
            if self.mode == ACTIVE and value is None:
                raise ConfigError(
                    f"active mode: low variable {name!r} needs a fixed value")
            if value is not None and not 0 <= value < (1 << bits):
                raise ConfigError(
                    f"value {value} of low variable {name!r} exceeds {bits} bit(s)")
        if not self.observed_vars:
            raise ConfigError("nothing to observe: no observed variables and no low variables")

    def widths(self) -> dict[str, int]:
        out = {n: b for n, b in self.high_vars}
        out.update({n: b for n, b, _ in self.low_vars})
        return out

    def with_low_values(self, values: Mapping[str, int]) -> AttackerConfig:
        """Same attacker with some low variables pinned to new values."""
        known = {n for n, _, _ in self.low_vars}
        for name in values:
            if name not in known:
                raise ConfigError(f"{name!r} is not a declared low variable")
        lows = tuple((n, b, values.get(n, v)) for n, b, v in self.low_vars)
        return AttackerConfig(self.high_vars, lows, self.observed_vars,
                              self.mode, self.step_budget, self.enumeration_cap)


def config_from_json(obj) -> AttackerConfig:
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        high = tuple((d["name"], d["bits"]) for d in obj.get("high", []))
        low = tuple((d["name"], d["bits"], d.get("value")) for d in obj.get("low", []))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad variable declaration: {exc}") from None
    return AttackerConfig(
        high_vars=high,
        low_vars=low,
        observed_vars=tuple(obj.get("observe", [])),
        mode=obj.get("mode", ACTIVE),
        step_budget=int(obj.get("budget", DEFAULT_BUDGET)),
        enumeration_cap=int(obj.get("cap", DEFAULT_CAP)),
    )


def config_to_json(cfg: AttackerConfig) -> dict:
    low = []
    for name, bits, value in cfg.low_vars:
        entry: dict = {"name": name, "bits": bits}
        if value is not None:
            entry["value"] = value
        low.append(entry)
    return {
        "high": [{"name": n, "bits": b} for n, b in cfg.high_vars],
        "low": low,
        "observe": list(cfg.observed_vars),
        "mode": cfg.mode,
        "budget": cfg.step_budget,
        "cap": cfg.enumeration_cap,
    }


# ---------------------------------------------------------------------------
# Evaluation

TERMINATED = "terminated"
NON_TERMINATION = "non-termination"
RUNTIME_ERROR = "runtime-error"


@dataclass(frozen=True)
class Observable:
    """What one run looks like from outside: the observed variables'
    final values, or one shared non-termination / runtime-error class."""

    kind: str
    values: tuple = ()


class _Fault(Exception):
    pass


class _OutOfSteps(Exception):
    pass


_SHIFT_LIMIT = 1 << 20


@dataclass
class _RunState:
    widths: dict[str, int]
    steps_left: int
    counted_loop: While | None = None
    iterations: int = 0

    def spend(self) -> None:
        self.steps_left -= 1
        if self.steps_left < 0:
            raise _OutOfSteps


def _eval_expr(e: Expr, store: dict[str, int], state: _RunState) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return 1 if e.value else 0
    if isinstance(e, Var):
        try:
            return store[e.name]
        except KeyError:
            raise ConfigError(
                f"variable {e.name!r} read before assignment") from None
    if isinstance(e, Unary):
        v = _eval_expr(e.operand, store, state)
        if e.op == "-":
            return -v
        if e.op == "!":
            return 0 if v else 1
        return ~v
    left = _eval_expr(e.left, store, state)
    right = _eval_expr(e.right, store, state)
    op = e.op
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            raise _Fault
        return left // right
    if op == "%":
        if right == 0:
            raise _Fault
        return left % right
    if op == "&":
        return left & right
    if op == "|":
        return left | right
    if op == "^":
        return left ^ right
    if op == "<<":
        if right < 0 or right > _SHIFT_LIMIT:
            raise _Fault
        return left << right
    if op == ">>":
        if right < 0:
            raise _Fault
        return left >> min(right, _SHIFT_LIMIT)
    if op == "==":
        return 1 if left == right else 0
    if op == "!=":
        return 1 if left != right else 0
    if op == "<":
        return 1 if left < right else 0
    if op == "<=":
        return 1 if left <= right else 0
    if op == ">":
        return 1 if left > right else 0
    if op == ">=":
        return 1 if left >= right else 0
    if op == "&&":
        return 1 if (left != 0 and right != 0) else 0
    if op == "||":
        return 1 if (left != 0 or right != 0) else 0
    raise TypeError(f"unknown operator {op!r}")


def _exec_stmt(s: Stmt, store: dict[str, int], state: _RunState) -> None:
    if isinstance(s, Skip):
        state.spend()
        return
    if isinstance(s, Assign):
        state.spend()
        v = _eval_expr(s.expr, store, state)
        width = state.widths.get(s.name)
        store[s.name] = v if width is None else v & ((1 << width) - 1)
        return
    if isinstance(s, Seq):
        for sub in s.stmts:
            _exec_stmt(sub, store, state)
        return
    if isinstance(s, If):
        state.spend()
        branch = s.then_branch if _eval_expr(s.cond, store, state) != 0 else s.else_branch
        _exec_stmt(branch, store, state)
        return
    if isinstance(s, While):
        state.spend()
        while _eval_expr(s.cond, store, state) != 0:
            _exec_stmt(s.body, store, state)
            if s is state.counted_loop:
                state.iterations += 1
            state.spend()
        return
    raise TypeError(f"not a statement: {s!r}")


def _run(p: Program, store: dict[str, int], widths: dict[str, int],
         budget: int, counted_loop: While | None = None
         ) -> tuple[str, dict[str, int] | None, int | None]:
    """Returns (kind, final store or None, completed iterations of the
    counted loop — None when the run exhausts its budget)."""
    state = _RunState(widths=widths, steps_left=budget, counted_loop=counted_loop)
    try:
        _exec_stmt(p.body, store, state)
        return TERMINATED, store, state.iterations
    except _OutOfSteps:
        return NON_TERMINATION, None, None
    except _Fault:
        return RUNTIME_ERROR, None, state.iterations


def eval_program(p: Program, initial: Mapping[str, int], cfg: AttackerConfig,
                 budget: int | None = None) -> Observable:
    """Big-step evaluation of a program on one initial store."""
    obs, _ = run_counting_loop(p, initial, cfg, None, budget)
    return obs


def run_counting_loop(p: Program, initial: Mapping[str, int], cfg: AttackerConfig,
                      loop: While | None, budget: int | None = None
                      ) -> tuple[Observable, int | None]:
    """Like ``eval_program`` but also reports how many complete body
    executions of ``loop`` (compared by identity) the run performed;
    None when the run exhausts its budget."""
    store = dict(initial)
    kind, final, iterations = _run(p, store, cfg.widths(),
                                   cfg.step_budget if budget is None else budget,
                                   counted_loop=loop)
    if kind == TERMINATED:
        assert final is not None
        obs = Observable(TERMINATED, tuple(final.get(v) for v in cfg.observed_vars))
    else:
        obs = Observable(kind)
    return obs, iterations


# ---------------------------------------------------------------------------
# Enumeration of the secret space and the program's partition

def _collapse(values: tuple[int, ...]):
    return values[0] if len(values) == 1 else values


def _enumeration_plan(cfg: AttackerConfig):
    """(low names, low value ranges, high names, high value ranges) for
    the variables that get enumerated."""
    high_names = [n for n, _ in cfg.high_vars]
    high_ranges = [range(1 << b) for _, b in cfg.high_vars]
    if cfg.mode == ACTIVE:
        return [], [], high_names, high_ranges
    low_names = [n for n, _, _ in cfg.low_vars]
    low_ranges = [range(v, v + 1) if v is not None else range(1 << b)
                  for _, b, v in cfg.low_vars]
    return low_names, low_ranges, high_names, high_ranges


def enumerate_domain(cfg: AttackerConfig) -> Domain:
    """All attacker-facing input atoms, in lexicographic value order.

    Active mode: atoms are high values (a bare value for one high
    variable, tuples otherwise).  Passive mode with low variables: atoms
    are (low part, high part) pairs.
    """
    low_names, low_ranges, high_names, high_ranges = _enumeration_plan(cfg)
    size = math.prod(len(r) for r in low_ranges + high_ranges)
    if size > cfg.enumeration_cap:
        raise EnumerationCapError(
            f"{size} atoms to enumerate exceeds the cap of {cfg.enumeration_cap}")

    def product(ranges) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = [()]
        for r in ranges:
            out = [t + (v,) for t in out for v in r]
        return out

    highs = [_collapse(t) for t in product(high_ranges)]
    if not low_names:
        return Domain(highs)
    lows = [_collapse(t) for t in product(low_ranges)]
    return Domain((lp, hp) for lp in lows for hp in highs)


def _split_atom(cfg: AttackerConfig, atom: Atom) -> tuple[tuple[int, ...], tuple[int, ...]]:
    low_names, _, high_names, _ = _enumeration_plan(cfg)

    def widen(part, count: int) -> tuple[int, ...]:
        return (part,) if count == 1 else tuple(part)

    if not low_names:
        return (), widen(atom, len(high_names))
    low_part, high_part = atom
    return widen(low_part, len(low_names)), widen(high_part, len(high_names))


def initial_store(cfg: AttackerConfig, atom: Atom) -> dict[str, int]:
    """Initial variable store for one enumerated atom."""
    low_values, high_values = _split_atom(cfg, atom)
    store: dict[str, int] = {}
    low_names, _, high_names, _ = _enumeration_plan(cfg)
    store.update(zip(high_names, high_values))
    if low_names:
        store.update(zip(low_names, low_values))
    else:
        store.update({n: v for n, _, v in cfg.low_vars if v is not None})
    return store


def validate_program(p: Program, cfg: AttackerConfig) -> None:
    """Every variable read or observed must be declared or assigned somewhere."""
    declared = {n for n, _ in cfg.high_vars} | {n for n, _, _ in cfg.low_vars}
    known = declared | assigned_vars(p)
    for name in sorted(read_vars(p) - known):
        raise ConfigError(f"variable {name!r} is never declared or assigned")
    for name in cfg.observed_vars:
        if name not in known:
            raise ConfigError(f"observed variable {name!r} is never declared or assigned")


def loi(p: Program, cfg: AttackerConfig) -> tuple[Domain, Partition]:
    """The program's partition of the secret space: the kernel of the
    map from input atoms to what the attacker sees of the run.

    A passive attacker watches the public low inputs go in as well as
    the observed variables come out, so with enumerated lows the kernel
    key is the (low values, observable) pair; two atoms with different
    low parts are always distinguished."""
    validate_program(p, cfg)
    domain = enumerate_domain(cfg)
    eavesdrops_lows = cfg.mode == PASSIVE and bool(cfg.low_vars)

    def view(a: Atom):
        obs = eval_program(p, initial_store(cfg, a), cfg)
        return (a[0], obs) if eavesdrops_lows else obs

    return domain, kernel(domain, {a: view(a) for a in domain.atoms})


def low_projection(domain: Domain, cfg: AttackerConfig) -> Partition:
    """Partition of the atoms by their low part (one block per low value);
    the one-block partition when lows are not enumerated."""
    if cfg.mode == PASSIVE and cfg.low_vars:
        return kernel(domain, lambda a: a[0])
    return kernel(domain, lambda a: 0)


def leakage(p: Program, cfg: AttackerConfig, mu: Distribution) -> float:
    """Leakage in bits under the given input distribution.

    Active attacker: the entropy of the program's partition.  Passive
    attacker: the entropy conditioned on the observed low inputs."""
    domain, part = loi(p, cfg)
    if mu.domain != domain:
        raise DomainMismatchError("distribution is not over the program's input atoms")
    if cfg.mode == PASSIVE and cfg.low_vars:
        return conditional_entropy(part, low_projection(domain, cfg), mu)
    return entropy(part, mu)
