"""First-order formulas with modular counting quantifiers, and a brute-force
model checker over finite structures.

Grammar (prefix quantifiers, infix connectives):

    formula  := quantified | iff-chain
    quantified := ("exists" | "forall") var "." formula
                | "D[" m "," i "]" var "." formula
    iff      := or ("<->" or)*
    or       := and ("|" and)*
    and      := unary ("&" unary)*
    unary    := "!" unary | "(" formula ")" | atom | "true" | "false"
    atom     := name "(" term ("," term)* ")" | term "=" term | term "<" term
    term     := identifier          (variable or constant symbol)

`D[m,i] x. phi` holds when the number of witnesses for x is congruent to i
modulo m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

from .structures import Structure


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Formula:
    def free_vars(self) -> frozenset:
        raise NotImplementedError

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class TrueF(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class FalseF(Formula):
    def free_vars(self):
        return frozenset()


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: Tuple[Term, ...]

    def free_vars(self):
        return frozenset(t.name for t in self.args)


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term

    def free_vars(self):
        return frozenset({self.left.name, self.right.name})


@dataclass(frozen=True)
class Less(Formula):
    left: Term
    right: Term

    def free_vars(self):
        return frozenset({self.left.name, self.right.name})


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def free_vars(self):
        return self.sub.free_vars()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sub: Formula

    def free_vars(self):
        return self.sub.free_vars() - {self.var}


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sub: Formula

    def free_vars(self):
        return self.sub.free_vars() - {self.var}


@dataclass(frozen=True)
class DCount(Formula):
    """Number of witnesses for `var` is congruent to residue modulo modulus."""
    modulus: int
    residue: int
    var: str
    sub: Formula

    def __post_init__(self):
        if self.modulus < 2:
            raise FormulaError("counting modulus must be >= 2")
        if not (0 <= self.residue < self.modulus):
            raise FormulaError("residue must satisfy 0 <= i < m")

    def free_vars(self):
        return self.sub.free_vars() - {self.var}


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FalseF()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_QUANT = {"exists": Exists, "forall": Forall}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ParseError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def eat(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            self.error(f"expected {s!r}")

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if self.pos == start:
            self.error("expected identifier")
        return self.text[start:self.pos]

    def number(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected number")
        return int(self.text[start:self.pos])

    def formula(self) -> Formula:
        self.skip_ws()
        for kw, node in _QUANT.items():
            mark = self.pos
            if self.eat(kw):
                nxt = self.text[self.pos:self.pos + 1]
                if nxt and (nxt.isalnum() or nxt == "_"):
                    self.pos = mark  # identifier that merely starts with the keyword
                else:
                    var = self.ident()
                    self.expect(".")
                    return node(var, self.formula())
        if self.peek("D["):
            self.expect("D[")
            m = self.number()
            self.expect(",")
            i = self.number()
            self.expect("]")
            var = self.ident()
            self.expect(".")
            return DCount(m, i, var, self.formula())
        return self.iff_chain()

    def iff_chain(self) -> Formula:
        left = self.or_chain()
        while self.eat("<->"):
            left = Iff(left, self.or_chain())
        return left

    def or_chain(self) -> Formula:
        left = self.and_chain()
        while self.eat("|"):
            left = Or(left, self.and_chain())
        return left

    def and_chain(self) -> Formula:
        left = self.unary()
        while self.eat("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        self.skip_ws()
        if self.eat("!"):
            return Not(self.unary())
        if self.eat("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.peek("D["):
            return self.formula()
        mark = self.pos
        name = self.ident()
        if name == "true":
            return TrueF()
        if name == "false":
            return FalseF()
        if name in _QUANT:
            self.pos = mark
            return self.formula()  # quantifier scopes to the end of the enclosing chain
        self.skip_ws()
        if self.eat("("):
            args = [Term(self.ident())]
            while self.eat(","):
                args.append(Term(self.ident()))
            self.expect(")")
            return Atom(name, tuple(args))
        if self.eat("="):
            return Eq(Term(name), Term(self.ident()))
        if self.eat("<"):
            return Less(Term(name), Term(self.ident()))
        self.error("expected atom")


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.skip_ws()
    if p.pos != len(p.text):
        p.error("trailing input")
    return f


def to_text(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f"{f.rel}({','.join(t.name for t in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Less):
        return f"{f.left} < {f.right}"
    if isinstance(f, Not):
        return f"!({to_text(f.sub)})"
    if isinstance(f, And):
        return f"({to_text(f.left)} & {to_text(f.right)})"
    if isinstance(f, Or):
        return f"({to_text(f.left)} | {to_text(f.right)})"
    if isinstance(f, Iff):
        return f"({to_text(f.left)} <-> {to_text(f.right)})"
    if isinstance(f, Exists):
        return f"exists {f.var}. {to_text(f.sub)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {to_text(f.sub)}"
    if isinstance(f, DCount):
        return f"D[{f.modulus},{f.residue}] {f.var}. {to_text(f.sub)}"
    raise FormulaError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

Assignment = Dict[str, int]


def _term_value(t: Term, a: Structure, env: Assignment) -> int:
    if t.name in env:
        return env[t.name]
    if t.name in a.constants:
        return a.constants[t.name]
    raise FormulaError(f"unbound variable or unknown constant {t.name!r}")


def eval_formula(f: Formula, a: Structure, env: Optional[Assignment] = None) -> bool:
    """Tarski semantics by naive enumeration; O(n^rank)."""
    env = dict(env or {})
    return _eval(f, a, env)


def _eval(f: Formula, a: Structure, env: Assignment) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Atom):
        if not a.vocabulary.has_relation(f.rel):
            raise FormulaError(f"unknown relation symbol {f.rel!r}")
        args = tuple(_term_value(t, a, env) for t in f.args)
        return args in a.rel(f.rel)
    if isinstance(f, Eq):
        return _term_value(f.left, a, env) == _term_value(f.right, a, env)
    if isinstance(f, Less):
        if not a.vocabulary.ordered:
            raise FormulaError("order atom used on an unordered structure")
        return _term_value(f.left, a, env) < _term_value(f.right, a, env)
    if isinstance(f, Not):
        return not _eval(f.sub, a, env)
    if isinstance(f, And):
        return _eval(f.left, a, env) and _eval(f.right, a, env)
    if isinstance(f, Or):
        return _eval(f.left, a, env) or _eval(f.right, a, env)
    if isinstance(f, Iff):
        return _eval(f.left, a, env) == _eval(f.right, a, env)
    if isinstance(f, Exists):
        old = env.get(f.var)
        for x in range(a.n):
            env[f.var] = x
            if _eval(f.sub, a, env):
                _restore(env, f.var, old)
                return True
        _restore(env, f.var, old)
        return False
    if isinstance(f, Forall):
        old = env.get(f.var)
        for x in range(a.n):
            env[f.var] = x
            if not _eval(f.sub, a, env):
                _restore(env, f.var, old)
                return False
        _restore(env, f.var, old)
        return True
    if isinstance(f, DCount):
        old = env.get(f.var)
        cnt = 0
        for x in range(a.n):
            env[f.var] = x
            if _eval(f.sub, a, env):
                cnt += 1
        _restore(env, f.var, old)
        return cnt % f.modulus == f.residue
    raise FormulaError(f"unknown node {f!r}")


def _restore(env: Assignment, var: str, old) -> None:
    if old is None:
        env.pop(var, None)
    else:
        env[var] = old


def count_witnesses(f: Formula, var: str, a: Structure, env: Optional[Assignment] = None) -> int:
    """|{x : phi(x)}| under the given partial assignment."""
    env = dict(env or {})
    cnt = 0
    for x in range(a.n):
        env[var] = x
        if _eval(f, a, env):
            cnt += 1
    return cnt


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, (TrueF, FalseF, Atom, Eq, Less)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.sub)
    if isinstance(f, (And, Or, Iff)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_rank(f.sub)
    if isinstance(f, DCount):
        return 1 + quantifier_rank(f.sub)
    raise FormulaError(f"unknown node {f!r}")


def substitute_terms(f: Formula, mapping: Dict[str, str]) -> Formula:
    """Rename free occurrences of term names (variables/constants)."""
    def sub_term(t: Term) -> Term:
        return Term(mapping.get(t.name, t.name))

    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(sub_term(t) for t in f.args))
    if isinstance(f, Eq):
        return Eq(sub_term(f.left), sub_term(f.right))
    if isinstance(f, Less):
        return Less(sub_term(f.left), sub_term(f.right))
    if isinstance(f, Not):
        return Not(substitute_terms(f.sub, mapping))
    if isinstance(f, And):
        return And(substitute_terms(f.left, mapping), substitute_terms(f.right, mapping))
    if isinstance(f, Or):
        return Or(substitute_terms(f.left, mapping), substitute_terms(f.right, mapping))
    if isinstance(f, Iff):
        return Iff(substitute_terms(f.left, mapping), substitute_terms(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, substitute_terms(f.sub, inner))
    if isinstance(f, DCount):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return DCount(f.modulus, f.residue, f.var, substitute_terms(f.sub, inner))
    raise FormulaError(f"unknown node {f!r}")
