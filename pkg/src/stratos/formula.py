"""Formula algebra for indexed second-order multiplicative-exponential linear logic.

Formulas are immutable trees.  Atoms carry an integer index and a polarity
bit; the paragraph modality is a unary constructor of its own.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

_fresh_counter = itertools.count()


def fresh_var(stem: str = "V") -> str:
    return f"{stem}%{next(_fresh_counter)}"


@dataclass(frozen=True)
class Atom:
    name: str
    index: int = 0
    positive: bool = True


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Par:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class OfCourse:
    body: "Formula"


@dataclass(frozen=True)
class WhyNot:
    body: "Formula"


@dataclass(frozen=True)
class Para:
    """The paragraph modality."""

    body: "Formula"


Formula = Atom | Tensor | Par | Forall | Exists | OfCourse | WhyNot | Para

# Substitutions map variable names to formulas and are applied in parallel.
Substitution = dict


def dual(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.name, f.index, not f.positive)
    if isinstance(f, Tensor):
        return Par(dual(f.left), dual(f.right))
    if isinstance(f, Par):
        return Tensor(dual(f.left), dual(f.right))
    if isinstance(f, Forall):
        return Exists(f.var, dual(f.body))
    if isinstance(f, Exists):
        return Forall(f.var, dual(f.body))
    if isinstance(f, OfCourse):
        return WhyNot(dual(f.body))
    if isinstance(f, WhyNot):
        return OfCourse(dual(f.body))
    if isinstance(f, Para):
        return Para(dual(f.body))
    raise TypeError(f"not a formula: {f!r}")


def shift(q: int, f: Formula) -> Formula:
    """Add q to every atom index; commutes with all connectives."""
    if q == 0:
        return f
    if isinstance(f, Atom):
        return Atom(f.name, f.index + q, f.positive)
    if isinstance(f, (Tensor, Par)):
        return type(f)(shift(q, f.left), shift(q, f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, shift(q, f.body))
    return type(f)(shift(q, f.body))


def project(f: Formula, target: str) -> Formula:
    """Forgetful projections.

    ``LL`` erases indices and paragraphs, ``L4`` erases indices only,
    ``L40`` erases paragraphs only.
    """
    if target not in ("LL", "L4", "L40"):
        raise ValueError(f"unknown projection target {target!r}")
    if isinstance(f, Atom):
        if target in ("LL", "L4"):
            return Atom(f.name, 0, f.positive)
        return f
    if isinstance(f, (Tensor, Par)):
        return type(f)(project(f.left, target), project(f.right, target))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, project(f.body, target))
    if isinstance(f, Para):
        if target in ("LL", "L40"):
            return project(f.body, target)
        return Para(project(f.body, target))
    return type(f)(project(f.body, target))


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, (Tensor, Par)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    return free_vars(f.body)


def substitute(f: Formula, sub: Substitution) -> Formula:
    """Parallel, capture-avoiding substitution of free variables.

    A positive occurrence ``p.X`` becomes ``shift(p, sub[X])``; a negative
    occurrence ``p.X^`` becomes ``shift(p, dual(sub[X]))``.
    """
    if not sub:
        return f
    if isinstance(f, Atom):
        if f.name in sub:
            img = sub[f.name]
            return shift(f.index, img if f.positive else dual(img))
        return f
    if isinstance(f, (Tensor, Par)):
        return type(f)(substitute(f.left, sub), substitute(f.right, sub))
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in sub.items() if k != f.var}
        if not inner:
            return f
        clash = set()
        for v in inner.values():
            clash |= free_vars(v)
        var, body = f.var, f.body
        if var in clash:
            var = fresh_var(f.var.split("%")[0])
            body = substitute(body, {f.var: Atom(var, 0, True)})
        return type(f)(var, substitute(body, inner))
    return type(f)(substitute(f.body, sub))


def size(f: Formula) -> int:
    """Number of constructors."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Tensor, Par)):
        return 1 + size(f.left) + size(f.right)
    return 1 + size(f.body)


def depth(f: Formula) -> int:
    """Height of the formula tree (atoms have depth 1)."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Tensor, Par)):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


def max_index(f: Formula) -> int:
    """Largest atom index occurring in f (0 for index-free formulas)."""
    if isinstance(f, Atom):
        return f.index
    if isinstance(f, (Tensor, Par)):
        return max(max_index(f.left), max_index(f.right))
    return max_index(f.body)


def alpha_canon(f: Formula, _env=None, _counter=None) -> Formula:
    """Rename bound variables deterministically (b0, b1, ...)."""
    if _env is None:
        _env, _counter = {}, itertools.count()
    if isinstance(f, Atom):
        name = _env.get(f.name, f.name)
        return Atom(name, f.index, f.positive)
    if isinstance(f, (Tensor, Par)):
        return type(f)(alpha_canon(f.left, _env, _counter),
                       alpha_canon(f.right, _env, _counter))
    if isinstance(f, (Forall, Exists)):
        new = f"b{next(_counter)}"
        env2 = dict(_env)
        env2[f.var] = new
        return type(f)(new, alpha_canon(f.body, env2, _counter))
    return type(f)(alpha_canon(f.body, _env, _counter))


def alpha_equal(f: Formula, g: Formula) -> bool:
    return alpha_canon(f) == alpha_canon(g)


def shift_between(f: Formula, g: Formula) -> int | None:
    """Return q with shift(q, f) == g, or None.

    Used to recover the index offset carried by an axiom link.
    """
    if isinstance(f, Atom) and isinstance(g, Atom):
        if f.name == g.name and f.positive == g.positive:
            return g.index - f.index
        return None
    if type(f) is not type(g):
        return None
    if isinstance(f, (Tensor, Par)):
        ql = shift_between(f.left, g.left)
        qr = shift_between(f.right, g.right)
        if ql is not None and (ql == qr or qr is None):
            return ql
        if ql is None:
            return qr
        return None
    if isinstance(f, (Forall, Exists)):
        if f.var != g.var:
            ga = alpha_canon(g)
            fa = alpha_canon(f)
            return shift_between(fa.body, ga.body) if type(fa) is type(ga) else None
        return shift_between(f.body, g.body)
    return shift_between(f.body, g.body)


# --- text format ------------------------------------------------------------
#
# atoms `X`, `X^`, indexed `3.X`; `*` tensor, `|` par, `!`, `?`, `$` for the
# paragraph modality, `@X.` forall, `#X.` exists, `-o` sugar.

class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg):
        raise ParseError(msg, self.i)

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def eat(self, s):
        self.skip_ws()
        if self.text.startswith(s, self.i):
            self.i += len(s)
            return True
        return False

    def expect(self, s):
        if not self.eat(s):
            self.error(f"expected {s!r}")

    def parse(self) -> Formula:
        f = self.lollipop()
        self.skip_ws()
        if self.i != len(self.text):
            self.error("trailing input")
        return f

    def lollipop(self) -> Formula:
        left = self.par()
        self.skip_ws()
        if self.text.startswith("-o", self.i):
            self.i += 2
            right = self.lollipop()
            return Par(dual(left), right)
        return left

    def par(self) -> Formula:
        f = self.tensor()
        while True:
            self.skip_ws()
            if self.peek() == "|":
                self.eat("|")
                f = Par(f, self.tensor())
            else:
                return f

    def tensor(self) -> Formula:
        f = self.unary()
        while True:
            self.skip_ws()
            if self.peek() == "*":
                self.eat("*")
                f = Tensor(f, self.unary())
            else:
                return f

    def unary(self) -> Formula:
        c = self.peek()
        if c == "!":
            self.eat("!")
            return OfCourse(self.unary())
        if c == "?":
            self.eat("?")
            return WhyNot(self.unary())
        if c == "$":
            self.eat("$")
            return Para(self.unary())
        if c == "@":
            self.eat("@")
            v = self.ident()
            self.expect(".")
            return Forall(v, self.lollipop_tail())
        if c == "#":
            self.eat("#")
            v = self.ident()
            self.expect(".")
            return Exists(v, self.lollipop_tail())
        if c == "(":
            self.eat("(")
            f = self.lollipop()
            self.expect(")")
            return f
        return self.atom()

    def lollipop_tail(self) -> Formula:
        # quantifier bodies extend as far right as possible
        return self.lollipop()

    def ident(self) -> str:
        self.skip_ws()
        j = self.i
        while j < len(self.text) and (self.text[j].isalnum() or self.text[j] in "_%"):
            j += 1
        if j == self.i:
            self.error("expected identifier")
        name = self.text[self.i:j]
        self.i = j
        return name

    def atom(self) -> Formula:
        self.skip_ws()
        idx = 0
        j = self.i
        neg_idx = self.text.startswith("-", j)
        k = j + 1 if neg_idx else j
        while k < len(self.text) and self.text[k].isdigit():
            k += 1
        if k > (j + 1 if neg_idx else j) and k < len(self.text) and self.text[k] == ".":
            idx = int(self.text[j:k])
            self.i = k + 1
        name = self.ident()
        positive = True
        if self.i < len(self.text) and self.text[self.i] == "^":
            self.i += 1
            positive = False
        return Atom(name, idx, positive)


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


def _prec(f: Formula) -> int:
    if isinstance(f, (Forall, Exists)):
        return 0  # quantifier bodies extend maximally right
    if isinstance(f, Par):
        return 1
    if isinstance(f, Tensor):
        return 2
    return 3


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        base = f.name + ("" if f.positive else "^")
        return base if f.index == 0 else f"{f.index}.{base}"
    if isinstance(f, Par):
        l = print_formula(f.left)
        r = print_formula(f.right)
        if _prec(f.left) < 1:
            l = f"({l})"
        if _prec(f.right) <= 1:
            r = f"({r})"
        return f"{l} | {r}"
    if isinstance(f, Tensor):
        l = print_formula(f.left)
        r = print_formula(f.right)
        if _prec(f.left) < 2:
            l = f"({l})"
        if _prec(f.right) <= 2:
            r = f"({r})"
        return f"{l} * {r}"
    if isinstance(f, Forall):
        return f"@{f.var}.{print_formula(f.body)}"
    if isinstance(f, Exists):
        return f"#{f.var}.{print_formula(f.body)}"
    body = print_formula(f.body)
    if isinstance(f.body, (Tensor, Par, Forall, Exists)):
        body = f"({body})"
    mark = {OfCourse: "!", WhyNot: "?", Para: "$"}[type(f)]
    return mark + body
