"""Affine forms ``c + sum(coef * x_f)`` over the free arcs."""

from __future__ import annotations

from typing import Iterable, Mapping

from .instance import ArcRef
from .scalars import Scalar, format_scalar, parse_scalar


class AffineForm:
    __slots__ = ("constant", "terms")

    def __init__(self, constant: Scalar = 0, terms: Mapping[ArcRef, Scalar] | None = None):
        self.constant = constant
        self.terms: dict[ArcRef, Scalar] = {}
        if terms:
            for arc, c in terms.items():
                if c != 0:
                    self.terms[arc] = c

    @classmethod
    def variable(cls, arc: ArcRef, one: Scalar = 1) -> AffineForm:
        return cls(0 * one, {arc: one})

    def copy(self) -> AffineForm:
        out = AffineForm(self.constant)
        out.terms = dict(self.terms)
        return out

    def iadd_scaled(self, other: AffineForm, factor: Scalar) -> AffineForm:
        """In-place ``self += factor * other``; returns ``self``."""
        if factor == 0:
            return self
        self.constant += factor * other.constant
        terms = self.terms
        for arc, c in other.terms.items():
            v = terms.get(arc, 0) + factor * c
            if v == 0:
                terms.pop(arc, None)
            else:
                terms[arc] = v
        return self

    def __add__(self, other):
        if isinstance(other, AffineForm):
            return self.copy().iadd_scaled(other, 1)
        out = self.copy()
        out.constant += other
        return out

    __radd__ = __add__

    def __neg__(self) -> AffineForm:
        return self * -1

    def __sub__(self, other):
        if isinstance(other, AffineForm):
            return self.copy().iadd_scaled(other, -1)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, factor: Scalar) -> AffineForm:
        if isinstance(factor, AffineForm):
            raise TypeError("product of two affine forms is not affine")
        return AffineForm(self.constant * factor, {a: c * factor for a, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, AffineForm):
            return self.constant == other.constant and self.terms == other.terms
        if not self.terms:
            return self.constant == other
        return NotImplemented

    def __hash__(self):
        return hash((self.constant, frozenset(self.terms.items())))

    def coefficient(self, arc: ArcRef) -> Scalar:
        return self.terms.get(arc, 0)

    def evaluate(self, assignment: Mapping[ArcRef, Scalar]) -> Scalar:
        total = self.constant
        for arc, c in self.terms.items():
            total += c * assignment.get(arc, 0)
        return total

    def is_close(self, other: AffineForm, tol: float) -> bool:
        if abs(self.constant - other.constant) > tol:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coefficient(a) - other.coefficient(a)) <= tol for a in keys)

    def format(self, order: Iterable[ArcRef] | None = None) -> str:
        """Render as ``c + a*x<k>:<i>:<j> - b*x...`` with terms in ``order``."""
        keys = list(order) if order is not None else list(self.terms)
        parts = [format_scalar(self.constant)]
        for arc in keys:
            c = self.terms.get(arc)
            if c is None:
                continue
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {format_scalar(abs(c))}*x{arc}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"AffineForm({self.format()})"


def parse_affine(text: str) -> AffineForm:
    """Inverse of :meth:`AffineForm.format`.

    Hand-written forms may omit a coefficient of ``1`` or the constant.
    """
    tokens = text.split()
    if not tokens:
        raise ValueError("empty affine form")
    if tokens[0].startswith("x") or "*" in tokens[0]:
        tokens = ["0", "+"] + tokens
    constant = parse_scalar(tokens[0])
    terms: dict[ArcRef, Scalar] = {}
    rest = tokens[1:]
    if len(rest) % 2:
        raise ValueError(f"malformed affine form {text!r}")
    for sign, term in zip(rest[::2], rest[1::2]):
        if sign not in "+-" or len(sign) != 1:
            raise ValueError(f"expected '+' or '-' before {term!r}")
        coef_text, star, var = term.rpartition("*")
        if not var.startswith("x"):
            raise ValueError(f"malformed term {term!r}")
        coef = parse_scalar(coef_text) if star else parse_scalar("1")
        arc = ArcRef.parse(var[1:])
        if sign == "-":
            coef = -coef
        terms[arc] = terms.get(arc, 0) + coef
    return AffineForm(constant, terms)
