"""Fourier-Motzkin elimination over exact ordered fields.

A constraint ``(coeffs, const, strict)`` stands for
``sum(c * x for c, x in zip(coeffs, xs)) + const > 0`` when ``strict`` and
``>= 0`` otherwise.  Coefficients may be Fractions or :class:`Laurent`
values; the latter model quantities depending on a parameter ``k`` that is
taken to be arbitrarily large, so that signs are decided by leading terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .local_arith import INF, NEG_INF


class Laurent:
    """Laurent polynomial in a parameter k that tends to +infinity."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {0: Fraction(terms)}
        self.terms = {e: Fraction(c) for e, c in terms.items() if c != 0}

    @classmethod
    def k(cls, power: int = 1) -> "Laurent":
        return cls({power: 1})

    @staticmethod
    def _lift(x):
        return x if isinstance(x, Laurent) else Laurent(x)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Laurent(t)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        t: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                t[e1 + e2] = t.get(e1 + e2, 0) + c1 * c2
        return Laurent(t)

    __rmul__ = __mul__

    def sign(self) -> int:
        if not self.terms:
            return 0
        lead = self.terms[max(self.terms)]
        return 1 if lead > 0 else -1

    def degree(self):
        return max(self.terms) if self.terms else None

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*k^{e}" for e, c in sorted(self.terms.items(), reverse=True))

    def __eq__(self, other):
        return self.terms == self._lift(other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))


def sign(x) -> int:
    if isinstance(x, Laurent):
        return x.sign()
    return (x > 0) - (x < 0)


def ratio_limit(num, den):
    """lim_{k -> inf} num(k) / den(k) as a Fraction or +-INF; den must be nonzero."""
    num, den = Laurent._lift(num), Laurent._lift(den)
    if not den.terms:
        raise ZeroDivisionError("zero denominator")
    if not num.terms:
        return Fraction(0)
    dn, dd = num.degree(), den.degree()
    if dn < dd:
        return Fraction(0)
    if dn == dd:
        return num.terms[dn] / den.terms[dd]
    return INF if num.sign() * den.sign() > 0 else NEG_INF


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    const: object
    strict: bool = False

    def trivial_status(self):
        """None if some coefficient is nonzero, else True/False for satisfied."""
        if any(sign(c) for c in self.coeffs):
            return None
        s = sign(self.const)
        return s > 0 or (s == 0 and not self.strict)


def _normalize(c: Constraint) -> Constraint:
    if any(isinstance(x, Laurent) for x in c.coeffs):
        return c
    scale = next((abs(x) for x in c.coeffs if x != 0), None)
    if not scale:
        return c
    inv = 1 / Fraction(scale)
    return Constraint(tuple(Fraction(x) * inv for x in c.coeffs), c.const * inv, c.strict)


def eliminate(cons: Sequence[Constraint], var: int) -> list[Constraint]:
    pos, neg, out = [], [], []
    for c in cons:
        s = sign(c.coeffs[var])
        (pos if s > 0 else neg if s < 0 else out).append(c)
    for a in pos:
        for b in neg:
            wa, wb = -b.coeffs[var], a.coeffs[var]
            coeffs = tuple(wa * x + wb * y for x, y in zip(a.coeffs, b.coeffs))
            coeffs = coeffs[:var] + (0,) + coeffs[var + 1:]
            out.append(Constraint(coeffs, wa * a.const + wb * b.const, a.strict or b.strict))
    seen, kept = set(), []
    for c in out:
        c = _normalize(c)
        st = c.trivial_status()
        if st is True:
            continue
        if st is False:
            return [c]
        key = (c.coeffs, c.const, c.strict)
        if key not in seen:
            seen.add(key)
            kept.append(c)
    return kept


def project(cons: Sequence[Constraint], keep: Sequence[int]) -> list[Constraint]:
    """Eliminate every variable not in ``keep``."""
    cons = list(cons)
    if not cons:
        return cons
    nvars = len(cons[0].coeffs)
    for v in range(nvars):
        if v not in keep:
            cons = eliminate(cons, v)
    return cons


def feasible(cons: Sequence[Constraint]) -> bool:
    if not cons:
        return True
    rest = project(cons, ())
    return all(c.trivial_status() is not False for c in rest)


def bounds(cons: Sequence[Constraint], var: int):
    """Lower and upper bounds on one variable after eliminating the rest.

    Returns ``(feasible, lowers, uppers)`` with each bound a pair
    ``(value_num, value_den, strict)`` meaning ``var >= num/den`` (or ``>``)
    for lowers and ``var <= num/den`` (or ``<``) for uppers; num/den are
    kept unreduced so Laurent values need no division.
    """
    rest = project(cons, (var,))
    lowers, uppers = [], []
    for c in rest:
        st = c.trivial_status()
        if st is False:
            return False, [], []
        if st is True:
            continue
        a = c.coeffs[var]
        # a*x + const (>|>=) 0
        if sign(a) > 0:
            lowers.append((-c.const, a, c.strict))
        else:
            uppers.append((c.const, -a, c.strict))
    return True, lowers, uppers
