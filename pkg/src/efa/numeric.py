"""Non-certifying numeric corroboration of exceptional values.

What is rigorous: the partial sum ``sum_{n<=N} f_n alpha^n`` is computed in
ball arithmetic from exact coefficients and an isolating box of ``alpha``,
so the ball contains the true partial sum.  What is heuristic: the tail.
It is estimated from the last computed terms (inflated by a safety factor),
since growth constants of an E-function are not available to the program.
A containment failure therefore signals a pipeline bug only under the tail
heuristic; the exclusion test for small-height rationals is heuristic in
the same sense.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from flint import acb, arb, ctx, fmpq

from .arith import AlgebraicNumber
from .series import LazySeries

TAIL_WINDOW = 8
MAX_TERMS = 5000


class CorroborationFailure(AssertionError):
    pass


@dataclass
class Evaluation:
    point: AlgebraicNumber
    enclosure: acb
    terms: int
    prec: int


def evaluate_series(f: LazySeries, alpha: AlgebraicNumber, digits: int = 50, derivative: int = 0) -> Evaluation:
    """Ball enclosing ``f^(derivative)(alpha)`` up to the heuristic tail."""
    prec = int(digits * 3.33) + 32
    x = alpha.enclosure(prec)
    eps_bits = prec + 8
    with ctx.workprec(prec):
        acc = acb(0)
        power = acb(1)
        recent: list[arb] = []
        n = 0
        step = 32
        coeffs = f.coefficients(step)
        while True:
            if n >= len(coeffs):
                if n > MAX_TERMS:
                    raise CorroborationFailure("series did not settle within the term limit")
                step *= 2
                coeffs = f.coefficients(step)
            k = n + derivative
            if k >= len(coeffs):
                coeffs = f.coefficients(k + step)
            c = coeffs[k].enclosure(prec)
            fall = 1
            for t in range(1, derivative + 1):
                fall *= n + t
            term = c * fall * power
            acc += term
            recent.append(abs(term))
            if len(recent) > TAIL_WINDOW:
                recent.pop(0)
            power *= x
            n += 1
            if n > 2 * TAIL_WINDOW and len(recent) == TAIL_WINDOW:
                big = max(recent, key=lambda a: a.upper())
                scale = abs(acc).upper() + 1
                if big.upper() < scale * arb(2) ** (-eps_bits):
                    tail = arb(0, big.upper() * 16)
                    acc += acb(tail, tail)
                    return Evaluation(alpha, acc, n, prec)


def small_height_rationals_excluded(enc: acb, height: int = 20) -> bool:
    """True when no ``p/q`` with ``|p|, q <= height`` lies in the ball."""
    if not enc.imag.contains(0):
        return True
    re_ = enc.real
    for q in range(1, height + 1):
        for p in range(-height, height + 1):
            if re_.contains(arb(fmpq(p, q))):
                return False
    return True


def _value_inside(enc: acb, value: AlgebraicNumber, prec: int) -> bool:
    return enc.overlaps(value.enclosure(prec)) if not value.is_rational() else enc.contains(
        acb(arb(value.rational())))


def corroborate(f: LazySeries, exceptional: list[tuple[AlgebraicNumber, AlgebraicNumber]],
                avoid: list[AlgebraicNumber] = (), digits: int = 50, random_points: int = 3,
                seed: int = 0, derivatives: dict[int, list[tuple[AlgebraicNumber, AlgebraicNumber]]] | None = None
                ) -> list[str]:
    """Check claimed values of f (and of ``f^(j)`` for the ``derivatives``
    sets) numerically; raise on an enclosure violation."""
    notes = []
    claims = [(0, a, v) for a, v in exceptional]
    for j, pairs in sorted((derivatives or {}).items()):
        claims.extend((j, a, v) for a, v in pairs)
    for j, alpha, value in claims:
        ev = evaluate_series(f, alpha, digits, derivative=j)
        name = "f" if j == 0 else f"f^({j})"
        if not _value_inside(ev.enclosure, value, ev.prec):
            raise CorroborationFailure(
                f"{name}({alpha.approx(12)}) ~ {ev.enclosure.str(12)} does not contain the claimed {value.approx(12)}")
        notes.append(f"{name}({alpha.approx(12)}): {ev.terms}-term ball contains {value.approx(12)} "
                     f"[partial sum rigorous, tail heuristic]")
    rng = random.Random(seed)
    taken = {a for a in exceptional} | set(avoid)
    tries = 0
    done = 0
    while done < random_points and tries < 50:
        tries += 1
        q = rng.randint(2, 7)
        alpha = AlgebraicNumber.from_rational(fmpq(rng.randint(-3 * q, 3 * q), q))
        if alpha.rational() == 0 or alpha in {a for a, _ in exceptional} or alpha in taken:
            continue
        taken.add(alpha)
        ev = evaluate_series(f, alpha, digits)
        ok = small_height_rationals_excluded(ev.enclosure)
        notes.append(f"f({alpha.approx(12)}) ~ {ev.enclosure.mid().str(12)}: "
                     f"{'excludes' if ok else 'does NOT exclude'} rationals of height <= 20 [heuristic]")
        done += 1
    return notes


__all__ = [
    "CorroborationFailure",
    "Evaluation",
    "corroborate",
    "evaluate_series",
    "small_height_rationals_excluded",
]
