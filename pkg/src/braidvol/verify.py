"""Exact big-rational identity testing for the braiding calculus.

Every algebraic identity the construction relies on is checked by evaluating
both sides exactly (``fractions.Fraction``) at random positive rational
points with numerator and denominator at most 100.  All exchange polynomials
are subtraction-free, so both sides are total on that domain; a single exact
mismatch refutes an identity, and agreement on 100 random points makes a
false pass negligibly unlikely (Schwartz-Zippel).  No epsilon tolerances
anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .braid import apply_R_closed, apply_R_comp, apply_R_y, r_word
from .cluster import (
    ClusterSeed,
    build_exchange_matrix,
    mutate,
    mutate_y,
    permute,
    y_from_x,
)

__all__ = [
    "IdentityCase",
    "CheckResult",
    "check_identity",
    "standard_cases",
    "corruption_case",
    "case_by_name",
    "audited_braid_tuple",
]


@dataclass(frozen=True)
class IdentityCase:
    """An exactly-testable identity: two maps that must agree on samples."""

    name: str
    sample: Callable[[random.Random], object]
    lhs: Callable[[object], object]
    rhs: Callable[[object], object]
    description: str = ""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    trials: int
    witness: str | None = None
    detail: str | None = None

    def to_json_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "trials": self.trials}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def _first_difference(a, b) -> str:
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b):
        for idx, (u, v) in enumerate(zip(a, b), start=1):
            if u != v:
                if isinstance(u, tuple) or isinstance(v, tuple):
                    return f"item {idx}: {_first_difference(u, v)}"
                return f"component {idx}: {u!r} != {v!r}"
        return "tuples equal"
    return f"{a!r} != {b!r}"


def check_identity(case: IdentityCase, trials: int = 100, rng_seed: int = 0) -> CheckResult:
    """Evaluate both sides of an identity at ``trials`` exact random points.

    Passes iff every evaluation agrees exactly.  A failing trial reports the
    sampled point and the first differing component; failures are results,
    not exceptions.  Samples where a side is undefined (a subtraction in a
    consistency expression hit zero) are redrawn.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(rng_seed)
    done = 0
    redraws = 0
    while done < trials:
        point = case.sample(rng)
        try:
            left = case.lhs(point)
            right = case.rhs(point)
        except ZeroDivisionError:
            redraws += 1
            if redraws > 10 * trials:
                return CheckResult(
                    case.name, False, done,
                    detail="sample domain keeps hitting zero denominators",
                )
            continue
        if left != right:
            return CheckResult(
                case.name,
                passed=False,
                trials=done + 1,
                witness=repr(point),
                detail=_first_difference(left, right),
            )
        done += 1
    return CheckResult(case.name, passed=True, trials=trials)


# ---------------------------------------------------------------------------
# samplers


def _rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 100), rng.randint(1, 100))


def _seed_sampler(n: int):
    B = build_exchange_matrix(n)

    def sample(rng: random.Random) -> ClusterSeed:
        return ClusterSeed(tuple(_rand_fraction(rng) for _ in range(3 * n + 1)), B)

    return sample


def _vector_sampler(n: int):
    def sample(rng: random.Random) -> tuple:
        return tuple(_rand_fraction(rng) for _ in range(3 * n + 1))

    return sample


def _apply_word(seed: ClusterSeed, word) -> ClusterSeed:
    for op in word:
        if op[0] == "mu":
            seed = mutate(seed, op[1])
        else:
            seed = permute(seed, op[1], op[2])
    return seed


# ---------------------------------------------------------------------------
# the audited braid-relation image at n = 3


def audited_braid_tuple(x) -> tuple:
    """Closed form of R1 R2 R1 (= R2 R1 R2) on ten variables, transcribed
    independently for auditing the compositional path."""
    x1, x2, x3, x4, x5, x6, x7, x8, x9, x10 = x
    return (
        x1,
        x8,
        (x1*x2*x4*x6*x8 + x1*x3*x5*x7*x8 + x3*x4*x5*x7*x8 + x1*x2*x6*x7*x8
         + x1*x2*x4*x5*x9) / (x2*x4*x5*x7),
        (x1*x2*x4*x6*x7*x8 + x1*x3*x5*x7**2*x8 + x3*x4*x5*x7**2*x8
         + x1*x2*x6*x7**2*x8 + x1*x2*x4*x6*x8*x10 + x1*x3*x5*x7*x8*x10
         + x3*x4*x5*x7*x8*x10 + x1*x2*x6*x7*x8*x10 + x1*x2*x4*x5*x9*x10)
        / (x2*x4*x5*x7*x9),
        (x6*x7*x8 + x6*x8*x10 + x5*x9*x10) / (x7*x9),
        (x1*x3*x5 + x3*x4*x5 + x1*x2*x6) / (x2*x4),
        (x1*x3*x4*x6*x7*x8 + x3*x4**2*x6*x7*x8 + x1*x3*x4*x6*x8*x10
         + x3*x4**2*x6*x8*x10 + x1*x3*x4*x5*x9*x10 + x3*x4**2*x5*x9*x10
         + x1*x3*x5*x7*x9*x10 + x3*x4*x5*x7*x9*x10 + x1*x2*x6*x7*x9*x10)
        / (x2*x4*x6*x7*x9),
        (x3*x4*x6*x7*x8 + x3*x4*x6*x8*x10 + x3*x4*x5*x9*x10 + x3*x5*x7*x9*x10
         + x2*x6*x7*x9*x10) / (x4*x6*x7*x9),
        x3,
        x10,
    )


def _corrupted_r1(x) -> tuple:
    # one flipped sign in the third component; used to demonstrate that a
    # wrong rational map is caught within a few random trials
    x1, x2, x3, x4, x5, x6, x7 = x
    good = apply_R_closed(x, 1, 1)
    bad3 = (x1*x3*x5 - x3*x4*x5 + x1*x2*x6) / (x2*x4)
    return good[:2] + (bad3,) + good[3:]


# ---------------------------------------------------------------------------
# the shipped identity suite


def _pattern_y(x, letters):
    """y-variables of the seeds along a short pattern, for the developing-map
    consistency identities (n = 3)."""
    n = 3
    B = build_exchange_matrix(n)
    seqs = [tuple(x)]
    for i, eps in letters:
        seqs.append(apply_R_closed(seqs[-1], i, eps))
    return [y_from_x(ClusterSeed(s, B)) for s in seqs]


def standard_cases() -> list[IdentityCase]:
    one = Fraction(1)

    def braid_rel_lhs(x):
        return apply_R_closed(apply_R_closed(apply_R_closed(x, 1, 1), 2, 1), 1, 1)

    def braid_rel_rhs(x):
        return apply_R_closed(apply_R_closed(apply_R_closed(x, 2, 1), 1, 1), 2, 1)

    cases = [
        IdentityCase(
            "braid-relation",
            _vector_sampler(3),
            braid_rel_lhs,
            braid_rel_rhs,
            "R1 R2 R1 = R2 R1 R2 on ten variables",
        ),
        IdentityCase(
            "braid-relation-audited",
            _vector_sampler(3),
            braid_rel_lhs,
            audited_braid_tuple,
            "the braid-relation image matches its independently transcribed closed form",
        ),
        IdentityCase(
            "far-commutativity",
            _vector_sampler(4),
            lambda x: apply_R_closed(apply_R_closed(x, 1, 1), 3, 1),
            lambda x: apply_R_closed(apply_R_closed(x, 3, 1), 1, 1),
            "R1 R3 = R3 R1 on thirteen variables",
        ),
        IdentityCase(
            "r-inverse",
            _vector_sampler(2),
            lambda x: (apply_R_closed(apply_R_closed(x, 1, 1), 1, -1),
                       apply_R_closed(apply_R_closed(x, 1, -1), 1, 1)),
            lambda x: (tuple(x), tuple(x)),
            "R and its inverse compose to the identity, both orders",
        ),
        IdentityCase(
            "r-jones",
            _seed_sampler(2),
            lambda s: _apply_word(s, (("mu", 6), ("mu", 2), ("mu", 4), ("mu", 6),
                                      ("mu", 2), ("s", 3, 6), ("s", 2, 5))),
            lambda s: _apply_word(s, r_word(1, 1)),
            "the five-mutation presentation of R agrees with the defining one",
        ),
        IdentityCase(
            "half-periodicity-35",
            _seed_sampler(2),
            lambda s: _apply_word(s, (("mu", 4), ("mu", 5), ("mu", 3)) * 3 + (("s", 3, 5),)),
            lambda s: s,
            "s_{3,5} (mu_3 mu_5 mu_4)^3 is the identity",
        ),
        IdentityCase(
            "half-periodicity-26",
            _seed_sampler(2),
            lambda s: _apply_word(s, (("mu", 4), ("mu", 2), ("mu", 6)) * 3 + (("s", 2, 6),)),
            lambda s: s,
            "s_{2,6} (mu_2 mu_6 mu_4)^3 is the identity",
        ),
        IdentityCase(
            "b-invariance",
            _seed_sampler(3),
            lambda s: tuple(apply_R_comp(s, i, eps).B
                            for i in (1, 2) for eps in (1, -1)),
            lambda s: (s.B,) * 4,
            "the exchange matrix is invariant under every braiding operator",
        ),
        IdentityCase(
            "axis-product",
            _vector_sampler(2),
            lambda y: tuple(_prod_147(apply_R_y(y, None, 1, eps)) for eps in (1, -1)),
            lambda y: (_prod_147(y),) * 2,
            "y1 y4 y7 is invariant under the y-action of R and its inverse",
        ),
        IdentityCase(
            "completeness-columns",
            _seed_sampler(3),
            lambda s: tuple(_y_pair_product(y_from_x(s), i) for i in (1, 2, 3)),
            lambda s: (one, one, one),
            "y_{3i-1} y_{3i} = 1 for y-variables derived from any seed",
        ),
        IdentityCase(
            "closed-vs-comp-n2",
            _seed_sampler(2),
            lambda s: tuple(apply_R_closed(s.x, 1, eps) for eps in (1, -1)),
            lambda s: tuple(apply_R_comp(s, 1, eps).x for eps in (1, -1)),
            "closed-form R agrees with the mutation word, two strands",
        ),
        IdentityCase(
            "closed-vs-comp-n3",
            _seed_sampler(3),
            lambda s: tuple(apply_R_closed(s.x, i, eps)
                            for i in (1, 2) for eps in (1, -1)),
            lambda s: tuple(apply_R_comp(s, i, eps).x
                            for i in (1, 2) for eps in (1, -1)),
            "closed-form R agrees with the mutation word, three strands",
        ),
        IdentityCase(
            "xy-commuting-square",
            _mu_sampler(2),
            lambda p: y_from_x(mutate(p[0], p[1])),
            lambda p: mutate_y(y_from_x(p[0]), p[0].B, p[1])[0],
            "passing to y-variables commutes with mutation",
        ),
        IdentityCase(
            "mutation-involution",
            _mu_sampler(2),
            lambda p: mutate(mutate(p[0], p[1]), p[1]),
            lambda p: p[0],
            "every mutation is an exact involution",
        ),
        IdentityCase(
            "ry-compat",
            _seed_sampler(2),
            lambda s: tuple(
                y_from_x(ClusterSeed(apply_R_closed(s.x, 1, eps), s.B))
                for eps in (1, -1)
            ),
            lambda s: tuple(apply_R_y(y_from_x(s), s.B, 1, eps) for eps in (1, -1)),
            "the y-action of R is induced by its x-action",
        ),
        IdentityCase(
            "homogeneity",
            _scaled_sampler(2),
            lambda p: tuple(apply_R_closed(tuple(p[1] * v for v in p[0]), 1, eps)
                            for eps in (1, -1)),
            lambda p: tuple(tuple(p[1] * v for v in apply_R_closed(p[0], 1, eps))
                            for eps in (1, -1)),
            "every component of R is homogeneous of degree one",
        ),
        IdentityCase(
            "gluing-consistency-rr",
            _vector_sampler(3),
            lambda x: _gluing_consistency(x, ((1, 1), (2, 1))),
            lambda x: one,
            "edge consistency of two adjacent positive crossings",
        ),
        IdentityCase(
            "gluing-consistency-rinvrinv",
            _vector_sampler(3),
            lambda x: _gluing_consistency_inv(x),
            lambda x: one,
            "edge consistency of two adjacent negative crossings",
        ),
        IdentityCase(
            "gluing-completeness-rrinv",
            _vector_sampler(3),
            lambda x: _gluing_completeness_pm(x),
            lambda x: (one, one),
            "completeness around alternating crossings (+ then -)",
        ),
        IdentityCase(
            "gluing-completeness-rinvr",
            _vector_sampler(3),
            lambda x: _gluing_completeness_mp(x),
            lambda x: (one, one),
            "completeness around alternating crossings (- then +)",
        ),
    ]
    return cases


def _prod_147(y) -> Fraction:
    return y[0] * y[3] * y[6]


def _y_pair_product(y, i: int) -> Fraction:
    return y[3 * i - 2] * y[3 * i - 1]


def _mu_sampler(n: int):
    seeds = _seed_sampler(n)

    def sample(rng: random.Random):
        return (seeds(rng), rng.randint(1, 3 * n + 1))

    return sample


def _scaled_sampler(n: int):
    vecs = _vector_sampler(n)

    def sample(rng: random.Random):
        return (vecs(rng), _rand_fraction(rng))

    return sample


def _gluing_consistency(x, letters):
    y1, y2, y3 = _pattern_y(x, letters)
    return (
        1 / (1 - y2[6] / y1[6])
        * (1 + 1 / y2[3])
        * (1 + y2[6])
        * (1 / (1 - y3[3] / y2[3]))
    )


def _gluing_consistency_inv(x):
    y1, y2, y3 = _pattern_y(x, ((1, -1), (2, -1)))
    return (
        (1 - y1[6] / y2[6])
        * (1 / (1 + y2[3]))
        * (1 - y2[3] / y3[3])
        * (1 / (1 + 1 / y2[6]))
    )


def _gluing_completeness_pm(x):
    y1, y2, y3 = _pattern_y(x, ((1, 1), (2, -1)))
    val = ((1 + 1 / y2[3]) / (1 - y2[6] / y1[6])
           * (1 + 1 / y2[6]) / (1 - y2[3] / y3[3]))
    return (val, y1[1] * y1[2])


def _gluing_completeness_mp(x):
    y1, y2, y3 = _pattern_y(x, ((1, -1), (2, 1)))
    val = ((1 - y1[6] / y2[6]) / (1 + y2[3])
           * (1 - y3[3] / y2[3]) / (1 + y2[6]))
    return (val, y1[1] * y1[2])


def corruption_case() -> IdentityCase:
    """A deliberately sign-flipped R against the audited form; must fail
    within a handful of trials (mutation test for the checker itself)."""
    return IdentityCase(
        "corrupted-r",
        _vector_sampler(2),
        _corrupted_r1,
        lambda x: apply_R_closed(x, 1, 1),
        "intentionally wrong map; a pass here means the checker is broken",
    )


def case_by_name(name: str, include_corruption: bool = False) -> IdentityCase:
    cases = standard_cases()
    if include_corruption:
        cases.append(corruption_case())
    for case in cases:
        if case.name == name:
            return case
    raise KeyError(f"no identity case named {name!r}")
