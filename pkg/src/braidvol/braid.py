"""Braid words and the R-operators acting on cluster seeds.

The braiding operator R_i is a composite of four mutations and three
transpositions acting on a window of seven consecutive cluster variables.  It
comes in two equivalent implementations: ``apply_R_comp`` runs the mutation
word on a full seed (the oracle path), while ``apply_R_closed`` evaluates the
closed-form rational expressions directly (the production path).  Both are
field-generic; the numeric solver uses the vectorized kernels in
:mod:`braidvol.kernels` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cluster import (
    ClusterAlgebraError,
    ClusterSeed,
    DegenerateSeedError,
    ExchangeMatrix,
    mutate,
    permute,
)

__all__ = [
    "BraidParseError",
    "MultiComponentError",
    "ClusterInvarianceError",
    "SingularYWindowError",
    "BraidWord",
    "parse_braid",
    "r_word",
    "apply_R_comp",
    "apply_R_closed",
    "apply_R_y",
    "window_center",
    "ClusterTrajectory",
    "run_pattern",
]


class BraidParseError(ValueError):
    """Malformed braid word text; carries the 1-based token position."""

    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"token {position}: {message}")


class MultiComponentError(ValueError):
    """The braid closure is a link with more than one component."""

    def __init__(self, components: int):
        self.components = components
        super().__init__(
            f"braid closure has {components} components; only knots are supported"
        )


@dataclass(frozen=True)
class BraidWord:
    """A braid on ``n`` strands given as signed Artin generator letters.

    ``letters`` is a sequence of (generator index, sign) with indices in
    1..n-1 and signs +-1.  The closure must be a single-component knot.
    """

    n: int
    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(tuple(l) for l in self.letters))
        if self.n < 1:
            raise ValueError(f"strand count must be positive, got {self.n}")
        for pos, (i, eps) in enumerate(self.letters, start=1):
            if not 1 <= i <= self.n - 1:
                raise BraidParseError(pos, f"generator {i} out of range 1..{self.n - 1}")
            if eps not in (1, -1):
                raise BraidParseError(pos, f"sign must be +-1, got {eps}")
        comps = self.closure_components()
        if comps != 1:
            raise MultiComponentError(comps)

    def __len__(self) -> int:
        return len(self.letters)

    def permutation(self) -> tuple[int, ...]:
        """Image of each strand under the underlying permutation (1-based)."""
        perm = list(range(self.n + 1))
        for i, _eps in self.letters:
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        # perm[s] = which strand ends in position s; invert to strand -> position
        out = [0] * (self.n + 1)
        for pos in range(1, self.n + 1):
            out[perm[pos]] = pos
        return tuple(out[1:])

    def closure_components(self) -> int:
        perm = self.permutation()
        seen = [False] * self.n
        cycles = 0
        for s in range(self.n):
            if seen[s]:
                continue
            cycles += 1
            t = s
            while not seen[t]:
                seen[t] = True
                t = perm[t] - 1
        return cycles

    @property
    def trivially_unknotted(self) -> bool:
        """True when the closure is certainly the unknot (fewer than three
        crossings)."""
        return len(self.letters) < 3


def parse_braid(text: str, n: int | None = None) -> BraidWord:
    """Parse whitespace-separated signed generator letters.

    An optional ``n=<int>;`` prefix (or the ``n`` argument) fixes the strand
    count; otherwise it defaults to 1 + max |letter|.  Letter t maps to
    (|t|, sign t); zero letters and out-of-range generators are rejected with
    their token position.
    """
    body = text.strip()
    if body.startswith("n="):
        head, sep, rest = body.partition(";")
        if not sep:
            raise BraidParseError(1, "missing ';' after strand-count prefix")
        try:
            n = int(head[2:].strip())
        except ValueError:
            raise BraidParseError(1, f"bad strand count {head[2:].strip()!r}") from None
        body = rest
    tokens = body.split()
    letters = []
    for pos, tok in enumerate(tokens, start=1):
        try:
            t = int(tok)
        except ValueError:
            raise BraidParseError(pos, f"not an integer: {tok!r}") from None
        if t == 0:
            raise BraidParseError(pos, "zero is not a braid generator")
        letters.append((abs(t), 1 if t > 0 else -1))
    if n is None:
        n = 1 + max((abs(t) for t, _ in letters), default=0)
    for pos, (i, _eps) in enumerate(letters, start=1):
        if i >= n:
            raise BraidParseError(pos, f"generator {i} needs at least {i + 1} strands, have {n}")
    return BraidWord(n=n, letters=tuple(letters))


def r_word(i: int, eps: int) -> tuple[tuple, ...]:
    """The mutation/transposition word of R_i^eps, in application order
    (first-applied operation first)."""
    if eps == 1:
        return (
            ("mu", 3 * i + 1),
            ("mu", 3 * i + 3),
            ("mu", 3 * i - 1),
            ("mu", 3 * i + 1),
            ("s", 3 * i, 3 * i + 3),
            ("s", 3 * i - 1, 3 * i + 2),
            ("s", 3 * i, 3 * i + 2),
        )
    return (
        ("mu", 3 * i + 1),
        ("mu", 3 * i),
        ("mu", 3 * i + 2),
        ("mu", 3 * i + 1),
        ("s", 3 * i, 3 * i + 2),
        ("s", 3 * i - 1, 3 * i + 2),
        ("s", 3 * i, 3 * i + 3),
    )


def _check_window(size: int, i: int):
    if size % 3 != 1 or size < 7:
        raise ValueError(f"vector length {size} is not of the form 3n+1 with n >= 2")
    n = (size - 1) // 3
    if not 1 <= i <= n - 1:
        raise IndexError(f"generator index {i} out of range 1..{n - 1}")


class ClusterInvarianceError(AssertionError):
    """The exchange matrix failed to return to itself under an R-operator."""

    def __init__(self, i: int, eps: int):
        super().__init__(f"exchange matrix not invariant under R_{i}^{eps:+d}")


class SingularYWindowError(ClusterAlgebraError):
    """A denominator of the closed-form y-transformation vanished."""

    def __init__(self, i: int, eps: int):
        super().__init__(f"singular y-window for R_{i}^{eps:+d}")


def apply_R_comp(seed: ClusterSeed, i: int, eps: int) -> ClusterSeed:
    """R_i^eps as its defining composite of mutations and transpositions.

    The exchange matrix is checked to return unchanged; a division by zero
    inside any mutation raises DegenerateSeedError carrying the mutation
    index.
    """
    _check_window(seed.size, i)
    out = seed
    for op in r_word(i, eps):
        if op[0] == "mu":
            out = mutate(out, op[1])
        else:
            out = permute(out, op[1], op[2])
    if out.B != seed.B:
        raise ClusterInvarianceError(i, eps)
    return out


def _r_window_plus(w):
    x1, x2, x3, x4, x5, x6, x7 = w
    return (
        x1,
        x5,
        (x1 * x3 * x5 + x3 * x4 * x5 + x1 * x2 * x6) / (x2 * x4),
        (x1 * x3 * x4 * x5 + x3 * x4 ** 2 * x5 + x1 * x3 * x5 * x7
         + x3 * x4 * x5 * x7 + x1 * x2 * x6 * x7) / (x2 * x4 * x6),
        (x3 * x4 * x5 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x6),
        x3,
        x7,
    )


def _r_window_minus(w):
    x1, x2, x3, x4, x5, x6, x7 = w
    return (
        x1,
        (x1 * x3 * x5 + x1 * x2 * x6 + x2 * x4 * x6) / (x3 * x4),
        x6,
        (x1 * x2 * x4 * x6 + x2 * x4 ** 2 * x6 + x1 * x3 * x5 * x7
         + x1 * x2 * x6 * x7 + x2 * x4 * x6 * x7) / (x3 * x4 * x5),
        x2,
        (x2 * x4 * x6 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x5),
        x7,
    )


def apply_R_closed(x: Sequence, i: int, eps: int) -> tuple:
    """R_i^eps via the closed-form rational expressions on the window
    x_{3i-2} .. x_{3i+4}; entries outside the window pass through."""
    _check_window(len(x), i)
    lo = 3 * i - 3
    w = tuple(x[lo:lo + 7])
    zero_vars = (1, 3, 5) if eps == 1 else (2, 3, 4)  # window slots entering denominators
    for slot in zero_vars:
        if w[slot] == 0:
            raise DegenerateSeedError(lo + slot + 1)
    new = _r_window_plus(w) if eps == 1 else _r_window_minus(w)
    return tuple(x[:lo]) + new + tuple(x[lo + 7:])


def _ry_window_plus(w):
    y1, y2, y3, y4, y5, y6, y7 = w
    q = 1 + y2 + y6 + y2 * y6 + y2 * y4 * y6
    a = 1 + y2 + y2 * y4
    b = 1 + y6 + y4 * y6
    return (
        y1 * a,
        y2 * y4 * y5 * y6 / q,
        q / (y2 * y4),
        y4 / (a * b),
        q / (y4 * y6),
        y2 * y3 * y4 * y6 / q,
        b * y7,
    )


def _ry_window_minus(w):
    y1, y2, y3, y4, y5, y6, y7 = w
    p = 1 + y4 + y3 * y4 + y4 * y5 + y3 * y4 * y5
    a = 1 + y4 + y3 * y4
    b = 1 + y4 + y4 * y5
    return (
        y1 * y3 * y4 / a,
        y5 / p,
        p * y6,
        a * b / (y3 * y4 * y5),
        y2 * p,
        y3 / p,
        y4 * y5 * y7 / b,
    )


def apply_R_y(y: Sequence, B: ExchangeMatrix | None, i: int, eps: int) -> tuple:
    """R_i^eps on y-variables (closed form).  B is accepted for signature
    symmetry with the seed-level operators; it is invariant and unused."""
    _check_window(len(y), i)
    lo = 3 * i - 3
    w = tuple(y[lo:lo + 7])
    try:
        new = _ry_window_plus(w) if eps == 1 else _ry_window_minus(w)
    except ZeroDivisionError:
        raise SingularYWindowError(i, eps) from None
    return tuple(y[:lo]) + new + tuple(y[lo + 7:])


def window_center(x: Sequence, i: int):
    """Central-edge parameter of the crossing window: (x2 x6 + x3 x5) / x4 in
    window-local numbering.  Equals the output of the first mu_{3i+1} of
    R_i^eps for either sign."""
    lo = 3 * i - 3
    w = x[lo:lo + 7]
    if w[3] == 0:
        raise DegenerateSeedError(lo + 4)
    return (w[1] * w[5] + w[2] * w[4]) / w[3]


@dataclass(frozen=True)
class ClusterTrajectory:
    """Seeds x[1..m+1] induced by a braid word, plus per-step window centers."""

    braid: BraidWord
    seeds: tuple[tuple, ...]
    centers: tuple

    def __post_init__(self):
        if len(self.seeds) != len(self.braid) + 1:
            raise ValueError("trajectory length does not match braid word")

    @property
    def size(self) -> int:
        return len(self.seeds[0])

    def residual(self) -> tuple:
        """Componentwise periodicity defect x[m+1] - x[1]."""
        return tuple(a - b for a, b in zip(self.seeds[-1], self.seeds[0]))

    def to_json_dict(self) -> dict:
        def cpx(v):
            v = complex(v)
            return [v.real, v.imag]

        return {
            "n": self.braid.n,
            "letters": [[i, eps] for i, eps in self.braid.letters],
            "seeds": [[cpx(v) for v in s] for s in self.seeds],
            "centers": [cpx(v) for v in self.centers],
        }


def run_pattern(braid: BraidWord, x0: Sequence) -> ClusterTrajectory:
    """Drive the seed x0 along the braid word with the closed-form operators,
    recording the intermediate window centers used by the geometry layer."""
    if len(x0) != 3 * braid.n + 1:
        raise ValueError(
            f"initial vector has length {len(x0)}, expected {3 * braid.n + 1}"
        )
    seeds = [tuple(x0)]
    centers = []
    for step, (i, eps) in enumerate(braid.letters, start=1):
        try:
            centers.append(window_center(seeds[-1], i))
            seeds.append(apply_R_closed(seeds[-1], i, eps))
        except (DegenerateSeedError, ZeroDivisionError) as exc:
            raise DegenerateSeedError(
                getattr(exc, "index", 0),
                f"degenerate seed at braid step {step} (letter {i}^{eps:+d}): {exc}",
            ) from exc
    return ClusterTrajectory(braid=braid, seeds=tuple(seeds), centers=tuple(centers))
