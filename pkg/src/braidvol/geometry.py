"""Dilogarithms, flattened ideal tetrahedra, and complex-volume assembly.

Each braid crossing carries an ideal octahedron built from four tetrahedra
(N, S, W, E) whose shape moduli are ratios of cluster variables around the
crossing window.  Every modulus z and its companion 1/(1-z) are kept as
explicit signed factor ledgers (which window variables enter the numerator
and denominator), because the integer log-branch pair (p, q) of the flattened
tetrahedron [z; p, q] is computed from the individual principal logarithms of
the factors, not from the product alone.  The complex volume is the signed
sum of extended Rogers dilogarithms over all tetrahedra of all crossings:
vol = Im(total), cs = -Re(total).

Principal branch everywhere: log has arg in (-pi, pi] (continuous from
Im > 0 on the negative reals); the dilogarithm on its cut [1, oo) takes the
limit from Im < 0.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .braid import ClusterTrajectory

__all__ = [
    "GeometryError",
    "DegenerateModulusError",
    "FlatteningError",
    "dilog",
    "bloch_wigner",
    "extended_rogers",
    "Ledger",
    "IdealTetrahedron",
    "CrossingOctahedron",
    "VolumeResult",
    "build_octahedron",
    "crossing_dilog",
    "complex_volume",
    "bloch_wigner_total",
]

PI = math.pi
PI2_6 = PI * PI / 6

#: a computed flattening (p, q) must be integral to this tolerance
PQ_RESIDUAL_TOL = 1e-6

#: relative periodicity defect above which complex_volume warns
RESIDUAL_WARN_DEFAULT = 1e-6


class GeometryError(Exception):
    """Base class for geometry-layer errors."""


class DegenerateModulusError(GeometryError):
    """A tetrahedron modulus landed in {0, 1} (flat tetrahedron)."""


class FlatteningError(GeometryError):
    """The log-branch integers p, q failed the integrality check."""

    def __init__(self, label: str, which: str, residual: float):
        self.label = label
        self.which = which
        self.residual = residual
        super().__init__(
            f"non-integral {which}-flattening on triangle {label}: residual {residual:.3e}"
        )


# ---------------------------------------------------------------------------
# dilogarithm


def _bernoulli_log_coeffs(count: int) -> list[float]:
    """Coefficients B_k / (k+1)! of the dilogarithm series in u = -log(1-z)."""
    B = [Fraction(0)] * count
    B[0] = Fraction(1)
    for m in range(1, count):
        acc = Fraction(0)
        c = 1  # C(m+1, j), built incrementally
        for j in range(m):
            acc += c * B[j]
            c = c * (m + 1 - j) // (j + 1)
        B[m] = -acc / (m + 1)
    fact = 1
    out = []
    for k in range(count):
        fact *= k + 1
        out.append(float(B[k] / fact))
    return out


_LOG_COEFFS = _bernoulli_log_coeffs(48)


def _dilog_series(z: complex) -> complex:
    """Plain power series, for |z| <= 1/2."""
    term = z
    total = z
    n = 1
    while abs(term) > 1e-18 * (1 + abs(total)):
        n += 1
        term *= z
        total += term / (n * n)
        if n > 200:
            break
    return total


def _dilog_log_series(z: complex) -> complex:
    """Series in u = -log(1-z); converges for |u| < 2 pi, used near the unit
    circle where neither |z| nor |1-z| is small."""
    u = -cmath.log(1 - z)
    total = 0j
    up = 1 + 0j
    for c in _LOG_COEFFS:
        up *= u
        if c != 0.0:
            total += c * up
    return total


def dilog(z) -> complex:
    """Principal-branch dilogarithm Li2(z).

    Branch cut [1, oo) is taken continuous from Im z < 0.  Accuracy is
    better than 1e-13 for |z| <= 1e3.
    """
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    if z.imag == 0.0 and z.real > 1.0:
        # on the cut: limit from below, log(-z) -> ln|z| + i pi
        x = z.real
        lg = complex(math.log(x), PI)
        return -dilog(1.0 / x) - PI2_6 - 0.5 * lg * lg
    if abs(z) <= 0.5:
        return _dilog_series(z)
    if abs(z) > 1.0:
        return -dilog(1.0 / z) - PI2_6 - 0.5 * cmath.log(-z) ** 2
    if abs(1 - z) <= 0.5:
        return PI2_6 - cmath.log(z) * cmath.log(1 - z) - _dilog_series(1 - z)
    return _dilog_log_series(z)


def bloch_wigner(z) -> float:
    """Bloch-Wigner function D(z) = Im Li2(z) + arg(1-z) log|z|: the hyperbolic
    volume of the ideal tetrahedron with cross-ratio modulus z."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DegenerateModulusError(f"Bloch-Wigner undefined at z = {z}")
    return dilog(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def extended_rogers(z, p: int, q: int) -> complex:
    """Extended Rogers dilogarithm L([z; p, q]) of a flattened tetrahedron:

        Li2(z) + log(z) log(1-z) / 2
              + (pi i / 2) (q log z + p log(1-z)) - pi^2 / 6
    """
    z = complex(z)
    if z == 0 or z == 1:
        raise DegenerateModulusError(f"extended Rogers undefined at z = {z}")
    lz = cmath.log(z)
    l1z = cmath.log(1 - z)
    return dilog(z) + 0.5 * lz * l1z + (0.5j * PI) * (q * lz + p * l1z) - PI2_6


# ---------------------------------------------------------------------------
# ledgers and flattened tetrahedra


@dataclass(frozen=True)
class Ledger:
    """A signed product of tagged edge-parameter factors.

    ``sign`` is +-1 and ``factors`` lists (tag, value, exponent) with
    exponent +-1.  The product sign * prod(value^exponent) reproduces the
    tetrahedron quantity (z or 1/(1-z)) exactly; the individual factor
    logarithms feed the flattening integers.
    """

    sign: int
    factors: tuple[tuple[str, complex, int], ...]

    def value(self) -> complex:
        out = complex(self.sign)
        for _tag, v, e in self.factors:
            out = out * v if e > 0 else out / v
        return out

    def log_sum(self) -> complex:
        total = 0j
        for tag, v, e in self.factors:
            if v == 0:
                raise DegenerateModulusError(f"zero edge parameter {tag} in ledger")
            total += e * cmath.log(v)
        return total


def _flattening_integer(ledger: Ledger, label: str, which: str) -> tuple[int, float]:
    """Integer k with k * pi * i = sum of factor logs - log(ledger value).

    The ledger sign stays inside the value's logarithm; the factor sum runs
    over the bare edge parameters.
    """
    value = ledger.value()
    if value == 0:
        raise DegenerateModulusError(f"zero ledger value on triangle {label}")
    t = (ledger.log_sum() - cmath.log(value)) / complex(0.0, PI)
    k = round(t.real)
    residual = abs(t - k)
    if residual > PQ_RESIDUAL_TOL:
        raise FlatteningError(label, which, residual)
    return k, residual


@dataclass(frozen=True)
class IdealTetrahedron:
    """One flattened ideal tetrahedron of a crossing octahedron."""

    label: str          # N, S, W or E
    sign: int           # +1 same vertex ordering as the model, -1 inverted
    z: complex          # cross-ratio modulus
    p: int
    q: int
    z_ledger: Ledger    # reproduces z
    w_ledger: Ledger    # reproduces 1/(1-z)
    p_residual: float
    q_residual: float
    rogers: complex     # L([z; p, q])

    def modulus_triple(self) -> tuple[complex, complex, complex]:
        """(z, z', z'') with z' = 1 - 1/z and z'' = 1/(1-z)."""
        return self.z, 1 - 1 / self.z, 1 / (1 - self.z)


@dataclass(frozen=True)
class CrossingOctahedron:
    """The four tetrahedra attached to one crossing of the braid closure."""

    step: int                    # 1-based position in the braid word
    generator: int
    sign: int                    # braid letter sign eps
    x_in: tuple                  # 7-window of x[step]
    x_out: tuple                 # 7-window of x[step+1]
    center: complex              # central-edge parameter x_c
    tetrahedra: tuple[IdealTetrahedron, ...]


# Table of moduli: per tetrahedron, (triangle sign, z ledger, 1/(1-z) ledger),
# each ledger as (sign, numerator window slots, denominator window slots).
# Slots are 1-based window positions; "+" = input window, "~" = output window,
# "c" = the central-edge parameter.
_TABLE_POS = (
    ("N", -1, (-1, ("x2", "x6"), ("x3", "x5")), (1, ("x3", "x5"), ("x4", "c"))),
    ("S", -1, (-1, ("~3", "~5"), ("x3", "x5")), (1, ("x3", "x5"), ("~4", "c"))),
    ("W", 1, (1, ("x2", "~3"), ("x3", "x5")), (-1, ("x3", "x5"), ("x1", "c"))),
    ("E", 1, (1, ("~5", "x6"), ("x3", "x5")), (-1, ("x3", "x5"), ("c", "x7"))),
)
_TABLE_NEG = (
    ("N", 1, (-1, ("x3", "x5"), ("x2", "x6")), (1, ("x2", "x6"), ("x4", "c"))),
    ("S", 1, (-1, ("~2", "~6"), ("x2", "x6")), (1, ("x2", "x6"), ("c", "~4"))),
    ("W", -1, (1, ("~2", "x3"), ("x2", "x6")), (-1, ("x2", "x6"), ("x1", "c"))),
    ("E", -1, (1, ("x5", "~6"), ("x2", "x6")), (-1, ("x2", "x6"), ("c", "x7"))),
)


def _resolve(tag: str, x_in, x_out, center) -> complex:
    if tag == "c":
        return center
    slot = int(tag[1]) - 1
    return x_out[slot] if tag[0] == "~" else x_in[slot]


def _make_ledger(spec, x_in, x_out, center) -> Ledger:
    sign, num, den = spec
    factors = [(t, complex(_resolve(t, x_in, x_out, center)), +1) for t in num]
    factors += [(t, complex(_resolve(t, x_in, x_out, center)), -1) for t in den]
    return Ledger(sign=sign, factors=tuple(factors))


def build_octahedron(x_in: Sequence, x_out: Sequence, center, eps: int,
                     step: int = 1, generator: int = 1) -> CrossingOctahedron:
    """Assemble the four flattened tetrahedra of one crossing.

    ``x_in`` and ``x_out`` are the 7-windows before and after the braiding
    operator; ``center`` is the central-edge parameter (x2 x6 + x3 x5) / x4
    of the input window.  For eps = -1 the mirrored modulus table applies.
    """
    x_in = tuple(complex(v) for v in x_in)
    x_out = tuple(complex(v) for v in x_out)
    center = complex(center)
    if len(x_in) != 7 or len(x_out) != 7:
        raise ValueError("crossing windows must have exactly 7 entries")
    table = _TABLE_POS if eps == 1 else _TABLE_NEG
    tets = []
    for label, tri_sign, z_spec, w_spec in table:
        z_ledger = _make_ledger(z_spec, x_in, x_out, center)
        w_ledger = _make_ledger(w_spec, x_in, x_out, center)
        z = z_ledger.value()
        if z == 0 or z == 1:
            raise DegenerateModulusError(
                f"triangle {label}: degenerate modulus z = {z}"
            )
        w = w_ledger.value()
        # the w ledger must reproduce 1/(1-z); a transcription error in the
        # modulus table would show up as an O(1) mismatch here.  Roundoff of
        # delta-degenerated trajectories is amplified by cancellation (inside
        # 1 - z and inside the windows themselves), so the guard is loose;
        # the exact-arithmetic property tests pin the table tightly.
        one_minus_z = 1 - z
        if one_minus_z == 0:
            raise DegenerateModulusError(f"triangle {label}: modulus z = 1")
        allowed = 1e-4 * (1.0 + (1.0 + abs(z)) / abs(one_minus_z))
        if abs(w * one_minus_z - 1) > allowed:
            raise GeometryError(
                f"triangle {label}: ledger mismatch, w*(1-z) = {w * one_minus_z}"
            )
        p, p_res = _flattening_integer(z_ledger, label, "p")
        q, q_res = _flattening_integer(w_ledger, label, "q")
        tets.append(
            IdealTetrahedron(
                label=label,
                sign=tri_sign,
                z=z,
                p=p,
                q=q,
                z_ledger=z_ledger,
                w_ledger=w_ledger,
                p_residual=p_res,
                q_residual=q_res,
                rogers=extended_rogers(z, p, q),
            )
        )
    return CrossingOctahedron(
        step=step,
        generator=generator,
        sign=eps,
        x_in=x_in,
        x_out=x_out,
        center=center,
        tetrahedra=tuple(tets),
    )


def crossing_dilog(octa: CrossingOctahedron) -> complex:
    """Signed extended-Rogers sum of one crossing octahedron."""
    return sum(t.sign * t.rogers for t in octa.tetrahedra)


def _reduce_cs(value: float) -> float:
    """Representative of a Chern-Simons value in (-pi^2/2, pi^2/2]."""
    period = PI * PI
    r = math.fmod(value, period)
    if r <= -period / 2:
        r += period
    elif r > period / 2:
        r -= period
    return r


@dataclass(frozen=True)
class VolumeResult:
    """Total signed extended-Rogers sum over all crossings.

    ``total`` equals i (vol + i cs); the Chern-Simons part is reported raw
    and reduced into (-pi^2/2, pi^2/2] (the sum is only canonical modulo
    pi^2 shifts from log-branch choices).
    """

    total: complex
    crossings: tuple[CrossingOctahedron, ...]

    @property
    def vol(self) -> float:
        return self.total.imag

    @property
    def cs(self) -> float:
        return -self.total.real

    @property
    def cs_mod(self) -> float:
        return _reduce_cs(-self.total.real)

    @property
    def max_flattening_residual(self) -> float:
        res = [max(t.p_residual, t.q_residual)
               for c in self.crossings for t in c.tetrahedra]
        return max(res, default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "vol": self.vol,
            "cs": self.cs,
            "cs_mod": self.cs_mod,
            "total": [self.total.real, self.total.imag],
            "crossings": [
                {
                    "j": c.step,
                    "i": c.generator,
                    "eps": c.sign,
                    "tetrahedra": [
                        {
                            "label": t.label,
                            "sign": t.sign,
                            "z": [t.z.real, t.z.imag],
                            "p": t.p,
                            "q": t.q,
                            "L": [t.rogers.real, t.rogers.imag],
                        }
                        for t in c.tetrahedra
                    ],
                }
                for c in self.crossings
            ],
        }


def complex_volume(traj: ClusterTrajectory,
                   residual_warn: float = RESIDUAL_WARN_DEFAULT) -> VolumeResult:
    """Sum the per-crossing dilogarithms of a cluster trajectory.

    The trajectory should satisfy the periodicity condition x[1] = x[m+1];
    if the relative defect exceeds ``residual_warn`` a warning is emitted
    (the delta-degenerated trajectories of the solver are evaluated at small
    but nonzero defect on purpose).
    """
    defect = max((abs(complex(v)) for v in traj.residual()), default=0.0)
    scale = max((abs(complex(v)) for v in traj.seeds[0]), default=1.0)
    if scale > 0 and defect / scale > residual_warn:
        warnings.warn(
            f"trajectory periodicity defect {defect / scale:.3e} exceeds "
            f"{residual_warn:.1e}; volume is evaluated off the periodic locus",
            stacklevel=2,
        )
    crossings = []
    total = 0j
    for j, (i, eps) in enumerate(traj.braid.letters):
        lo = 3 * i - 3
        try:
            octa = build_octahedron(
                traj.seeds[j][lo:lo + 7],
                traj.seeds[j + 1][lo:lo + 7],
                traj.centers[j],
                eps,
                step=j + 1,
                generator=i,
            )
        except GeometryError as exc:
            raise GeometryError(f"crossing {j + 1} (letter {i}^{eps:+d}): {exc}") from exc
        crossings.append(octa)
        total += crossing_dilog(octa)
    return VolumeResult(total=total, crossings=tuple(crossings))


def bloch_wigner_total(result: VolumeResult) -> float:
    """Signed Bloch-Wigner sum over all tetrahedra: the volume computed the
    classical way, for cross-checking Im(total)."""
    return sum(t.sign * bloch_wigner(t.z)
               for c in result.crossings for t in c.tetrahedra)
