"""Periodicity solving and the singular delta -> 0 limit.

A periodic seed (x[1] = x[m+1]) at the degenerate locus x2/x1 = x3/x4 = 0
carries the shape parameters of the braid-closure triangulation.  The solver
never evaluates at delta = 0: the degeneration is embedded as exact pinned
ratios x2 = delta x1, x3 = delta x4 (plus the gauge x_{3n+1} = 1, allowed by
degree-1 homogeneity of the braiding maps), Newton hunts for the remaining
free coordinates at each fixed delta, and the summed dilogarithm totals are
Richardson-extrapolated to delta = 0.

At finite delta a periodic point need not exist exactly (the paper-style
ansatz families approach one only in the limit); Gauss-Newton then lands on
the least-squares stationary point, whose residual shrinks linearly with
delta.  A branch sample is accepted when its relative periodicity defect is
below max(tol, residual_slack * delta).
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .braid import BraidWord, ClusterTrajectory, parse_braid
from .cluster import build_exchange_matrix
from .geometry import GeometryError, VolumeResult, bloch_wigner_total, complex_volume
from .kernels import letters_to_arrays, residual_arrays, trajectory_arrays

__all__ = [
    "SolverError",
    "DeltaSchedule",
    "SolverConfig",
    "PeriodicityProblem",
    "fig8_ansatz_problem",
    "trefoil_ansatz_problem",
    "generic_problem",
    "fixture_problem",
    "problem_for_braid",
    "FIXTURE_NAMES",
    "residual",
    "NewtonResult",
    "newton_solve",
    "richardson_extrapolate",
    "BranchSample",
    "SolutionBranch",
    "delta_limit",
    "enumerate_solutions",
]


class SolverError(Exception):
    pass


@dataclass(frozen=True)
class DeltaSchedule:
    """Geometric schedule delta_k = delta0 * ratio^k, k = 0..steps-1."""

    delta0: float = 1e-2
    ratio: float = 0.5
    steps: int = 12

    def __post_init__(self):
        if not (self.delta0 > 0 and 0 < self.ratio < 1 and self.steps >= 1):
            raise ValueError("need delta0 > 0, 0 < ratio < 1, steps >= 1")

    def deltas(self) -> list[float]:
        return [self.delta0 * self.ratio ** k for k in range(self.steps)]


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 200
    fd_step: float = 1e-7
    armijo_factor: float = 0.5
    max_halvings: int = 30
    step_tol: float = 1e-13
    residual_slack: float = 50.0  # accepted relative defect per unit delta


@dataclass(frozen=True)
class PeriodicityProblem:
    """A delta-family of initial-seed parameterizations for one braid word.

    ``build_x0(params, delta)`` produces the full initial vector; the pinned
    coordinates implement the degeneration and gauge, the rest are the free
    parameters Newton adjusts.  ``start_params(delta)`` is the family's
    canonical starting point.  When ``refine`` is false the canonical branch
    evaluates volumes along the start path itself, with Newton runs kept as
    diagnostics (used for families that prescribe the approach path to the
    singular solution; the approach direction fixes log-branch sides, and
    refinement drift of the flat least-squares valley may flip the
    Chern-Simons part by multiples of pi^2).
    """

    braid: BraidWord
    param_names: tuple[str, ...]
    build_x0: Callable[[np.ndarray, float], np.ndarray]
    start_params: Callable[[float], np.ndarray]
    refine: bool = True
    name: str = "custom"

    @property
    def n_params(self) -> int:
        return len(self.param_names)


def fig8_ansatz_problem() -> PeriodicityProblem:
    """Figure-eight family (x1, d, d, 1, x1 d, x1^2 d, x1, -d, -d, 1), with
    canonical approach x1 = exp(2 pi i / 3) + delta."""
    braid = parse_braid("1 -2 1 -2")
    omega = cmath.exp(2j * math.pi / 3)

    def build(params, delta):
        x1 = complex(params[0])
        d = delta
        return np.array(
            [x1, d, d, 1.0, x1 * d, x1 * x1 * d, x1, -d, -d, 1.0],
            dtype=np.complex128,
        )

    def start(delta):
        return np.array([omega + delta], dtype=np.complex128)

    return PeriodicityProblem(
        braid=braid,
        param_names=("x1",),
        build_x0=build,
        start_params=start,
        refine=False,
        name="fig8-ansatz",
    )


def trefoil_ansatz_problem() -> PeriodicityProblem:
    """Trefoil family (x1, d, d, 1, x1 d, x1^2 d, 1); the solved branch has
    x1 -> -(1+i)/2 as delta -> 0."""
    braid = parse_braid("1 1 1")

    def build(params, delta):
        x1 = complex(params[0])
        d = delta
        return np.array(
            [x1, d, d, 1.0, x1 * d, x1 * x1 * d, 1.0], dtype=np.complex128
        )

    def start(delta):
        return np.array([-0.5 - 0.5j], dtype=np.complex128)

    return PeriodicityProblem(
        braid=braid,
        param_names=("x1",),
        build_x0=build,
        start_params=start,
        refine=True,
        name="trefoil-ansatz",
    )


def generic_problem(braid: BraidWord) -> PeriodicityProblem:
    """Full free vector with the two pinned degeneration ratios
    x2 = delta x1, x3 = delta x4 and the gauge x_{3n+1} = 1."""
    N = 3 * braid.n + 1
    free = [1] + list(range(4, N))  # 1-based indices of free coordinates
    names = tuple(f"x{k}" for k in free)

    def build(params, delta):
        x = np.empty(N, dtype=np.complex128)
        for val, k in zip(params, free):
            x[k - 1] = val
        x[N - 1] = 1.0
        x[1] = delta * x[0]
        x[2] = delta * x[3]
        return x

    def start(delta):
        return np.ones(len(free), dtype=np.complex128)

    return PeriodicityProblem(
        braid=braid,
        param_names=names,
        build_x0=build,
        start_params=start,
        refine=True,
        name="generic",
    )


FIXTURE_NAMES = ("fig8-ansatz", "trefoil-ansatz")


def fixture_problem(name: str, braid: BraidWord | None = None) -> PeriodicityProblem:
    """Look up a named ansatz fixture, checking it matches the braid word."""
    if name == "fig8-ansatz":
        problem = fig8_ansatz_problem()
    elif name == "trefoil-ansatz":
        problem = trefoil_ansatz_problem()
    else:
        raise SolverError(f"unknown fixture {name!r}; available: {FIXTURE_NAMES}")
    if braid is not None and braid.letters != problem.braid.letters:
        raise SolverError(
            f"fixture {name!r} is for braid {problem.braid.letters}, got {braid.letters}"
        )
    return problem


def problem_for_braid(braid: BraidWord) -> PeriodicityProblem:
    """The matching ansatz fixture when this is a known braid word, else the
    generic pinned-ratio problem."""
    for name in FIXTURE_NAMES:
        problem = fixture_problem(name)
        if problem.braid.letters == braid.letters and problem.braid.n == braid.n:
            return problem
    return generic_problem(braid)


def residual(x0: Sequence, braid: BraidWord) -> np.ndarray:
    """Componentwise periodicity defect x[m+1] - x[1] of the braid trajectory."""
    gens, signs = letters_to_arrays(braid.letters)
    return residual_arrays(np.asarray(x0, dtype=np.complex128), gens, signs)


@dataclass(frozen=True)
class NewtonResult:
    params: np.ndarray
    x0: np.ndarray
    residual_inf: float
    rel_residual: float
    iterations: int
    converged: bool
    reason: str
    condition: float = math.nan


def _rel_residual(r: np.ndarray, x0: np.ndarray) -> tuple[float, float]:
    rinf = float(np.max(np.abs(r))) if r.size else 0.0
    scale = float(np.max(np.abs(x0))) or 1.0
    return rinf, rinf / scale


def newton_solve(
    problem: PeriodicityProblem,
    start: Sequence,
    delta: float,
    config: SolverConfig = SolverConfig(),
) -> NewtonResult:
    """Damped Gauss-Newton on the reduced periodicity residual.

    The residual components x_1 and x_{3n+1} are identically preserved by
    every braiding operator and are dropped; the Jacobian over the free
    parameters uses central finite differences (the parameterizations are
    holomorphic, so real-step differences give the complex derivative).
    Returns a diagnosis instead of raising on divergence, stalling, or a
    degenerate trajectory.
    """
    gens, signs = letters_to_arrays(problem.braid.letters)
    u = np.asarray(start, dtype=np.complex128).copy()

    def reduced(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x0 = problem.build_x0(params, delta)
        return residual_arrays(x0, gens, signs)[1:-1], x0

    r, x0 = reduced(u)
    rinf, rel = _rel_residual(r, x0)
    if not np.all(np.isfinite(r)):
        return NewtonResult(u, x0, math.inf, math.inf, 0, False, "degenerate-trajectory")
    if rel <= config.tol or u.size == 0:
        reason = "residual" if rel <= config.tol else "no-free-parameters"
        return NewtonResult(u, x0, rinf, rel, 0, True, reason)

    condition = math.nan
    for it in range(1, config.max_iter + 1):
        J = np.empty((r.size, u.size), dtype=np.complex128)
        for a in range(u.size):
            h = config.fd_step * max(1.0, abs(u[a]))
            up = u.copy()
            up[a] += h
            um = u.copy()
            um[a] -= h
            rp, _ = reduced(up)
            rm, _ = reduced(um)
            J[:, a] = (rp - rm) / (2 * h)
        if not np.all(np.isfinite(J)):
            return NewtonResult(u, x0, rinf, rel, it, False, "degenerate-jacobian")
        du, _res, _rank, sv = np.linalg.lstsq(J, -r, rcond=None)
        if sv.size and sv[0] > 0:
            condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        rnorm = float(np.linalg.norm(r))
        t = 1.0
        accepted = False
        for _ in range(config.max_halvings + 1):
            rt, xt = reduced(u + t * du)
            if np.all(np.isfinite(rt)) and float(np.linalg.norm(rt)) < rnorm:
                accepted = True
                break
            t *= config.armijo_factor
        if not accepted:
            # no descent with a tiny Gauss-Newton step means we are sitting
            # on the least-squares floor, not diverging
            if float(np.max(np.abs(du))) <= 1e-8 * max(1.0, float(np.max(np.abs(u)))):
                return NewtonResult(u, x0, rinf, rel, it, True, "stationary", condition)
            return NewtonResult(
                u, x0, rinf, rel, it, False, "line-search-failed", condition
            )
        u = u + t * du
        r, x0 = reduced(u)
        rinf, rel = _rel_residual(r, x0)
        if rel <= config.tol:
            return NewtonResult(u, x0, rinf, rel, it, True, "residual", condition)
        if float(np.max(np.abs(t * du))) <= config.step_tol * max(1.0, float(np.max(np.abs(u)))):
            return NewtonResult(u, x0, rinf, rel, it, True, "stationary", condition)
    return NewtonResult(u, x0, rinf, rel, config.max_iter, False, "max-iterations", condition)


# ---------------------------------------------------------------------------
# extrapolation


def richardson_extrapolate(
    values: Sequence[complex], ratio: float, order: int | None = None
) -> tuple[complex, float, int | None]:
    """Iterated Richardson extrapolation of samples on a geometric schedule.

    ``values[k]`` approximates the limit with error O(delta_k^p) at
    delta_k = delta0 * ratio^k.  The leading order p is auto-detected from
    the last difference ratio unless given; successive tableau levels
    eliminate orders p, p+1, ...  Returns (limit, error_estimate, order); a
    constant tail short-circuits to the constant with zero estimate.
    """
    vals = [complex(v) for v in values]
    if not vals:
        raise ValueError("no values to extrapolate")
    if len(vals) == 1:
        return vals[0], math.inf, order
    scale = max(1.0, max(abs(v) for v in vals))
    d_last = abs(vals[-1] - vals[-2])
    if d_last < 1e-14 * scale:
        return vals[-1], d_last, order
    if order is None:
        if len(vals) < 3:
            order = 1
        else:
            d1 = abs(vals[-2] - vals[-3])
            if d1 < 1e-14 * scale:
                return vals[-1], d_last, None
            order = max(1, round(math.log(d1 / d_last) / math.log(1.0 / ratio)))

    def tableau_limit(seq: list[complex]) -> tuple[complex, complex]:
        cur = list(seq)
        p = order
        penultimate = cur[-1]
        while len(cur) > 1:
            f = ratio ** (-p)
            cur = [cur[k + 1] + (cur[k + 1] - cur[k]) / (f - 1) for k in range(len(cur) - 1)]
            if len(cur) > 1:
                penultimate = cur[-1]
            p += 1
        return cur[0], penultimate

    limit, penultimate = tableau_limit(vals)
    checks = [abs(limit - penultimate)]
    if len(vals) >= 3:
        checks.append(abs(limit - tableau_limit(vals[:-1])[0]))
        checks.append(abs(limit - tableau_limit(vals[1:])[0]))
    return limit, max(checks), order


# ---------------------------------------------------------------------------
# branches


@dataclass(frozen=True)
class BranchSample:
    delta: float
    params: np.ndarray
    x0: np.ndarray
    residual_inf: float
    rel_residual: float
    accepted: bool
    newton: NewtonResult
    volume: VolumeResult


@dataclass(frozen=True)
class SolutionBranch:
    problem_name: str
    samples: tuple[BranchSample, ...]
    extrapolated_total: complex | None
    error_estimate: float
    detected_order: int | None
    bw_extrapolated: float | None
    converged: bool
    flags: tuple[str, ...] = ()
    identity_deviation: float = math.nan

    @property
    def vol(self) -> float | None:
        return None if self.extrapolated_total is None else self.extrapolated_total.imag

    @property
    def cs(self) -> float | None:
        return None if self.extrapolated_total is None else -self.extrapolated_total.real

    @property
    def cs_mod(self) -> float | None:
        if self.extrapolated_total is None:
            return None
        period = math.pi ** 2
        r = math.fmod(-self.extrapolated_total.real, period)
        if r <= -period / 2:
            r += period
        elif r > period / 2:
            r -= period
        return r

    def final_params(self) -> np.ndarray | None:
        return self.samples[-1].params if self.samples else None

    def to_json_dict(self) -> dict:
        def cpx(v):
            v = complex(v)
            return [v.real, v.imag]

        out = {
            "problem": self.problem_name,
            "converged": self.converged,
            "flags": list(self.flags),
            "detected_order": self.detected_order,
            "error_estimate": self.error_estimate,
            "identity_deviation": self.identity_deviation,
            "samples": [
                {
                    "delta": s.delta,
                    "residual_inf": s.residual_inf,
                    "rel_residual": s.rel_residual,
                    "accepted": s.accepted,
                    "params": [cpx(v) for v in s.params],
                    "max_flattening_residual": s.volume.max_flattening_residual,
                }
                for s in self.samples
            ],
        }
        if self.extrapolated_total is not None:
            out["total"] = cpx(self.extrapolated_total)
            out["vol"] = self.vol
            out["cs"] = self.cs
            out["cs_mod"] = self.cs_mod
        if self.bw_extrapolated is not None:
            out["bloch_wigner_vol"] = self.bw_extrapolated
        if self.samples:
            out["volume_at_smallest_delta"] = self.samples[-1].volume.to_json_dict()
        return out


def _make_trajectory(braid: BraidWord, x0: np.ndarray) -> ClusterTrajectory:
    gens, signs = letters_to_arrays(braid.letters)
    xs, centers = trajectory_arrays(x0, gens, signs)
    return ClusterTrajectory(
        braid=braid,
        seeds=tuple(tuple(complex(v) for v in row) for row in xs),
        centers=tuple(complex(v) for v in centers),
    )


def _identity_deviation(traj: ClusterTrajectory, n: int) -> float:
    """Numerical defect of the trajectory's conserved monomials: the
    completeness products y_{3i-1} y_{3i} (exactly 1 for y derived from any
    x) and the per-step invariance of the axis product
    y_{3i-2} y_{3i+1} y_{3i+4} under the step's own operator."""
    B = build_exchange_matrix(n).data
    ys = []
    for seed in traj.seeds:
        x = np.asarray(seed, dtype=np.complex128)
        with np.errstate(all="ignore"):
            ys.append(np.prod(x[:, None] ** B, axis=0))
    worst = 0.0
    for y in ys:
        for i in range(1, n + 1):
            worst = max(worst, abs(y[3 * i - 2] * y[3 * i - 1] - 1))
    for j, (i, _eps) in enumerate(traj.braid.letters):
        before = ys[j][3 * i - 3] * ys[j][3 * i] * ys[j][3 * i + 3]
        after = ys[j + 1][3 * i - 3] * ys[j + 1][3 * i] * ys[j + 1][3 * i + 3]
        scale = max(1.0, abs(before))
        worst = max(worst, abs(after - before) / scale)
    return worst


def delta_limit(
    problem: PeriodicityProblem,
    schedule: DeltaSchedule = DeltaSchedule(),
    config: SolverConfig = SolverConfig(),
    start: Sequence | None = None,
) -> SolutionBranch:
    """Track one solution branch down the delta schedule and extrapolate.

    Newton runs at every delta, warm-started from the previous step (or from
    the problem's canonical path when none has been taken yet).  Volumes are
    evaluated at the refined parameters, except on the canonical branch of a
    non-refining problem, where the prescribed path point is used and the
    Newton output is kept as a diagnostic.  Branch loss mid-schedule returns
    the partial branch with a flag.
    """
    deltas = schedule.deltas()
    path_mode = (start is None) and (not problem.refine)
    prev = np.asarray(
        start if start is not None else problem.start_params(deltas[0]),
        dtype=np.complex128,
    )
    samples: list[BranchSample] = []
    flags: list[str] = []
    worst_identity = 0.0
    for d in deltas:
        warm = problem.start_params(d) if path_mode else prev
        nres = newton_solve(problem, warm, d, config)
        if path_mode:
            eval_params = np.asarray(problem.start_params(d), dtype=np.complex128)
        else:
            eval_params = nres.params
        x0 = problem.build_x0(eval_params, d)
        r = residual(x0, problem.braid)
        rinf, rel = _rel_residual(r, x0)
        accepted = bool(
            np.all(np.isfinite(r)) and rel <= max(config.tol, config.residual_slack * d)
        )
        if not accepted:
            flags.append(f"branch lost at delta={d:.3e} ({nres.reason}, rel={rel:.2e})")
            break
        traj = _make_trajectory(problem.braid, x0)
        try:
            vol = complex_volume(traj, residual_warn=max(1e-6, 10 * config.residual_slack * d))
        except GeometryError as exc:
            flags.append(f"degenerate geometry at delta={d:.3e}: {exc}")
            break
        worst_identity = max(worst_identity, _identity_deviation(traj, problem.braid.n))
        samples.append(
            BranchSample(
                delta=d,
                params=eval_params,
                x0=x0,
                residual_inf=rinf,
                rel_residual=rel,
                accepted=accepted,
                newton=nres,
                volume=vol,
            )
        )
        prev = nres.params if nres.converged else warm
    if not samples:
        return SolutionBranch(
            problem_name=problem.name,
            samples=(),
            extrapolated_total=None,
            error_estimate=math.inf,
            detected_order=None,
            bw_extrapolated=None,
            converged=False,
            flags=tuple(flags),
        )
    totals = [s.volume.total for s in samples]
    limit, estimate, order = richardson_extrapolate(totals, schedule.ratio)
    bw_vals = [bloch_wigner_total(s.volume) for s in samples]
    bw_limit, _bw_est, _ = richardson_extrapolate(bw_vals, schedule.ratio)
    if len(samples) == len(deltas) and len(samples) >= 3:
        tail = abs(totals[-1] - totals[-2])
        if estimate > max(10 * tail, 1e-8):
            flags.append("extrapolation-not-converged")
    converged = len(samples) == len(deltas) and "extrapolation-not-converged" not in flags
    return SolutionBranch(
        problem_name=problem.name,
        samples=tuple(samples),
        extrapolated_total=limit,
        error_estimate=estimate,
        detected_order=order,
        bw_extrapolated=bw_limit.real,
        converged=converged,
        flags=tuple(flags),
        identity_deviation=worst_identity,
    )


def enumerate_solutions(
    problem: PeriodicityProblem,
    n_starts: int = 64,
    rng_seed: int = 0,
    schedule: DeltaSchedule = DeltaSchedule(),
    config: SolverConfig = SolverConfig(),
    start_scale: float = 1.2,
    dedup_tol: float = 1e-6,
) -> list[SolutionBranch]:
    """Random-restart Newton at the largest delta, dedup, delta-limit each
    distinct branch, and sort by extrapolated volume (descending).

    The canonical branch (seeded from the problem's own start path) is always
    included.  An empty list means no start converged -- reported as a result,
    not an exception.
    """
    rng = np.random.default_rng(rng_seed)
    d0 = schedule.delta0
    k = problem.n_params
    found: list[np.ndarray] = []

    def is_new(params: np.ndarray) -> bool:
        return all(np.max(np.abs(params - f)) >= dedup_tol for f in found)

    canonical = delta_limit(problem, schedule, config)
    if canonical.samples:
        found.append(canonical.samples[0].newton.params)

    branches = [canonical] if canonical.samples else []
    for _ in range(n_starts):
        u0 = start_scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
        nres = newton_solve(problem, u0, d0, config)
        if not nres.converged:
            continue
        if nres.rel_residual > max(config.tol, config.residual_slack * d0):
            continue
        if not is_new(nres.params):
            continue
        found.append(nres.params)
        branch = delta_limit(problem, schedule, config, start=nres.params)
        if branch.samples:
            branches.append(branch)

    if problem.braid.trivially_unknotted:
        branches = [
            dataclasses.replace(b, flags=b.flags + ("trivial-closure",))
            for b in branches
        ]

    def sort_key(b: SolutionBranch):
        v = b.vol if b.vol is not None else -math.inf
        return (-v, b.error_estimate)

    branches.sort(key=sort_key)
    return branches
