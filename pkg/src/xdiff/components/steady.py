# SPDX-FileCopyrightText: 2026-present xdiff contributors
#
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import math
from collections.abc import Generator

import numpy as np
import pydantic
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.sparse.linalg import spsolve

from xdiff.numerics import EllipticSolver, Field, Grid, laplacian_neumann, lp_norm
from xdiff.specs import MollifiedMotility, MotilitySpec
from xdiff.typing import Helpful
from xdiff.utils import InitStrategy, MotilityKind
from xdiff.utils.compatibility import Self, override
from xdiff.utils.exceptions import SolverConvergenceError

logger = logging.getLogger("xdiff.components")

NEWTON_RTOL = 1e-11
ACCEPT_RTOL = 1e-10
_ARMIJO = 1e-4
_MIN_STEP = 1e-8
_NONCONSTANT_RTOL = 1e-6
_GAUSSIAN_AMPLITUDE = 3.0
_GAUSSIAN_WIDTH = 3.0
_RELAX_TOL = 1e-6
_RELAX_ESCAPE = 10.0


def oscillation(f: Field) -> float:
    """``max f - min f``."""
    return f.max - f.min


def _is_nonconstant(values: np.ndarray) -> bool:
    return float(np.ptp(values)) > _NONCONSTANT_RTOL * float(np.max(np.abs(values)))


def _validate_parameters(d: float, k: float) -> None:
    if not d > 0:
        error_msg = f"Diffusion parameter d must be positive, got {d}"
        raise ValueError(error_msg)
    if not k > 1:
        error_msg = f"Exponent k must exceed 1 for nonconstant solutions, got {k}"
        raise ValueError(error_msg)


def _distance(grid: Grid, anchor: tuple[float, ...]) -> np.ndarray:
    squares = [(x - c) ** 2 for x, c in zip(grid.mesh(), anchor, strict=True)]
    return np.sqrt(sum(squares))


def _anchors(grid: Grid) -> list[tuple[float, ...]]:
    return [tuple(0.5 * length for length in grid.extent), (0.0,) * grid.dim]


def spike_profile(
    grid: Grid, d: float, k: float, anchor: tuple[float, ...]
) -> np.ndarray:
    """
    Ground state of ``d w'' - w + w**k = 0`` on the line, centred at `anchor`.

    ``w(r) = ((k + 1) / 2)**(1 / (k - 1)) * sech(x)**(2 / (k - 1))`` with
    ``x = (k - 1) r / (2 sqrt(d))`` and r the distance to the anchor.
    """
    _validate_parameters(d, k)
    x = (k - 1.0) * _distance(grid, anchor) / (2.0 * math.sqrt(d))
    sech = 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))
    return ((k + 1.0) / 2.0) ** (1.0 / (k - 1.0)) * sech ** (2.0 / (k - 1.0))


def gaussian_bump(grid: Grid, d: float, anchor: tuple[float, ...]) -> np.ndarray:
    """``1 + 3 exp(-r**2 / (2 sigma**2))`` with ``sigma = 3 sqrt(d)``."""
    sigma = _GAUSSIAN_WIDTH * math.sqrt(d)
    r = _distance(grid, anchor)
    return 1.0 + _GAUSSIAN_AMPLITUDE * np.exp(-(r * r) / (2.0 * sigma * sigma))


def _residual(grid: Grid, w: np.ndarray, d: float, k: float) -> np.ndarray:
    return d * grid.laplacian(w) - w + np.power(w, k)


def newton(
    grid: Grid,
    w: np.ndarray,
    d: float,
    k: float,
    *,
    rtol: float = NEWTON_RTOL,
    max_iter: int = 100,
) -> np.ndarray:
    """
    Damped Newton iteration for ``F(w) = d lap_h w - w + w**k = 0``.

    The Jacobian ``d lap_h - I + k diag(w**(k-1))`` is symmetric but indefinite
    near spikes; each linear solve is a sparse LU. The step is halved until the
    iterate stays positive and ``||F||`` decreases by the Armijo factor.

    Raises
    ------

    SolverConvergenceError
        When the line search stalls above `ACCEPT_RTOL`, or `max_iter` is
        reached.
    """
    laplacian = d * grid.laplacian_matrix()
    identity = sp.identity(grid.n_cells, format="csr")
    residual = _residual(grid, w, d, k)
    norm = float(np.linalg.norm(residual))

    for iteration in range(max_iter):
        scale = float(np.linalg.norm(w))
        logger.debug("Newton iteration %d, relative |F| %.3e", iteration, norm / scale)
        if norm <= rtol * scale:
            return w

        jacobian = laplacian - identity + sp.diags(k * np.power(w, k - 1.0).ravel())
        delta = spsolve(jacobian.tocsc(), -residual.ravel()).reshape(grid.shape)
        if not np.all(np.isfinite(delta)):
            error_msg = "Singular Newton Jacobian"
            raise SolverConvergenceError(
                error_msg, residual=norm / scale, iterations=iteration
            )

        alpha = 1.0
        lost_positivity = False
        while True:
            trial = w + alpha * delta
            if np.min(trial) > 0:
                trial_residual = _residual(grid, trial, d, k)
                trial_norm = float(np.linalg.norm(trial_residual))
                if trial_norm <= (1.0 - _ARMIJO * alpha) * norm:
                    break
            else:
                lost_positivity = True
            alpha /= 2.0
            if alpha < _MIN_STEP:
                if norm <= ACCEPT_RTOL * scale:
                    return w
                error_msg = (
                    "Line search failed: every damped step leaves w negative"
                    if lost_positivity
                    else "Line search failed to decrease the residual"
                )
                raise SolverConvergenceError(
                    error_msg, residual=norm / scale, iterations=iteration
                )
        w, residual, norm = trial, trial_residual, trial_norm

    scale = float(np.linalg.norm(w))
    if norm <= ACCEPT_RTOL * scale:
        return w
    error_msg = "Newton iteration did not converge"
    raise SolverConvergenceError(error_msg, residual=norm / scale, iterations=max_iter)


def parabolic_relax(
    grid: Grid,
    w: np.ndarray,
    d: float,
    k: float,
    *,
    tau: float = 0.05,
    max_steps: int = 20000,
) -> np.ndarray:
    """
    Pseudo-time march of ``w_t = d lap w - w + w**k``, implicit in ``d lap - I``.

    Returns the iterate with the smallest ``||w_t||``. The march stops once
    ``||w_t|| < 1e-6``, or when it grows past ten times its smallest value
    (the spike leaving its saddle).
    """
    _validate_parameters(d, k)
    lam = (1.0 + 1.0 / tau) / d - 1.0
    if lam < 0:
        error_msg = f"Relaxation step tau={tau} too large for d={d}"
        raise ValueError(error_msg)
    solver = EllipticSolver(grid=grid)
    best, best_rate = w, math.inf
    for count in range(max_steps):
        w_new = solver.solve_helmholtz((w / tau + np.power(w, k)) / d, lam)
        if not np.all(np.isfinite(w_new)) or np.min(w_new) <= 0:
            logger.debug("Relaxation left the positive cone after %d steps", count)
            break
        rate = math.sqrt(grid.integrate((w_new - w) ** 2)) / tau
        if rate < best_rate:
            best, best_rate = w_new, rate
        if rate < _RELAX_TOL:
            break
        if rate > _RELAX_ESCAPE * best_rate:
            logger.debug("Relaxation leaving the saddle after %d steps", count)
            break
        w = w_new
    logger.debug("Relaxation kept |w_t| = %.3e", best_rate)
    return best


def solve_scalar_steady(
    d: float,
    k: float,
    grid: Grid,
    init_strategy: InitStrategy = InitStrategy.SPIKE_ANSATZ,
    *,
    initial: Field | None = None,
    rtol: float = NEWTON_RTOL,
) -> Field:
    """
    Positive solution of ``0 = d lap w - w + w**k`` with Neumann conditions.

    The constant ``w = 1`` is always a solution; Newton may collapse onto it.
    That outcome is logged as a warning and returned, so callers check
    `oscillation` of the result.

    Parameters
    ----------

    d: float
        Diffusion parameter, > 0.

    k: float
        Exponent, > 1.

    grid: Grid
        Reference domain.

    init_strategy: InitStrategy
        ``spike_ansatz`` and ``gaussian_bump`` try a profile at the domain
        centre, then at the corner at the origin; ``parabolic_relax`` relaxes
        the centred spike before Newton; ``given`` starts from `initial`.

    initial: Field, optional
        Starting guess for ``given``.

    rtol: float
        Target of ``||F(w)|| / ||w||``.

    Raises
    ------

    SolverConvergenceError
        When no start converges.
    """
    _validate_parameters(d, k)
    init_strategy = InitStrategy(init_strategy)

    starts: list[np.ndarray]
    match init_strategy:
        case InitStrategy.GIVEN:
            if initial is None:
                error_msg = "Strategy 'given' needs an initial field"
                raise ValueError(error_msg)
            if initial.grid != grid:
                error_msg = f"Initial field lives on {initial.grid}, expected {grid}"
                raise ValueError(error_msg)
            if initial.min <= 0:
                error_msg = "Initial field must be positive"
                raise ValueError(error_msg)
            starts = [np.array(initial.values)]
        case InitStrategy.SPIKE_ANSATZ:
            starts = [spike_profile(grid, d, k, anchor) for anchor in _anchors(grid)]
        case InitStrategy.GAUSSIAN_BUMP:
            starts = [gaussian_bump(grid, d, anchor) for anchor in _anchors(grid)]
        case InitStrategy.PARABOLIC_RELAX:
            spike = spike_profile(grid, d, k, _anchors(grid)[0])
            starts = [parabolic_relax(grid, spike, d, k)]

    collapsed: np.ndarray | None = None
    failure: SolverConvergenceError | None = None
    for start in starts:
        try:
            w = newton(grid, start, d, k, rtol=rtol)
        except SolverConvergenceError as error:
            logger.debug("Newton start failed: %s", error)
            failure = error
            continue
        if _is_nonconstant(w):
            return Field(grid=grid, values=w)
        collapsed = w

    if collapsed is not None:
        logger.warning(
            "Newton collapsed onto a constant solution for d=%g, k=%g", d, k
        )
        return Field(grid=grid, values=collapsed)
    assert failure is not None  # noqa: S101
    raise failure


class SteadyProfile(BaseModel, Helpful):
    """
    Steady state of the power-motility system built from a scalar solution.

    ``v(x) = w(sqrt(d) x)`` on the stretched domain ``R * Omega0`` with
    ``R = 1 / sqrt(d)`` and ``u = v**k``. Stretching keeps the cell values, so
    `v` has the values of `w` on ``reference.scaled(R)``.
    """

    reference: Grid
    d: float = pydantic.Field(gt=0)
    k: float = pydantic.Field(gt=1)
    w: Field
    u: Field
    v: Field

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _validate_fields(self) -> Self:
        if self.w.grid != self.reference:
            error_msg = "w must live on the reference grid"
            raise ValueError(error_msg)
        if self.u.grid != self.v.grid or self.v.grid.cells != self.reference.cells:
            error_msg = "u and v must share the stretched grid"
            raise ValueError(error_msg)
        if self.w.min <= 0:
            error_msg = f"Steady profile must be positive, min(w)={self.w.min!r}"
            raise ValueError(error_msg)
        return self

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.d)

    @property
    def nonconstant(self) -> bool:
        return _is_nonconstant(self.w.values)

    @override
    def _help(self) -> Generator[str]:
        yield f"steady profile d={self.d:g}, k={self.k:g}"
        reference = self.reference
        yield f"  reference domain {reference.extent}, cells {reference.cells}"
        yield f"  stretched domain {self.v.grid.extent} (R={self.scale:.6g})"
        yield f"  max w = {self.w.max:.6g}, min w = {self.w.min:.6g}"
        yield f"  oscillation(w) = {oscillation(self.w):.6g}"
        if not self.nonconstant:
            yield "  constant solution (no pattern)"


def scale_to_pattern(w: Field, d: float, k: float) -> SteadyProfile:
    """Stretch `w` by ``1 / sqrt(d)`` and set ``v = w``, ``u = v**k`` cellwise."""
    _validate_parameters(d, k)
    stretched = w.grid.scaled(1.0 / math.sqrt(d))
    v = Field(grid=stretched, values=w.values)
    u = Field(grid=stretched, values=np.power(w.values, k))
    return SteadyProfile(reference=w.grid, d=d, k=k, w=w, u=u, v=v)


def verify_steady(
    profile: SteadyProfile, motility: MotilitySpec | MollifiedMotility
) -> tuple[float, float]:
    """
    Residuals of the steady system on the stretched grid.

    Returns
    -------

    tuple[float, float]
        ``r1 = ||lap_h(u gamma(v))||_2`` and ``r2 = ||lap_h v - v + u||_2``.

    Raises
    ------

    ValueError
        When `motility` is not the power family with exponent ``profile.k``.
    """
    if (
        not isinstance(motility, MotilitySpec)
        or motility.kind != MotilityKind.POWER
        or motility.k != profile.k
    ):
        error_msg = (
            f"Steady profile with k={profile.k:g} needs power motility with the "
            f"same exponent, got {motility.label}"
        )
        raise ValueError(error_msg)
    u, v = profile.u, profile.v
    flux = u.with_values(motility.flux(u.values, v.values))
    r1 = lp_norm(laplacian_neumann(flux), 2)
    r2 = lp_norm(
        v.with_values(v.grid.laplacian(v.values) - v.values + u.values), 2
    )
    return r1, r2


def continue_branch(
    w: Field,
    d_from: float,
    d_to: float,
    k: float,
    *,
    ratio: float = 1.1,
) -> list[tuple[float, Field]]:
    """
    Follow a solution from `d_from` to `d_to` in geometric steps of at most `ratio`.

    Each solve starts from the previous solution. The returned path starts
    with ``(d_from, w)``.
    """
    _validate_parameters(d_to, k)
    _validate_parameters(d_from, k)
    if not ratio > 1:
        error_msg = f"Continuation ratio must exceed 1, got {ratio}"
        raise ValueError(error_msg)
    count = max(1, math.ceil(abs(math.log(d_to / d_from)) / math.log(ratio)))
    path = [(d_from, w)]
    for d in np.geomspace(d_from, d_to, count + 1)[1:]:
        w = solve_scalar_steady(float(d), k, w.grid, InitStrategy.GIVEN, initial=w)
        path.append((float(d), w))
    return path


class ThresholdReport(BaseModel, Helpful):
    """Outcome of `locate_threshold`: bracket and every tested d."""

    k: float
    d0: float
    bracket: tuple[float, float]
    tested: list[tuple[float, bool]]

    @override
    def _help(self) -> Generator[str]:
        low, high = self.bracket
        yield f"pattern threshold for k={self.k:g}: d0 ~ {self.d0:.6g}"
        yield f"  bracket [{low:.6g}, {high:.6g}]"
        for d, nonconstant in sorted(self.tested):
            yield f"  d={d:.6g}: {'nonconstant' if nonconstant else 'constant'}"


def locate_threshold(
    k: float,
    grid: Grid,
    d_lo: float,
    d_hi: float = 1.0,
    *,
    rel_tol: float = 0.02,
    max_bisections: int = 40,
) -> ThresholdReport:
    """
    Geometric bisection for the largest d where Newton from a spike stays nonconstant.

    Raises
    ------

    ValueError
        When `d_lo` does not yield a pattern or `d_hi` does.
    """
    _validate_parameters(d_lo, k)
    if not d_hi > d_lo:
        error_msg = f"Need d_lo < d_hi, got [{d_lo}, {d_hi}]"
        raise ValueError(error_msg)
    tested: list[tuple[float, bool]] = []

    def _lands_nonconstant(d: float) -> bool:
        try:
            w = solve_scalar_steady(d, k, grid, InitStrategy.SPIKE_ANSATZ)
        except SolverConvergenceError:
            outcome = False
        else:
            outcome = _is_nonconstant(w.values)
        tested.append((d, outcome))
        logger.info("d=%g lands %s", d, "nonconstant" if outcome else "constant")
        return outcome

    if not _lands_nonconstant(d_lo):
        error_msg = f"No nonconstant solution at d_lo={d_lo}"
        raise ValueError(error_msg)
    if _lands_nonconstant(d_hi):
        error_msg = f"Solution still nonconstant at d_hi={d_hi}"
        raise ValueError(error_msg)

    low, high = d_lo, d_hi
    for _ in range(max_bisections):
        if high / low <= 1.0 + rel_tol:
            break
        middle = math.sqrt(low * high)
        if _lands_nonconstant(middle):
            low = middle
        else:
            high = middle
    report = ThresholdReport(
        k=k, d0=math.sqrt(low * high), bracket=(low, high), tested=tested
    )
    logger.info("%s", report.headline)
    return report


class SteadyBuilder:
    _d: float
    _k: float
    _grid: Grid
    _strategy: InitStrategy
    _initial: Field | None

    def __init__(self) -> None:
        self._d = 0.05
        self._k = 2.0
        self._grid = Grid.interval(1.0, 128)
        self._strategy = InitStrategy.SPIKE_ANSATZ
        self._initial = None

    def new(self, d: float, k: float) -> Self:
        self._d = d
        self._k = k
        return self

    def grid(self, grid: Grid) -> Self:
        self._grid = grid
        return self

    def strategy(self, strategy: InitStrategy, initial: Field | None = None) -> Self:
        self._strategy = InitStrategy(strategy)
        self._initial = initial
        return self

    def build(self) -> SteadyProfile:
        w = solve_scalar_steady(
            self._d, self._k, self._grid, self._strategy, initial=self._initial
        )
        return scale_to_pattern(w, self._d, self._k)
