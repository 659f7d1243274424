from typing import Literal, Tuple

import numpy as np
from scipy import integrate, sparse, special
from scipy.sparse.linalg import splu

from app.core.logger import logger
from app.core.environment import settings
from app.api.exceptions import BracketException, ConvergenceException, DomainException
from app.domains.ground_state.model import RadialDiagnostics, RadialProfile, SolverMethod

# --- Renormalization constants ---
INITIAL_AMPLITUDE = 2.2
RENORMALIZATION_EXPONENT = 1.5
COLLAPSE_THRESHOLD = 1e-8

# --- Shooting constants ---
SHOOT_START = 1e-6
SHOOT_RTOL = 1e-12
SHOOT_ATOL = 1e-14
TRUST_GAP = 1e-9
MIN_TRUST_RADIUS = 3.0

Trajectory = Literal['overshoot', 'undershoot']


class GroundStateService:
    """
    Service computing the radial ground state of R'' + R'/r − R + R³ = 0.

    Two independent solvers are provided: a renormalization (Petviashvili-type) fixed point
    on a uniform finite-difference grid, and a bisection shooting method on R(0) used as an
    oracle for the first.
    """

    def __init__(self, max_iter: int = settings.MAX_RADIAL_ITER):
        """
        Initialize the service.

        Args:
            max_iter (int): Default iteration cap for the renormalization solver.
        """
        self._max_iter = max_iter

    # --- Renormalization solver ---
    def solve_radial(
        self,
        L: float,
        n_nodes: int,
        tol: float = settings.TOL_RADIAL,
        max_iter: int | None = None,
        richardson: bool = True
    ) -> RadialProfile:
        """
        Solve the radial equation with R'(0) = 0, R(3L/2) = 0 by spectral renormalization.

        Each level iterates R ← m^{3/2}·(−Δ_r + 1)⁻¹R³, m = ⟨(−Δ_r+1)R, R⟩ / ⟨R³, R⟩, on a
        uniform grid with second-order differences. With `richardson` the solve is repeated
        on the halved step and both levels are combined into a fourth-order profile.

        Args:
            L (float): Half-width of the 2D domain, L ≥ 10.
            n_nodes (int): Number of radial nodes including both ends, ≥ 200.
            tol (float): Tolerance on the dimensionless fixed-point residual.
            max_iter (int | None): Iteration cap per level. Defaults to the service setting.
            richardson (bool): Combine the h and h/2 levels. Defaults to True.

        Raises:
            DomainException: If the preconditions on L, n_nodes or tol fail.
            ConvergenceException: On non-convergence or collapse to the zero solution.

        Returns:
            RadialProfile: The converged profile.
        """
        if L < 10 or n_nodes < 200 or tol <= 0:
            raise DomainException(
                f'Invalid radial solve parameters: L={L}, n_nodes={n_nodes}, tol={tol}.',
                stage='ground_state'
            )
        max_iter = max_iter or self._max_iter
        r_max = 1.5 * L
        logger.info('Solving radial ground state: L=%s, n_nodes=%d, tol=%.1e, richardson=%s', L, n_nodes, tol, richardson)

        nodes = np.linspace(0.0, r_max, n_nodes)
        coarse, it_coarse, res_coarse = self._renormalize(n_nodes, r_max, tol, max_iter)
        deriv = np.gradient(coarse, nodes, edge_order=2)
        iterations, residual = it_coarse, res_coarse

        if richardson:
            fine_nodes = np.linspace(0.0, r_max, 2 * n_nodes - 1)
            fine, it_fine, res_fine = self._renormalize(2 * n_nodes - 1, r_max, tol, max_iter)
            fine_deriv = np.gradient(fine, fine_nodes, edge_order=2)
            values = (4.0 * fine[::2] - coarse) / 3.0
            deriv = (4.0 * fine_deriv[::2] - deriv) / 3.0
            iterations += it_fine
            residual = max(res_coarse, res_fine)
        else:
            values = coarse

        values[-1] = 0.0
        deriv[0] = 0.0
        profile = RadialProfile(
            L=L, r_max=r_max, nodes=nodes, values=values, deriv=deriv,
            method=SolverMethod.RENORMALIZATION, iterations=iterations, residual=residual
        )
        logger.info('Radial ground state converged: %r', profile)
        return profile

    def _renormalize(self, n: int, r_max: float, tol: float, max_iter: int) -> Tuple[np.ndarray, int, float]:
        """
        Run the renormalization fixed point on one uniform grid.

        Args:
            n (int): Number of nodes including r = 0 and r = r_max.
            r_max (float): Outer radius.
            tol (float): Residual tolerance.
            max_iter (int): Iteration cap.

        Raises:
            ConvergenceException: On collapse or when max_iter is exhausted.

        Returns:
            Tuple[np.ndarray, int, float]: Values on all n nodes, iteration count, final residual.
        """
        h = r_max / (n - 1)
        r = h * np.arange(n - 1)
        operator = _radial_operator(r, h)
        solver = splu(operator)
        weights = r * h
        weights[0] = h * h / 8.0

        R = INITIAL_AMPLITUDE * np.exp(-r ** 2)
        residual = np.inf
        for iteration in range(1, max_iter + 1):
            cubic = R ** 3
            update = solver.solve(cubic)
            denominator = weights @ (cubic * R)
            factor = (weights @ ((operator @ R) * R)) / denominator if denominator > 0 else 0.0

            if not np.isfinite(factor) or factor < COLLAPSE_THRESHOLD:
                logger.warning('Renormalization collapsed at iteration %d (factor=%s)', iteration, factor)
                raise ConvergenceException(
                    'Renormalization factor drifted to zero: iterate collapsed to the zero solution.',
                    details=[{'iteration': iteration, 'factor': float(factor)}]
                )

            residual = float(np.max(np.abs(R - update)) / np.max(np.abs(R)))
            R = factor ** RENORMALIZATION_EXPONENT * update
            logger.debug('Renormalization iteration %d: residual=%.3e, factor=%.12f', iteration, residual, factor)

            if residual <= tol:
                return np.append(R, 0.0), iteration, residual

        logger.warning('Renormalization did not converge after %d iterations (residual=%.3e)', max_iter, residual)
        raise ConvergenceException(
            f'Renormalization did not converge after {max_iter} iterations.',
            details=[{'residual': residual, 'n_nodes': n}]
        )

    # --- Shooting oracle ---
    def shoot_radial(
        self,
        L: float,
        amp_lo: float = 1.0,
        amp_hi: float = 4.0,
        tol: float = 1e-12,
        n_nodes: int = 2000
    ) -> RadialProfile:
        """
        Compute the profile by bisection on R(0), integrating outward with DOP853.

        A trajectory overshoots when R crosses zero and undershoots when R' turns positive
        while R > 0. Once the bracket is narrower than `tol`, the bracketing pair is averaged
        while the two agree to 1e−9; beyond that radius the profile continues with the linear
        tail C·(K₀(r) − K₀(r_max)/I₀(r_max)·I₀(r)), which vanishes at r_max.

        Args:
            L (float): Half-width of the 2D domain; r_max = 3L/2.
            amp_lo (float): Lower amplitude, must undershoot. Defaults to 1.
            amp_hi (float): Upper amplitude, must overshoot. Defaults to 4.
            tol (float): Final bracket width. Defaults to 1e−12.
            n_nodes (int): Number of uniform output nodes. Defaults to 2000.

        Raises:
            BracketException: If the bracket does not straddle the separatrix.
            ConvergenceException: If the trusted region of the trajectories is too short.

        Returns:
            RadialProfile: The oracle profile.
        """
        r_max = 1.5 * L
        logger.info('Shooting radial ground state: L=%s, bracket=(%s, %s), tol=%.1e', L, amp_lo, amp_hi, tol)

        lo_kind, _ = self._classify(amp_lo, r_max)
        hi_kind, _ = self._classify(amp_hi, r_max)
        if lo_kind != 'undershoot' or hi_kind != 'overshoot':
            logger.warning('Invalid shooting bracket (%s, %s): %s / %s', amp_lo, amp_hi, lo_kind, hi_kind)
            raise BracketException(amp_lo, amp_hi, lo_kind, hi_kind)

        steps = 0
        while amp_hi - amp_lo > tol and steps < 200:
            middle = 0.5 * (amp_lo + amp_hi)
            kind, _ = self._classify(middle, r_max)
            if kind == 'overshoot':
                amp_hi = middle
            else:
                amp_lo = middle
            steps += 1
        logger.debug('Bisection finished after %d steps: bracket=(%.16f, %.16f)', steps, amp_lo, amp_hi)

        nodes = np.linspace(0.0, r_max, n_nodes)
        values, deriv = self._assemble_profile(nodes, amp_lo, amp_hi, r_max)
        amplitude = 0.5 * (amp_lo + amp_hi)
        profile = RadialProfile(
            L=L, r_max=r_max, nodes=nodes, values=values, deriv=deriv, method=SolverMethod.SHOOTING,
            iterations=steps, residual=(amp_hi - amp_lo) / amplitude
        )
        logger.info('Shooting oracle finished: %r', profile)
        return profile

    def _integrate(self, amplitude: float, r_max: float):
        """
        Integrate the radial equation from the axis with a series start.

        Args:
            amplitude (float): Initial value R(0).
            r_max (float): Integration end.

        Returns:
            OdeResult: solve_ivp result with dense output and event records.
        """
        curvature = (amplitude - amplitude ** 3) / 4.0
        start = [amplitude + curvature * SHOOT_START ** 2, 2.0 * curvature * SHOOT_START]
        return integrate.solve_ivp(
            _radial_rhs, (SHOOT_START, r_max), start, method='DOP853',
            rtol=SHOOT_RTOL, atol=SHOOT_ATOL, events=(_crossed_zero, _turned_up), dense_output=True
        )

    def _classify(self, amplitude: float, r_max: float) -> Tuple[Trajectory, object]:
        """
        Classify the trajectory started at `amplitude`.

        Args:
            amplitude (float): Initial value R(0).
            r_max (float): Integration end.

        Returns:
            Tuple[Trajectory, object]: Classification and the integration result.
        """
        solution = self._integrate(amplitude, r_max)
        if solution.t_events[0].size:
            return 'overshoot', solution
        if solution.t_events[1].size:
            return 'undershoot', solution
        return ('undershoot' if solution.y[0, -1] > 0 else 'overshoot'), solution

    def _assemble_profile(self, nodes: np.ndarray, amp_lo: float, amp_hi: float, r_max: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Build values and derivatives on `nodes` from the final bracketing trajectories.

        Args:
            nodes (np.ndarray): Output radii.
            amp_lo (float): Undershooting amplitude.
            amp_hi (float): Overshooting amplitude.
            r_max (float): Outer radius.

        Raises:
            ConvergenceException: If the trajectories separate before MIN_TRUST_RADIUS.

        Returns:
            Tuple[np.ndarray, np.ndarray]: Values and derivatives.
        """
        lower = self._integrate(amp_lo, r_max)
        upper = self._integrate(amp_hi, r_max)
        reach = min(lower.t[-1], upper.t[-1])

        inside = (nodes >= SHOOT_START) & (nodes <= reach)
        lower_state = lower.sol(nodes[inside])
        upper_state = upper.sol(nodes[inside])
        gap = np.abs(lower_state[0] - upper_state[0])
        separated = np.flatnonzero(gap > TRUST_GAP)
        trusted = inside.nonzero()[0][: separated[0] if separated.size else gap.size]
        if trusted.size == 0 or nodes[trusted[-1]] < MIN_TRUST_RADIUS:
            raise ConvergenceException(
                'Shooting trajectories separate too early to build a profile.',
                details=[{'reach': float(reach)}]
            )

        values = np.zeros_like(nodes)
        deriv = np.zeros_like(nodes)
        values[0] = 0.5 * (amp_lo + amp_hi)
        count = trusted.size
        values[trusted] = 0.5 * (lower_state[0][:count] + upper_state[0][:count])
        deriv[trusted] = 0.5 * (lower_state[1][:count] + upper_state[1][:count])

        # --- Linear tail with R(r_max) = 0 ---
        match = trusted[-1]
        beta = special.k0(r_max) / special.i0(r_max)
        tail = np.arange(match + 1, nodes.size)
        scale = values[match] / (special.k0(nodes[match]) - beta * special.i0(nodes[match]))
        values[tail] = scale * (special.k0(nodes[tail]) - beta * special.i0(nodes[tail]))
        deriv[tail] = scale * (-special.k1(nodes[tail]) - beta * special.i1(nodes[tail]))
        values[-1] = 0.0
        logger.debug('Shooting profile trusted up to r=%.3f, tail scale=%.6e', nodes[match], scale)
        return values, deriv

    # --- Diagnostics ---
    def radial_diagnostics(self, profile: RadialProfile) -> RadialDiagnostics:
        """
        Evaluate mass, gradient, L⁴ and energy integrals of Q with the 2πr measure.

        Args:
            profile (RadialProfile): A converged profile.

        Returns:
            RadialDiagnostics: The integral functionals.
        """
        r = profile.nodes
        measure = 2.0 * np.pi * r
        mass = integrate.simpson(profile.values ** 2 * measure, x=r)
        grad_sq = integrate.simpson(profile.deriv ** 2 * measure, x=r)
        l4_4 = integrate.simpson(profile.values ** 4 * measure, x=r)
        diagnostics = RadialDiagnostics(
            mass=float(mass), grad_sq=float(grad_sq), l4_4=float(l4_4),
            energy=float(0.5 * grad_sq - 0.25 * l4_4)
        )
        logger.info(
            'Radial diagnostics: mass=%.8f, grad_sq=%.8f, l4_4=%.8f, energy=%.3e',
            diagnostics.mass, diagnostics.grad_sq, diagnostics.l4_4, diagnostics.energy
        )
        return diagnostics


# --- Discretization helpers ---
def _radial_operator(r: np.ndarray, h: float) -> sparse.csc_matrix:
    """
    Second-order discretization of −R'' − R'/r + R on the unknowns R_0..R_{n−2}.

    The axis row uses the symmetric limit R''(0) + R'/r → 2R''(0); the last unknown couples
    to the homogeneous Dirichlet value at r_max.

    Args:
        r (np.ndarray): Radii of the unknowns, r[0] = 0.
        h (float): Uniform step.

    Returns:
        sparse.csc_matrix: Tridiagonal operator matrix.
    """
    size = r.size
    inv_h2 = 1.0 / (h * h)
    main = np.full(size, 2.0 * inv_h2 + 1.0)
    main[0] = 4.0 * inv_h2 + 1.0
    with np.errstate(divide='ignore'):
        drift = np.where(r > 0, 1.0 / (2.0 * np.where(r > 0, r, 1.0) * h), 0.0)
    lower = -(inv_h2 - drift[1:])
    upper = -(inv_h2 + drift[:-1])
    upper[0] = -4.0 * inv_h2
    return sparse.diags([lower, main, upper], [-1, 0, 1], format='csc')


def _radial_rhs(r: float, state: np.ndarray) -> list:
    R, S = state
    return [S, -S / r + R - R ** 3]


def _crossed_zero(r: float, state: np.ndarray) -> float:
    return state[0]


def _turned_up(r: float, state: np.ndarray) -> float:
    return state[1]


_crossed_zero.terminal = True  # type: ignore[attr-defined]
_crossed_zero.direction = -1  # type: ignore[attr-defined]
_turned_up.terminal = True  # type: ignore[attr-defined]
_turned_up.direction = 1  # type: ignore[attr-defined]
