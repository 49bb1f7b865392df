"""Displaced Holstein-Primakoff pipeline for the uniaxial model
H = -Sx^2/N - h_x Sx - h_z Sz.

The boson is shifted by sqrt(N) lambda so that the expansion is taken about
the classical spin direction. lambda0 must cancel the term linear in b; its
square is recovered from the quartic

    q(y) = (h_z - y)^2 (1 - y^2) - h_x^2 y^2,   y = 1 - 2 lambda^2,

whose real roots on [-1, 1] are located by bracketing and bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .biaxial import SqueezeSolution, squeeze_from_ratio
from .errors import NoRootError
from .model import PhaseResult, UniaxialParams
from .series import geometric_phase_series

SCAN_CELLS = 10_000
BISECT_TOL = 1e-14
RESIDUAL_TOL = 1e-9
# |q| at a stationary point of q below which it is treated as a double root
TOUCH_TOL = 1e-20


@dataclass(frozen=True)
class DisplacementSolution:
    lambda0: float
    y: float
    e0: float
    omega: float
    gamma_coef: float
    delta: float


def _hx_term(h_x, value):
    # h_x * value with 0 * inf -> 0 at |lambda| = 1
    return 0.0 if h_x == 0.0 else h_x * value


def omega_reduced(lam, h_x, h_z):
    """Omega(lambda)/sqrt(N): coefficient of the linear term."""
    one = 1.0 - lam * lam
    shift = _hx_term(h_x, (1.0 - 2.0 * lam * lam) / (2.0 * math.sqrt(one)) if one > 0 else math.inf)
    return lam * h_z - shift - lam * (1.0 - 2.0 * lam * lam)


def energy_density(lam, h_x, h_z):
    """Order-N part of e0(lambda), divided by N (classical energy per spin)."""
    l2 = lam * lam
    return -(h_z * (1.0 - 2.0 * l2) / 2.0 + l2 * (1.0 - l2)
             + h_x * lam * math.sqrt(max(1.0 - l2, 0.0)))


def gamma_coefficient(lam, h_x):
    l2 = lam * lam
    return -(1.0 - 5.0 * l2) / 4.0 + h_x * lam * (2.0 - l2) / (8.0 * (1.0 - l2) ** 1.5)


def delta_coefficient(lam, h_x, h_z):
    l2 = lam * lam
    return h_z - (1.0 - 7.0 * l2) / 2.0 + h_x * lam * (4.0 - 3.0 * l2) / (4.0 * (1.0 - l2) ** 1.5)


def ground_energy(lam, h_x, h_z, n_particles):
    """e0 including the order-N^0 corrections."""
    l2 = lam * lam
    return (n_particles * energy_density(lam, h_x, h_z)
            - (0.25 - l2)
            - h_x * lam * (2.0 - l2) / (8.0 * (1.0 - l2) ** 1.5))


def quartic(y, h_x, h_z):
    """q(y) in factored form; the expanded polynomial loses the near-double
    roots at small h_x to cancellation."""
    return (h_z - y) ** 2 * (1.0 - y * y) - (h_x * y) ** 2


def quartic_slope(y, h_x, h_z):
    return -2.0 * (h_z - y) * ((1.0 - y * y) + y * (h_z - y)) - 2.0 * h_x * h_x * y


def omega_slope(lam, h_x, h_z):
    """d(Omega/sqrt(N))/d lambda."""
    l2 = lam * lam
    return (h_z - 1.0 + 6.0 * l2
            - h_x * lam * (2.0 * l2 - 3.0) / (2.0 * (1.0 - l2) ** 1.5))


def _bisect(f, a, b, fa):
    while b - a > BISECT_TOL:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _sign_change_roots(f, grid):
    values = f(grid)
    roots = list(grid[values == 0.0])
    for i in np.nonzero(values[:-1] * values[1:] < 0.0)[0]:
        roots.append(_bisect(f, grid[i], grid[i + 1], values[i]))
    return sorted(roots)


def quartic_roots(h_x, h_z):
    """All real roots of q on [-1, 1], double roots included once."""
    def q(y):
        return quartic(y, h_x, h_z)

    def dq(y):
        return quartic_slope(y, h_x, h_z)

    grid = np.linspace(-1.0, 1.0, SCAN_CELLS + 1)
    # split [-1, 1] at the stationary points of q; q is monotone on each piece
    stationary = [s for s in _sign_change_roots(dq, grid) if -1.0 < s < 1.0]
    edges = [-1.0, *stationary, 1.0]
    roots = []
    for a, b in zip(edges[:-1], edges[1:]):
        fa, fb = q(a), q(b)
        if fa == 0.0:
            roots.append(a)
        if fa * fb < 0.0:
            roots.append(_bisect(q, a, b, fa))
    if q(1.0) == 0.0:
        roots.append(1.0)
    roots.extend(s for s in stationary if abs(q(s)) <= TOUCH_TOL)

    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > 1e-12:
            out.append(float(r))
    return out


def _polish(lam, h_x, h_z):
    """Newton steps on Omega(lambda) = 0 from a quartic-derived estimate.

    y carries lambda only through lambda^2, so roots with |lambda| below
    ~1e-8 are not resolved by y alone.
    """
    for _ in range(50):
        if not abs(lam) < 1.0:
            return None
        f = omega_reduced(lam, h_x, h_z)
        if f == 0.0:
            break
        slope = omega_slope(lam, h_x, h_z)
        if slope == 0.0 or not math.isfinite(slope):
            break
        step = f / slope
        lam -= step
        if abs(step) <= 1e-16 * max(1.0, abs(lam)):
            break
    if not abs(lam) < 1.0:
        return None
    return lam


def _lambda_candidates(y, h_x, h_z):
    """Signed lambda values for quartic root y that zero the linear term."""
    seed = math.sqrt(max((1.0 - y) / 2.0, 0.0))
    found = []
    for start in ((seed, -seed) if seed > 0.0 else (0.0,)):
        if abs(start) >= 1.0:
            # |lambda| = 1: the displacement expansion is singular there
            continue
        lam = _polish(start, h_x, h_z)
        if lam is None or abs(lam - start) > 1e-6:
            continue
        if abs(omega_reduced(lam, h_x, h_z)) <= RESIDUAL_TOL:
            if not any(abs(lam - other) <= 1e-12 for other in found):
                found.append(lam)
    return found


def lambda_roots(h_x, h_z):
    """Roots y of the quartic that satisfy the untransformed stationarity
    condition for lambda = +sqrt((1-y)/2) or its negation.

    Each y is recomputed from the Newton-polished lambda; sorted ascending.
    """
    ys = sorted({1.0 - 2.0 * lam * lam
                 for y in quartic_roots(h_x, h_z)
                 for lam in _lambda_candidates(y, h_x, h_z)})
    if not ys:
        raise NoRootError(f"no stationary displacement for h_x={h_x!r}, h_z={h_z!r}")
    out = []
    for y in ys:
        if not out or y - out[-1] > 1e-12:
            out.append(y)
    return out


def select_lambda0(candidates, h_x, h_z, n_particles) -> DisplacementSolution:
    """Pick the admissible displacement of lowest order-N energy.

    lambda0 takes the sign of h_x (non-negative at h_x = 0).
    """
    pairs = [(y, lam) for y in candidates for lam in _lambda_candidates(y, h_x, h_z)]
    preferred = [p for p in pairs if (p[1] >= 0.0 if h_x >= 0.0 else p[1] <= 0.0)]
    pool = preferred or pairs
    if not pool:
        raise NoRootError(f"no admissible |lambda0| < 1 for h_x={h_x!r}, h_z={h_z!r}")
    y, lam = min(pool, key=lambda p: (energy_density(p[1], h_x, h_z), -abs(p[1])))
    return DisplacementSolution(
        lambda0=lam,
        y=1.0 - 2.0 * lam * lam,
        e0=ground_energy(lam, h_x, h_z, n_particles),
        omega=math.sqrt(n_particles) * omega_reduced(lam, h_x, h_z),
        gamma_coef=gamma_coefficient(lam, h_x),
        delta=delta_coefficient(lam, h_x, h_z),
    )


def displacement(params: UniaxialParams) -> DisplacementSolution:
    return select_lambda0(lambda_roots(params.h_x, params.h_z),
                          params.h_x, params.h_z, params.n_particles)


def epsilon_uniaxial(params: UniaxialParams, solution=None) -> SqueezeSolution:
    sol = displacement(params) if solution is None else solution
    gam, delta = sol.gamma_coef, sol.delta
    eps = 2.0 * gam / delta
    one_minus = (delta - 2.0 * gam) * (delta + 2.0 * gam) / (delta * delta)
    return squeeze_from_ratio(
        eps, one_minus, delta, where=f"at h_x={params.h_x!r}, h_z={params.h_z!r}"
    )


def uniaxial_phase(params: UniaxialParams, truncation=None) -> PhaseResult:
    m = params.truncation if truncation is None else truncation
    return geometric_phase_series(epsilon_uniaxial(params).t_sq, m)
