"""Holstein-Primakoff / Bogoliubov pipeline for the biaxial LMG model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, StabilityError
from .model import BiaxialParams, PhaseResult, RotationFrame
from .series import geometric_phase_series, tanh_from_epsilon

EPS_SLACK = 1e-12


@dataclass(frozen=True)
class BosonCoefficients:
    """Quadratic boson Hamiltonian N e + delta a'a + gamma_coef (a'^2 + a^2)."""

    e: float
    delta: float
    gamma_coef: float


@dataclass(frozen=True)
class SqueezeSolution:
    """Bogoliubov data for tanh 2x = epsilon.

    ``delta_d`` is the coefficient of b'b after the transformation. It is not
    necessarily the true excitation gap of the finite system.
    """

    epsilon: float
    t_sq: float
    tanh_x: float
    sigma: float
    delta_d: float


def rotation_angle(h) -> RotationFrame:
    h = float(h)
    if not h > 0.0:
        raise DomainError("h", h, "field must be positive")
    return RotationFrame(0.0 if h >= 1.0 else math.acos(h))


def hp_coefficients(params: BiaxialParams, frame: RotationFrame) -> BosonCoefficients:
    s2 = math.sin(frame.theta) ** 2
    c = math.cos(frame.theta)
    g, h = params.gamma, params.h
    return BosonCoefficients(
        e=-(s2 + 2.0 * h * c) / 4.0,
        delta=s2 - (g + c * c) / 2.0 + h * c,
        gamma_coef=(g - c * c) / 4.0,
    )


def squeeze_from_ratio(epsilon, one_minus_eps_sq, delta, where="") -> SqueezeSolution:
    """Assemble a SqueezeSolution; tolerates |epsilon| up to 1 + 1e-12."""
    if abs(epsilon) > 1.0 + EPS_SLACK:
        raise StabilityError(f"|epsilon| = {abs(epsilon):.17g} > 1 {where}".rstrip())
    epsilon = max(-1.0, min(1.0, epsilon))
    root = math.sqrt(max(one_minus_eps_sq, 0.0))
    t = tanh_from_epsilon(epsilon, one_minus_eps_sq)
    return SqueezeSolution(
        epsilon=epsilon,
        t_sq=t * t,
        tanh_x=t,
        sigma=delta * (root - 1.0) / 2.0,
        delta_d=delta * root,
    )


def epsilon_biaxial(params: BiaxialParams) -> SqueezeSolution:
    """epsilon = 2 Gamma / Delta from the closed-form branches.

    1 - epsilon^2 is factored per branch so t^2 -> 1 is resolved exactly at
    h = 1. On the critical line itself epsilon = -1 for every gamma; for
    gamma = 1 this is the value continued along h = 1 from gamma < 1.
    """
    g, h = params.gamma, params.h
    coef = hp_coefficients(params, rotation_angle(h))
    if h == 1.0:
        eps, one_minus = -1.0, 0.0
    elif h > 1.0:
        den = 2.0 * h - 1.0 - g
        eps = -(1.0 - g) / den
        one_minus = 4.0 * (h - 1.0) * (h - g) / (den * den)
    else:
        den = 2.0 - h * h - g
        eps = -(h * h - g) / den
        one_minus = 4.0 * (1.0 - h) * (1.0 + h) * (1.0 - g) / (den * den)
    return squeeze_from_ratio(
        eps, one_minus, coef.delta, where=f"at gamma={g!r}, h={h!r}"
    )


def biaxial_phase(params: BiaxialParams, truncation=None) -> PhaseResult:
    m = params.truncation if truncation is None else truncation
    return geometric_phase_series(epsilon_biaxial(params).t_sq, m)
