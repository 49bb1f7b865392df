"""Validated parameter types and the result record of a phase evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class BiaxialParams:
    """H = -(Sx^2 + gamma Sy^2)/N - h Sz."""

    gamma: float
    h: float
    n_particles: int

    @property
    def truncation(self) -> int:
        return self.n_particles // 2


@dataclass(frozen=True)
class UniaxialParams:
    """H = -Sx^2/N - h_x Sx - h_z Sz."""

    h_x: float
    h_z: float
    n_particles: int

    @property
    def truncation(self) -> int:
        return self.n_particles // 2


@dataclass(frozen=True)
class RotationFrame:
    """Rotation about y that aligns the quantization axis with the
    semiclassical magnetization."""

    theta: float


@dataclass(frozen=True)
class PhaseResult:
    phi_g: float
    n_mean: float
    truncation_m: int


def _finite(field, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(field, value, "not a number") from None
    if not math.isfinite(value):
        raise DomainError(field, value, "must be finite")
    return value


def _count(value):
    if isinstance(value, bool):
        raise DomainError("n_particles", value, "must be an integer")
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise DomainError("n_particles", value, "must be an integer") from None
    if not math.isfinite(as_float) or as_float != int(as_float):
        raise DomainError("n_particles", value, "must be an integer")
    n = int(as_float)
    if n < 2:
        raise DomainError("n_particles", value, "need at least 2 spins")
    return n


def validate_biaxial(gamma, h, n_particles) -> BiaxialParams:
    gamma = _finite("gamma", gamma)
    h = _finite("h", h)
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma", gamma, "anisotropy must lie in [0, 1]")
    if h <= 0.0:
        raise DomainError("h", h, "field must be positive")
    return BiaxialParams(gamma, h, _count(n_particles))


def validate_uniaxial(h_x, h_z, n_particles) -> UniaxialParams:
    h_x = _finite("h_x", h_x)
    h_z = _finite("h_z", h_z)
    if h_z <= 0.0:
        raise DomainError("h_z", h_z, "longitudinal field must be positive")
    return UniaxialParams(h_x, h_z, _count(n_particles))
