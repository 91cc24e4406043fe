"""Numerical steering of the ensemble average.

The ensemble ``dx/dt (t, s) = A(s) x(t, s) + B(s) u(t)`` over ``s in [0, 1]``
is discretised with a quadrature rule in ``s``.  The averaged input map

    Bbar(t) = sum_k w_k expm(A(s_k) t) B(s_k)

drives the average, ``xbar(T) = free(T) + int_0^T Bbar(T - t) u(t) dt``, so
the Gramian ``W = int_0^T Bbar(t) Bbar(t)^T dt`` yields the minimum-energy
control ``u(t) = Bbar(T - t)^T W^{-1} (target - free(T))``.  The synthesised
control is then fed to a fixed-step RK4 integration of every sampled system
and the achieved average is compared with the target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .poly import PolyMatrix

__all__ = [
    "EnsembleConfig",
    "SteeringResult",
    "SingularGramianError",
    "Control",
    "sigma_quadrature",
    "averaged_input_map",
    "synthesize_control",
    "simulate_average",
    "steer_average",
    "GRAMIAN_CONDITION_LIMIT",
]

log = logging.getLogger(__name__)

GRAMIAN_CONDITION_LIMIT = 1e12


class SingularGramianError(RuntimeError):
    """The averaged Gramian is numerically singular."""

    def __init__(self, condition: float):
        super().__init__(f"averaged Gramian is numerically singular (condition ~ {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class EnsembleConfig:
    a: PolyMatrix
    b: PolyMatrix
    samples: int = 201
    horizon: float = 1.0
    quadrature: str = "midpoint"
    time_steps: int = 40

    def __post_init__(self):
        n = self.a.rows
        if self.a.cols != n or self.b.rows != n:
            raise ValueError(f"need square A (n x n) and B (n x m); got {self.a.shape}, {self.b.shape}")
        if self.samples < 2:
            raise ValueError("need at least 2 sigma samples")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.time_steps < 1:
            raise ValueError("time_steps must be positive")
        if self.quadrature not in ("midpoint", "simpson"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        if self.quadrature == "simpson" and self.samples % 2 == 0:
            raise ValueError("Simpson's rule needs an odd number of samples")

    @property
    def n(self) -> int:
        return self.a.rows

    @property
    def m(self) -> int:
        return self.b.cols


@dataclass
class SteeringResult:
    achieved_average: np.ndarray
    target: np.ndarray
    relative_error: float
    gramian_condition: float
    control_energy: float

    def to_dict(self) -> dict:
        return {
            "achieved_average": self.achieved_average.tolist(),
            "target": self.target.tolist(),
            "relative_error": self.relative_error,
            "gramian_condition": self.gramian_condition,
            "control_energy": self.control_energy,
        }


def sigma_quadrature(samples: int, rule: str = "midpoint") -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    if rule == "midpoint":
        nodes = (np.arange(samples) + 0.5) / samples
        return nodes, np.full(samples, 1.0 / samples)
    if rule == "simpson":
        if samples % 2 == 0 or samples < 3:
            raise ValueError("Simpson's rule needs an odd number (>= 3) of samples")
        nodes = np.linspace(0.0, 1.0, samples)
        return nodes, _simpson_weights(samples, 1.0 / (samples - 1))
    raise ValueError(f"unknown quadrature {rule!r}")


def _simpson_weights(points: int, h: float) -> np.ndarray:
    w = np.ones(points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


class _Discretisation:
    """Sampled pair plus exponentials on the half-step time grid."""

    def __init__(self, cfg: EnsembleConfig):
        self.cfg = cfg
        self.sigmas, self.weights = sigma_quadrature(cfg.samples, cfg.quadrature)
        self.A = cfg.a.evaluate(self.sigmas)  # (M, n, n)
        self.B = cfg.b.evaluate(self.sigmas)  # (M, n, m)
        self.h = cfg.horizon / cfg.time_steps
        self.grid = np.linspace(0.0, cfg.horizon, 2 * cfg.time_steps + 1)
        half = expm(self.A * (self.h / 2))
        phi = np.empty((self.grid.size,) + self.A.shape)
        phi[0] = np.eye(cfg.n)
        for k in range(1, self.grid.size):
            phi[k] = half @ phi[k - 1]
        self.phi = phi  # phi[k, s] = expm(A(s) * t_k)
        self.bbar = np.einsum("s,ksij,sjl->kil", self.weights, phi, self.B)  # (K, n, m)
        self.time_weights = _simpson_weights(self.grid.size, self.h / 2)


def averaged_input_map(cfg: EnsembleConfig, t: float) -> np.ndarray:
    """``Bbar(t)``, an ``n x m`` array, at any ``0 <= t <= T``."""
    if not 0 <= t <= cfg.horizon:
        raise ValueError(f"t={t} outside [0, {cfg.horizon}]")
    sigmas, weights = sigma_quadrature(cfg.samples, cfg.quadrature)
    A = cfg.a.evaluate(sigmas)
    B = cfg.b.evaluate(sigmas)
    return np.einsum("s,sij,sjl->il", weights, expm(A * t), B)


@dataclass
class Control:
    """Control samples on the half-step grid ``t_k = k h / 2``."""

    times: np.ndarray
    values: np.ndarray  # (K, m)
    weights: np.ndarray  # Simpson weights on the grid
    gramian: np.ndarray
    gramian_condition: float

    @property
    def energy(self) -> float:
        return float(np.sum(self.weights * np.sum(self.values ** 2, axis=1)))


def _initial_states(disc: _Discretisation, x0_profile) -> np.ndarray:
    n = disc.cfg.n
    if x0_profile is None:
        return np.zeros((disc.sigmas.size, n))
    if callable(x0_profile):
        return np.array([np.asarray(x0_profile(s), dtype=float).reshape(n) for s in disc.sigmas])
    x0 = np.asarray(x0_profile, dtype=float)
    if x0.shape == (n,):
        return np.tile(x0, (disc.sigmas.size, 1))
    if x0.shape == (disc.sigmas.size, n):
        return x0
    raise ValueError(f"x0 must be a function, an {n}-vector or a ({disc.sigmas.size}, {n}) array")


def synthesize_control(cfg: EnsembleConfig, x0_profile, target,
                       _disc: _Discretisation | None = None) -> Control:
    """Minimum-energy control for the sampled ensemble average.

    Raises :class:`SingularGramianError` when the Gramian's condition number
    exceeds ``GRAMIAN_CONDITION_LIMIT``.
    """
    disc = _disc or _Discretisation(cfg)
    target = np.asarray(target, dtype=float).reshape(cfg.n)
    gram = np.einsum("k,kil,kjl->ij", disc.time_weights, disc.bbar, disc.bbar)
    cond = float(np.linalg.cond(gram))
    if not np.isfinite(cond) or cond > GRAMIAN_CONDITION_LIMIT:
        raise SingularGramianError(cond)
    x0 = _initial_states(disc, x0_profile)
    free = np.einsum("s,sij,sj->i", disc.weights, disc.phi[-1], x0)
    eta = np.linalg.solve(gram, target - free)
    values = np.einsum("kil,i->kl", disc.bbar[::-1], eta)
    log.debug("gramian condition %.3e", cond)
    return Control(disc.grid, values, disc.time_weights, gram, cond)


def simulate_average(cfg: EnsembleConfig, x0_profile, control: Control,
                     _disc: _Discretisation | None = None) -> np.ndarray:
    """RK4-integrate every sampled system under ``control``; return the average at T."""
    disc = _disc or _Discretisation(cfg)
    A, B, h = disc.A, disc.B, disc.h
    u = control.values
    x = _initial_states(disc, x0_profile)

    def f(x, uk):
        return np.einsum("sij,sj->si", A, x) + np.einsum("sil,l->si", B, uk)

    for step in range(cfg.time_steps):
        u0, u1, u2 = u[2 * step], u[2 * step + 1], u[2 * step + 2]
        k1 = f(x, u0)
        k2 = f(x + 0.5 * h * k1, u1)
        k3 = f(x + 0.5 * h * k2, u1)
        k4 = f(x + h * k3, u2)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return disc.weights @ x


def steer_average(cfg: EnsembleConfig, x0_profile: Callable | np.ndarray | None,
                  target) -> SteeringResult:
    """Synthesise the minimum-energy control and measure the achieved average."""
    disc = _Discretisation(cfg)
    target = np.asarray(target, dtype=float).reshape(cfg.n)
    control = synthesize_control(cfg, x0_profile, target, _disc=disc)
    achieved = simulate_average(cfg, x0_profile, control, _disc=disc)
    err = float(np.linalg.norm(achieved - target) / max(1.0, np.linalg.norm(target)))
    return SteeringResult(achieved, target, err, control.gramian_condition, control.energy)
