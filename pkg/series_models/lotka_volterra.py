"""
Lotka-Volterra predator-prey dynamics with fixed-step RK4.

    dx1/dt = theta1 * x1 - x1 * x2
    dx2/dt = theta2 * x1 * x2 - x2

States are integrated column-wise so a whole batch of parameter draws
advances in one vectorised loop.
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from utils.exceptions import DomainError, IntegrationError
from utils.rng import make_generator

from .regions import get_region
from .types import LvConfig, SeriesSource, TimeSeries

logger = logging.getLogger(__name__)

STATE_BOUND = 1e6
SIMULATION_MODES = ("deterministic", "noise_matched")


def rk4_integrate(
    rhs: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    t_end: float,
    n_points: int,
    step: float,
    guard: Optional[Callable[[np.ndarray], np.ndarray]] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Classical fourth-order Runge-Kutta on an evenly spaced observation grid.

    Args:
        rhs: Autonomous right-hand side, maps a state array to its derivative
        x0: Initial state, shape (d,) or (d, batch)
        t_end: Final time
        n_points: Number of observation times i * t_end / n_points, i = 1..n_points
        step: Integration step; must divide the observation spacing
        guard: Optional check returning a boolean per batch column; failing
            columns are set to NaN and stay NaN

    Returns:
        (times, path) with path of shape (n_points,) + x0.shape
    """
    spacing = t_end / n_points
    substeps = int(round(spacing / step))
    if substeps < 1 or abs(substeps * step - spacing) > 1e-9 * max(1.0, spacing):
        raise DomainError(f"Step {step} does not divide the observation spacing {spacing}")
    h = spacing / substeps

    x = np.array(x0, dtype=float)
    path = np.empty((n_points,) + x.shape)
    # blown-up draws overflow on their way to NaN
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_points):
            for _ in range(substeps):
                k1 = rhs(x)
                k2 = rhs(x + 0.5 * h * k1)
                k3 = rhs(x + 0.5 * h * k2)
                k4 = rhs(x + h * k3)
                x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if guard is not None:
                bad = ~guard(x)
                if np.any(bad):
                    x[..., bad] = np.nan
            path[i] = x
    times = spacing * np.arange(1, n_points + 1)
    return times, path


def lv_rhs(theta1: np.ndarray, theta2: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Right-hand side for states of shape (2, batch)."""
    def rhs(x: np.ndarray) -> np.ndarray:
        prey, predator = x[0], x[1]
        interaction = prey * predator
        return np.stack([theta1 * prey - interaction, theta2 * interaction - predator])
    return rhs


def _within_bounds(x: np.ndarray) -> np.ndarray:
    return np.all((x >= 0.0) & (x <= STATE_BOUND), axis=0)


def integrate_lv_batch(thetas: np.ndarray, config: LvConfig) -> np.ndarray:
    """
    Noiseless LV paths for a batch of parameters.

    Args:
        thetas: Array of shape (B, 2)
        config: Integration settings (its own theta is ignored)

    Returns:
        Array of shape (B, n_points, 2); rows of draws that left
        [0, 1e6]^2 are NaN from the first offending observation time on
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    x0 = np.repeat(np.asarray(config.x0, dtype=float)[:, None], thetas.shape[0], axis=1)
    _, path = rk4_integrate(
        lv_rhs(thetas[:, 0], thetas[:, 1]), x0, config.t_end, config.n_points, config.step,
        guard=_within_bounds
    )
    blown = np.isnan(path).any(axis=(0, 1))
    if blown.any():
        logger.debug(f"{int(blown.sum())} of {thetas.shape[0]} LV draws left the admissible state box")
    return np.transpose(path, (2, 0, 1))


def integrate_lv(config: LvConfig) -> TimeSeries:
    """
    Noiseless state path x(t_i) of the LV system at the configured theta.

    Raises:
        DomainError: If theta is not strictly positive
        IntegrationError: If the state leaves [0, 1e6]^2
    """
    theta = get_region("lv").validate(config.theta)
    path = integrate_lv_batch(theta[None, :], config)[0]
    if np.isnan(path).any():
        logger.error(f"LV integration at theta={theta.tolist()} left the admissible state box")
        raise IntegrationError(f"LV state left [0, {STATE_BOUND:g}]^2 at theta={theta.tolist()}")
    return TimeSeries(path, SeriesSource("simulated", config.theta, None), times=config.observation_times())


def simulate_lv_observations(config: LvConfig, mode: str, seed: int) -> TimeSeries:
    """
    LV observations in one of the two simulation schemes.

    Args:
        config: Integration settings, theta and measurement noise
        mode: "noise_matched" adds N(0, diag(noise_sd^2)) to the path,
            "deterministic" returns the raw path
        seed: Seed of the measurement noise

    Raises:
        DomainError: On an unknown mode
        IntegrationError: As integrate_lv
    """
    if mode not in SIMULATION_MODES:
        raise DomainError(f"Unknown LV simulation mode: {mode}")
    clean = integrate_lv(config)
    observations = np.array(clean.observations)
    if mode == "noise_matched":
        observations = observations + config.noise.draw(make_generator(seed), config.n_points)
    return TimeSeries(observations, SeriesSource("simulated", config.theta, seed), times=clean.times)
