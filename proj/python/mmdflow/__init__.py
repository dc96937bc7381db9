"""Wasserstein gradient flows of the energy distance on the real line.

Quantile grids are plain one-dimensional numpy arrays sampled at the cell
midpoints (i + 1/2) / n. Measures and targets can be given as objects or as
expression strings such as ``"gaussian(0, 1)"``.
"""

from ._core import (
    AtomicTargetError,
    ConfigError,
    DimensionMismatch,
    DiscontinuityPoint,
    DomainError,
    Error,
    Measure,
    MonotonicityError,
    NotDiscreteTarget,
    NumericalError,
    Target,
    Trajectory,
    check_trajectory,
    closed_form_discrete,
    explicit_euler_step,
    functional_F,
    implicit_euler_step,
    kernel_self_term,
    mmd_squared,
    pointwise_ode_solve,
    presets,
    run_flow,
    run_spec,
    w2_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
