"""Monte Carlo simulator and analytic reference tables for the correlations
two independent quantum sources imprint on a pair of detectors.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its functions unchanged.
"""

from ._core import (
    __version__,
    hbt_correlation,
    joint_total,
    matrix_element,
    mixed_noise_variance,
    run_experiment,
    selftest,
    singlet_expectation,
    singlet_single_expectation,
    spectral_decompose,
    spin_flip_probability,
    spin_flow_mean,
    spin_gamma,
    spin_operator,
    spin_pair_corr,
    spin_pair_total,
    spin_pair_uncorr,
    two_particle_expectation,
)

__all__ = [
    "__version__",
    "hbt_correlation",
    "joint_total",
    "matrix_element",
    "mixed_noise_variance",
    "run_experiment",
    "selftest",
    "singlet_expectation",
    "singlet_single_expectation",
    "spectral_decompose",
    "spin_flip_probability",
    "spin_flow_mean",
    "spin_gamma",
    "spin_operator",
    "spin_pair_corr",
    "spin_pair_total",
    "spin_pair_uncorr",
    "two_particle_expectation",
]
