"""Fractional heat operator laboratory.

Thin python surface over the C++ core: the space-time multiplier and its
subordination twin, the degenerate extension solve with Neumann recovery,
Gaussian frequency functionals, rescaling fits, and the scenario runner.
"""

try:
    from ._fhlab import (  # noqa: F401
        Extension,
        Field,
        FracConfig,
        __version__,
        balakrishnan_symbol,
        blowup_fit,
        frac_heat_balakrishnan,
        frac_heat_multiplier,
        frequency_curve,
        gamma,
        macdonald_k,
        manufactured_potential,
        neumann_trace,
        parabolic_sobolev_norm,
        phi,
        poisson_check,
        principal_l,
        run_config,
        vanishing_order,
    )
except ImportError:  # build-tree layout: the module sits next to the package
    from _fhlab import (  # noqa: F401
        Extension,
        Field,
        FracConfig,
        __version__,
        balakrishnan_symbol,
        blowup_fit,
        frac_heat_balakrishnan,
        frac_heat_multiplier,
        frequency_curve,
        gamma,
        macdonald_k,
        manufactured_potential,
        neumann_trace,
        parabolic_sobolev_norm,
        phi,
        poisson_check,
        principal_l,
        run_config,
        vanishing_order,
    )

__all__ = [
    "Extension",
    "Field",
    "FracConfig",
    "__version__",
    "balakrishnan_symbol",
    "blowup_fit",
    "frac_heat_balakrishnan",
    "frac_heat_multiplier",
    "frequency_curve",
    "gamma",
    "macdonald_k",
    "manufactured_potential",
    "neumann_trace",
    "parabolic_sobolev_norm",
    "phi",
    "poisson_check",
    "principal_l",
    "run_config",
    "vanishing_order",
]
