"""Singular-arc and chattering analysis for affine optimal-control systems.

The heavy lifting lives in the C++ extension ``fullerlab._core``; this
package re-exports its public surface.
"""

from fullerlab._core import (
    Problem,
    analyze,
    fuller_classic,
    fuller_multi,
    hamiltonian_family,
    parity_oracle,
    poly_roundtrip,
    problem_from_json,
    simulate_extremal,
    simulate_feedback,
    time_optimal_di,
    __version__,
)

__all__ = [
    "Problem",
    "analyze",
    "fuller_classic",
    "fuller_multi",
    "hamiltonian_family",
    "parity_oracle",
    "poly_roundtrip",
    "problem_from_json",
    "simulate_extremal",
    "simulate_feedback",
    "time_optimal_di",
    "__version__",
]
