"""Birthday-problem theory behind similarity filtering, closed form and simulated.

Plotting needs matplotlib:
    from collision_kit.theory.convergence import plot_convergence
"""

from collision_kit.theory.birthday import (
    discrepancy_experiment,
    in_regime,
    monte_carlo,
    p_approx,
    p_clean,
    p_collision,
    p_exact,
    p_cross,
    p_mixed,
)
from collision_kit.theory.convergence import format_curves, js_convergence, plot_convergence
from collision_kit.theory.models import (
    BirthdayParams,
    ConvergenceCurves,
    DiscrepancyResult,
    MixedProbability,
    TheoryResult,
)

__all__ = [
    "BirthdayParams",
    "ConvergenceCurves",
    "DiscrepancyResult",
    "MixedProbability",
    "TheoryResult",
    "discrepancy_experiment",
    "format_curves",
    "in_regime",
    "js_convergence",
    "monte_carlo",
    "p_approx",
    "p_clean",
    "p_collision",
    "p_exact",
    "p_cross",
    "p_mixed",
    "plot_convergence",
]
