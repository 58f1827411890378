"""Training run summaries shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SolverReport:
    """What a training run did: objective trace, convergence, and counters.

    ``objective_trace`` holds the dual objective per epoch for the kernel
    solver (when diagnostics are affordable) and the primal objective of
    the averaged iterate per epoch for the linear solver.  ``loo_bound``
    is populated by the kernel solver only.
    """

    objective_trace: list[float] = field(default_factory=list)
    converged: bool = False
    epochs: int = 0
    steps: int = 0
    kkt_violation: float | None = None
    loo_bound: float | None = None
