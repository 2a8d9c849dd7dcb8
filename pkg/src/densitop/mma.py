"""Method of moving asymptotes for box-bounded, one-constraint minimization.

Each step replaces objective and constraint with separable convex
approximations around the current point: a component with positive partial
derivative contributes a term p / (upper_asymptote - y), a negative one
q / (y - lower_asymptote).  The asymptotes adapt per component, backing off
where the iterate oscillates and advancing where it moves monotonically.
With a single inequality constraint the dual of the subproblem is
one-dimensional, so the subproblem is solved exactly: bisection on the one
multiplier, with the primal minimizer available in closed form.

The constraint approximation is convex and tangent to the true constraint at
the expansion point.  For a linear constraint (the volume budget) it
therefore majorizes the truth, so every iterate the optimizer accepts is
feasible for the real constraint, not just the approximated one.
"""

import dataclasses

import numpy as np

from . import fem, material, objective
from .sparse import NumericalError

# Fractional margin keeping subproblem variables away from the asymptotes.
_ALBEFA = 0.1


@dataclasses.dataclass(frozen=True)
class MmaConfig:
    """Tuning constants of the optimizer.

    asym_init: first-step asymptote distance, as a fraction of the box range.
    asym_incr, asym_decr: asymptote growth / shrink factors applied to
      monotone / oscillating components.
    move_limit: per-step trust region, as a fraction of the box range.
    dual_tol: termination width of the bisection on the dual multiplier.
    max_evals: optional evaluation budget override (optimize defaults to the
      problem's opt_steps + 1).
    scale_objective: divide the objective by its initial magnitude before it
      reaches the subproblem.  With the exact dual solve this only rescales
      the multiplier, not the iterates; the switch exists as a numerical
      fallback for badly scaled problems.
    """

    asym_init: float = 0.5
    asym_incr: float = 1.2
    asym_decr: float = 0.7
    move_limit: float = 0.5
    dual_tol: float = 1e-10
    max_evals: int = None
    scale_objective: bool = False

    def __post_init__(self):
        if not 0.0 < self.asym_decr < 1.0 < self.asym_incr:
            raise ValueError("need asym_decr in (0,1) and asym_incr above 1")
        if not 0.0 < self.move_limit <= 1.0:
            raise ValueError(f"move_limit must be in (0, 1], got {self.move_limit}")


@dataclasses.dataclass
class OptState:
    """Rolling state of one optimization run."""

    x: np.ndarray
    x_prev: np.ndarray
    x_prev2: np.ndarray
    lower_asymptote: np.ndarray
    upper_asymptote: np.ndarray
    iteration: int = 0
    losses: list = dataclasses.field(default_factory=list)
    frames: list = dataclasses.field(default_factory=list)


def init_state(x0):
    """Fresh OptState at ``x0`` (asymptotes get set on the first step)."""
    x0 = np.asarray(x0, dtype=np.float64)
    return OptState(
        x=x0,
        x_prev=x0.copy(),
        x_prev2=x0.copy(),
        lower_asymptote=x0 - 0.5,
        upper_asymptote=x0 + 0.5,
    )


def mma_step(state, f, g, cfg, lower=0.0, upper=1.0):
    """Advance one accepted step from ``state.x``.

    ``f`` and ``g`` are (value, gradient) pairs of the objective and of the
    inequality constraint (feasible iff the value is <= 0), both evaluated
    at ``state.x``.  The returned state's x solves the approximated
    subproblem exactly, satisfies the box bounds, and satisfies the
    approximated constraint whenever that is possible inside the box.
    """
    _, f_grad = f
    g_val, g_grad = g
    x = state.x
    f_grad = np.asarray(f_grad, dtype=np.float64)
    g_grad = np.broadcast_to(np.asarray(g_grad, dtype=np.float64), x.shape)
    if not (np.all(np.isfinite(f_grad)) and np.all(np.isfinite(g_grad))):
        raise NumericalError("non-finite gradient passed to the optimizer")

    rng = upper - lower
    if state.iteration < 2:
        low = x - cfg.asym_init * rng
        upp = x + cfg.asym_init * rng
    else:
        trend = (x - state.x_prev) * (state.x_prev - state.x_prev2)
        factor = np.ones_like(x)
        factor[trend > 0.0] = cfg.asym_incr
        factor[trend < 0.0] = cfg.asym_decr
        low = x - factor * (state.x_prev - state.lower_asymptote)
        upp = x + factor * (state.upper_asymptote - state.x_prev)
        low = np.maximum(low, x - 10.0 * rng)
        upp = np.minimum(upp, x + 10.0 * rng)
    # Hard guard: asymptotes must strictly straddle x.  Note there is no
    # coarser floor: oscillating components keep contracting, which is what
    # lets iterates settle instead of cycling at a fixed amplitude.
    low = np.minimum(low, x - 1e-5 * rng)
    upp = np.maximum(upp, x + 1e-5 * rng)

    alpha = np.maximum.reduce(
        [np.full_like(x, lower), low + _ALBEFA * (x - low), x - cfg.move_limit * rng])
    beta = np.minimum.reduce(
        [np.full_like(x, upper), upp - _ALBEFA * (upp - x), x + cfg.move_limit * rng])

    du = upp - x
    dl = x - low
    p0 = du ** 2 * np.maximum(f_grad, 0.0)
    q0 = dl ** 2 * np.maximum(-f_grad, 0.0)
    p1 = du ** 2 * np.maximum(g_grad, 0.0)
    q1 = dl ** 2 * np.maximum(-g_grad, 0.0)
    # Constant that makes the constraint approximation exact at x.
    r1 = g_val - np.sum(p1 / du) - np.sum(q1 / dl)

    def primal(lam):
        # Componentwise minimizer of the lagrangian over the [alpha, beta] box.
        sp = np.sqrt(p0 + lam * p1)
        sq = np.sqrt(q0 + lam * q1)
        denom = sp + sq
        y = np.where(denom > 0.0, (low * sp + upp * sq) / np.where(denom > 0.0, denom, 1.0), x)
        return np.clip(y, alpha, beta)

    def constraint_approx(y):
        return r1 + np.sum(p1 / (upp - y)) + np.sum(q1 / (y - low))

    new_x = primal(0.0)
    if constraint_approx(new_x) > 0.0:
        # The multiplier that zeroes the approximated constraint: bracket, bisect.
        lam_lo, lam_hi = 0.0, 1.0
        doublings = 0
        while constraint_approx(primal(lam_hi)) > 0.0:
            lam_lo = lam_hi
            lam_hi *= 2.0
            doublings += 1
            if doublings > 100:
                raise NumericalError(
                    "subproblem infeasible: the constraint cannot be satisfied "
                    "inside the box bounds")
        while lam_hi - lam_lo > cfg.dual_tol * max(1.0, lam_hi):
            lam_mid = 0.5 * (lam_lo + lam_hi)
            if constraint_approx(primal(lam_mid)) <= 0.0:
                lam_hi = lam_mid
            else:
                lam_lo = lam_mid
        new_x = primal(lam_hi)  # the feasible side of the bracket

    return dataclasses.replace(
        state,
        x=new_x,
        x_prev=x,
        x_prev2=state.x_prev,
        lower_asymptote=low,
        upper_asymptote=upp,
        iteration=state.iteration + 1,
    )


def optimize(spec, x0=None, progress=None, config=None, use_filter=True):
    """Minimize compliance subject to the volume budget.

    Starts from the uniform field at the target density unless ``x0`` is
    given, evaluates value and gradient once per step, and advances with
    mma_step.  Appends the loss and a design snapshot per evaluation and
    calls ``progress(evaluation_index, loss, x)`` every spec.print_every
    evaluations.  Returns (losses, final field, snapshots) as arrays.
    """
    cfg = config if config is not None else MmaConfig()
    if x0 is None:
        x0 = np.full((spec.nely, spec.nelx), spec.density, dtype=np.float64)
    else:
        x0 = np.asarray(x0, dtype=np.float64).reshape(spec.nely, spec.nelx)
    budget = cfg.max_evals if cfg.max_evals is not None else spec.opt_steps + 1

    model = material.from_spec(spec)
    k0 = fem.element_stiffness(spec.young, spec.poisson)
    state = init_state(x0)
    scale = 1.0
    for n in range(budget):
        report = objective.gradient(state.x, spec, model=model, k0=k0, use_filter=use_filter)
        state.losses.append(report.compliance)
        state.frames.append(state.x.copy())
        if n == 0 and cfg.scale_objective:
            scale = max(abs(report.compliance), 1.0)
        if progress is not None and n % spec.print_every == 0:
            progress(n, report.compliance, state.x)
        if n + 1 == budget:
            break
        state = mma_step(
            state,
            (report.compliance / scale, report.grad / scale),
            (report.volume - spec.density, report.volume_grad),
            cfg,
        )
    return np.array(state.losses), state.x, np.array(state.frames)
