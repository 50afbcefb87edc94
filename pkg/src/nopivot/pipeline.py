"""Preconditioned no-pivoting solves: factor F A H, solve F A H y = F b, x = H y.

Multipliers F and H are drawn per plan (dense Gaussian, circulant, Toeplitz,
Hankel, or integer finite-set) from sub-seeds of the trial seed.  Residuals
are always measured against the original A and b with compensated row sums,
never against the preconditioned system.  Optional iterative refinement
reuses the factorization of the preconditioned matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dense, factor, randgen
from .errors import NopivotError, ShapeError, ZeroPivotError

MULTIPLIER_KINDS = ("gaussian", "circulant", "toeplitz", "hankel", "finite-set")
DEFAULT_FINITE_SET = randgen.FiniteSet(tuple(range(-8, 9)))
# Structured multipliers are materialized below this size; at and above it
# they are applied through their FFT fast paths without forming the matrix.
MATERIALIZE_BELOW = 128


@dataclass(frozen=True)
class PreconditionPlan:
    """Which multipliers to draw on each side, plus solve options."""

    left: str | None = "gaussian"
    right: str | None = "gaussian"
    refinement_steps: int = 0
    zero_pivot_threshold: float = 0.0
    finite_set: randgen.FiniteSet = DEFAULT_FINITE_SET

    def __post_init__(self):
        for side, kind in (("left", self.left), ("right", self.right)):
            if kind is not None and kind != "none" and kind not in MULTIPLIER_KINDS:
                raise ValueError(f"unknown {side} multiplier kind {kind!r}")
        if self.refinement_steps < 0:
            raise ValueError("refinement_steps must be nonnegative")
        if self.zero_pivot_threshold < 0:
            raise ValueError("zero_pivot_threshold must be nonnegative")

    def side_kind(self, side: str) -> str | None:
        kind = self.left if side == "left" else self.right
        return None if kind in (None, "none") else kind


@dataclass
class SolveFailure:
    kind: str
    step: int | None
    message: str
    plan: PreconditionPlan
    seed: randgen.Seed


@dataclass
class SolveOutcome:
    """Solution plus residual history and the elimination safety report.

    ``relative_residual`` is recomputed from the original system; the history
    has one entry per refinement level (index 0 = no refinement).  On failure
    the solution is None and the residual infinite.
    """

    solution: np.ndarray | None
    relative_residual: float
    residual_history: list[float] = field(default_factory=list)
    safety: factor.SafetyReport | None = None
    failure: SolveFailure | None = None


def compensated_residual(a: np.ndarray, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """b - A x with correctly rounded row sums (math.fsum per row)."""
    products = a * x[None, :]
    sums = np.array([math.fsum(row.tolist()) for row in products])
    return b - sums


def relative_residual(a, x, b) -> float:
    """||A x - b|| / ||b|| against the original system."""
    a = dense.require_matrix(a)
    x = dense.require_vector(x, "solution")
    b = dense.require_vector(b, "right-hand side")
    r = compensated_residual(a, x, b)
    return float(np.linalg.norm(r) / np.linalg.norm(b))


def build_multiplier(kind: str | None, n: int, seed: randgen.Seed, finite_set=DEFAULT_FINITE_SET):
    """Draw one multiplier; None means the identity (no multiplication)."""
    if kind in (None, "none"):
        return None
    if kind == "gaussian":
        return randgen.gaussian_matrix(seed, n, n)
    if kind == "finite-set":
        return randgen.finite_set_matrix(seed, n, n, finite_set)
    if kind == "circulant":
        op = randgen.gaussian_circulant(seed, n)
    elif kind == "toeplitz":
        op = randgen.gaussian_toeplitz(seed, n, n, kind="toeplitz")
    elif kind == "hankel":
        op = randgen.gaussian_toeplitz(seed, n, n, kind="hankel")
    else:
        raise ValueError(f"unknown multiplier kind {kind!r}")
    if n < MATERIALIZE_BELOW:
        return op.materialize()
    return op


def apply_multiplier(mult, a, side: str):
    if mult is None:
        return a
    if isinstance(mult, np.ndarray):
        if np.ndim(a) == 1:
            return mult @ a if side == "left" else a @ mult
        return mult @ a if side == "left" else a @ mult
    return mult.apply(a, side)


def refine_once(a, fact, left_mult, right_mult, x, b) -> np.ndarray:
    """One refinement step: x + H solve(F (b - A x)) with the stored factors."""
    r = compensated_residual(a, x, b)
    rhs = apply_multiplier(left_mult, r, "left")
    correction = factor.lu_solve(fact, rhs)
    correction = apply_multiplier(right_mult, correction, "left")
    return x + correction


def preconditioned_solve(a, b, plan: PreconditionPlan, seed: randgen.Seed) -> SolveOutcome:
    """Solve A x = b through the preconditioned no-pivoting factorization.

    The identity plan (no multipliers) runs plain GENP on A itself, bit for
    bit.  Elimination failures are returned in the outcome rather than
    raised, carrying the plan and seed that produced them.
    """
    a = dense.require_matrix(a)
    b = dense.require_vector(b, "right-hand side")
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"coefficient matrix must be square, got {a.shape}")
    if b.shape[0] != n:
        raise ShapeError(f"right-hand side length {b.shape[0]} does not match n={n}")

    left = build_multiplier(plan.side_kind("left"), n, seed.derive("left-multiplier"), plan.finite_set)
    right = build_multiplier(plan.side_kind("right"), n, seed.derive("right-multiplier"), plan.finite_set)

    preconditioned = apply_multiplier(left, a, "left")
    preconditioned = apply_multiplier(right, preconditioned, "right")
    rhs = apply_multiplier(left, b, "left")

    try:
        fact, safety = factor.genp_factor(preconditioned, plan.zero_pivot_threshold)
        y = factor.lu_solve(fact, rhs)
    except (ZeroPivotError, factor.SingularMatrixError) as exc:
        failure = SolveFailure(
            kind=type(exc).__name__,
            step=getattr(exc, "step", None),
            message=str(exc),
            plan=plan,
            seed=seed,
        )
        return SolveOutcome(
            solution=None,
            relative_residual=math.inf,
            residual_history=[],
            safety=None,
            failure=failure,
        )

    x = apply_multiplier(right, y, "left")
    history = [relative_residual(a, x, b)]
    for _ in range(plan.refinement_steps):
        try:
            x = refine_once(a, fact, left, right, x, b)
        except NopivotError as exc:
            failure = SolveFailure(
                kind=type(exc).__name__,
                step=getattr(exc, "step", None),
                message=str(exc),
                plan=plan,
                seed=seed,
            )
            return SolveOutcome(
                solution=x,
                relative_residual=history[-1],
                residual_history=history,
                safety=safety,
                failure=failure,
            )
        history.append(relative_residual(a, x, b))
    return SolveOutcome(
        solution=x,
        relative_residual=history[-1],
        residual_history=history,
        safety=safety,
        failure=None,
    )
