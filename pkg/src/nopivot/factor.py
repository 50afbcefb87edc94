"""Gaussian elimination variants and the pivot-safety monitor.

Three factorizations share one triangular-solve backend:

* ``genp_factor``     -- no pivoting; aborts on a pivot at/below threshold.
* ``gepp_factor``     -- partial pivoting baseline.
* ``block_genp_factor`` -- recursive block elimination driven by a pivot-size
  schedule; stores the block factors implicitly (in-place Schur updates) and
  materializes triangular factors only on request.

Every elimination produces a :class:`SafetyReport` of pivot statistics.
``safety_check`` verifies the recorded norms against the bounds
``N_+ = N + N_- N^2`` (pivot norms) and ``N_-`` (inverses), where ``N = ||A||``
and ``N_-`` is the largest inverse norm over leading blocks, and compares the
observed growth factor to ``(N_+ N_-)^(log2 n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dense
from .errors import (
    ShapeError,
    SingularMatrixError,
    SingularPivotBlockError,
    ZeroPivotError,
)

_PIVOT_BLOCK_RATIO = 1e-13
_GEPP_PIVOT_FLOOR = 1e-300
_SAFETY_SLACK = 1e-6
# Full leading-block scans for N_- are O(n^4); above this size the scan is
# sampled at power-of-two block sizes instead.
_FULL_SCAN_LIMIT = 128


@dataclass
class GenpFactorization:
    """A = l_factor @ u_factor with unit lower triangular L, no row exchanges."""

    l_factor: np.ndarray
    u_factor: np.ndarray


@dataclass
class GeppFactorization:
    """P A = L U where row i of P A is row permutation[i] of A and |L| <= 1."""

    permutation: np.ndarray
    l_factor: np.ndarray
    u_factor: np.ndarray


@dataclass(frozen=True)
class BlockSchedule:
    """Pivot-block sizes of a block elimination; they must sum to n."""

    pivot_sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.pivot_sizes) == 0 or any(d < 1 for d in self.pivot_sizes):
            raise ShapeError("schedule needs positive pivot sizes")

    @property
    def total(self) -> int:
        return sum(self.pivot_sizes)


@dataclass
class PivotRecord:
    """Per-step monitor data: pivot (block) norms and the trailing complement."""

    step: int
    size: int
    pivot_norm: float
    pivot_inverse_norm: float
    complement_norm: float | None = None
    complement_inverse_norm: float | None = None


@dataclass
class SafetyReport:
    """Norm bookkeeping of one elimination run.

    ``monitor`` names the norm used for trailing Schur complements:
    "spectral" is exact but costs an SVD per step, "frobenius" is a cheap
    upper bound suitable inside many-trial loops.  Pivot norms are always
    spectral (for scalar pivots they are exact magnitudes).
    """

    n: int
    input_norm: float
    monitor: str
    input_monitor_norm: float
    records: list[PivotRecord] = field(default_factory=list)

    @property
    def growth_factor(self) -> float:
        worst = 1.0
        for rec in self.records:
            if rec.complement_norm is not None and self.input_monitor_norm > 0:
                worst = max(worst, rec.complement_norm / self.input_monitor_norm)
        return worst

    @property
    def pivot_magnitudes(self) -> np.ndarray:
        return np.array([rec.pivot_norm for rec in self.records])


@dataclass
class BlockStep:
    offset: int
    size: int
    pivot_block: np.ndarray
    pivot_factorization: GeppFactorization
    row_mult: np.ndarray  # B^{-1} C, size d x rest
    col_mult: np.ndarray  # D B^{-1}, size rest x d


@dataclass
class BlockFactorization:
    """Telescoped block elimination: A = L * diag(pivot blocks) * U.

    L is block unit lower triangular (column multipliers below identity
    blocks), U block unit upper triangular (row multipliers).  Intermediate
    Schur complements at cumulative block boundaries are kept only when
    requested at factorization time.
    """

    n: int
    schedule: tuple[int, ...]
    steps: list[BlockStep]
    schur_complements: dict[int, np.ndarray] = field(default_factory=dict)

    def assemble_lower(self) -> np.ndarray:
        lower = np.eye(self.n)
        for s in self.steps:
            lower[s.offset + s.size :, s.offset : s.offset + s.size] = s.col_mult
        return lower

    def assemble_diagonal(self) -> np.ndarray:
        diag = np.zeros((self.n, self.n))
        for s in self.steps:
            diag[s.offset : s.offset + s.size, s.offset : s.offset + s.size] = s.pivot_block
        return diag

    def assemble_upper(self) -> np.ndarray:
        upper = np.eye(self.n)
        for s in self.steps:
            upper[s.offset : s.offset + s.size, s.offset + s.size :] = s.row_mult
        return upper

    def reconstruct(self) -> np.ndarray:
        return self.assemble_lower() @ self.assemble_diagonal() @ self.assemble_upper()

    def solve(self, b: np.ndarray) -> np.ndarray:
        x = np.array(b, dtype=float, copy=True)
        for s in self.steps:  # block forward pass, unit lower
            lo, hi = s.offset, s.offset + s.size
            if s.col_mult.size:
                x[hi:] -= s.col_mult @ x[lo:hi]
        for s in self.steps:  # block diagonal solves
            lo, hi = s.offset, s.offset + s.size
            x[lo:hi] = lu_solve(s.pivot_factorization, x[lo:hi])
        for s in reversed(self.steps):  # block backward pass, unit upper
            lo, hi = s.offset, s.offset + s.size
            if s.row_mult.size:
                x[lo:hi] -= s.row_mult @ x[hi:]
        return x


def _require_square(a, name: str = "matrix") -> np.ndarray:
    a = dense.require_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got {a.shape}")
    return a


def _monitor_norm(block: np.ndarray, monitor: str) -> float:
    if block.size == 0:
        return 0.0
    if monitor == "spectral":
        return dense.spectral_norm(block)
    return float(np.linalg.norm(block))


def _sigma_extremes(a: np.ndarray) -> tuple[float, float]:
    """(sigma_min, sigma_max); Jacobi at small sizes, estimates above."""
    if min(a.shape) <= dense.JACOBI_MAX_DIM:
        sigma = dense.singular_values(a)
        return float(sigma[-1]), float(sigma[0])
    smax = dense.spectral_norm(a)
    try:
        inv = inverse_norm_estimate(a)
    except SingularMatrixError:
        return 0.0, smax
    return 1.0 / inv, smax


def genp_factor(a, zero_pivot_threshold: float = 0.0, monitor: str = "frobenius"):
    """LU factorization with no pivoting.

    Continues through arbitrarily small (nonzero) pivots so that instability
    shows up in the solution rather than as an early abort; every pivot
    magnitude and trailing-complement norm lands in the safety report.
    Raises ZeroPivotError when |pivot| <= zero_pivot_threshold.
    """
    a = _require_square(a)
    if zero_pivot_threshold < 0:
        raise ValueError("zero_pivot_threshold must be nonnegative")
    if monitor not in ("frobenius", "spectral"):
        raise ValueError(f"monitor must be 'frobenius' or 'spectral', got {monitor!r}")
    n = a.shape[0]
    work = a.copy()
    lower = np.eye(n)
    report = SafetyReport(
        n=n,
        input_norm=dense.spectral_norm_estimate(a),
        monitor=monitor,
        input_monitor_norm=_monitor_norm(a, monitor),
    )
    for k in range(n):
        pivot = work[k, k]
        if abs(pivot) <= zero_pivot_threshold:
            raise ZeroPivotError(step=k + 1, pivot=float(pivot))
        comp_norm = None
        if k < n - 1:
            mults = work[k + 1 :, k] / pivot
            lower[k + 1 :, k] = mults
            work[k + 1 :, k + 1 :] -= np.outer(mults, work[k, k + 1 :])
            work[k + 1 :, k] = 0.0
            comp_norm = _monitor_norm(work[k + 1 :, k + 1 :], monitor)
        report.records.append(
            PivotRecord(
                step=k + 1,
                size=1,
                pivot_norm=abs(float(pivot)),
                pivot_inverse_norm=1.0 / abs(float(pivot)),
                complement_norm=comp_norm,
            )
        )
    return GenpFactorization(lower, np.triu(work)), report


def gepp_factor(a) -> GeppFactorization:
    """LU factorization with partial pivoting; multipliers bounded by 1."""
    a = _require_square(a)
    n = a.shape[0]
    work = a.copy()
    lower = np.eye(n)
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(work[k:, k])))
        if abs(work[p, k]) < _GEPP_PIVOT_FLOOR:
            raise SingularMatrixError(
                f"no usable pivot in column {k + 1}", step=k + 1
            )
        if p != k:
            work[[k, p], :] = work[[p, k], :]
            perm[[k, p]] = perm[[p, k]]
            if k > 0:
                lower[[k, p], :k] = lower[[p, k], :k]
        if k < n - 1:
            mults = work[k + 1 :, k] / work[k, k]
            lower[k + 1 :, k] = mults
            work[k + 1 :, k + 1 :] -= np.outer(mults, work[k, k + 1 :])
            work[k + 1 :, k] = 0.0
    return GeppFactorization(perm, lower, np.triu(work))


def _solve_unit_lower(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float, copy=True)
    for i in range(1, lower.shape[0]):
        x[i] -= lower[i, :i] @ x[:i]
    return x


def _solve_upper(upper: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float, copy=True)
    for i in reversed(range(upper.shape[0])):
        d = upper[i, i]
        if d == 0.0:
            raise SingularMatrixError("zero diagonal entry in U", step=i + 1)
        if i + 1 < upper.shape[0]:
            x[i] -= upper[i, i + 1 :] @ x[i + 1 :]
        x[i] /= d
    return x


def _solve_lower(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float, copy=True)
    for i in range(lower.shape[0]):
        d = lower[i, i]
        if d == 0.0:
            raise SingularMatrixError("zero diagonal entry", step=i + 1)
        if i > 0:
            x[i] -= lower[i, :i] @ x[:i]
        x[i] /= d
    return x


def _solve_unit_upper(upper: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float, copy=True)
    for i in reversed(range(upper.shape[0] - 1)):
        x[i] -= upper[i, i + 1 :] @ x[i + 1 :]
    return x


def lu_solve(fact, b) -> np.ndarray:
    """Solve with a GENP, GEPP, or block factorization (1-D or 2-D rhs)."""
    rhs = np.asarray(b, dtype=float)
    if isinstance(fact, GenpFactorization):
        if rhs.shape[0] != fact.l_factor.shape[0]:
            raise ShapeError("right-hand side length does not match factorization")
        return _solve_upper(fact.u_factor, _solve_unit_lower(fact.l_factor, rhs))
    if isinstance(fact, GeppFactorization):
        if rhs.shape[0] != fact.l_factor.shape[0]:
            raise ShapeError("right-hand side length does not match factorization")
        return _solve_upper(fact.u_factor, _solve_unit_lower(fact.l_factor, rhs[fact.permutation]))
    if isinstance(fact, BlockFactorization):
        if rhs.shape[0] != fact.n:
            raise ShapeError("right-hand side length does not match factorization")
        return fact.solve(rhs)
    raise TypeError(f"unsupported factorization type {type(fact)!r}")


def gepp_solve_transpose(fact: GeppFactorization, b) -> np.ndarray:
    """Solve A^T x = b given P A = L U (so A^T = U^T L^T P)."""
    rhs = np.asarray(b, dtype=float)
    t = _solve_lower(fact.u_factor.T, rhs)
    s = _solve_unit_upper(fact.l_factor.T, t)
    x = np.empty_like(s)
    x[fact.permutation] = s
    return x


def _perm_parity(perm: np.ndarray) -> int:
    seen = np.zeros(len(perm), dtype=bool)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def determinant(a) -> float:
    """Determinant via partial-pivoting elimination."""
    a = _require_square(a)
    try:
        fact = gepp_factor(a)
    except SingularMatrixError:
        return 0.0
    return _perm_parity(fact.permutation) * float(np.prod(np.diag(fact.u_factor)))


def inverse_norm_estimate(a, fact: GeppFactorization | None = None) -> float:
    """||A^{-1}|| by power iteration on A^{-1} A^{-T} using GEPP solves.

    Cheap enough for n in the hundreds; accurate to a few digits, which is
    all the instance-screening and monitoring paths need.
    """
    a = _require_square(a)
    if fact is None:
        fact = gepp_factor(a)
    rng = np.random.Generator(np.random.PCG64(0x1A2B3C4D))
    w = rng.standard_normal(a.shape[0])
    w /= np.linalg.norm(w)
    estimate = 0.0
    for _ in range(200):
        u = gepp_solve_transpose(fact, w)
        y = lu_solve(fact, u)
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        w = y / lam
        new_estimate = np.sqrt(lam)
        if estimate > 0.0 and abs(new_estimate - estimate) <= 1e-9 * new_estimate:
            return float(max(new_estimate, estimate))
        estimate = new_estimate
    return float(estimate)


def schur_complement(a, k: int) -> np.ndarray:
    """E - D B^{-1} C for the 2x2 partition of ``a`` with k-by-k pivot block."""
    a = _require_square(a)
    n = a.shape[0]
    if not (1 <= k <= n):
        raise ShapeError(f"block size k={k} out of range for n={n}")
    if k == n:
        return np.zeros((0, 0))
    pivot = a[:k, :k]
    smin, smax = _sigma_extremes(pivot)
    if smin <= _PIVOT_BLOCK_RATIO * smax:
        raise SingularPivotBlockError(step=1, sigma_min=smin, sigma_max=smax)
    bfact = gepp_factor(pivot)
    return a[k:, k:] - a[k:, :k] @ lu_solve(bfact, a[:k, k:])


def block_genp_factor(
    a,
    schedule,
    monitor: str = "spectral",
    record_complements: bool = False,
):
    """Recursive block elimination following a pivot-size schedule.

    Each step factors the current leading pivot block with local partial
    pivoting, forms the multipliers B^{-1}C and DB^{-1}, and updates the
    trailing matrix to the Schur complement in place.  With
    ``record_complements`` the complement at every cumulative boundary is
    copied out (handy for schedule-invariance checks, costly at scale).
    """
    a = _require_square(a)
    if isinstance(schedule, BlockSchedule):
        sizes = schedule.pivot_sizes
    else:
        sizes = tuple(int(d) for d in schedule)
        BlockSchedule(sizes)  # validation
    n = a.shape[0]
    if sum(sizes) != n:
        raise ShapeError(f"schedule {sizes} does not sum to n={n}")
    if monitor not in ("frobenius", "spectral"):
        raise ValueError(f"monitor must be 'frobenius' or 'spectral', got {monitor!r}")

    work = a.copy()
    report = SafetyReport(
        n=n,
        input_norm=dense.spectral_norm_estimate(a),
        monitor=monitor,
        input_monitor_norm=_monitor_norm(a, monitor),
    )
    steps: list[BlockStep] = []
    complements: dict[int, np.ndarray] = {}
    offset = 0
    for step_idx, d in enumerate(sizes, start=1):
        lo, hi = offset, offset + d
        pivot = work[lo:hi, lo:hi].copy()
        smin, smax = _sigma_extremes(pivot)
        if smin <= _PIVOT_BLOCK_RATIO * smax:
            raise SingularPivotBlockError(step=step_idx, sigma_min=smin, sigma_max=smax)
        bfact = gepp_factor(pivot)
        rest = n - hi
        if rest > 0:
            c_block = work[lo:hi, hi:].copy()
            d_block = work[hi:, lo:hi].copy()
            row_mult = lu_solve(bfact, c_block)
            col_mult = gepp_solve_transpose(bfact, d_block.T).T
            work[hi:, hi:] -= d_block @ row_mult
            comp = work[hi:, hi:]
            comp_smin, comp_smax = _sigma_extremes(comp) if monitor == "spectral" else (None, None)
            comp_norm = comp_smax if monitor == "spectral" else _monitor_norm(comp, monitor)
            comp_inv = (1.0 / comp_smin) if (comp_smin not in (None, 0.0)) else None
            if record_complements:
                complements[hi] = comp.copy()
        else:
            row_mult = np.zeros((d, 0))
            col_mult = np.zeros((0, d))
            comp_norm = None
            comp_inv = None
        report.records.append(
            PivotRecord(
                step=step_idx,
                size=d,
                pivot_norm=smax,
                pivot_inverse_norm=1.0 / smin,
                complement_norm=comp_norm,
                complement_inverse_norm=comp_inv,
            )
        )
        steps.append(BlockStep(offset, d, pivot, bfact, row_mult, col_mult))
        offset = hi
    return BlockFactorization(n, sizes, steps, complements), report


@dataclass
class SafetyCheckResult:
    """Outcome of verifying a SafetyReport against the elimination bounds.

    ``verdict`` is None when the input is not strongly nonsingular (the
    bounds do not apply); otherwise True iff no recorded norm exceeded its
    bound and the growth factor stayed under (N_+ N_-)^(log2 n).
    """

    strongly_nonsingular: bool
    verdict: bool | None
    input_norm: float
    max_inverse_norm: float | None
    pivot_bound: float | None
    growth_factor: float
    growth_bound: float | None
    gepp_growth_bound: float
    violations: list[tuple[int, str, float, float]]
    singular_block: int | None
    checked_sizes: list[int]
    margin: float | None = None


def _leading_block_sizes(n: int) -> list[int]:
    if n <= _FULL_SCAN_LIMIT:
        return list(range(1, n + 1))
    sizes = []
    j = 1
    while j < n:
        sizes.append(j)
        j *= 2
    sizes.append(n)
    return sizes


def safety_check(a, report: SafetyReport) -> SafetyCheckResult:
    """Verify recorded pivot statistics against the theoretical bounds.

    Scans leading blocks (ascending, stopping at the first numerically
    singular one) to establish strong nonsingularity and N_-; then checks
    every recorded pivot norm <= N_+ (1 + slack), every recorded inverse
    norm <= N_- (1 + slack), and the growth factor.
    """
    a = _require_square(a)
    n = a.shape[0]
    sizes = _leading_block_sizes(n)
    gepp_bound = float(2.0 ** (n - 1))
    n_minus = 0.0
    for j in sizes:
        smin, smax = _sigma_extremes(a[:j, :j])
        if smin <= _PIVOT_BLOCK_RATIO * smax:
            return SafetyCheckResult(
                strongly_nonsingular=False,
                verdict=None,
                input_norm=report.input_norm,
                max_inverse_norm=None,
                pivot_bound=None,
                growth_factor=report.growth_factor,
                growth_bound=None,
                gepp_growth_bound=gepp_bound,
                violations=[],
                singular_block=j,
                checked_sizes=sizes,
            )
        n_minus = max(n_minus, 1.0 / smin)
    norm = dense.spectral_norm(a)
    n_plus = norm + n_minus * norm * norm
    slack = 1.0 + _SAFETY_SLACK
    violations: list[tuple[int, str, float, float]] = []
    worst = 0.0
    for rec in report.records:
        checks = [("pivot norm", rec.pivot_norm, n_plus), ("pivot inverse norm", rec.pivot_inverse_norm, n_minus)]
        if rec.complement_norm is not None and report.monitor == "spectral":
            checks.append(("complement norm", rec.complement_norm, n_plus))
        if rec.complement_inverse_norm is not None:
            checks.append(("complement inverse norm", rec.complement_inverse_norm, n_minus))
        for label, value, bound in checks:
            worst = max(worst, value / bound)
            if value > bound * slack:
                violations.append((rec.step, label, value, bound))
    growth_bound = float((n_plus * n_minus) ** np.log2(n)) if n > 1 else 1.0
    growth_ok = report.monitor != "spectral" or report.growth_factor <= growth_bound * slack
    if report.monitor == "spectral" and not growth_ok:
        violations.append((0, "growth factor", report.growth_factor, growth_bound))
    return SafetyCheckResult(
        strongly_nonsingular=True,
        verdict=not violations,
        input_norm=norm,
        max_inverse_norm=n_minus,
        pivot_bound=n_plus,
        growth_factor=report.growth_factor,
        growth_bound=growth_bound,
        gepp_growth_bound=gepp_bound,
        violations=violations,
        singular_block=None,
        checked_sizes=sizes,
        margin=worst,
    )
