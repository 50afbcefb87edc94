"""Dense matrix kernels: products, norms, QR, small-scale SVD, block extraction.

Matrices are plain 2-D float64 numpy arrays throughout the package.  The SVD
is a one-sided Jacobi iteration, accurate for small singular values at desk
scale; spectral norms switch to power iteration above ``JACOBI_MAX_DIM``
because cyclic Jacobi sweeps get too slow inside many-trial experiment loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ShapeError, SingularMatrixError, SizeError

# Ratio sigma_j / sigma_1 at or below which a singular value counts as zero.
RANK_TOL = 1e-10
# sigma_min / sigma_max at or below which a square matrix counts as singular.
SINGULARITY_RATIO = 1e-13

JACOBI_MAX_DIM = 128  # largest min-dimension routed through Jacobi by default
_JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60
_SVD_DIM_CAP = 1024

_POWER_ITERS = 200
_POWER_TOL = 1e-10


def require_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be nonempty, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ShapeError(f"{name} contains non-finite entries")
    return m


def require_vector(b, name: str = "vector") -> np.ndarray:
    v = np.asarray(b, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ShapeError(f"{name} must be a nonempty 1-D array, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ShapeError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``A = left @ diag(singular_values) @ right.T``.

    ``left`` is m-by-m orthogonal, ``right`` is n-by-n orthogonal and
    ``singular_values`` has length min(m, n), sorted nonincreasing.
    """

    left_factor: np.ndarray
    singular_values: np.ndarray
    right_factor: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m = self.left_factor.shape[0]
        n = self.right_factor.shape[0]
        sigma = np.zeros((m, n))
        k = len(self.singular_values)
        sigma[:k, :k] = np.diag(self.singular_values)
        return self.left_factor @ sigma @ self.right_factor.T


@dataclass(frozen=True)
class QrResult:
    """Thin QR ``A = q_factor @ r_factor`` with nonnegative R diagonal."""

    q_factor: np.ndarray
    r_factor: np.ndarray


def mat_mul(a, b) -> np.ndarray:
    """Matrix product with explicit shape checking."""
    a = require_matrix(a, "left operand")
    b = require_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def leading_block(a, k: int, l: int) -> np.ndarray:
    """Northwestern k-by-l block of ``a``."""
    a = require_matrix(a)
    if not (1 <= k <= a.shape[0]) or not (1 <= l <= a.shape[1]):
        raise ShapeError(f"block ({k}, {l}) out of range for shape {a.shape}")
    return a[:k, :l].copy()


def _orthonormal_completion(u_partial: np.ndarray, m: int) -> np.ndarray:
    """Extend orthonormal columns to a full m-by-m orthogonal matrix."""
    r = u_partial.shape[1] if u_partial.size else 0
    if r == 0:
        return np.eye(m)
    q, _ = _householder(u_partial, full_q=True)
    # q's first r columns equal u_partial up to rounding; keep the originals.
    out = q
    out[:, :r] = u_partial
    return out


def _jacobi_core(a: np.ndarray, want_vectors: bool):
    """One-sided Jacobi on the columns of ``a`` (requires rows >= cols).

    Cyclic sweeps rotate column pairs until every Gram off-diagonal entry is
    below ``_JACOBI_TOL`` relative to the participating column norms.
    Returns (sigma, u_full, v_full) with u, v None when vectors not wanted.
    """
    m, n = a.shape
    work = a.copy()
    v = np.eye(n) if want_vectors else None
    converged = False
    worst = 0.0
    for _ in range(_JACOBI_MAX_SWEEPS):
        rotated = False
        worst = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                cols = work[:, (i, j)]
                g = cols.T @ cols
                alpha, beta, gamma = g[0, 0], g[1, 1], g[0, 1]
                denom = alpha * beta
                if denom <= 0.0:
                    continue
                rel = abs(gamma) / np.sqrt(denom)
                worst = max(worst, rel)
                if rel <= _JACOBI_TOL:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) if zeta != 0 else 1.0
                t /= abs(zeta) + np.hypot(1.0, zeta)
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                rot = np.array([[c, s], [-s, c]])
                work[:, (i, j)] = cols @ rot
                if want_vectors:
                    v[:, (i, j)] = v[:, (i, j)] @ rot
                rotated = True
        if not rotated:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"Jacobi SVD did not converge in {_JACOBI_MAX_SWEEPS} sweeps "
            f"(worst off-diagonal ratio {worst:.3e})",
            residual=worst,
        )
    norms = np.sqrt(np.einsum("ij,ij->j", work, work))
    order = np.argsort(-norms, kind="stable")
    sigma = norms[order]
    if not want_vectors:
        return sigma, None, None
    v = v[:, order]
    work = work[:, order]
    positive = sigma > 0.0
    u_cols = work[:, positive] / sigma[positive]
    u = _orthonormal_completion(u_cols, m)
    return sigma, u, v


def jacobi_svd(a) -> SvdResult:
    """Full SVD by one-sided Jacobi rotations.

    Raises ConvergenceError when the sweep budget is exhausted and SizeError
    above the desk-scale dimension cap.
    """
    a = require_matrix(a)
    m, n = a.shape
    if min(m, n) > _SVD_DIM_CAP:
        raise SizeError(f"jacobi_svd caps min(m, n) at {_SVD_DIM_CAP}, got {min(m, n)}")
    if m >= n:
        sigma, u, v = _jacobi_core(a, want_vectors=True)
        return SvdResult(u, sigma, v)
    sigma, u, v = _jacobi_core(a.T, want_vectors=True)
    return SvdResult(v, sigma, u)


def singular_values(a) -> np.ndarray:
    """Singular values only (skips accumulating the orthogonal factors)."""
    a = require_matrix(a)
    m, n = a.shape
    if min(m, n) > _SVD_DIM_CAP:
        raise SizeError(f"singular_values caps min(m, n) at {_SVD_DIM_CAP}")
    core = a if m >= n else a.T
    sigma, _, _ = _jacobi_core(core, want_vectors=False)
    return sigma


def _power_spectral_norm(a: np.ndarray, iters: int = _POWER_ITERS, tol: float = _POWER_TOL) -> float:
    # Deterministic pseudo-random start keeps the function pure per call.
    rng = np.random.Generator(np.random.PCG64(0x5EED_0B5E))
    v = rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        w = a @ v
        s = float(np.linalg.norm(w))
        if s == 0.0:
            return 0.0
        v = a.T @ w
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return s
        v /= nv
        new_estimate = float(np.linalg.norm(a @ v))
        if estimate > 0.0 and abs(new_estimate - estimate) <= tol * new_estimate:
            return max(new_estimate, estimate)
        estimate = new_estimate
    return estimate


def spectral_norm(a) -> float:
    """Largest singular value; Jacobi at small sizes, power iteration above."""
    a = require_matrix(a)
    if min(a.shape) <= JACOBI_MAX_DIM:
        return float(singular_values(a)[0])
    return _power_spectral_norm(a)


def spectral_norm_estimate(a) -> float:
    """Power-iteration estimate of the spectral norm at any size.

    Accurate to far better than a percent on generic matrices; meant for
    screening and monitoring inside many-trial loops where the Jacobi-grade
    ``spectral_norm`` would dominate the runtime.
    """
    return _power_spectral_norm(require_matrix(a))


def inverse_norm(a) -> float:
    """Spectral norm of the inverse, i.e. 1 / sigma_min, for square input.

    Raises SingularMatrixError when sigma_min <= SINGULARITY_RATIO * sigma_max.
    Intended for desk-scale matrices (Jacobi underneath); large systems should
    use the factorization-based estimate in :mod:`nopivot.factor`.
    """
    a = require_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"inverse_norm needs a square matrix, got {a.shape}")
    sigma = singular_values(a)
    smin, smax = float(sigma[-1]), float(sigma[0])
    if smin <= SINGULARITY_RATIO * smax:
        raise SingularMatrixError(
            f"matrix is numerically singular (sigma_min={smin:.3e}, sigma_max={smax:.3e})",
            sigma_min=smin,
            sigma_max=smax,
        )
    return 1.0 / smin


def numerical_rank(a, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` relative to the largest."""
    sigma = singular_values(a)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def condition_number(a) -> float:
    """sigma_max / sigma_min over the nonzero spectrum (inf when singular)."""
    sigma = singular_values(a)
    if sigma[-1] == 0.0:
        return np.inf
    return float(sigma[0] / sigma[-1])


def _householder(a: np.ndarray, full_q: bool):
    """Householder triangularization; returns (Q, R) with Q thin or full."""
    m, n = a.shape
    r = a.copy()
    reflectors = []
    for k in range(n):
        x = r[k:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            reflectors.append(None)
            continue
        v = x.copy()
        v[0] += (1.0 if x[0] >= 0 else -1.0) * norm_x
        v /= np.linalg.norm(v)
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        reflectors.append(v)
    q_cols = m if full_q else n
    q = np.eye(m)[:, :q_cols].copy()
    for k in reversed(range(len(reflectors))):
        v = reflectors[k]
        if v is None:
            continue
        q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])
    # Sign-normalize so the R diagonal is nonnegative (zeros stay zero).
    for i in range(min(m, n)):
        if r[i, i] < 0.0:
            r[i, :] = -r[i, :]
            q[:, i] = -q[:, i]
    return q, r


def householder_qr(a) -> QrResult:
    """Thin QR of a tall (rows >= cols) matrix.

    Rank deficiency is permitted: a zero column leaves a zero on the R
    diagonal rather than failing.
    """
    a = require_matrix(a)
    m, n = a.shape
    if m < n:
        raise ShapeError(f"householder_qr needs rows >= cols, got {a.shape}")
    q, r = _householder(a, full_q=False)
    return QrResult(q, r[:n, :n].copy())


# --- text round-trip format -------------------------------------------------
#
# First line "m n", then m lines of n whitespace-separated decimal literals.
# %.17e keeps 18 significant digits, enough for exact float64 round-trips.


def format_matrix(a) -> str:
    a = require_matrix(a)
    m, n = a.shape
    lines = [f"{m} {n}"]
    for row in a:
        lines.append(" ".join(f"{x:.17e}" for x in row))
    return "\n".join(lines) + "\n"


def write_matrix(a, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(a))


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ShapeError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ShapeError(f"expected 'm n' header, got {lines[0]!r}")
    m, n = int(header[0]), int(header[1])
    if len(lines) - 1 < m:
        raise ShapeError(f"expected {m} data rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1 : 1 + m]:
        values = [float(tok) for tok in ln.split()]
        if len(values) != n:
            raise ShapeError(f"expected {n} entries per row, got {len(values)}")
        rows.append(values)
    return require_matrix(np.array(rows, dtype=float))


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return parse_matrix(fh.read())
