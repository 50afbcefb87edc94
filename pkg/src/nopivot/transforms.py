"""Radix-2 FFT and fast circulant / Toeplitz / Hankel multiplication.

An n-by-n circulant times an n-by-k dense matrix costs O(n k log n) scalar
multiply/add events instead of the O(n^2 k) of the dense product; Toeplitz
and Hankel multiplication reduce to the circulant case by embedding into a
circulant of the next power-of-two size.  A module-level counter tracks
multiply and add events (complex operations count as single events) so the
asymptotic saving can be asserted rather than assumed.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, SizeError

_MATERIALIZE_CAP = 4096


class OpCounter:
    """Running count of scalar multiply / add events in the fast kernels."""

    __slots__ = ("mults", "adds")

    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self.mults = 0
        self.adds = 0

    def add(self, mults: int = 0, adds: int = 0) -> None:
        self.mults += mults
        self.adds += adds

    @property
    def total(self) -> int:
        return self.mults + self.adds


op_counter = OpCounter()


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def dense_matmul_op_count(m: int, n: int, k: int) -> int:
    """Multiply/add events of the classic triple loop for (m,n) @ (n,k)."""
    return m * k * (2 * n - 1)


_bitrev_cache: dict[int, np.ndarray] = {}
_twiddle_cache: dict[tuple[int, int], np.ndarray] = {}


def _bit_reversal(length: int) -> np.ndarray:
    perm = _bitrev_cache.get(length)
    if perm is None:
        bits = length.bit_length() - 1
        perm = np.zeros(length, dtype=np.intp)
        for i in range(length):
            rev = 0
            x = i
            for _ in range(bits):
                rev = (rev << 1) | (x & 1)
                x >>= 1
            perm[i] = rev
        _bitrev_cache[length] = perm
    return perm


def _twiddles(length: int, sign: int) -> np.ndarray:
    key = (length, sign)
    table = _twiddle_cache.get(key)
    if table is None:
        table = np.exp(sign * 2j * np.pi * np.arange(length // 2) / length)
        _twiddle_cache[key] = table
    return table


def _fft_columns(x: np.ndarray, inverse: bool) -> np.ndarray:
    """Iterative radix-2 FFT along axis 0 of a complex (L, k) array."""
    length, ncols = x.shape
    if not is_power_of_two(length):
        raise ShapeError(f"FFT length must be a power of two, got {length}")
    out = x[_bit_reversal(length)].astype(np.complex128, copy=True)
    if length == 1:
        return out
    table = _twiddles(length, +1 if inverse else -1)
    size = 2
    while size <= length:
        half = size // 2
        tw = table[:: length // size][:half]
        view = out.reshape(length // size, size, ncols)
        low = view[:, :half, :]
        high = view[:, half:, :] * tw[None, :, None]
        op_counter.add(mults=(length // 2) * ncols, adds=length * ncols)
        view[:, half:, :] = low - high
        view[:, :half, :] = low + high
        size *= 2
    if inverse:
        out *= 1.0 / length
        op_counter.add(mults=length * ncols)
    return out


def fft(v, direction: str = "forward") -> np.ndarray:
    """Radix-2 FFT of a power-of-two-length complex vector.

    ``direction`` is "forward" or "inverse"; the inverse includes the 1/L
    scaling so the two compose to the identity.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    vec = np.asarray(v, dtype=np.complex128)
    if vec.ndim != 1 or vec.size < 1:
        raise ShapeError("fft expects a nonempty 1-D vector")
    return _fft_columns(vec[:, None], inverse=(direction == "inverse"))[:, 0]


def _as_columns(a, rows: int, side_name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(a, dtype=float)
    was_vector = arr.ndim == 1
    if was_vector:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != rows:
        raise ShapeError(f"{side_name} operand must have {rows} rows, got shape {np.shape(a)}")
    return arr, was_vector


class CirculantOperator:
    """Circulant matrix C with entries c[(i - j) mod n], stored by first column.

    Fast application needs n to be a power of two; materialization works for
    any size up to the cap.
    """

    def __init__(self, first_column):
        c = np.asarray(first_column, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ShapeError("first_column must be a nonempty 1-D vector")
        if not np.isfinite(c).all():
            raise ShapeError("first_column contains non-finite entries")
        self.first_column = c.copy()
        self.n = c.size
        self.spectrum = (
            _fft_columns(c.astype(np.complex128)[:, None], inverse=False)[:, 0]
            if is_power_of_two(self.n)
            else None
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def transpose(self) -> "CirculantOperator":
        c = self.first_column
        return CirculantOperator(np.concatenate([c[:1], c[:0:-1]]))

    def materialize(self) -> np.ndarray:
        if self.n > _MATERIALIZE_CAP:
            raise SizeError(f"materialize caps n at {_MATERIALIZE_CAP}, got {self.n}")
        idx = np.mod(np.subtract.outer(np.arange(self.n), np.arange(self.n)), self.n)
        return self.first_column[idx]

    def apply(self, a, side: str = "left") -> np.ndarray:
        if side == "right":
            arr = np.asarray(a, dtype=float)
            if arr.ndim == 1:
                # row vector times C
                return self.transpose().apply(arr, "left")
            return self.transpose().apply(arr.T, "left").T
        if side != "left":
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        if self.spectrum is None:
            raise ShapeError(f"fast circulant apply needs power-of-two n, got {self.n}")
        arr, was_vector = _as_columns(a, self.n, "left-apply")
        spec = _fft_columns(arr.astype(np.complex128), inverse=False)
        spec *= self.spectrum[:, None]
        op_counter.add(mults=self.n * arr.shape[1])
        out = _fft_columns(spec, inverse=True).real
        return out[:, 0] if was_vector else out


class ToeplitzOperator:
    """Toeplitz matrix with entry (i, j) = t[i - j], stored by first column/row.

    Multiplication embeds the operator into a circulant of the next
    power-of-two size >= m + n - 1 and runs three FFTs per column batch.
    """

    def __init__(self, first_column, first_row):
        col = np.asarray(first_column, dtype=float)
        row = np.asarray(first_row, dtype=float)
        if col.ndim != 1 or row.ndim != 1 or col.size < 1 or row.size < 1:
            raise ShapeError("first_column and first_row must be nonempty 1-D vectors")
        if col[0] != row[0]:
            raise ShapeError("first_column[0] and first_row[0] must agree (shared corner)")
        if not (np.isfinite(col).all() and np.isfinite(row).all()):
            raise ShapeError("generating coefficients contain non-finite entries")
        self.first_column = col.copy()
        self.first_row = row.copy()
        self._embed_spectrum = None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.first_column.size, self.first_row.size)

    def transpose(self) -> "ToeplitzOperator":
        return ToeplitzOperator(self.first_row, self.first_column)

    def materialize(self) -> np.ndarray:
        m, n = self.shape
        if max(m, n) > _MATERIALIZE_CAP:
            raise SizeError(f"materialize caps dimensions at {_MATERIALIZE_CAP}")
        diff = np.subtract.outer(np.arange(m), np.arange(n))
        return np.where(
            diff >= 0,
            self.first_column[np.clip(diff, 0, m - 1)],
            self.first_row[np.clip(-diff, 0, n - 1)],
        )

    def _embedding(self) -> tuple[int, np.ndarray]:
        m, n = self.shape
        length = next_power_of_two(m + n - 1)
        if self._embed_spectrum is None:
            c = np.zeros(length)
            c[:m] = self.first_column
            if n > 1:
                c[length - (n - 1) :] = self.first_row[1:][::-1]
            self._embed_spectrum = _fft_columns(c.astype(np.complex128)[:, None], inverse=False)[:, 0]
        return length, self._embed_spectrum

    def apply(self, a, side: str = "left") -> np.ndarray:
        m, n = self.shape
        if side == "right":
            arr = np.asarray(a, dtype=float)
            if arr.ndim == 1:
                return self.transpose().apply(arr, "left")
            return self.transpose().apply(arr.T, "left").T
        if side != "left":
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        arr, was_vector = _as_columns(a, n, "left-apply")
        length, spectrum = self._embedding()
        padded = np.zeros((length, arr.shape[1]), dtype=np.complex128)
        padded[:n] = arr
        spec = _fft_columns(padded, inverse=False)
        spec *= spectrum[:, None]
        op_counter.add(mults=length * arr.shape[1])
        out = _fft_columns(spec, inverse=True).real[:m]
        return out[:, 0] if was_vector else out


class HankelOperator:
    """Hankel matrix realized as a Toeplitz operator with reversed row order."""

    def __init__(self, toeplitz: ToeplitzOperator):
        self.toeplitz = toeplitz

    @property
    def shape(self) -> tuple[int, int]:
        return self.toeplitz.shape

    def materialize(self) -> np.ndarray:
        return self.toeplitz.materialize()[::-1].copy()

    def apply(self, a, side: str = "left") -> np.ndarray:
        if side == "left":
            out = self.toeplitz.apply(a, "left")
            return out[::-1].copy()
        if side == "right":
            arr = np.asarray(a, dtype=float)
            flipped = arr[::-1] if arr.ndim == 1 else arr[:, ::-1]
            return self.toeplitz.apply(flipped, "right")
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def circulant_apply(op: CirculantOperator, a, side: str = "left") -> np.ndarray:
    return op.apply(a, side)


def toeplitz_apply(op: ToeplitzOperator, a, side: str = "left") -> np.ndarray:
    return op.apply(a, side)


def materialize(op) -> np.ndarray:
    return op.materialize()
