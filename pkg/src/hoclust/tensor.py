"""Dense tensor algebra: matricization, multilinear products, norms, file I/O.

All functions are pure and never mutate their inputs. Tensors are plain numpy
arrays of float64 in C order (last index varying fastest). Mode indices are
0-based, like numpy axes.
"""

from __future__ import annotations

import struct

import numpy as np

TENSOR_MAGIC = b"TBM1"


def _cyclic_axes(mode: int, ndim: int) -> list[int]:
    """Axis order (mode, mode+1, ..., ndim-1, 0, ..., mode-1)."""
    return [(mode + i) % ndim for i in range(ndim)]


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-`mode` matricization of a tensor.

    Row j is the vectorized slice of ``t`` with index j in the given mode.
    Columns enumerate the remaining indices in the cyclic order
    (mode+1, ..., d-1, 0, ..., mode-1) with the last one varying fastest.
    With that ordering,

        unfold(multi_product(s, us), k)
            == us[k] @ unfold(s, k) @ kron(U_{k+1}, ..., U_{k-1}).T

    holds verbatim for any factor matrices, which downstream code relies on.

    Parameters
    ----------
    t : ndarray
        Input tensor of any order >= 1.
    mode : int
        0-based mode to bring to the rows.

    Returns
    -------
    ndarray of shape (t.shape[mode], prod(other extents))
    """
    t = np.asarray(t)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order-{t.ndim} tensor")
    return np.transpose(t, _cyclic_axes(mode, t.ndim)).reshape(t.shape[mode], -1)


def fold(m: np.ndarray, mode: int, shape) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild a tensor of `shape` from its matricization."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    d = len(shape)
    if not 0 <= mode < d:
        raise ValueError(f"mode {mode} out of range for order-{d} shape")
    size = int(np.prod(shape))
    if m.ndim != 2 or m.shape != (shape[mode], size // shape[mode]):
        raise ValueError(
            f"matrix shape {m.shape} does not match mode-{mode} unfolding of {shape}"
        )
    axes = _cyclic_axes(mode, d)
    t = m.reshape([shape[a] for a in axes])
    return np.transpose(t, np.argsort(axes))


def mode_product(t: np.ndarray, u: np.ndarray, mode: int) -> np.ndarray:
    """Multiply tensor `t` by matrix `u` along `mode`: contracts t's mode with u's columns."""
    t = np.asarray(t)
    u = np.asarray(u)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order-{t.ndim} tensor")
    if u.ndim != 2:
        raise ValueError("factor must be a matrix")
    if u.shape[1] != t.shape[mode]:
        raise ValueError(
            f"factor has {u.shape[1]} columns but mode {mode} has extent {t.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(u, t, axes=(1, mode)), 0, mode)


def multi_product(t: np.ndarray, factors) -> np.ndarray:
    """Apply several mode products at once.

    Parameters
    ----------
    t : ndarray
    factors : iterable of (matrix, mode) pairs
        Modes must be distinct; order of application does not matter
        mathematically.
    """
    out = np.asarray(t)
    seen = set()
    for u, mode in factors:
        if mode in seen:
            raise ValueError(f"duplicate mode {mode} in multi_product")
        seen.add(mode)
        out = mode_product(out, u, mode)
    return out


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices (b's index varies fastest)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects matrices")
    return np.kron(a, b)


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Entrywise inner product of two same-shape tensors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm, sqrt of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(a).ravel()))


def write_tensor(path, t: np.ndarray) -> None:
    """Write a tensor to the binary TBM1 format.

    Layout: magic ``TBM1``, u32 order d, d little-endian u32 extents, then the
    entries as little-endian float64 in canonical C order (last index fastest).
    """
    t = np.ascontiguousarray(t, dtype="<f8")
    if t.ndim < 2:
        raise ValueError("tensor files hold order >= 2 tensors")
    if not np.all(np.isfinite(t)):
        raise ValueError("refusing to write non-finite entries")
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<I", t.ndim))
        fh.write(struct.pack(f"<{t.ndim}I", *t.shape))
        fh.write(t.tobytes(order="C"))


def read_tensor(path) -> np.ndarray:
    """Read a tensor written by :func:`write_tensor`. Raises ValueError on malformed files."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < 8 or buf[:4] != TENSOR_MAGIC:
        raise ValueError(f"{path}: not a TBM1 tensor file")
    (d,) = struct.unpack_from("<I", buf, 4)
    if d < 2 or d > 64:
        raise ValueError(f"{path}: implausible tensor order {d}")
    header_end = 8 + 4 * d
    if len(buf) < header_end:
        raise ValueError(f"{path}: truncated header")
    shape = struct.unpack_from(f"<{d}I", buf, 8)
    if any(s == 0 for s in shape):
        raise ValueError(f"{path}: zero extent in shape {shape}")
    size = int(np.prod(shape))
    expected = header_end + 8 * size
    if len(buf) != expected:
        raise ValueError(
            f"{path}: payload is {len(buf) - header_end} bytes, expected {8 * size}"
        )
    data = np.frombuffer(buf, dtype="<f8", count=size, offset=header_end)
    t = data.reshape(shape).astype(float)
    if not np.all(np.isfinite(t)):
        raise ValueError(f"{path}: non-finite entries")
    return t
