import functools
import struct

import numpy as np
import pytest

from hoclust.tensor import (
    TENSOR_MAGIC,
    fold,
    frobenius,
    inner,
    kron,
    mode_product,
    multi_product,
    read_tensor,
    unfold,
    write_tensor,
)


def unfold_by_enumeration(t, mode):
    # independent oracle: walk every entry and place it by the documented
    # column rule (cyclic axis order after the mode, last axis fastest)
    d = t.ndim
    order = [(mode + i) % d for i in range(d)]
    cols = int(np.prod([t.shape[a] for a in order[1:]])) if d > 1 else 1
    out = np.zeros((t.shape[mode], cols))
    for idx in np.ndindex(*t.shape):
        col = 0
        for a in order[1:]:
            col = col * t.shape[a] + idx[a]
        out[idx[mode], col] = t[idx]
    return out


def mode_product_by_einsum(t, u, mode):
    letters = "abcdefgh"[: t.ndim]
    out = letters[:mode] + "z" + letters[mode + 1 :]
    return np.einsum(f"z{letters[mode]},{letters}->{out}", u, t)


@pytest.mark.parametrize("shape", [(2, 3), (2, 3, 4), (3, 2, 4, 2)])
def test_unfold_matches_enumeration(shape):
    rng = np.random.default_rng(0)
    t = rng.standard_normal(shape)
    for mode in range(len(shape)):
        m = unfold(t, mode)
        expected = unfold_by_enumeration(t, mode)
        assert m.shape == expected.shape
        np.testing.assert_allclose(m, expected, atol=0)


@pytest.mark.parametrize("shape", [(4, 3), (2, 5, 3), (3, 2, 2, 4)])
def test_fold_inverts_unfold(shape):
    rng = np.random.default_rng(1)
    t = rng.standard_normal(shape)
    for mode in range(len(shape)):
        back = fold(unfold(t, mode), mode, shape)
        np.testing.assert_array_equal(back, t)


def test_unfold_matrix_modes():
    m = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(unfold(m, 0), m)
    np.testing.assert_array_equal(unfold(m, 1), m.T)


def test_unfold_bad_mode():
    t = np.zeros((2, 2, 2))
    with pytest.raises(ValueError):
        unfold(t, 3)
    with pytest.raises(ValueError):
        unfold(t, -1)


@pytest.mark.parametrize("shape,mode,rows", [((2, 3, 4), 1, 5), ((3, 2), 0, 4)])
def test_mode_product_matches_einsum(shape, mode, rows):
    rng = np.random.default_rng(2)
    t = rng.standard_normal(shape)
    u = rng.standard_normal((rows, shape[mode]))
    got = mode_product(t, u, mode)
    assert got.shape == shape[:mode] + (rows,) + shape[mode + 1 :]
    np.testing.assert_allclose(got, mode_product_by_einsum(t, u, mode), atol=1e-12)


def test_mode_product_shape_mismatch():
    t = np.zeros((2, 3, 4))
    with pytest.raises(ValueError):
        mode_product(t, np.zeros((5, 2)), 1)


def test_multi_product_is_sequential_mode_products():
    rng = np.random.default_rng(3)
    t = rng.standard_normal((3, 4, 2))
    u0 = rng.standard_normal((2, 3))
    u2 = rng.standard_normal((5, 2))
    got = multi_product(t, [(u2, 2), (u0, 0)])
    expected = mode_product(mode_product(t, u0, 0), u2, 2)
    np.testing.assert_allclose(got, expected, atol=1e-12)


def test_multi_product_rejects_duplicate_mode():
    t = np.zeros((2, 2))
    with pytest.raises(ValueError):
        multi_product(t, [(np.eye(2), 0), (np.eye(2), 0)])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_unfold_of_multilinear_product_kronecker_identity(d):
    # the workhorse identity: unfolding a multilinear product equals
    # factor @ unfold(core) @ (kron of the other factors, cyclic order)^T
    rng = np.random.default_rng(10 + d)
    ranks = rng.integers(1, 4, size=d)
    dims = rng.integers(2, 7, size=d)
    s = rng.standard_normal(tuple(ranks))
    factors = [rng.standard_normal((dims[k], ranks[k])) for k in range(d)]
    t = multi_product(s, [(factors[k], k) for k in range(d)])
    for k in range(d):
        others = [factors[(k + i) % d] for i in range(1, d)]
        chain = functools.reduce(kron, others) if others else np.eye(1)
        lhs = unfold(t, k)
        rhs = factors[k] @ unfold(s, k) @ chain.T
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_kron_hand_value_and_numpy():
    a = np.array([[1.0, 2.0]])
    b = np.array([[3.0], [4.0]])
    np.testing.assert_array_equal(kron(a, b), np.array([[3.0, 6.0], [4.0, 8.0]]))
    rng = np.random.default_rng(4)
    x = rng.standard_normal((2, 3))
    y = rng.standard_normal((4, 2))
    np.testing.assert_allclose(kron(x, y), np.kron(x, y), atol=1e-12)


def test_inner_and_frobenius_identities():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((3, 4, 2))
    b = rng.standard_normal((3, 4, 2))
    assert inner(a, b) == pytest.approx(float((a * b).sum()), abs=1e-12)
    assert frobenius(a) == pytest.approx(np.linalg.norm(a.ravel()), abs=1e-12)
    assert inner(a, a) == pytest.approx(frobenius(a) ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        inner(a, b[:2])


def test_tensor_file_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    for shape in [(2, 3), (4, 1, 5), (2, 2, 2, 3)]:
        t = rng.standard_normal(shape)
        path = tmp_path / "t.tbm1"
        write_tensor(path, t)
        back = read_tensor(path)
        assert back.dtype == np.float64
        np.testing.assert_array_equal(back, t)


def test_tensor_file_layout(tmp_path):
    # byte-level check of the header and payload layout
    t = np.arange(6.0).reshape(2, 3)
    path = tmp_path / "t.tbm1"
    write_tensor(path, t)
    raw = path.read_bytes()
    magic, order = struct.unpack("<4sI", raw[:8])
    assert magic == TENSOR_MAGIC == b"TBM1"
    assert order == 2
    assert struct.unpack("<2I", raw[8:16]) == (2, 3)
    payload = np.frombuffer(raw[16:], dtype="<f8").reshape(2, 3)
    np.testing.assert_array_equal(payload, t)
    assert len(raw) == 16 + 6 * 8


def test_write_tensor_rejects_bad_input(tmp_path):
    path = tmp_path / "t.tbm1"
    with pytest.raises(ValueError):
        write_tensor(path, np.zeros(3))  # order-1
    bad = np.zeros((2, 2))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        write_tensor(path, bad)


def test_read_tensor_rejects_malformed_files(tmp_path):
    t = np.ones((2, 2))
    good = tmp_path / "good.tbm1"
    write_tensor(good, t)
    raw = good.read_bytes()

    wrong_magic = tmp_path / "magic.tbm1"
    wrong_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError, match="magic"):
        read_tensor(wrong_magic)

    truncated = tmp_path / "short.tbm1"
    truncated.write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        read_tensor(truncated)

    trailing = tmp_path / "long.tbm1"
    trailing.write_bytes(raw + b"\x00" * 8)
    with pytest.raises(ValueError):
        read_tensor(trailing)

    zero_extent = tmp_path / "zero.tbm1"
    zero_extent.write_bytes(struct.pack("<4sI2I", b"TBM1", 2, 0, 3))
    with pytest.raises(ValueError):
        read_tensor(zero_extent)

    order_one = tmp_path / "one.tbm1"
    order_one.write_bytes(struct.pack("<4sII", b"TBM1", 1, 3) + b"\x00" * 24)
    with pytest.raises(ValueError):
        read_tensor(order_one)

    nonfinite = tmp_path / "inf.tbm1"
    payload = struct.pack("<4sI2I", b"TBM1", 2, 1, 1) + struct.pack("<d", np.inf)
    nonfinite.write_bytes(payload)
    with pytest.raises(ValueError):
        read_tensor(nonfinite)
