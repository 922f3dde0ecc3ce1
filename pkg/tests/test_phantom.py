import numpy as np
import pytest

from rovir.arraydata import build_gram, regularize
from rovir.errors import InvalidSpec
from rovir.linalg import cholesky
from rovir.phantom import PhantomSpec, make_phantom, rect_mask


def test_default_shape_and_dtype():
    img, sig, itf = make_phantom()
    assert img.values.shape == (8, 64, 64)
    assert img.values.dtype == np.complex128
    assert sig.dtype == bool and itf.dtype == bool


def test_bitwise_deterministic():
    a = make_phantom(PhantomSpec(seed=3))
    b = make_phantom(PhantomSpec(seed=3))
    assert np.array_equal(a[0].values, b[0].values)
    assert np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])


def test_seed_changes_data():
    a = make_phantom(PhantomSpec(seed=1))[0].values
    b = make_phantom(PhantomSpec(seed=2))[0].values
    assert not np.array_equal(a, b)


def test_masks_disjoint_and_non_empty():
    _, sig, itf = make_phantom()
    assert sig.any() and itf.any()
    assert not np.any(sig & itf)
    assert sig.sum() == 32 * 20 and itf.sum() == 32 * 20


def test_grams_are_usable():
    img, sig, itf = make_phantom()
    A, B = build_gram(img, sig), build_gram(img, itf)
    for M in (A, B):
        assert np.array_equal(M, M.conj().T)
        assert np.linalg.eigvalsh(M).min() >= -1e-10 * np.trace(M).real
    cholesky(regularize(B))


def test_interference_region_is_noise_without_object():
    img, sig, itf = make_phantom(PhantomSpec(interference_amplitude=0.0))
    A, B = build_gram(img, sig), build_gram(img, itf)
    ratio = (np.trace(B).real / itf.sum()) / (np.trace(A).real / sig.sum())
    assert ratio <= 1e-2


def test_noise_free_background_is_zero():
    img, sig, itf = make_phantom(PhantomSpec(noise_sigma=0.0))
    assert np.all(img.values[:, ~(sig | itf)] == 0)


def test_noise_level_does_not_shift_profiles():
    # the noise draw happens either way, so the coil profiles stay the same
    clean = make_phantom(PhantomSpec(noise_sigma=0.0))[0].values
    half = make_phantom(PhantomSpec(noise_sigma=0.5))[0].values
    full = make_phantom(PhantomSpec(noise_sigma=1.0))[0].values
    np.testing.assert_allclose(full - clean, 2 * (half - clean), rtol=0, atol=1e-12)


def test_default_rectangles_follow_grid():
    assert PhantomSpec().signal_rect == (16, 48, 6, 26)
    assert PhantomSpec().interference_rect == (16, 48, 38, 58)
    small = PhantomSpec(ny=8, nx=8)
    assert small.signal_rect == (2, 6, 1, 3) and small.interference_rect == (2, 6, 5, 7)
    _, sig, itf = make_phantom(small)
    assert sig.any() and itf.any() and not np.any(sig & itf)


def test_rect_mask():
    m = rect_mask((1, 3, 0, 2), 4, 4)
    assert m.sum() == 4 and m[1, 0] and m[2, 1] and not m[3, 0]


@pytest.mark.parametrize("kwargs", [
    {"nc": 1},
    {"ny": 0},
    {"signal_rect": (0, 0, 0, 5)},
    {"signal_rect": (0, 10, 0, 100)},
    {"interference_rect": (16, 48, 20, 40)},
    {"noise_sigma": -1.0},
    {"coil_decay": 0.0},
    {"seed": -1},
    {"seed": 2**64},
])
def test_invalid_spec(kwargs):
    with pytest.raises(InvalidSpec):
        PhantomSpec(**kwargs)
