import numpy as np
import pytest

import medosc


def test_generate_constant():
    f = medosc.generate("constant", dim=1, depth=3, value=5.0)
    assert f.shape == (8,)
    assert np.all(f == 5.0)


def test_generate_2d_shape():
    f = medosc.generate("random-uniform", dim=2, depth=3, seed=4)
    assert f.shape == (8, 8)


def test_median_and_best_constant():
    assert medosc.median([1.0, 2.0, 3.0, 4.0], 0.5) == 3.0
    alpha, center = medosc.best_constant_osc([0.0, 1.0, 10.0], 0.5)
    assert (alpha, center) == (0.5, 0.5)


def test_spike_sharp_max():
    f = np.zeros(8)
    f[3] = 1.0
    field = medosc.sharp_max_field(f, s=0.25)
    assert field[3] == 0.5


def test_decompose_constant_is_empty():
    tree = medosc.decompose(np.full(8, 5.0))
    assert tree["generations"] == []
    assert tree["root_median"] == 5.0


def test_verify_spike_passes():
    f = medosc.generate("spike", dim=1, depth=5, seed=2)
    for variant in ("v1", "v2"):
        report = medosc.verify(f, variant=variant)
        assert report["passed"]
        assert report["violations"] == []


def test_run_check():
    report = medosc.run_check("thm1.1", corpus="spike", count=4)
    assert report["passed"]
    assert len(report["instances"]) == 4


def test_hilbert_is_odd_under_reflection():
    f = medosc.generate("random-uniform", dim=1, depth=5, seed=7)
    h = medosc.hilbert_transform(f)
    hr = medosc.hilbert_transform(f[::-1].copy())
    assert np.allclose(hr, -h[::-1], atol=1e-12)


def test_haar_coefficients():
    # Indexed by dyadic slot, root first; leaf slots are zero.
    b = medosc.haar_coefficients(np.arange(16.0))
    assert len(b) == 31
    assert b[0] == pytest.approx((28.0 - 92.0) / 16.0)
    assert all(x == 0.0 for x in b[15:])


def test_errors():
    with pytest.raises(medosc.MedoscError):
        medosc.decompose(np.zeros(6))
    with pytest.raises(medosc.MedoscError):
        medosc.decompose(np.zeros(8), s=0.6)
    with pytest.raises(medosc.MedoscError):
        medosc.run_check("no-such-check")
