import numpy as np
import pytest

from app.core import dsp
from app.core.dsp import compensate, fir_response, hermitian_response, ordered_map, overlap_save, realize_fir
from app.core.errors import ShapeError


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setattr(dsp, "worker_count", lambda: 4)
    assert ordered_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]


def test_hermitian_projection():
    response = np.array([1 + 2j, 3 + 4j, 5 - 6j])
    projected = hermitian_response(response, 4)
    assert projected[0] == 1
    assert projected[-1] == 5
    assert projected[1] == 3 + 4j
    with pytest.raises(ShapeError):
        hermitian_response(response, 8)


def test_realize_fir_round_trip():
    rng = np.random.default_rng(3)
    response = hermitian_response(rng.standard_normal(65) + 1j * rng.standard_normal(65), 128)
    taps = realize_fir(response, 128, delay=17)
    assert taps.dtype == np.float64
    np.testing.assert_allclose(fir_response(taps, 17), response, atol=1e-12)


class TestOverlapSave:
    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(7)
        signals = rng.standard_normal((3, 1000))
        taps = rng.standard_normal((3, 64))
        out = overlap_save(signals, taps)
        assert out.shape == (3, 1063)
        for c in range(3):
            np.testing.assert_allclose(out[c], np.convolve(signals[c], taps[c]), atol=1e-11)

    def test_block_size_does_not_change_result(self):
        rng = np.random.default_rng(8)
        signal = rng.standard_normal((1, 777))
        taps = rng.standard_normal(32)
        a = overlap_save(signal, taps)
        b = overlap_save(signal, taps, block_size=200)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_delta_returns_taps(self):
        taps = np.arange(1.0, 9.0)
        impulse = np.zeros((1, 4))
        impulse[0, 0] = 1.0
        np.testing.assert_allclose(overlap_save(impulse, taps)[0, :8], taps, atol=1e-13)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            overlap_save(np.zeros((2, 10)), np.zeros((3, 4)))
        with pytest.raises(ShapeError):
            overlap_save(np.zeros((1, 10)), np.zeros(8), block_size=4)


def test_compensate_window():
    signals = np.arange(20.0).reshape(1, 20)
    np.testing.assert_array_equal(compensate(signals, 5, 10), signals[:, 5:15])
