import numpy as np
import pytest

from angcurv import _mc


def coin(rng, m):
    return rng.random(m) < 0.3


def test_threads_do_not_change_results():
    old = _mc.get_threads()
    try:
        _mc.set_threads(1)
        a = _mc.mc_mean(coin, 300_000, 5, 1)
        _mc.set_threads(4)
        b = _mc.mc_mean(coin, 300_000, 5, 1)
    finally:
        _mc.set_threads(old)
    assert a == b


def test_chunked_mean_matches_numpy():
    vals = []

    def draw(rng, m):
        x = rng.standard_normal(m)
        vals.append(x)
        return x

    est = _mc.mc_mean(draw, 200_000, 3)
    allv = np.concatenate(vals)
    assert est.value == pytest.approx(allv.mean(), abs=1e-14)
    assert est.sigma == pytest.approx(allv.std(ddof=1) / np.sqrt(allv.size), rel=1e-10)


def test_keys_give_independent_streams():
    a = _mc.substream(1, 2, 3).random(4)
    b = _mc.substream(1, 2, 4).random(4)
    assert not np.allclose(a, b)
    assert np.array_equal(a, _mc.substream(1, 2, 3).random(4))


def test_indicator_floor_on_unanimous_draws():
    est = _mc.indicator_mean(lambda rng, m: np.zeros(m, dtype=bool), 10_000, 0)
    assert est.value == 0.0 and est.sigma == pytest.approx(1e-4, rel=1e-3)
    est = _mc.indicator_mean(coin, 10_000, 0)
    assert est == _mc.mc_mean(coin, 10_000, 0)


def test_uniform_ball_radial_law():
    r = np.linalg.norm(_mc.uniform_ball(np.random.default_rng(0), 100_000, 3), axis=1)
    assert np.all(r <= 1)
    # P(|x| <= 1/2) = 1/8 in three dimensions
    assert abs((r <= 0.5).mean() - 0.125) < 0.005


def test_bad_arguments():
    with pytest.raises(ValueError):
        _mc.mc_mean(coin, 0, 1)
    with pytest.raises(ValueError):
        _mc.set_threads(0)
