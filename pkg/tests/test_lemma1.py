import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_oracle
from pointline import _backend
from pointline.geometry import verify_claim
from pointline.lemma1 import (
    DeltaTooLarge,
    Lemma1Params,
    RetriesExhausted,
    StripQuery,
    build_lemma1,
    derive_params,
    strip_contains,
)


@pytest.mark.parametrize("delta,N,M", [(1e-3, 690, 4), (1e-2, 46, 1), (1e-4, 9210, 13)])
def test_derive_params(delta, N, M):
    p = derive_params(delta)
    assert (p.N, p.M) == (N, M)
    assert p.size_target == math.ceil(N / 2)
    assert p.slope_step == pytest.approx(8 * delta * math.sqrt(N))
    assert p.box_half == pytest.approx(1 / (4 * math.sqrt(N)))


@pytest.mark.parametrize("delta", [0.5, 0.9, 0.2, 1.0, 0.0, -1e-3])
def test_derive_params_rejects_large_delta(delta):
    with pytest.raises(DeltaTooLarge):
        derive_params(delta)


def test_slopes_scan_order():
    p = derive_params(1e-3)
    s = np.round(p.slopes() / p.slope_step)
    assert s.tolist() == [0, 1, -1, 2, -2, 3, -3, 4, -4]
    # the grid stays inside [-1, 1]
    for d in (1e-2, 1e-3, 1e-4, 1e-5):
        assert np.abs(derive_params(d).slopes()).max() <= 1


def test_strip_contains_closed():
    q = StripQuery(0.0, 0.0, 0.5, 0.25)
    assert strip_contains(q, 0.0, 0.25)
    assert strip_contains(q, 1.0, 0.75)
    assert strip_contains(q, 1.0, 0.25)
    assert not strip_contains(q, 0.0, 0.2500001)
    with pytest.raises(ValueError):
        StripQuery(0, 0, 0, 0)


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-1, 1),
       st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(1e-6, 0.5))
def test_strip_contains_matches_distance(px, py, t, x, y, hw):
    d = abs(y - py - t * (x - px))
    assert strip_contains(StripQuery(px, py, t, hw), x, y) == (d <= hw)


def _strip_oracle(x, y, slopes, hw):
    out = []
    for i in range(len(x)):
        pick = -1
        for k, s in enumerate(slopes):
            if all(abs(y[j] - y[i] - s * (x[j] - x[i])) > hw for j in range(len(x)) if j != i):
                pick = k
                break
        out.append(pick)
    return out


def test_strip_scan_oracle():
    rng = np.random.default_rng(3)
    p = derive_params(1e-2)
    x, y = rng.random(p.N) - 0.5, rng.random(p.N) - 0.5
    got = _backend.kernels.strip_scan(x, y, p.slopes(), p.delta)
    assert got.tolist() == _strip_oracle(x, y, p.slopes(), p.delta)


@pytest.mark.parametrize("delta", [1e-2, 3e-3, 1e-3])
def test_build_is_sound(delta):
    cfg, rep = build_lemma1(derive_params(delta, seed=11), raise_on_failure=False)
    assert len(cfg) >= 2
    value = brute_oracle(cfg.coords)[0]
    assert value > delta
    assert cfg.claimed_delta == value == rep.measured_delta
    assert verify_claim(cfg).passed
    # slopes come from the grid, points from the shifted unit square
    p = derive_params(delta)
    assert set(np.round(cfg.theta / p.slope_step).astype(int)) <= set(range(-p.M, p.M + 1))
    assert np.abs(cfg.x).max() <= 0.5 and np.abs(cfg.y).max() <= 0.5


def test_success_rate_and_first_attempt():
    first = 0
    for seed in range(20):
        cfg, rep = build_lemma1(derive_params(1e-3, seed=seed))
        assert len(cfg) >= 345
        assert cfg.claimed_delta >= 1e-3
        first += rep.params["attempt_sizes"][0] >= 345
    assert first >= 15


def test_monotone_in_delta():
    votes = 0
    for seed in range(10):
        sizes = [len(build_lemma1(derive_params(d, seed=seed), raise_on_failure=False)[0])
                 for d in (1e-2, 1e-3, 1e-4)]
        votes += sizes[0] <= sizes[1] <= sizes[2]
    assert votes > 5


def test_deterministic():
    a, ra = build_lemma1(derive_params(1e-3, seed=9))
    b, rb = build_lemma1(derive_params(1e-3, seed=9))
    assert a.same_elements(b) and ra.to_dict() == rb.to_dict()
    c, _ = build_lemma1(derive_params(1e-3, seed=10))
    assert not a.same_elements(c)


def test_retries_exhausted():
    p = derive_params(1e-3, seed=1)
    impossible = Lemma1Params(**{**p.__dict__, "size_target": p.N + 1, "max_retries": 3})
    with pytest.raises(RetriesExhausted) as info:
        build_lemma1(impossible)
    err = info.value
    assert len(err.report.params["attempt_sizes"]) == 3
    assert len(err.configuration) == max(err.report.params["attempt_sizes"])
    assert not err.report.success
    cfg, rep = build_lemma1(impossible, raise_on_failure=False)
    assert cfg.same_elements(err.configuration) and rep.notes
