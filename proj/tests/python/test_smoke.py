import math

import numpy as np
import pytest

import kcorr


def test_prior_closed_and_sampled():
    assert kcorr.prior_corr_closed(1.0, 1.0) == 2.0 / 3.0
    rep = kcorr.prior_corr_sampling(m=50000, seed=1)
    assert abs(rep["corr"] - 2.0 / 3.0) < 0.03
    assert rep["method"] == "sampling"


def test_kernel_eval_and_text():
    assert kcorr.kernel_eval("gaussian:sigma=1", 0.0, 1.0) == pytest.approx(math.exp(-0.5))
    assert kcorr.normalize_kernel("setwise:a=0,b=0.95") == "setwise:a=0,b=0.95"
    with pytest.raises(kcorr.InputError):
        kcorr.kernel_eval("nope:x=1", 0.0, 0.0)


def test_corr_hat_on_prior_blocks():
    blocks = kcorr.prior_blocks(m=20000, seed=2)
    assert blocks.shape == (20000, 4)
    rep = kcorr.corr_hat("laplace:beta=1", blocks)
    assert abs(rep["corr"] - 2.0 / 3.0) < 0.05
    with pytest.raises(kcorr.InputError):
        kcorr.corr_hat("gaussian:sigma=1", np.zeros((5, 3)))


def test_posterior_methods_run():
    x1, x2 = kcorr.gen_data("hdp", 10, 10, seed=3)
    a = kcorr.posterior_corr_analytics(x1, x2, r=100, m=2000, seed=1)
    s = kcorr.posterior_corr_sampling(x1, x2, m=2000, seed=1)
    assert a["method"] == "analytics"
    assert math.isfinite(a["corr"]) and math.isfinite(s["corr"])


def test_calibration():
    g = kcorr.calibrate_gaussian(v=0.25, xi=0.5, t2=2.0)
    assert g["xi_err"] < 1e-10 and g["v_err"] < 1e-10
    assert kcorr.kernel_corr_gauss_prior(g["s2"], g["tau2"], g["rho"], g["sigma"]) == pytest.approx(0.5)
    h = kcorr.calibrate_hdp(v=0.25, xi=0.5, t2=2.0)
    assert kcorr.prior_corr_closed(h["c"], h["c0"]) == pytest.approx(0.5)
    with pytest.raises(kcorr.FeasibilityError):
        kcorr.calibrate_gaussian(sigma=3.0)


def test_parametric():
    assert kcorr.param_posterior_corr(1, 1, 1.0, 1.0, 0.5) == pytest.approx(0.5 / 1.75)
