import numpy as np
import pytest

import mnpca


def test_generate_and_shapes():
    y, m_true, labels, omega_inv, sigma_inv = mnpca.gen_small_scale(
        n=60, p=50, c1=8.0, c2=8.0, seed=1
    )
    assert y.shape == (60, 50)
    assert m_true.shape == (60, 50)
    assert len(labels) == 60
    assert omega_inv.shape == (60, 60)
    assert sigma_inv.shape == (50, 50)
    # same seed reproduces bitwise
    y2 = mnpca.gen_small_scale(n=60, p=50, c1=8.0, c2=8.0, seed=1)[0]
    assert np.array_equal(y, y2)


def test_fit_mrl_identity_noise_matches_svd():
    y = mnpca.gen_small_scale(n=60, p=50, alpha1=0.0, alpha2=0.0, seed=2)[0]
    yc = y - y.mean(axis=0)
    model = mnpca.fit_mrl(yc, rank=2, update_precisions=False)
    u, s, vt = np.linalg.svd(yc, full_matrices=False)
    svd_rec = (u[:, :2] * s[:2]) @ vt[:2]
    rec = model.reconstruction()
    assert np.linalg.norm(rec - svd_rec) < 1e-6 * np.linalg.norm(svd_rec)


def test_fit_w2_runs_and_decreases():
    y = mnpca.gen_small_scale(n=40, p=44, c1=8.0, c2=8.0, seed=3)[0]
    model = mnpca.fit_w2(y - y.mean(axis=0), rank=2, max_iter=10)
    trace = model.objective_trace
    assert trace[-1] <= trace[0]
    assert model.x.shape == (40, 2)
    assert model.w.shape == (44, 2)


def test_glasso_and_selection():
    theta_true = mnpca.gen_sparse_spd(20, 0.1, 8.0, seed=4)
    cov = np.linalg.inv(theta_true)
    theta, objective, converged = mnpca.solve_glasso(cov, rho=0.05)
    assert converged
    assert theta.shape == (20, 20)
    assert np.all(np.linalg.eigvalsh(theta) > 0)

    lam, bic = mnpca.select_lambda_bic(cov)
    assert len(bic) == 10
    assert lam > 0

    r, profile = mnpca.select_rank(np.random.default_rng(0).normal(size=(50, 40)))
    assert 1 <= r <= 10
    assert profile[-1] == pytest.approx(1.0)


def test_metrics():
    a = np.zeros((4, 5))
    b = np.ones((4, 5))
    assert mnpca.rmse(b, a) == pytest.approx(1.0)
    assert mnpca.nmi([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(100.0)
    pts = np.vstack([np.zeros((10, 2)), 10 + np.zeros((10, 2))])
    labels = mnpca.kmeans(pts, 2, seed=0)
    assert mnpca.nmi(labels, [0] * 10 + [1] * 10) == pytest.approx(100.0)
