"""Matrix-normal PCA: low-rank recovery under structured (row x column
correlated) noise, with sparse precision estimation."""

try:
    from ._mnpca import *  # noqa: F401,F403  (installed wheel layout)
    from ._mnpca import (
        MnPcaModel,
        SparseSymmetric,
        W2Model,
        fit_mrl,
        fit_w2,
        gen_small_scale,
        gen_sparse_spd,
        gen_swiss_roll,
        kmeans,
        nmi,
        psnr,
        rmse,
        select_lambda_bic,
        select_rank,
        solve_glasso,
        support_metrics,
    )
except ImportError:  # in-tree build: extension sits on sys.path
    from _mnpca import (
    MnPcaModel,
    SparseSymmetric,
    W2Model,
    fit_mrl,
    fit_w2,
    gen_small_scale,
    gen_sparse_spd,
    gen_swiss_roll,
    kmeans,
    nmi,
    psnr,
    rmse,
    select_lambda_bic,
    select_rank,
        solve_glasso,
        support_metrics,
    )

__all__ = [
    "MnPcaModel",
    "SparseSymmetric",
    "W2Model",
    "fit_mrl",
    "fit_w2",
    "gen_small_scale",
    "gen_sparse_spd",
    "gen_swiss_roll",
    "kmeans",
    "nmi",
    "psnr",
    "rmse",
    "select_lambda_bic",
    "select_rank",
    "solve_glasso",
    "support_metrics",
]

__version__ = "0.1.0"
