// Python bindings for the core operations: synthetic data, both fitting
// algorithms, glasso, rank/penalty selection, and the evaluation metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "mnpca/glasso.hpp"
#include "mnpca/linalg.hpp"
#include "mnpca/metrics.hpp"
#include "mnpca/mrl.hpp"
#include "mnpca/selection.hpp"
#include "mnpca/synth.hpp"
#include "mnpca/w2.hpp"

namespace py = pybind11;
using namespace mnpca;

PYBIND11_MODULE(_mnpca, m) {
  m.doc() = "Matrix-normal PCA: low-rank factorization with sparse row and "
            "column precisions";

  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError",
                                                   PyExc_ValueError);
  py::register_exception<RankTooLargeError>(m, "RankTooLargeError",
                                            PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

  py::class_<SparseSymmetric>(m, "SparseSymmetric")
      .def_readonly("dim", &SparseSymmetric::dim)
      .def("dense", &SparseSymmetric::dense)
      .def("nnz_offdiag", &SparseSymmetric::nnz_offdiag)
      .def_static("from_dense", &SparseSymmetric::from_dense, py::arg("a"),
                  py::arg("drop_tol") = 0.0);

  py::class_<MnPcaModel>(m, "MnPcaModel")
      .def_readonly("x", &MnPcaModel::x)
      .def_readonly("w", &MnPcaModel::w)
      .def_readonly("omega_inv", &MnPcaModel::omega_inv)
      .def_readonly("sigma_inv", &MnPcaModel::sigma_inv)
      .def_readonly("objective_trace", &MnPcaModel::objective_trace)
      .def_readonly("lambda1_used", &MnPcaModel::lambda1_used)
      .def_readonly("lambda2_used", &MnPcaModel::lambda2_used)
      .def_readonly("converged", &MnPcaModel::converged)
      .def("reconstruction", &MnPcaModel::reconstruction);

  py::class_<W2Model>(m, "W2Model")
      .def_readonly("x", &W2Model::x)
      .def_readonly("w", &W2Model::w)
      .def_readonly("omega_inv", &W2Model::omega_inv)
      .def_readonly("sigma_inv", &W2Model::sigma_inv)
      .def_readonly("objective_trace", &W2Model::objective_trace)
      .def_readonly("converged", &W2Model::converged)
      .def("reconstruction", &W2Model::reconstruction);

  m.def(
      "fit_mrl",
      [](const Matrix& y, int rank, std::optional<double> lambda1,
         std::optional<double> lambda2, int max_outer, bool update_precisions,
         std::uint64_t seed) {
        MrlConfig cfg;
        cfg.rank = rank;
        cfg.lambda1 = lambda1;
        cfg.lambda2 = lambda2;
        cfg.max_outer = max_outer;
        cfg.update_precisions = update_precisions;
        cfg.seed = seed;
        return fit_mrl(y, cfg);
      },
      py::arg("y"), py::arg("rank") = 2, py::arg("lambda1") = py::none(),
      py::arg("lambda2") = py::none(), py::arg("max_outer") = 50,
      py::arg("update_precisions") = true, py::arg("seed") = 0,
      "Regularized maximum-likelihood fit; lambda=None selects by BIC.");

  m.def(
      "fit_w2",
      [](const Matrix& y, int rank, double lambda1, double lambda2,
         double sigma, int max_iter, std::uint64_t seed) {
        W2Config cfg;
        cfg.rank = rank;
        cfg.lambda1 = lambda1;
        cfg.lambda2 = lambda2;
        cfg.sigma_noise = sigma;
        cfg.max_iter = max_iter;
        cfg.seed = seed;
        return fit_w2(y, cfg);
      },
      py::arg("y"), py::arg("rank") = 2, py::arg("lambda1") = 0.05,
      py::arg("lambda2") = 0.05, py::arg("sigma") = 1.0,
      py::arg("max_iter") = 50, py::arg("seed") = 0,
      "Wasserstein-relaxation fit.");

  m.def(
      "solve_glasso",
      [](const Matrix& s, double rho, double tol, int max_iter) {
        const GlassoSolution sol = solve_glasso({s, rho}, tol, max_iter);
        return py::make_tuple(sol.theta_dense, sol.objective, sol.converged);
      },
      py::arg("s"), py::arg("rho"), py::arg("tol") = 1e-6,
      py::arg("max_iter") = 200,
      "Returns (theta, objective, converged) for the L1-penalized precision.");

  m.def(
      "select_lambda_bic",
      [](const Matrix& s) {
        const LambdaSelection sel = select_lambda_bic(s);
        return py::make_tuple(sel.lambda,
                              std::vector<double>(sel.bic.begin(),
                                                  sel.bic.end()));
      },
      py::arg("s"), "Returns (lambda, bic_curve) over the 10-point grid.");

  m.def(
      "select_rank",
      [](const Matrix& y, int k_max, double tau, bool center) {
        const RankSelection sel = select_rank(y, k_max, tau, center);
        return py::make_tuple(sel.chosen_r, sel.variance_profile);
      },
      py::arg("y"), py::arg("k_max") = 10, py::arg("tau") = 0.8,
      py::arg("center") = true,
      "Returns (chosen_r, cumulative_variance_profile).");

  m.def(
      "gen_small_scale",
      [](int n, int p, double alpha1, double alpha2, double c1, double c2,
         std::uint64_t seed) {
        SyntheticSpec spec;
        spec.n = n;
        spec.p = p;
        spec.alpha1 = alpha1;
        spec.alpha2 = alpha2;
        spec.c1 = c1;
        spec.c2 = c2;
        spec.seed = seed;
        const SyntheticInstance inst = gen_small_scale(spec);
        return py::make_tuple(inst.y, inst.m_true, inst.labels,
                              inst.omega_inv_true.dense(),
                              inst.sigma_inv_true.dense());
      },
      py::arg("n") = 300, py::arg("p") = 200, py::arg("alpha1") = 0.01,
      py::arg("alpha2") = 0.01, py::arg("c1") = 1.0, py::arg("c2") = 1.0,
      py::arg("seed") = 0,
      "Returns (y, m_true, labels, omega_inv, sigma_inv).");

  m.def(
      "gen_sparse_spd",
      [](int dim, double alpha, double c, std::uint64_t seed) {
        return gen_sparse_spd(dim, alpha, c, seed).dense();
      },
      py::arg("dim"), py::arg("alpha"), py::arg("c"), py::arg("seed") = 0);

  m.def("gen_swiss_roll", &gen_swiss_roll, py::arg("n_per_roll"),
        py::arg("seed") = 0);

  m.def("rmse", &rmse, py::arg("m_hat"), py::arg("m_true"));
  m.def("psnr", &psnr, py::arg("m_hat"), py::arg("m_true"));
  m.def("nmi", &nmi, py::arg("labels_a"), py::arg("labels_b"));
  m.def("kmeans", &kmeans, py::arg("points"), py::arg("k"),
        py::arg("seed") = 0, py::arg("restarts") = 10);
  m.def(
      "support_metrics",
      [](const Matrix& theta_hat, const Matrix& theta_true, int top_k) {
        const SupportMetrics sm =
            support_metrics(SparseSymmetric::from_dense(theta_hat, 1e-12),
                            SparseSymmetric::from_dense(theta_true, 1e-12),
                            top_k);
        return py::make_tuple(sm.tpr, sm.tnr, sm.ppv);
      },
      py::arg("theta_hat"), py::arg("theta_true"), py::arg("top_k"),
      "Returns (tpr, tnr, ppv) over off-diagonal supports.");
}
