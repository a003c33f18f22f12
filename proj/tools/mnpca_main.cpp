// mnpca: command-line front end for matrix-normal PCA.
//
// Subcommands: generate, fit, eval, benchmark, select-rank, select-lambda,
// glasso. Matrices travel as headerless CSV, sparse precisions as ".edges"
// text, run metadata as manifest.json. Exit codes: 0 success (including
// non-converged fits, which warn on stderr), 2 usage/validation errors,
// 3 numerical failures.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mnpca/glasso.hpp"
#include "mnpca/io.hpp"
#include "mnpca/linalg.hpp"
#include "mnpca/metrics.hpp"
#include "mnpca/mrl.hpp"
#include "mnpca/selection.hpp"
#include "mnpca/synth.hpp"
#include "mnpca/w2.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mnpca;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_out_dir(const std::string& fallback) {
  if (const char* env = std::getenv("MNPCA_OUT_DIR")) return fs::path(env);
  return fs::path(fallback);
}

class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed) {
    start_ = std::chrono::steady_clock::now();
    j_["command"] = std::move(command);
    j_["version"] = kVersion;
    j_["seed"] = seed;
    j_["config"] = json::object();
    j_["inputs"] = json::object();
    j_["outputs"] = json::object();
  }

  json& config() { return j_["config"]; }

  void add_input(const fs::path& path) {
    j_["inputs"][path.filename().string()] = io::file_digest(path);
  }
  void add_output(const fs::path& path) {
    j_["outputs"][path.filename().string()] = io::file_digest(path);
  }

  void write(const fs::path& path) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    j_["duration_seconds"] =
        std::chrono::duration<double>(elapsed).count();
    std::ofstream out(path);
    out << j_.dump(2) << "\n";
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

Matrix load_matrix(const fs::path& path) {
  if (!fs::exists(path))
    throw ValidationError("no such file: " + path.string());
  return io::read_matrix_csv(path);
}

void write_trace_csv(const fs::path& path, const std::vector<double>& trace) {
  Matrix t(static_cast<int>(trace.size()), 1);
  for (std::size_t i = 0; i < trace.size(); ++i)
    t(static_cast<int>(i), 0) = trace[i];
  io::write_matrix_csv(path, t);
}

// ---------------------------------------------------------------- generate

int cmd_generate(const std::string& protocol, SyntheticSpec spec,
                 const std::optional<std::string>& spec_file,
                 fs::path out_dir) {
  if (spec_file) {
    std::ifstream in(*spec_file);
    if (!in) throw ValidationError("cannot open spec file " + *spec_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed spec: ") + e.what());
    }
    spec.n = j.value("n", spec.n);
    spec.p = j.value("p", spec.p);
    spec.r = j.value("r", spec.r);
    spec.alpha1 = j.value("alpha1", spec.alpha1);
    spec.alpha2 = j.value("alpha2", spec.alpha2);
    spec.c1 = j.value("c1", spec.c1);
    spec.c2 = j.value("c2", spec.c2);
    spec.seed = j.value("seed", spec.seed);
  }
  if (spec.c1 < 1.0 || spec.c2 < 1.0)
    throw ValidationError("condition numbers must be >= 1");
  if (spec.alpha1 < 0.0 || spec.alpha1 > 1.0 || spec.alpha2 < 0.0 ||
      spec.alpha2 > 1.0)
    throw ValidationError("sparsity fractions must lie in [0, 1]");
  if (spec.n <= 0 || spec.p <= 0) throw ValidationError("n and p must be > 0");
  spec.centroid_pattern = protocol == "large" ? CentroidPattern::LargeScale
                                              : CentroidPattern::SmallScale;

  Manifest manifest("generate", spec.seed);
  manifest.config() = {{"protocol", protocol}, {"n", spec.n},
                       {"p", spec.p},         {"r", spec.r},
                       {"alpha1", spec.alpha1}, {"alpha2", spec.alpha2},
                       {"c1", spec.c1},       {"c2", spec.c2},
                       {"seed", spec.seed}};

  const SyntheticInstance inst = spec.centroid_pattern ==
                                         CentroidPattern::LargeScale
                                     ? gen_large_scale(spec)
                                     : gen_small_scale(spec);

  fs::create_directories(out_dir);
  io::write_matrix_csv(out_dir / "Y.csv", inst.y);
  io::write_matrix_csv(out_dir / "M.csv", inst.m_true);
  io::write_labels_csv(out_dir / "labels.csv", inst.labels);
  io::write_edges(out_dir / "omega_inv.edges", inst.omega_inv_true);
  io::write_edges(out_dir / "sigma_inv.edges", inst.sigma_inv_true);
  for (const char* f : {"Y.csv", "M.csv", "labels.csv", "omega_inv.edges",
                        "sigma_inv.edges"})
    manifest.add_output(out_dir / f);
  manifest.write(out_dir / "manifest.json");
  std::cout << "wrote " << inst.y.rows() << "x" << inst.y.cols()
            << " dataset to " << out_dir.string() << "\n";
  return 0;
}

// --------------------------------------------------------------------- fit

std::optional<double> parse_lambda(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size() || v < 0.0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("lambda must be a nonnegative number or \"auto\": " +
                          text);
  }
}

int cmd_fit(const fs::path& data_path, const std::string& algo, int rank,
            const std::string& lambda1_text, const std::string& lambda2_text,
            double sigma_noise, int max_iter, bool center, std::uint64_t seed,
            fs::path out_dir) {
  if (rank <= 0) throw ValidationError("--rank must be positive");
  Matrix y = load_matrix(data_path);
  Vector column_mean = Vector::Zero(y.cols());
  if (center) {
    column_mean = y.colwise().mean();
    y.rowwise() -= column_mean.transpose();
  }

  Manifest manifest("fit", seed);
  manifest.add_input(data_path);
  manifest.config() = {{"data", data_path.string()},
                       {"algo", algo},
                       {"rank", rank},
                       {"lambda1", lambda1_text},
                       {"lambda2", lambda2_text},
                       {"sigma", sigma_noise},
                       {"max_iter", max_iter},
                       {"center", center},
                       {"seed", seed}};

  Matrix x, w, m_hat;
  SparseSymmetric omega_inv, sigma_inv;
  std::vector<double> trace;
  bool converged = true;
  if (algo == "mrl") {
    MrlConfig cfg;
    cfg.rank = rank;
    cfg.lambda1 = parse_lambda(lambda1_text);
    cfg.lambda2 = parse_lambda(lambda2_text);
    cfg.max_outer = max_iter;
    cfg.seed = seed;
    MnPcaModel model = fit_mrl(y, cfg);
    x = model.x;
    w = model.w;
    omega_inv = model.omega_inv;
    sigma_inv = model.sigma_inv;
    trace = model.objective_trace;
    converged = model.converged;
    manifest.config()["lambda1_used"] = model.lambda1_used;
    manifest.config()["lambda2_used"] = model.lambda2_used;
  } else {
    W2Config cfg;
    cfg.rank = rank;
    cfg.lambda1 = parse_lambda(lambda1_text).value_or(0.05);
    cfg.lambda2 = parse_lambda(lambda2_text).value_or(0.05);
    cfg.sigma_noise = sigma_noise;
    cfg.max_iter = max_iter;
    cfg.seed = seed;
    W2Model model = fit_w2(y, cfg);
    x = model.x;
    w = model.w;
    omega_inv = model.omega_inv;
    sigma_inv = model.sigma_inv;
    trace = model.objective_trace;
    converged = model.converged;
  }
  m_hat = x * w.transpose();
  if (center) m_hat.rowwise() += column_mean.transpose();
  manifest.config()["converged"] = converged;
  if (!converged)
    std::cerr << "warning: fit did not converge within " << max_iter
              << " iterations\n";

  fs::create_directories(out_dir);
  io::write_matrix_csv(out_dir / "X.csv", x);
  io::write_matrix_csv(out_dir / "W.csv", w);
  io::write_matrix_csv(out_dir / "M_hat.csv", m_hat);
  io::write_edges(out_dir / "omega_inv.edges", omega_inv);
  io::write_edges(out_dir / "sigma_inv.edges", sigma_inv);
  write_trace_csv(out_dir / "trace.csv", trace);
  for (const char* f : {"X.csv", "W.csv", "M_hat.csv", "omega_inv.edges",
                        "sigma_inv.edges", "trace.csv"})
    manifest.add_output(out_dir / f);
  manifest.write(out_dir / "manifest.json");
  std::cout << "fit (" << algo << ") finished after " << trace.size()
            << " iterations; outputs in " << out_dir.string() << "\n";
  return 0;
}

// -------------------------------------------------------------------- eval

EvalReport evaluate(const fs::path& fit_dir, const fs::path& truth_dir,
                    std::uint64_t seed) {
  for (const char* f : {"M_hat.csv", "X.csv"})
    if (!fs::exists(fit_dir / f))
      throw ValidationError("missing " + (fit_dir / f).string());
  for (const char* f : {"M.csv", "labels.csv"})
    if (!fs::exists(truth_dir / f))
      throw ValidationError("missing " + (truth_dir / f).string());

  const Matrix m_hat = load_matrix(fit_dir / "M_hat.csv");
  const Matrix m_true = load_matrix(truth_dir / "M.csv");
  const Matrix x = load_matrix(fit_dir / "X.csv");
  const std::vector<int> labels_true =
      io::read_labels_csv(truth_dir / "labels.csv");

  EvalReport report;
  report.rmse = rmse(m_hat, m_true);
  report.psnr = psnr(m_hat, m_true);
  int k = 0;
  for (int l : labels_true) k = std::max(k, l + 1);
  const std::vector<int> labels_hat = kmeans(x, k, seed);
  report.nmi = nmi(labels_hat, labels_true);

  auto support_if_present = [&](const char* name, SupportMetrics& out) {
    if (!fs::exists(fit_dir / name) || !fs::exists(truth_dir / name)) return;
    const SparseSymmetric hat = io::read_edges(fit_dir / name);
    const SparseSymmetric truth = io::read_edges(truth_dir / name);
    int top_k = static_cast<int>(truth.nnz_offdiag());
    if (hat.dim >= 1000 || truth.dim >= 1000) top_k = std::min(top_k, 150);
    if (top_k > 0) out = support_metrics(hat, truth, top_k);
  };
  support_if_present("omega_inv.edges", report.omega);
  support_if_present("sigma_inv.edges", report.sigma);
  return report;
}

json report_to_json(const EvalReport& r) {
  auto support = [](const SupportMetrics& s) {
    return json{{"tpr", s.tpr},
                {"tnr", s.tnr},
                {"ppv", s.ppv},
                {"empty_prediction", s.empty_prediction}};
  };
  return json{{"rmse", r.rmse},
              {"psnr", std::isinf(r.psnr) ? 1e308 : r.psnr},
              {"nmi", r.nmi},
              {"omega_inv", support(r.omega)},
              {"sigma_inv", support(r.sigma)}};
}

int cmd_eval(const fs::path& fit_dir, const fs::path& truth_dir,
             std::uint64_t seed) {
  Manifest manifest("eval", seed);
  manifest.config() = {{"fit_dir", fit_dir.string()},
                       {"truth_dir", truth_dir.string()},
                       {"seed", seed}};
  const EvalReport report = evaluate(fit_dir, truth_dir, seed);
  const fs::path report_path = fit_dir / "report.json";
  std::ofstream(report_path) << report_to_json(report).dump(2) << "\n";
  manifest.add_output(report_path);
  manifest.write(fit_dir / "eval_manifest.json");

  auto row = [](const char* name, double value) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << value;
    printf("%-12s %12s\n", name, os.str().c_str());
  };
  row("rmse", report.rmse);
  row("psnr", report.psnr);
  row("nmi", report.nmi);
  row("omega tpr", report.omega.tpr);
  row("omega tnr", report.omega.tnr);
  row("omega ppv", report.omega.ppv);
  row("sigma tpr", report.sigma.tpr);
  row("sigma tnr", report.sigma.tnr);
  row("sigma ppv", report.sigma.ppv);
  return 0;
}

// --------------------------------------------------------------- benchmark

struct CellResult {
  bool failed = false;
  EvalReport report;
  double seconds = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
  bool failed = false;
};

MeanStd summarize(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) {
    m.failed = true;
    return m;
  }
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  for (double x : xs) m.stddev += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(m.stddev / static_cast<double>(xs.size()));
  return m;
}

std::string fmt_cell(const MeanStd& m) {
  if (m.failed) return "FAIL";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f(%.4f)", m.mean, m.stddev);
  return buf;
}

CellResult run_cell(const SyntheticSpec& spec, const std::string& method,
                    int rank) {
  CellResult cell;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SyntheticInstance inst =
        spec.centroid_pattern == CentroidPattern::LargeScale
            ? gen_large_scale(spec)
            : gen_small_scale(spec);
    Matrix m_hat, scores;
    SparseSymmetric omega_hat = SparseSymmetric::identity(spec.n);
    SparseSymmetric sigma_hat = SparseSymmetric::identity(spec.p);
    if (method == "pca") {
      TruncatedSvd svd = truncated_svd(inst.y, rank);
      m_hat = svd.reconstruction();
      scores = svd.u * svd.s.asDiagonal();
    } else if (method == "mrl") {
      MrlConfig cfg;
      cfg.rank = rank;
      cfg.seed = spec.seed;
      MnPcaModel model = fit_mrl(inst.y, cfg);
      m_hat = model.reconstruction();
      scores = model.x;
      omega_hat = model.omega_inv;
      sigma_hat = model.sigma_inv;
    } else {
      W2Config cfg;
      cfg.rank = rank;
      cfg.seed = spec.seed;
      W2Model model = fit_w2(inst.y, cfg);
      m_hat = model.reconstruction();
      scores = model.x;
      omega_hat = model.omega_inv;
      sigma_hat = model.sigma_inv;
    }
    cell.report.rmse = rmse(m_hat, inst.m_true);
    cell.report.psnr = psnr(m_hat, inst.m_true);
    cell.report.nmi =
        nmi(kmeans(scores, spec.r, spec.seed), inst.labels);
    const int k1 = static_cast<int>(inst.omega_inv_true.nnz_offdiag());
    const int k2 = static_cast<int>(inst.sigma_inv_true.nnz_offdiag());
    if (k1 > 0)
      cell.report.omega = support_metrics(omega_hat, inst.omega_inv_true, k1);
    if (k2 > 0)
      cell.report.sigma = support_metrics(sigma_hat, inst.sigma_inv_true, k2);
  } catch (const std::exception& e) {
    std::cerr << "cell failed (seed " << spec.seed << "): " << e.what()
              << "\n";
    cell.failed = true;
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                               t0)
                     .count();
  return cell;
}

int cmd_benchmark(const std::string& protocol, int seeds, int jobs,
                  std::vector<int> c_values, std::vector<int> p_values,
                  std::uint64_t seed0, fs::path out_dir) {
  if (seeds <= 0) throw ValidationError("--seeds must be positive");
  if (jobs <= 0) throw ValidationError("--jobs must be positive");
  const bool large = protocol == "large";
  if (c_values.empty())
    c_values = large ? std::vector<int>{196}
                     : std::vector<int>{8, 16, 32, 64, 96, 128, 160, 192, 224};
  if (p_values.empty()) p_values = large ? std::vector<int>{2000} : std::vector<int>{200};

  Manifest manifest("benchmark", seed0);
  manifest.config() = {{"protocol", protocol},
                       {"seeds", seeds},
                       {"jobs", jobs},
                       {"c", c_values},
                       {"p", p_values},
                       {"seed", seed0}};

  // One sweep row per (c, p) pair; small protocol varies c, large varies p.
  struct Row {
    int c;
    int p;
  };
  std::vector<Row> rows;
  for (int c : c_values)
    for (int p : p_values) rows.push_back({c, p});
  const std::vector<std::string> methods = {"pca", "mrl", "w2"};

  struct Task {
    std::size_t row;
    std::size_t method;
    int seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t m = 0; m < methods.size(); ++m)
      for (int s = 0; s < seeds; ++s) tasks.push_back({r, m, s});

  std::vector<CellResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task& t = tasks[k];
      SyntheticSpec spec;
      spec.n = large ? 1000 : 300;
      spec.p = rows[t.row].p;
      spec.c1 = spec.c2 = rows[t.row].c;
      spec.alpha1 = 0.01;
      spec.alpha2 = large ? 0.001 : 0.01;
      spec.centroid_pattern =
          large ? CentroidPattern::LargeScale : CentroidPattern::SmallScale;
      spec.seed = seed0 + static_cast<std::uint64_t>(t.seed_index);
      results[k] = run_cell(spec, methods[t.method], 2);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregate per (row, method).
  auto collect = [&](std::size_t row, std::size_t method,
                     auto&& metric) -> MeanStd {
    std::vector<double> xs;
    for (std::size_t k = 0; k < tasks.size(); ++k)
      if (tasks[k].row == row && tasks[k].method == method &&
          !results[k].failed)
        xs.push_back(metric(results[k]));
    return summarize(xs);
  };

  fs::create_directories(out_dir);
  auto write_table = [&](const char* name, auto&& metric) {
    std::ofstream out(out_dir / name);
    out << (large ? "p" : "c");
    for (const auto& m : methods) out << "," << m;
    out << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << (large ? rows[r].p : rows[r].c);
      for (std::size_t m = 0; m < methods.size(); ++m)
        out << "," << fmt_cell(collect(r, m, metric));
      out << "\n";
    }
    manifest.add_output(out_dir / name);
  };
  write_table("table1_rmse.csv",
              [](const CellResult& c) { return c.report.rmse; });
  write_table("table1_psnr.csv",
              [](const CellResult& c) { return c.report.psnr; });
  write_table("table1_nmi.csv",
              [](const CellResult& c) { return c.report.nmi; });
  write_table("table2_omega_tpr.csv",
              [](const CellResult& c) { return c.report.omega.tpr; });
  write_table("table2_omega_tnr.csv",
              [](const CellResult& c) { return c.report.omega.tnr; });
  write_table("table2_omega_ppv.csv",
              [](const CellResult& c) { return c.report.omega.ppv; });
  write_table("table3_sigma_tpr.csv",
              [](const CellResult& c) { return c.report.sigma.tpr; });
  write_table("table3_sigma_tnr.csv",
              [](const CellResult& c) { return c.report.sigma.tnr; });
  write_table("table3_sigma_ppv.csv",
              [](const CellResult& c) { return c.report.sigma.ppv; });
  // Wall-clock goes in the manifest, not a table: re-runs must reproduce
  // every table file bitwise and only the manifest carries durations.
  json timing = json::object();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    json per_method = json::object();
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const MeanStd cell =
          collect(r, m, [](const CellResult& c) { return c.seconds; });
      per_method[methods[m]] = {{"mean", cell.mean}, {"std", cell.std}};
    }
    timing[std::to_string(large ? rows[r].p : rows[r].c)] = per_method;
  }
  manifest.config()["timing_seconds"] = std::move(timing);
  manifest.write(out_dir / "manifest.json");
  std::cout << "benchmark tables written to " << out_dir.string() << "\n";
  return 0;
}

// --------------------------------------------------- selection subcommands

int cmd_select_rank(const fs::path& data_path, int k_max, double tau,
                    bool center, const std::optional<fs::path>& json_out) {
  const Matrix y = load_matrix(data_path);
  RankSelection sel = select_rank(y, k_max, tau, center);
  json j = {{"chosen_r", sel.chosen_r},
            {"k_max", sel.k_max},
            {"tau", sel.tau},
            {"variance_profile", sel.variance_profile}};
  if (json_out) std::ofstream(*json_out) << j.dump(2) << "\n";
  std::cout << "chosen_r " << sel.chosen_r << "\n";
  return 0;
}

int cmd_select_lambda(const fs::path& data_path,
                      const std::optional<fs::path>& json_out) {
  const Matrix y = load_matrix(data_path);
  Matrix centered = y.rowwise() - y.colwise().mean();
  Matrix s = centered.transpose() * centered /
             static_cast<double>(std::max<Eigen::Index>(1, y.rows()));
  LambdaSelection sel = select_lambda_bic(s);
  json j = {{"lambda", sel.lambda},
            {"bic", std::vector<double>(sel.bic.begin(), sel.bic.end())},
            {"nnz_offdiag", sel.solution.theta.nnz_offdiag()}};
  if (json_out) std::ofstream(*json_out) << j.dump(2) << "\n";
  std::cout << "lambda " << sel.lambda << "\n";
  return 0;
}

int cmd_glasso(const fs::path& cov_path, double rho, const fs::path& out) {
  if (rho < 0.0) throw ValidationError("--rho must be nonnegative");
  const Matrix s = load_matrix(cov_path);
  try {
    require_symmetric(s, "covariance", 1e-8);
  } catch (const ShapeError& e) {
    throw ValidationError(e.what());
  }
  GlassoSolution sol = solve_glasso({s, rho});
  io::write_edges(out, sol.theta);
  std::cout << "objective " << sol.objective << " nnz_offdiag "
            << sol.theta.nnz_offdiag() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-normal PCA: low-rank recovery with structured noise"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  std::string gen_protocol = "small";
  SyntheticSpec gen_spec;
  std::optional<std::string> gen_spec_file;
  std::string gen_out = default_out_dir("dataset").string();
  gen->add_option("--protocol", gen_protocol)
      ->check(CLI::IsMember({"small", "large"}));
  gen->add_option("--spec", gen_spec_file, "JSON spec file");
  gen->add_option("--n", gen_spec.n);
  gen->add_option("--p", gen_spec.p);
  gen->add_option("--r", gen_spec.r);
  gen->add_option("--alpha1", gen_spec.alpha1);
  gen->add_option("--alpha2", gen_spec.alpha2);
  gen->add_option("--c1", gen_spec.c1);
  gen->add_option("--c2", gen_spec.c2);
  gen->add_option("--seed", gen_spec.seed);
  gen->add_option("--out", gen_out);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model to a data CSV");
  std::string fit_data, fit_algo = "mrl";
  int fit_rank = 2, fit_max_iter = 50;
  std::string fit_lambda1 = "auto", fit_lambda2 = "auto";
  double fit_sigma = 1.0;
  bool fit_no_center = false;
  std::uint64_t fit_seed = 0;
  std::string fit_out = default_out_dir("fit").string();
  fit->add_option("data", fit_data, "Y.csv")->required();
  fit->add_option("--algo", fit_algo)->check(CLI::IsMember({"mrl", "w2"}));
  fit->add_option("--rank", fit_rank);
  fit->add_option("--lambda1", fit_lambda1, "number or \"auto\"");
  fit->add_option("--lambda2", fit_lambda2, "number or \"auto\"");
  fit->add_option("--sigma", fit_sigma, "w2 noise scale");
  fit->add_option("--max-iter", fit_max_iter);
  fit->add_flag("--no-center", fit_no_center);
  fit->add_option("--seed", fit_seed);
  fit->add_option("--out", fit_out);

  // eval
  auto* ev = app.add_subcommand("eval", "Score a fit against ground truth");
  std::string ev_fit, ev_truth;
  std::uint64_t ev_seed = 0;
  ev->add_option("fit_dir", ev_fit)->required();
  ev->add_option("truth_dir", ev_truth)->required();
  ev->add_option("--seed", ev_seed);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Sweep the synthetic grid");
  std::string bench_protocol = "small";
  int bench_seeds = 10, bench_jobs = 1;
  std::vector<int> bench_c, bench_p;
  std::uint64_t bench_seed = 0;
  std::string bench_out = default_out_dir("benchmark").string();
  bench->add_option("protocol", bench_protocol)
      ->check(CLI::IsMember({"small", "large"}));
  bench->add_option("--seeds", bench_seeds);
  bench->add_option("--jobs", bench_jobs);
  bench->add_option("--c", bench_c, "condition numbers (default per protocol)");
  bench->add_option("--p", bench_p, "feature counts (default per protocol)");
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out);

  // select-rank
  auto* sr = app.add_subcommand("select-rank", "Variance-explained rank rule");
  std::string sr_data;
  int sr_kmax = 10;
  double sr_tau = 0.8;
  bool sr_no_center = false;
  std::optional<fs::path> sr_json;
  sr->add_option("data", sr_data)->required();
  sr->add_option("--k-max", sr_kmax);
  sr->add_option("--tau", sr_tau);
  sr->add_flag("--no-center", sr_no_center);
  sr->add_option("--json", sr_json);

  // select-lambda
  auto* sl = app.add_subcommand("select-lambda", "BIC penalty selection");
  std::string sl_data;
  std::optional<fs::path> sl_json;
  sl->add_option("data", sl_data)->required();
  sl->add_option("--json", sl_json);

  // glasso
  auto* gl = app.add_subcommand("glasso", "Sparse precision from a covariance");
  std::string gl_cov, gl_out = "theta.edges";
  double gl_rho = 0.1;
  gl->add_option("covariance", gl_cov)->required();
  gl->add_option("--rho", gl_rho);
  gl->add_option("--out", gl_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_protocol, gen_spec, gen_spec_file, gen_out);
    if (fit->parsed())
      return cmd_fit(fit_data, fit_algo, fit_rank, fit_lambda1, fit_lambda2,
                     fit_sigma, fit_max_iter, !fit_no_center, fit_seed,
                     fit_out);
    if (ev->parsed()) return cmd_eval(ev_fit, ev_truth, ev_seed);
    if (bench->parsed())
      return cmd_benchmark(bench_protocol, bench_seeds, bench_jobs, bench_c,
                           bench_p, bench_seed, bench_out);
    if (sr->parsed())
      return cmd_select_rank(sr_data, sr_kmax, sr_tau, !sr_no_center, sr_json);
    if (sl->parsed()) return cmd_select_lambda(sl_data, sl_json);
    if (gl->parsed()) return cmd_glasso(gl_cov, gl_rho, gl_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
