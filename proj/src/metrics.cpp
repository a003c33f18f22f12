#include "mnpca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace mnpca {

double rmse(const Matrix& m_hat, const Matrix& m_true) {
  if (m_hat.rows() != m_true.rows() || m_hat.cols() != m_true.cols())
    throw ShapeError("rmse: shape mismatch");
  return (m_hat - m_true).norm() /
         std::sqrt(static_cast<double>(m_hat.size()));
}

double psnr(const Matrix& m_hat, const Matrix& m_true) {
  const double e = rmse(m_hat, m_true);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(e);
}

namespace {

double assign_labels(const Matrix& pts, const Matrix& centers,
                     std::vector<int>& labels) {
  double inertia = 0.0;
  for (int i = 0; i < pts.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < centers.rows(); ++c) {
      const double d = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    labels[i] = arg;
    inertia += best;
  }
  return inertia;
}

Matrix kmeanspp_init(const Matrix& pts, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(pts.rows());
  Matrix centers(k, pts.cols());
  std::uniform_int_distribution<int> pick(0, n - 1);
  centers.row(0) = pts.row(pick(rng));
  Vector d2(n);
  for (int i = 0; i < n; ++i)
    d2(i) = (pts.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int chosen = pick(rng);
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centers.row(c) = pts.row(chosen);
    for (int i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (pts.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

}  // namespace

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int restarts) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: bad k");
  std::mt19937_64 rng(seed);

  std::vector<int> best_labels(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < restarts; ++rep) {
    Matrix centers = kmeanspp_init(points, k, rng);
    std::vector<int> labels(n);
    double inertia = assign_labels(points, centers, labels);
    for (int it = 0; it < 300; ++it) {
      Matrix sums = Matrix::Zero(k, points.cols());
      std::vector<int> counts(k, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += points.row(i);
        ++counts[labels[i]];
      }
      for (int c = 0; c < k; ++c)
        if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
      const double next = assign_labels(points, centers, labels);
      if (next >= inertia - 1e-12) {
        inertia = next;
        break;
      }
      inertia = next;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw std::invalid_argument("nmi: length mismatch");
  const double n = static_cast<double>(labels_a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    pa[labels_a[i]] += 1.0;
    pb[labels_b[i]] += 1.0;
    pab[{labels_a[i], labels_b[i]}] += 1.0;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (auto& [k, c] : pa) ha -= c / n * std::log(c / n);
  for (auto& [k, c] : pb) hb -= c / n * std::log(c / n);
  for (auto& [k, c] : pab) {
    const double pj = c / n;
    mi += pj * std::log(pj * n * n / (pa[k.first] * pb[k.second]));
  }
  const double denom = 0.5 * (ha + hb);
  if (denom <= 0.0) return 100.0;  // both labelings constant
  return 100.0 * std::max(0.0, mi / denom);
}

SupportMetrics support_metrics(const SparseSymmetric& theta_hat,
                               const SparseSymmetric& theta_true, int top_k) {
  if (theta_hat.dim != theta_true.dim)
    throw ShapeError("support_metrics: dimension mismatch");
  const long total_pairs =
      static_cast<long>(theta_true.dim) * (theta_true.dim - 1) / 2;
  if (top_k < 1 || top_k > total_pairs)
    throw std::invalid_argument("support_metrics: top_k out of range");

  auto top_support = [](const SparseSymmetric& t, std::size_t k) {
    auto entries = t.offdiag;
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                return std::abs(a.value) > std::abs(b.value);
              });
    if (entries.size() > k) entries.resize(k);
    std::set<std::pair<int, int>> s;
    for (const auto& e : entries) s.insert({e.i, e.j});
    return s;
  };

  const auto truth = top_support(theta_true, static_cast<std::size_t>(top_k));
  const auto est = top_support(theta_hat, static_cast<std::size_t>(top_k));

  long tp = 0;
  for (const auto& e : est)
    if (truth.count(e)) ++tp;
  const long fp = static_cast<long>(est.size()) - tp;
  const long fn = static_cast<long>(truth.size()) - tp;
  const long tn = total_pairs - tp - fp - fn;

  SupportMetrics m;
  m.tpr = truth.empty() ? 1.0 : static_cast<double>(tp) / truth.size();
  m.tnr = (tn + fp) == 0 ? 1.0 : static_cast<double>(tn) / (tn + fp);
  if (est.empty()) {
    m.empty_prediction = true;
    m.ppv = 0.0;
  } else {
    m.ppv = static_cast<double>(tp) / est.size();
  }
  return m;
}

}  // namespace mnpca
