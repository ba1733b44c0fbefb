#pragma once

// Independent reference computations. Nothing here calls into the library
// except for plain containers, so a bug in src/ cannot hide in its own oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix matmul_bias(const Matrix& a, const Matrix& w, const std::vector<double>& b) {
  Matrix out(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      double s = 0.0;
      for (std::size_t d = 0; d < w.size(); ++d) s += a[i][d] * w[d][k];
      out[i][k] = s + b[k];
    }
  return out;
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double z = 0.0;
    for (double v : logits[i]) z += std::exp(v);
    total += std::log(z) - logits[i][static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(logits.size());
}

// Central difference of f along coordinate `i` of x.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double eps) {
  const double saved = x[i];
  x[i] = saved + eps;
  const double up = f(x);
  x[i] = saved - eps;
  const double down = f(x);
  return (up - down) / (2.0 * eps);
}

// Forgetting metrics evaluated straight from the definitions: for every
// earlier domain j take the max over all rows i in [j, T-2] of the per-row
// term, then average over j. Rows with a zero denominator are skipped and a
// domain with no usable row contributes 0.
enum class Forgetting { absolute, relative, performance_aware };

inline double forgetting(const Matrix& a, Forgetting kind) {
  const std::size_t t = a.size();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < t; ++j) {
    const double last = a[t - 1][j];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = j; i + 1 < t; ++i) {
      const double hist = a[i][j];
      double term = 0.0;
      if (kind == Forgetting::absolute) {
        term = hist - last;
      } else {
        if (hist < 1e-12) continue;
        term = (hist - last) / hist;
        if (kind == Forgetting::performance_aware) term *= 1.0 - last;
      }
      best = std::max(best, term);
    }
    sum += std::isinf(best) ? 0.0 : best;
  }
  return sum / static_cast<double>(t - 1);
}

inline double mean_final_row(const Matrix& a) {
  double s = 0.0;
  for (double v : a.back()) s += v;
  return s / static_cast<double>(a.back().size());
}

// Nearest class centroid over feature vectors.
struct CentroidClassifier {
  Matrix centroids;

  static CentroidClassifier fit(const Matrix& features, const std::vector<int>& labels, int classes) {
    CentroidClassifier c;
    c.centroids.assign(static_cast<std::size_t>(classes), std::vector<double>(features.front().size(), 0.0));
    std::vector<double> counts(static_cast<std::size_t>(classes), 0.0);
    for (std::size_t n = 0; n < features.size(); ++n) {
      auto& row = c.centroids[static_cast<std::size_t>(labels[n])];
      for (std::size_t d = 0; d < row.size(); ++d) row[d] += features[n][d];
      counts[static_cast<std::size_t>(labels[n])] += 1.0;
    }
    for (std::size_t k = 0; k < c.centroids.size(); ++k)
      for (double& v : c.centroids[k]) v /= std::max(1.0, counts[k]);
    return c;
  }

  int predict(const std::vector<double>& x) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - centroids[k][i]) * (x[i] - centroids[k][i]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    return best;
  }

  double accuracy(const Matrix& features, const std::vector<int>& labels) const {
    std::size_t hits = 0;
    for (std::size_t n = 0; n < features.size(); ++n) hits += predict(features[n]) == labels[n];
    return static_cast<double>(hits) / static_cast<double>(features.size());
  }
};

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, std::vector<double>(cols));
  for (auto& r : m)
    for (double& v : r) v = u(rng);
  return m;
}

// Frozen fixtures: the two toy accuracy matrices used to illustrate the
// forgetting metrics.
inline const Matrix kYellow = {{0.8}, {0.6, 0.9}, {0.4, 0.45, 0.6}};
inline const Matrix kBlue = {{0.4}, {0.28, 0.3}, {0.22, 0.17, 0.4}};

}  // namespace oracle
