#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dicausal {

// Lower-triangular matrix of test accuracies: at(i, j) is the accuracy on
// domain j after training through domain i (0-based, j <= i).
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(std::vector<std::vector<double>> rows);

  // Appends row i = size(); it must hold exactly i + 1 entries in [0, 1].
  void append_row(std::vector<double> row);

  std::size_t size() const { return rows_.size(); }
  double at(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&) = default;

 private:
  std::vector<std::vector<double>> rows_;
};

// Row i holds i + 1 comma-separated values. Throws DataError naming the
// 1-based line for a wrong length, non-numeric field or out-of-range value.
AccuracyMatrix parse_matrix_csv(std::string_view text, const std::string& origin = "matrix");
std::string to_csv(const AccuracyMatrix& m);

// Mean of the final row.
double average_accuracy(const AccuracyMatrix& m);

// The three forgetting metrics average a per-domain term over j < T-1 (0-based
// final index T-1), each a max over the rows i in [j, T-2] where a[i][j] is
// defined:
//   AF:  a[i][j] - a[T-1][j]
//   RF:  (a[i][j] - a[T-1][j]) / a[i][j]
//   PRF: (1 - a[T-1][j]) * (a[i][j] - a[T-1][j]) / a[i][j]
// RF and PRF skip rows with a[i][j] < 1e-12; a domain with every row skipped
// contributes 0 and appends a warning. All three throw UndefinedMetricError
// for T < 2.
double absolute_forgetting(const AccuracyMatrix& m);
double relative_forgetting(const AccuracyMatrix& m, std::vector<std::string>* warnings = nullptr);
double performance_aware_relative_forgetting(const AccuracyMatrix& m, std::vector<std::string>* warnings = nullptr);

enum class ForgettingKind { absolute, relative, performance_aware };
std::vector<double> forgetting_terms(const AccuracyMatrix& m, ForgettingKind kind,
                                     std::vector<std::string>* warnings = nullptr);

struct MetricReport {
  std::size_t num_domains = 0;
  double acc = 0.0;
  std::optional<double> af;
  std::optional<double> rf;
  std::optional<double> prf;
  std::vector<double> final_accuracy;
  std::vector<double> af_terms;
  std::vector<double> rf_terms;
  std::vector<double> prf_terms;
  std::vector<std::string> warnings;
};

MetricReport metric_report(const AccuracyMatrix& m);

// Closed-form KL(N(mean_p, var_p) || N(mean_q, var_q)) for diagonal Gaussians,
// summed over coordinates.
double diagonal_gaussian_kl(const std::vector<double>& mean_p, const std::vector<double>& var_p,
                            const std::vector<double>& mean_q, const std::vector<double>& var_q);

// One collection of D-vectors per domain (same class). Fits a diagonal
// Gaussian per domain (maximum-likelihood variance, floored at 1e-6) and
// returns the T x T matrix of pairwise KL divergences, zero on the diagonal.
std::vector<std::vector<double>> kl_difference_matrix(
    const std::vector<std::vector<std::vector<double>>>& representations);

}  // namespace dicausal
