#include "dicausal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dicausal/errors.hpp"
#include "dicausal/textio.hpp"

namespace dicausal {
namespace {

constexpr double kDenominatorFloor = 1e-12;
constexpr double kVarianceFloor = 1e-6;

void check_entry(double v, std::size_t row, std::size_t col) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DataError("accuracy a[" + std::to_string(row + 1) + "][" + std::to_string(col + 1) + "] = " +
                    textio::format_double(v) + " is outside [0, 1]");
  }
}

}  // namespace

AccuracyMatrix::AccuracyMatrix(std::vector<std::vector<double>> rows) {
  for (auto& r : rows) append_row(std::move(r));
}

void AccuracyMatrix::append_row(std::vector<double> row) {
  const std::size_t i = rows_.size();
  if (row.size() != i + 1) {
    throw DataError("accuracy matrix row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                    " entries, expected " + std::to_string(i + 1));
  }
  for (std::size_t j = 0; j < row.size(); ++j) check_entry(row[j], i, j);
  rows_.push_back(std::move(row));
}

AccuracyMatrix parse_matrix_csv(std::string_view text, const std::string& origin) {
  AccuracyMatrix m;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = textio::split_csv(line);
    const std::size_t expected = m.size() + 1;
    if (fields.size() != expected) {
      throw DataError("row " + std::to_string(expected) + " has " + std::to_string(fields.size()) +
                          " values, expected " + std::to_string(expected),
                      origin, line_no);
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      const auto v = textio::parse_double(f);
      if (!v) throw DataError("non-numeric value '" + std::string(f) + "'", origin, line_no);
      row.push_back(*v);
    }
    try {
      m.append_row(std::move(row));
    } catch (const DataError& e) {
      throw DataError(e.what(), origin, line_no);
    }
  }
  if (m.size() == 0) throw DataError("accuracy matrix is empty", origin);
  return m;
}

std::string to_csv(const AccuracyMatrix& m) {
  std::string out;
  for (const auto& row : m.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += textio::format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

double average_accuracy(const AccuracyMatrix& m) {
  if (m.size() == 0) throw DataError("average accuracy of an empty matrix");
  const auto& last = m.rows().back();
  double total = 0.0;
  for (double v : last) total += v;
  return total / static_cast<double>(last.size());
}

std::vector<double> forgetting_terms(const AccuracyMatrix& m, ForgettingKind kind, std::vector<std::string>* warnings) {
  const std::size_t T = m.size();
  if (T < 2) throw UndefinedMetricError("forgetting metrics need at least 2 domains, got " + std::to_string(T));
  const std::size_t last = T - 1;
  std::vector<double> terms;
  terms.reserve(last);
  for (std::size_t j = 0; j < last; ++j) {
    const double final_acc = m.at(last, j);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = j; i < last; ++i) {
      const double earlier = m.at(i, j);
      double term = 0.0;
      switch (kind) {
        case ForgettingKind::absolute:
          term = earlier - final_acc;
          break;
        case ForgettingKind::relative:
          if (earlier < kDenominatorFloor) continue;
          term = (earlier - final_acc) / earlier;
          break;
        case ForgettingKind::performance_aware:
          if (earlier < kDenominatorFloor) continue;
          term = (1.0 - final_acc) * (earlier - final_acc) / earlier;
          break;
      }
      best = std::max(best, term);
    }
    if (std::isinf(best)) {
      best = 0.0;
      if (warnings) {
        warnings->push_back("domain " + std::to_string(j + 1) +
                            ": every earlier accuracy is zero; relative term set to 0");
      }
    }
    terms.push_back(best);
  }
  return terms;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

}  // namespace

double absolute_forgetting(const AccuracyMatrix& m) {
  return mean_of(forgetting_terms(m, ForgettingKind::absolute));
}

double relative_forgetting(const AccuracyMatrix& m, std::vector<std::string>* warnings) {
  return mean_of(forgetting_terms(m, ForgettingKind::relative, warnings));
}

double performance_aware_relative_forgetting(const AccuracyMatrix& m, std::vector<std::string>* warnings) {
  return mean_of(forgetting_terms(m, ForgettingKind::performance_aware, warnings));
}

MetricReport metric_report(const AccuracyMatrix& m) {
  MetricReport r;
  r.num_domains = m.size();
  r.acc = average_accuracy(m);
  r.final_accuracy = m.rows().back();
  if (m.size() >= 2) {
    r.af_terms = forgetting_terms(m, ForgettingKind::absolute);
    r.rf_terms = forgetting_terms(m, ForgettingKind::relative, &r.warnings);
    r.prf_terms = forgetting_terms(m, ForgettingKind::performance_aware);
    r.af = mean_of(r.af_terms);
    r.rf = mean_of(r.rf_terms);
    r.prf = mean_of(r.prf_terms);
  }
  return r;
}

double diagonal_gaussian_kl(const std::vector<double>& mean_p, const std::vector<double>& var_p,
                            const std::vector<double>& mean_q, const std::vector<double>& var_q) {
  const std::size_t d = mean_p.size();
  if (var_p.size() != d || mean_q.size() != d || var_q.size() != d) {
    throw DimensionError("diagonal_gaussian_kl: dimension mismatch");
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = mean_p[k] - mean_q[k];
    kl += 0.5 * (std::log(var_q[k] / var_p[k]) + (var_p[k] + diff * diff) / var_q[k] - 1.0);
  }
  return kl;
}

std::vector<std::vector<double>> kl_difference_matrix(
    const std::vector<std::vector<std::vector<double>>>& representations) {
  const std::size_t T = representations.size();
  std::vector<std::vector<double>> means(T), vars(T);
  std::size_t dim = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& samples = representations[t];
    if (samples.size() < 2) {
      throw InsufficientDataError("domain " + std::to_string(t + 1) + " has " + std::to_string(samples.size()) +
                                  " samples; at least 2 are needed to fit a Gaussian");
    }
    if (t == 0) dim = samples[0].size();
    means[t].assign(dim, 0.0);
    vars[t].assign(dim, 0.0);
    for (const auto& s : samples) {
      if (s.size() != dim) throw DimensionError("kl_difference_matrix: vectors of differing width");
      for (std::size_t k = 0; k < dim; ++k) means[t][k] += s[k];
    }
    const double n = static_cast<double>(samples.size());
    for (double& mu : means[t]) mu /= n;
    for (const auto& s : samples) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = s[k] - means[t][k];
        vars[t][k] += d * d;
      }
    }
    for (double& v : vars[t]) v = std::max(v / n, kVarianceFloor);
  }
  std::vector<std::vector<double>> out(T, std::vector<double>(T, 0.0));
  for (std::size_t p = 0; p < T; ++p) {
    for (std::size_t q = 0; q < T; ++q) {
      if (p != q) out[p][q] = diagonal_gaussian_kl(means[p], vars[p], means[q], vars[q]);
    }
  }
  return out;
}

}  // namespace dicausal
