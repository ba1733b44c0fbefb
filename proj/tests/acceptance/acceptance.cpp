// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "certificates.hpp"
#include "dicausal/disentangle.hpp"
#include "dicausal/experiment.hpp"
#include "dicausal/grad_check.hpp"
#include "dicausal/intervention.hpp"
#include "dicausal/metrics.hpp"
#include "dicausal/textio.hpp"
#include "dicausal/trainer.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dicausal;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

AccuracyMatrix leading(const oracle::Matrix& m, std::size_t t) {
  return AccuracyMatrix(oracle::Matrix(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(t)));
}

Verdict metric_fixtures() {
  const auto y3 = leading(oracle::kYellow, 3);
  const auto y2 = leading(oracle::kYellow, 2);
  const auto b3 = leading(oracle::kBlue, 3);
  const double af3 = absolute_forgetting(y3), rf3 = relative_forgetting(y3);
  const double af2 = absolute_forgetting(y2), rf2 = relative_forgetting(y2);
  const double prf2 = performance_aware_relative_forgetting(y2), afb = absolute_forgetting(b3);
  const bool ok = close(af3, 0.425, 1e-9) && close(rf3, 0.5, 1e-9) && close(af2, 0.2, 1e-9) &&
                  close(rf2, 0.25, 1e-9) && close(prf2, 0.1, 1e-9) && close(afb, 0.155, 1e-9);
  return {ok, "yellow T3 AF=" + fmt(af3) + " RF=" + fmt(rf3) + "; T2 AF=" + fmt(af2) + " RF=" + fmt(rf2) +
                  " PRF=" + fmt(prf2) + "; blue AF=" + fmt(afb)};
}

Verdict disentangle_identities() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  double mask_err = 0.0, part_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t b = dim(rng), d = dim(rng);
    const auto z = testing::random_tensor({b, d}, rng, -5.0, 5.0);
    const auto w = testing::random_tensor({d, d}, rng, -3.0, 3.0);
    const auto bias = testing::random_tensor({d}, rng, -3.0, 3.0);
    const auto p = disentangle(w, bias, z);
    for (std::size_t i = 0; i < z.size(); ++i) {
      mask_err = std::max(mask_err, std::abs(p.causal_mask.data()[i] + p.spurious_mask.data()[i] - 1.0));
      part_err = std::max(part_err, std::abs(p.causal.data()[i] + p.spurious.data()[i] - z.data()[i]));
    }
  }
  return {mask_err <= 1e-12 && part_err <= 1e-12,
          "max|M_R+M_I-1|=" + fmt(mask_err) + " max|Z_R+Z_I-Z|=" + fmt(part_err)};
}

// Truncation error of the central difference at 1e-3 is ~1e-9, comparable to
// the smallest gradients here; 1e-5 keeps both truncation and rounding well
// below them.
constexpr double kFiniteDifferenceStep = 1e-5;

Verdict gradient_check() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::string where;
  for (auto kind : {EncoderKind::linear, EncoderKind::mlp})
    for (double lambda : {0.0, 0.5, 1.0})
      for (int rep = 0; rep < 20; ++rep) {
        ModelConfig c;
        c.encoder = kind;
        c.series_length = 6;
        c.channels = 2;
        c.feature_dim = 5;
        c.hidden_dim = 4;
        c.num_classes = 3;
        c.seed = rng();
        auto params = init_params(c);
        std::uniform_real_distribution<double> jitter(-0.5, 0.5);
        for (auto& e : params.entries)
          for (double& v : e.value.data()) v += jitter(rng);
        Batch batch;
        batch.x = testing::random_tensor({8, c.series_length, c.channels}, rng, -2.0, 2.0);
        std::uniform_int_distribution<int> label(0, 2);
        for (std::int64_t i = 0; i < 8; ++i) {
          batch.labels.push_back(label(rng));
          batch.sample_ids.push_back(i);
        }
        Rng plan_rng(rng());
        const auto plan = plan_perturbations(batch.labels, plan_rng);
        const LossFunction loss = [&](const std::vector<Parameter>& ps, std::vector<Tensor>* grads) {
          ModelParams p = params;
          p.entries = ps;
          auto r = dual_loss(p, batch, {lambda, 0.0}, plan);
          if (grads) *grads = std::move(r.grads);
          return r.report.total;
        };
        const auto r = grad_check(loss, params.entries, kFiniteDifferenceStep);
        if (r.max_relative_error >= worst) {
          worst = r.max_relative_error;
          where = std::string(to_string(kind)) + " lambda=" + fmt(lambda) + " " + r.worst_parameter + "[" +
                  std::to_string(r.worst_index) + "] a=" + fmt(r.worst_analytic) + " n=" + fmt(r.worst_numeric);
        }
      }
  return {worst < 1e-4, "max relative error " + fmt(worst) + " (" + where + ")"};
}

SynthConfig benchmark(std::uint64_t seed) {
  SynthConfig s;
  s.num_domains = 5;
  s.num_classes = 3;
  s.series_length = 64;
  s.channels = 2;
  s.noise_std = 0.05;
  s.spurious_strength = 2.0;
  s.seed = seed;
  return s;
}

ModelConfig linear_model(const Manifest& m, std::uint64_t seed) {
  ModelConfig c;
  c.encoder = EncoderKind::linear;
  c.series_length = m.series_length;
  c.channels = m.channels;
  c.num_classes = m.num_classes;
  c.feature_dim = 64;
  c.seed = seed;
  return c;
}

TrainConfig benchmark_train(std::uint64_t seed, Method method, double lambda = 0.5) {
  TrainConfig t;
  t.epochs = 30;
  t.lambda = lambda;
  t.seed = seed;
  t.method = method;
  return t;
}

Verdict loss_decomposition() {
  auto synth = benchmark(1);
  synth.num_domains = 3;
  const auto seq = generate_synthetic(synth);
  auto train = benchmark_train(1, Method::dualcd, 0.3);
  train.epochs = 5;
  const auto r = run_sequence(seq, linear_model(seq.manifest, 1), train);
  double worst = 0.0;
  std::size_t steps = 0;
  for (const auto& log : r.logs)
    for (const auto& s : log.steps) {
      worst = std::max(worst, std::abs(s.total - (s.lambda * s.intra + (1 - s.lambda) * s.inter)));
      ++steps;
    }
  return {steps > 0 && worst <= 1e-12, std::to_string(steps) + " steps, max residual " + fmt(worst)};
}

Verdict plan_validity() {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  std::uniform_int_distribution<int> classes(1, 6);
  Rng rng(100);
  std::size_t violations = 0;
  for (int k = 0; k < 10000; ++k) {
    std::uniform_int_distribution<int> label(0, classes(gen) - 1);
    std::vector<int> labels(size(gen));
    for (int& l : labels) l = label(gen);
    const auto plan = plan_perturbations(labels, rng);
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::size_t p = plan.intra_partner[i];
      const bool alone = counts[labels[i]] == 1;
      if (p >= labels.size() || labels[p] != labels[i] || (alone ? p != i : p == i)) ++violations;
      const auto& q = plan.inter_partner[i];
      if (counts.size() == 1) {
        if (q) ++violations;
      } else if (!q || *q >= labels.size() || labels[*q] == labels[i]) {
        ++violations;
      }
    }
  }
  return {violations == 0, "10000 label vectors, " + std::to_string(violations) + " violations"};
}

Verdict comparative_claim() {
  int wins = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto seq = generate_synthetic(benchmark(seed));
    const auto model = linear_model(seq.manifest, seed);
    const auto dual = metric_report(run_sequence(seq, model, benchmark_train(seed, Method::dualcd)).matrix);
    const auto base = metric_report(run_sequence(seq, model, benchmark_train(seed, Method::baseline_ce)).matrix);
    const double dual_prf = dual.prf.value_or(0.0), base_prf = base.prf.value_or(0.0);
    wins += dual.acc > base.acc && dual_prf < base_prf;
    detail << " s" << seed << ":ACC " << fmt(dual.acc) << "/" << fmt(base.acc) << " PRF " << fmt(dual_prf) << "/"
           << fmt(base_prf);
  }
  return {wins >= 4, std::to_string(wins) + "/5 seeds strictly better (dualcd/baseline)" + detail.str()};
}

Verdict no_shift_control() {
  double af[2] = {0.0, 0.0};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto synth = benchmark(seed);
    synth.num_domains = 3;
    synth.shift_domains = false;
    const auto seq = generate_synthetic(synth);
    for (auto method : {Method::dualcd, Method::baseline_ce}) {
      const auto r = run_sequence(seq, linear_model(seq.manifest, seed), benchmark_train(seed, method));
      af[method == Method::dualcd ? 0 : 1] += absolute_forgetting(r.matrix) / 5.0;
    }
  }
  return {af[0] < 0.02 && af[1] < 0.02, "mean AF dualcd=" + fmt(af[0]) + " baseline_ce=" + fmt(af[1])};
}

Verdict determinism() {
  testing::TempDir dir("acceptance_det");
  nlohmann::json config = to_json(ExperimentConfig{});
  config["seed"] = 7;
  config["synthetic"] = to_json(benchmark(7));
  textio::write_file(dir / "run.json", config.dump());
  std::string matrices[2];
  for (int k = 0; k < 2; ++k) {
    const auto out = dir / ("run" + std::to_string(k));
    const std::string cmd = std::string(DICAUSAL_BIN) + " run --config " + (dir / "run.json").string() + " --out " +
                            out.string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0 || !fs::exists(out / "matrix.csv"))
      return {false, "run " + std::to_string(k) + " failed"};
    matrices[k] = textio::read_file(out / "matrix.csv");
  }
  return {!matrices[0].empty() && matrices[0] == matrices[1],
          matrices[0] == matrices[1] ? "matrix.csv byte-identical" : "matrix.csv differs"};
}

Verdict certificates_check() {
  double worst_causal = 1.0, worst_spurious = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto seq = generate_synthetic(benchmark(seed));
    worst_causal = std::min(worst_causal, certificates::causal_separability(seq));
    worst_spurious = std::max(worst_spurious, certificates::spurious_transfer(seq));
  }
  const double bound = 1.0 / 3.0 + 0.1;
  return {worst_causal >= 0.99 && worst_spurious <= bound,
          "min causal separability " + fmt(worst_causal) + ", max spurious transfer " + fmt(worst_spurious) +
              " (bound " + fmt(bound) + ")"};
}

Verdict lambda_endpoints() {
  int ok = 0;
  bool completed = true;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto seq = generate_synthetic(benchmark(seed));
    const auto model = linear_model(seq.manifest, seed);
    double acc[3];
    const double lambdas[3] = {0.0, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) {
      const auto r = run_sequence(seq, model, benchmark_train(seed, Method::dualcd, lambdas[k]));
      const auto report = metric_report(r.matrix);
      completed = completed && std::isfinite(report.acc) && report.af.has_value();
      acc[k] = report.acc;
    }
    ok += acc[1] >= std::max(acc[0], acc[2]);
    detail << " s" << seed << ":" << fmt(acc[0]) << "/" << fmt(acc[1]) << "/" << fmt(acc[2]);
  }
  return {completed && ok >= 3,
          std::to_string(ok) + "/5 seeds with ACC(0.5) >= max(ACC(0), ACC(1)); ACC at 0/0.5/1" + detail.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"metric fixtures", metric_fixtures},
      {"disentanglement identities", disentangle_identities},
      {"dual loss gradient check", gradient_check},
      {"loss decomposition on every step", loss_decomposition},
      {"perturbation plan validity", plan_validity},
      {"dualcd beats baseline_ce", comparative_claim},
      {"no-shift control", no_shift_control},
      {"cli run determinism", determinism},
      {"benchmark certificates", certificates_check},
      {"lambda endpoint ablations", lambda_endpoints},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s %2d %s: %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
