#include "gsift/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include "gsift/error.hpp"
#include "gsift/rng.hpp"

namespace gsift {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(Errc::empty_input, "mean of nothing");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

EvalReport run_trials(const Dataset& ds, std::span<const KernelSpec> kernels, const EvalConfig& cfg,
                      const Classifier& classify) {
  if (cfg.n_trials < 1) throw Error(Errc::invalid_argument, "need at least one trial");
  if (kernels.empty()) throw Error(Errc::invalid_argument, "no kernels to evaluate");

  EvalReport report;
  report.config = cfg;
  for (const auto& k : kernels) report.kernels.push_back({k, 0.0, 0.0, {}});

  for (int t = 0; t < cfg.n_trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    const Split split = stratified_split(ds, cfg.test_fraction, trial_seed);
    std::vector<int> truth;
    truth.reserve(split.test.size());
    for (std::size_t i : split.test) truth.push_back(ds.items[i].label);

    for (auto& kr : report.kernels) {
      std::vector<int> predicted;
      try {
        predicted = classify(split.train, split.test, kr.kernel, trial_seed);
      } catch (const Error& e) {
        throw Error(e.code(), "trial " + std::to_string(t) + ", kernel " + kernel_label(kr.kernel) +
                                  ": " + e.what());
      }
      kr.trials.push_back({t, split.train.size(), split.test.size(), accuracy(predicted, truth)});
    }
  }

  for (auto& kr : report.kernels) {
    std::vector<double> acc;
    for (const auto& tr : kr.trials) acc.push_back(tr.accuracy);
    kr.mean_accuracy = mean(acc);
    kr.variance = sample_variance(acc);
  }
  return report;
}

EvalReport run_trials(const Dataset& ds, std::span<const FeatureVector> features,
                      std::span<const KernelSpec> kernels, const EvalConfig& cfg) {
  if (features.size() != ds.items.size()) {
    throw Error(Errc::dimension_mismatch, "feature count differs from dataset size");
  }
  std::vector<std::vector<double>> xs;
  xs.reserve(features.size());
  for (const auto& fv : features) xs.emplace_back(fv.values.begin(), fv.values.end());

  auto classify = [&](std::span<const std::size_t> train_idx, std::span<const std::size_t> test_idx,
                      const KernelSpec& kernel, std::uint64_t trial_seed) {
    std::vector<LabeledSample> train_set;
    train_set.reserve(train_idx.size());
    for (std::size_t i : train_idx) train_set.push_back({xs[i], ds.items[i].label});
    TrainConfig tc = cfg.train;
    tc.seed = trial_seed;
    const SvmModel model = train(train_set, kernel, tc);
    std::vector<int> out;
    out.reserve(test_idx.size());
    for (std::size_t i : test_idx) out.push_back(predict(model, xs[i]));
    return out;
  };
  return run_trials(ds, kernels, cfg, classify);
}

std::string kernel_label(const KernelSpec& k) {
  if (k.kind != KernelKind::rbf) return to_string(k.kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, "rbf(gamma=%.6g)", k.gamma);
  return buf;
}

std::string format_table(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %18s %12s\n", "Kernel classifier", "Accuracy percent",
                "Variance");
  out << line;
  for (const auto& kr : report.kernels) {
    std::snprintf(line, sizeof line, "%-24s %18.3f %12.4f\n", kernel_label(kr.kernel).c_str(),
                  kr.mean_accuracy, kr.variance);
    out << line;
  }
  return out.str();
}

std::string format_kv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  const auto& c = report.config;
  out << "format=GSEVAL1\n"
      << "seed=" << c.seed << '\n'
      << "trials=" << c.n_trials << '\n'
      << "test_fraction=" << c.test_fraction << '\n'
      << "C=" << c.train.C << '\n'
      << "tol=" << c.train.tol << '\n'
      << "max_passes=" << c.train.max_passes << '\n';
  for (std::size_t k = 0; k < report.kernels.size(); ++k) {
    const auto& kr = report.kernels[k];
    const std::string p = "kernel." + std::to_string(k) + ".";
    out << p << "kind=" << to_string(kr.kernel.kind) << '\n';
    if (kr.kernel.kind == KernelKind::rbf) out << p << "gamma=" << kr.kernel.gamma << '\n';
    out << p << "mean_accuracy=" << kr.mean_accuracy << '\n' << p << "variance=" << kr.variance << '\n';
    for (const auto& tr : kr.trials) {
      const std::string q = p + "trial." + std::to_string(tr.trial_index) + ".";
      out << q << "train=" << tr.train_count << '\n'
          << q << "test=" << tr.test_count << '\n'
          << q << "accuracy=" << tr.accuracy << '\n';
    }
  }
  return out.str();
}

}  // namespace gsift
