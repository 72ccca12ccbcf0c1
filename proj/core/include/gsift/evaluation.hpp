#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsift/dataset.hpp"
#include "gsift/feature_encode.hpp"
#include "gsift/svm.hpp"

namespace gsift {

struct EvalConfig {
  int n_trials = 10;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  TrainConfig train;
};

struct TrialResult {
  int trial_index = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  /// Percent in [0,100].
  double accuracy = 0.0;
};

struct KernelReport {
  KernelSpec kernel;
  double mean_accuracy = 0.0;
  /// Sample variance (divisor n-1) of the trial accuracies; 0 for one trial.
  double variance = 0.0;
  std::vector<TrialResult> trials;
};

struct EvalReport {
  EvalConfig config;
  std::vector<KernelReport> kernels;
};

/// Trains on `train` and returns one predicted label per entry of `test`
/// (indices into the dataset).
using Classifier = std::function<std::vector<int>(
    std::span<const std::size_t> train, std::span<const std::size_t> test, const KernelSpec& kernel,
    std::uint64_t trial_seed)>;

/// Trial t splits with derive_seed(seed, t); the split is shared by all
/// kernels of that trial.
EvalReport run_trials(const Dataset& ds, std::span<const KernelSpec> kernels, const EvalConfig& cfg,
                      const Classifier& classify);

/// Kernel SVM on precomputed feature vectors (aligned with ds.items).
EvalReport run_trials(const Dataset& ds, std::span<const FeatureVector> features,
                      std::span<const KernelSpec> kernels, const EvalConfig& cfg);

double mean(std::span<const double> xs);
/// Divisor n-1; 0 when fewer than two values.
double sample_variance(std::span<const double> xs);

/// Aligned table: kernel, accuracy percent, variance.
std::string format_table(const EvalReport& report);
/// key=value lines including every trial.
std::string format_kv(const EvalReport& report);

std::string kernel_label(const KernelSpec& k);

}  // namespace gsift
