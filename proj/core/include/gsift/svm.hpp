#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gsift {

enum class KernelKind { linear, quadratic, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  /// rbf only; must be > 0 for rbf.
  double gamma = 0.0;

  static KernelSpec linear() { return {KernelKind::linear, 0.0}; }
  static KernelSpec quadratic() { return {KernelKind::quadratic, 0.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }

  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string to_string(KernelKind kind);
std::optional<KernelKind> parse_kernel_kind(const std::string& name);

/// Kernel with gamma = 1/dim when `spec` is rbf without a gamma.
KernelSpec with_default_gamma(KernelSpec spec, std::size_t dim);

struct LabeledSample {
  std::vector<double> x;
  /// -1 or +1.
  int y = 1;
};

struct SvmModel {
  KernelSpec kernel;
  double C = 1.0;
  double bias = 0.0;
  std::vector<std::vector<double>> support_vectors;
  /// y_i * alpha_i for each support vector.
  std::vector<double> coeffs;

  std::size_t dim() const noexcept { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

struct TrainConfig {
  double C = 1.0;
  /// KKT tolerance; training stops once the maximal violating pair gap
  /// falls below this.
  double tol = 1e-3;
  /// Iteration budget in units of 100000 pair updates.
  int max_passes = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// linear: x.x'   quadratic: (x.x' + 1)^2   rbf: exp(-gamma |x - x'|^2)
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp);

/// Gram matrix over `xs`, row-major n x n.
std::vector<double> gram_matrix(const KernelSpec& spec, std::span<const std::vector<double>> xs);

/// Dual multipliers and bias as produced by the solver; alphas are aligned
/// with the input samples.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// SMO on a precomputed Gram matrix.
DualSolution solve_dual(std::span<const double> gram, std::span<const int> labels, const TrainConfig& cfg);

/// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double dual_objective(std::span<const double> gram, std::span<const int> labels,
                      std::span<const double> alpha);

SvmModel train(std::span<const LabeledSample> data, const KernelSpec& kernel, const TrainConfig& cfg = {});

/// f(x) = sum_i coeff_i k(x, sv_i) + b
double decision_value(const SvmModel& model, std::span<const double> x);
/// Sign of the decision value; exactly zero maps to +1.
int predict(const SvmModel& model, std::span<const double> x);

/// Text format, 17 significant digits:
///   GSVM1
///   kernel <kind> [gamma]
///   C <v> b <v> dim <p> nsv <m>
///   <coeff> <v0> ... <v_{p-1}>     (m lines)
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace gsift
