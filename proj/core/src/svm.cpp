#include "gsift/svm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gsift/error.hpp"
#include "gsift/rng.hpp"

namespace gsift {

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw Error(Errc::invalid_argument, "rbf kernel needs gamma > 0");
  }
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::quadratic: return "quadratic";
    case KernelKind::rbf: return "rbf";
  }
  return "unknown";
}

std::optional<KernelKind> parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "quadratic") return KernelKind::quadratic;
  if (name == "rbf") return KernelKind::rbf;
  return std::nullopt;
}

KernelSpec with_default_gamma(KernelSpec spec, std::size_t dim) {
  if (spec.kind == KernelKind::rbf && !(spec.gamma > 0.0) && dim > 0) {
    spec.gamma = 1.0 / static_cast<double>(dim);
  }
  return spec;
}

void TrainConfig::validate() const {
  if (!(C > 0.0 && std::isfinite(C))) throw Error(Errc::invalid_argument, "C must be > 0");
  if (!(tol > 0.0 && std::isfinite(tol))) throw Error(Errc::invalid_argument, "tol must be > 0");
  if (max_passes < 1) throw Error(Errc::invalid_argument, "max_passes must be >= 1");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp) {
  if (x.size() != xp.size()) {
    throw Error(Errc::dimension_mismatch, "kernel arguments have dimensions " +
                                              std::to_string(x.size()) + " and " +
                                              std::to_string(xp.size()));
  }
  switch (spec.kind) {
    case KernelKind::linear: {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * xp[i];
      return dot;
    }
    case KernelKind::quadratic: {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * xp[i];
      return (dot + 1.0) * (dot + 1.0);
    }
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - xp[i];
        d2 += d * d;
      }
      return std::exp(-spec.gamma * d2);
    }
  }
  throw Error(Errc::invalid_argument, "unknown kernel kind");
}

std::vector<double> gram_matrix(const KernelSpec& spec, std::span<const std::vector<double>> xs) {
  const std::size_t n = xs.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval(spec, xs[i], xs[j]);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }
  return k;
}

double dual_objective(std::span<const double> gram, std::span<const int> labels,
                      std::span<const double> alpha) {
  const std::size_t n = labels.size();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alpha[i];
    for (std::size_t j = 0; j < n; ++j) {
      quad += alpha[i] * alpha[j] * labels[i] * labels[j] * gram[i * n + j];
    }
  }
  return linear - 0.5 * quad;
}

DualSolution solve_dual(std::span<const double> gram, std::span<const int> labels, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = labels.size();
  if (gram.size() != n * n) throw Error(Errc::dimension_mismatch, "gram matrix is not n x n");
  const double C = cfg.C;
  constexpr double kTau = 1e-12;

  auto Q = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(labels[i] * labels[j]) * gram[i * n + j];
  };

  // Scan order fixes which index wins ties between equally violating candidates.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(cfg.seed);
  shuffle(std::span<std::size_t>(order), rng);

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto& alpha = sol.alpha;

  auto in_up = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < C);
  };

  const long max_iter = static_cast<long>(cfg.max_passes) * 100000L;
  double m_up = 0.0, m_low = 0.0;
  for (sol.iterations = 0; sol.iterations < max_iter; ++sol.iterations) {
    std::size_t i = n, j = n;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t : order) {
      const double v = -labels[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    if (i == n || j == n || m_up - m_low < cfg.tol) {
      sol.converged = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double quad = std::max(gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j], kTau);
    if (labels[i] != labels[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // Bias: mean over free vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += -labels[t] * grad[t];
      ++free_count;
    }
  }
  sol.bias = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (m_up + m_low);
  return sol;
}

SvmModel train(std::span<const LabeledSample> data, const KernelSpec& kernel, const TrainConfig& cfg) {
  kernel.validate();
  cfg.validate();
  if (data.empty()) throw Error(Errc::empty_input, "no training samples");
  const std::size_t dim = data.front().x.size();
  if (dim == 0) throw Error(Errc::invalid_argument, "zero-dimensional samples");

  bool has_pos = false, has_neg = false;
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(data.size());
  ys.reserve(data.size());
  for (const auto& s : data) {
    if (s.x.size() != dim) throw Error(Errc::dimension_mismatch, "inconsistent sample dimensions");
    if (s.y != 1 && s.y != -1) throw Error(Errc::invalid_argument, "labels must be -1 or +1");
    if (!std::all_of(s.x.begin(), s.x.end(), [](double v) { return std::isfinite(v); })) {
      throw Error(Errc::invalid_argument, "non-finite feature value");
    }
    (s.y == 1 ? has_pos : has_neg) = true;
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  if (!has_pos || !has_neg) throw Error(Errc::single_class, "training data holds a single class");

  const auto gram = gram_matrix(kernel, xs);
  const DualSolution sol = solve_dual(gram, ys, cfg);

  SvmModel model;
  model.kernel = kernel;
  model.C = cfg.C;
  model.bias = sol.bias;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      model.support_vectors.push_back(std::move(xs[i]));
      model.coeffs.push_back(ys[i] * sol.alpha[i]);
    }
  }
  if (model.support_vectors.empty()) {
    throw Error(Errc::invariant_violation, "solver returned no support vectors");
  }
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw Error(Errc::dimension_mismatch, "sample dimension " + std::to_string(x.size()) +
                                              " vs model dimension " + std::to_string(model.dim()));
  }
  double f = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.coeffs[i] * kernel_eval(model.kernel, x, model.support_vectors[i]);
  }
  return f + model.bias;
}

int predict(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

namespace {

std::string format17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw Error(Errc::malformed_file, path.string() + ": bad number '" + token + "'");
  }
  return v;
}

}  // namespace

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  model.kernel.validate();
  if (model.support_vectors.empty()) {
    throw Error(Errc::invariant_violation, "refusing to save a model without support vectors");
  }
  if (model.coeffs.size() != model.support_vectors.size()) {
    throw Error(Errc::invariant_violation, "coefficient count differs from support vector count");
  }
  const std::size_t dim = model.dim();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "GSVM1\n";
  out << "kernel " << to_string(model.kernel.kind);
  if (model.kernel.kind == KernelKind::rbf) out << ' ' << format17(model.kernel.gamma);
  out << '\n';
  out << "C " << format17(model.C) << " b " << format17(model.bias) << " dim " << dim << " nsv "
      << model.support_vectors.size() << '\n';
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    if (model.support_vectors[i].size() != dim) {
      throw Error(Errc::invariant_violation, "support vectors differ in dimension");
    }
    out << format17(model.coeffs[i]);
    for (double v : model.support_vectors[i]) out << ' ' << format17(v);
    out << '\n';
  }
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, path.string());
  std::string line;
  if (!std::getline(in, line) || line != "GSVM1") {
    throw Error(Errc::version_mismatch, path.string() + ": expected GSVM1 header");
  }

  SvmModel model;
  std::string tok;
  if (!std::getline(in, line)) throw Error(Errc::malformed_file, path.string() + ": missing kernel line");
  {
    std::istringstream fields(line);
    std::string kind;
    fields >> tok >> kind;
    const auto parsed = parse_kernel_kind(kind);
    if (tok != "kernel" || !parsed) throw Error(Errc::malformed_file, path.string() + ": bad kernel line");
    model.kernel.kind = *parsed;
    if (model.kernel.kind == KernelKind::rbf) {
      if (!(fields >> tok)) throw Error(Errc::malformed_file, path.string() + ": rbf without gamma");
      model.kernel.gamma = parse_double(tok, path);
    }
    model.kernel.validate();
  }

  std::size_t dim = 0, nsv = 0;
  if (!std::getline(in, line)) throw Error(Errc::malformed_file, path.string() + ": missing header line");
  {
    std::istringstream fields(line);
    std::string c_tok, c_val, b_tok, b_val, dim_tok, nsv_tok;
    fields >> c_tok >> c_val >> b_tok >> b_val >> dim_tok >> dim >> nsv_tok >> nsv;
    if (!fields || c_tok != "C" || b_tok != "b" || dim_tok != "dim" || nsv_tok != "nsv" || dim == 0 ||
        nsv == 0) {
      throw Error(Errc::malformed_file, path.string() + ": bad parameter line");
    }
    model.C = parse_double(c_val, path);
    model.bias = parse_double(b_val, path);
  }

  model.support_vectors.reserve(nsv);
  for (std::size_t i = 0; i < nsv; ++i) {
    if (!std::getline(in, line)) throw Error(Errc::malformed_file, path.string() + ": missing support vector");
    std::istringstream fields(line);
    if (!(fields >> tok)) throw Error(Errc::malformed_file, path.string() + ": empty support vector line");
    model.coeffs.push_back(parse_double(tok, path));
    std::vector<double> sv;
    sv.reserve(dim);
    while (fields >> tok) sv.push_back(parse_double(tok, path));
    if (sv.size() != dim) throw Error(Errc::malformed_file, path.string() + ": support vector length mismatch");
    model.support_vectors.push_back(std::move(sv));
  }
  return model;
}

}  // namespace gsift
