#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "gsift/svm.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace gsift;

namespace {

std::vector<LabeledSample> random_samples(std::size_t n, std::size_t dim, std::mt19937& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<LabeledSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].x.resize(dim);
    for (auto& v : out[i].x) v = g(gen);
    out[i].y = i % 2 == 0 ? 1 : -1;
  }
  return out;
}

std::vector<std::vector<double>> xs_of(const std::vector<LabeledSample>& d) {
  std::vector<std::vector<double>> xs;
  for (const auto& s : d) xs.push_back(s.x);
  return xs;
}

std::vector<int> ys_of(const std::vector<LabeledSample>& d) {
  std::vector<int> ys;
  for (const auto& s : d) ys.push_back(s.y);
  return ys;
}

SvmModel symmetric_pair_model() {
  const std::vector<LabeledSample> d{{{-1.0}, -1}, {{1.0}, 1}};
  TrainConfig cfg;
  cfg.C = 10.0;
  return train(d, KernelSpec::linear(), cfg);
}

const std::vector<KernelSpec> kAllKernels{KernelSpec::linear(), KernelSpec::quadratic(), KernelSpec::rbf(0.5)};

}  // namespace

TEST(Kernel, ReferenceValues) {
  const std::vector<double> a{1, 2}, b{3, 4}, z{0, 0}, o{1, 1};
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::linear(), a, b), 11.0);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::quadratic(), a, b), 144.0);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::rbf(0.3), a, a), 1.0);
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.5), z, o), 0.36787944117144233, 1e-15);
  EXPECT_ERRC(kernel_eval(KernelSpec::linear(), a, std::vector<double>{1.0}), Errc::dimension_mismatch);
}

TEST(Kernel, SpecValidationAndDefaults) {
  EXPECT_ERRC(KernelSpec::rbf(0.0).validate(), Errc::invalid_argument);
  EXPECT_EQ(with_default_gamma({KernelKind::rbf, 0.0}, 200).gamma, 1.0 / 200.0);
  EXPECT_EQ(with_default_gamma(KernelSpec::rbf(0.7), 200).gamma, 0.7);
  EXPECT_EQ(parse_kernel_kind("quadratic"), KernelKind::quadratic);
  EXPECT_FALSE(parse_kernel_kind("cubic").has_value());
}

TEST(Kernel, SymmetricOnRandomPairs) {
  std::mt19937 gen(1);
  for (const auto& k : kAllKernels) {
    for (int i = 0; i < 1000; ++i) {
      const auto s = random_samples(2, 7, gen);
      EXPECT_NEAR(kernel_eval(k, s[0].x, s[1].x), kernel_eval(k, s[1].x, s[0].x), 1e-12);
    }
  }
}

TEST(Gram, PositiveSemidefinite) {
  std::mt19937 gen(2);
  for (const auto& k : kAllKernels) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto s = random_samples(20, 5, gen);
      const auto g = gram_matrix(k, xs_of(s));
      Eigen::MatrixXd m(20, 20);
      for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) m(i, j) = g[i * 20 + j];
      }
      EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    }
  }
}

TEST(Train, SymmetricPair) {
  const SvmModel m = symmetric_pair_model();
  ASSERT_EQ(m.support_vectors.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(m.coeffs[i]), 0.5, 1e-3);
  EXPECT_NEAR(m.bias, 0.0, 1e-3);
  EXPECT_NEAR(decision_value(m, std::vector<double>{2.0}), 2.0, 1e-3);
  EXPECT_NEAR(decision_value(m, std::vector<double>{0.0}), 0.0, 1e-3);
}

TEST(Train, FourPointBoundaryIsMidway) {
  const std::vector<LabeledSample> d{{{0, 0}, -1}, {{0, 1}, -1}, {{3, 0}, 1}, {{3, 1}, 1}};
  TrainConfig cfg;
  cfg.C = 10.0;
  const SvmModel m = train(d, KernelSpec::linear(), cfg);
  for (const auto& s : d) EXPECT_EQ(predict(m, s.x), s.y);
  for (double y : {0.0, 0.5, 1.0}) {
    EXPECT_LT(decision_value(m, std::vector<double>{1.4, y}), 0.0);
    EXPECT_GT(decision_value(m, std::vector<double>{1.6, y}), 0.0);
  }
}

TEST(Train, RejectsBadInput) {
  const std::vector<LabeledSample> one_class{{{0.0}, 1}, {{1.0}, 1}};
  EXPECT_ERRC(train(one_class, KernelSpec::linear()), Errc::single_class);
  EXPECT_ERRC(train(std::vector<LabeledSample>{}, KernelSpec::linear()), Errc::empty_input);
  const std::vector<LabeledSample> ragged{{{0.0}, 1}, {{1.0, 2.0}, -1}};
  EXPECT_ERRC(train(ragged, KernelSpec::linear()), Errc::dimension_mismatch);
  const std::vector<LabeledSample> nan{{{std::nan("")}, 1}, {{1.0}, -1}};
  EXPECT_ERRC(train(nan, KernelSpec::linear()), Errc::invalid_argument);
}

TEST(Train, DualMatchesProjectedGradientOracle) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> size(2, 6);
  int fixtures = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = size(gen);
    auto s = random_samples(n, 2, gen);
    std::bernoulli_distribution flip(0.3);
    for (std::size_t i = 2; i < n; ++i) {
      if (flip(gen)) s[i].y = -s[i].y;
    }
    for (const auto& k : kAllKernels) {
      for (double C : {0.5, 1.0, 10.0}) {
        TrainConfig cfg;
        cfg.C = C;
        cfg.tol = 1e-6;
        const auto K = gram_matrix(k, xs_of(s));
        const auto y = ys_of(s);
        const DualSolution sol = solve_dual(K, y, cfg);
        ASSERT_TRUE(sol.converged);
        const auto ref = oracle::svm_dual_projected_gradient(K, y, C, 20000);
        const double got = dual_objective(K, y, sol.alpha);
        EXPECT_NEAR(got, oracle::svm_dual_value(K, y, ref), 1e-3) << "n=" << n << " C=" << C;
        ++fixtures;
      }
    }
  }
  EXPECT_EQ(fixtures, 40 * 9);
}

TEST(Train, ModelInvariantsAndKkt) {
  std::mt19937 gen(4);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = random_samples(20, 3, gen);
    for (const auto& k : kAllKernels) {
      TrainConfig cfg;
      cfg.C = 2.0;
      const SvmModel m = train(s, k, cfg);
      double sum = 0.0;
      for (double c : m.coeffs) {
        sum += c;
        EXPECT_GT(std::abs(c), 0.0);
        EXPECT_LE(std::abs(c), cfg.C);
      }
      EXPECT_NEAR(sum, 0.0, 1e-6);

      // KKT on every training sample, alpha recovered from the model.
      for (const auto& smp : s) {
        double alpha = 0.0;
        for (std::size_t j = 0; j < m.support_vectors.size(); ++j) {
          if (m.support_vectors[j] == smp.x) alpha = std::abs(m.coeffs[j]);
        }
        const double yf = smp.y * decision_value(m, smp.x);
        const double slack = cfg.tol + 1e-9;
        if (alpha == 0.0) {
          EXPECT_GE(yf, 1.0 - slack);
        } else if (alpha < cfg.C) {
          EXPECT_NEAR(yf, 1.0, slack);
        } else {
          EXPECT_LE(yf, 1.0 + slack);
        }
      }
    }
  }
}

TEST(Train, SeparableSetsAreFit) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t n = 2; n <= 20; ++n) {
    std::vector<LabeledSample> d;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = i % 2 == 0 ? 1 : -1;
      d.push_back({{y * (1.0 + std::abs(u(gen))), u(gen)}, y});
    }
    for (const auto& k : kAllKernels) {
      TrainConfig cfg;
      cfg.C = 100.0;
      const SvmModel m = train(d, k, cfg);
      for (const auto& s : d) EXPECT_EQ(predict(m, s.x), s.y) << "n=" << n;
    }
  }
}

TEST(Train, SameSeedSameModel) {
  std::mt19937 gen(6);
  const auto s = random_samples(30, 4, gen);
  TrainConfig cfg;
  cfg.seed = 99;
  const SvmModel a = train(s, KernelSpec::rbf(0.25), cfg);
  const SvmModel b = train(s, KernelSpec::rbf(0.25), cfg);
  EXPECT_EQ(a.coeffs, b.coeffs);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Predict, ZeroDecisionIsPositiveAndZeroAlphaTermsVanish) {
  SvmModel m;
  m.kernel = KernelSpec::linear();
  m.support_vectors = {{1.0}};
  m.coeffs = {1.0};
  m.bias = -1.0;
  EXPECT_EQ(decision_value(m, std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(predict(m, std::vector<double>{1.0}), 1);
  EXPECT_EQ(predict(m, std::vector<double>{0.5}), -1);

  const SvmModel sym = symmetric_pair_model();
  SvmModel padded = sym;
  padded.support_vectors.push_back({5.0});
  padded.coeffs.push_back(0.0);
  for (double x : {-2.0, 0.3, 4.0}) {
    EXPECT_EQ(decision_value(padded, std::vector<double>{x}), decision_value(sym, std::vector<double>{x}));
  }
  EXPECT_ERRC(decision_value(sym, std::vector<double>{1.0, 2.0}), Errc::dimension_mismatch);
}

TEST(ModelFile, RoundTripIsBitExact) {
  test::TempDir dir("svm");
  std::mt19937 gen(7);
  const auto s = random_samples(25, 6, gen);
  for (const auto& k : kAllKernels) {
    const SvmModel m = train(s, k, {});
    save_model(m, dir / "m.gsvm");
    const SvmModel back = load_model(dir / "m.gsvm");
    EXPECT_EQ(back.bias, m.bias);
    EXPECT_EQ(back.coeffs, m.coeffs);
    EXPECT_EQ(back.support_vectors, m.support_vectors);
    const auto probe = random_samples(10, 6, gen);
    for (const auto& p : probe) EXPECT_EQ(decision_value(back, p.x), decision_value(m, p.x));
  }
  const SvmModel sym = symmetric_pair_model();
  save_model(sym, dir / "s.gsvm");
  const std::string text = test::read_bytes(dir / "s.gsvm");
  EXPECT_EQ(text.substr(0, 21), "GSVM1\nkernel linear\nC");
}

TEST(ModelFile, Rejections) {
  test::TempDir dir("svm");
  test::write_bytes(dir / "v0.gsvm", "GSVM0\nkernel linear\n");
  EXPECT_ERRC(load_model(dir / "v0.gsvm"), Errc::version_mismatch);
  test::write_bytes(dir / "trunc.gsvm", "GSVM1\nkernel linear\nC 1 b 0 dim 1 nsv 2\n1 1\n");
  EXPECT_ERRC(load_model(dir / "trunc.gsvm"), Errc::malformed_file);
  SvmModel empty;
  EXPECT_ERRC(save_model(empty, dir / "e.gsvm"), Errc::invariant_violation);
}
