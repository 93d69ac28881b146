#include <doctest.h>

#include <cmath>

#include "tensorord/augment.hpp"
#include "tensorord/simgen.hpp"

using namespace tensorord;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

AugmentConfig desk_config(std::uint64_t seed) {
  AugmentConfig c;
  c.r = {10};
  c.s = {20};
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("thresholded eigengaps") {
  CHECK(thresholded_eigengaps(vec({2, 2, 2}), 2.0).isZero(0.0));
  CHECK(thresholded_eigengaps(vec({35.75, 30, 30}), 30.0) == vec({5.75, 0, 0}));
  // Slight overestimation keeps the support and shifts the gaps.
  const Eigen::VectorXd eig = vec({52.99, 42.93, 35.75, 30, 30});
  const Eigen::VectorXd exact = thresholded_eigengaps(eig, 30.0), over = thresholded_eigengaps(eig, 32.0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK((exact(i) > 0) == (over(i) > 0));
    if (exact(i) > 0) CHECK(over(i) == doctest::Approx(exact(i) - 2.0));
  }
}

TEST_CASE("scree curve") {
  CHECK(scree_curve(Eigen::VectorXd::Zero(4)).isZero(0.0));
  const Eigen::VectorXd one = scree_curve(vec({4, 0, 0}));
  CHECK(one == vec({0.8, 0, 0, 0}));
  const Eigen::VectorXd mode1 = scree_curve(vec({22.99, 12.93, 5.75, 0, 0}));
  CHECK(mode1(2) == doctest::Approx(5.75 / (22.99 + 12.93 + 5.75 + 1)).epsilon(1e-14));
  CHECK(mode1(2) == doctest::Approx(0.1348).epsilon(1e-3));
  CHECK(mode1(5) == 0.0);
  CHECK(mode1.maxCoeff() < 1.0);
  CHECK(mode1.minCoeff() >= 0.0);
}

TEST_CASE("objective and argmin") {
  const Objective zero = objective_and_argmin(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4));
  CHECK(zero.g.isZero(0.0));
  CHECK(zero.d_hat == 0);

  const Objective noise = objective_and_argmin(vec({0.8, 0, 0, 0}), vec({0, 0.9, 0.95, 0.97}));
  CHECK(noise.g.isApprox(vec({0.8, 0.9, 1.85, 2.82}), 1e-15));
  CHECK(noise.d_hat == 0);
  CHECK(objective_and_argmin(vec({0.01, 0, 0, 0}), vec({0, 0.9, 0.95, 0.97})).d_hat == 0);

  const Objective signal = objective_and_argmin(vec({0.5, 0.4, 0.01, 0.01}), vec({0, 0.02, 0.03, 0.9}));
  CHECK(signal.g.isApprox(vec({0.5, 0.42, 0.06, 0.96}), 1e-14));
  CHECK(signal.d_hat == 2);

  // Increments of g are increments of phi plus f, exactly as computed.
  const Eigen::VectorXd phi = vec({0.3, 0.7, 0.1, 0.05, 0.0}), f = vec({0, 0.11, 0.2, 0.6, 0.9});
  const Objective o = objective_and_argmin(phi, f);
  double cum = 0;
  for (Eigen::Index j = 0; j < 5; ++j) {
    cum += f(j);
    CHECK(o.g(j) == phi(j) + cum);
  }
  CHECK_THROWS_AS(objective_and_argmin(vec({0, 1}), vec({0})), ArgumentError);
}

TEST_CASE("augmented scatter blocks") {
  const SimModelSpec spec = SimModelSpec::benchmark(0.1, 50, 3);
  const TensorSample c = center(generate(spec));
  RngStream rng(1, 0);
  const Eigen::MatrixXd zero_noise = augmented_scatter(c, 0, 4, 0.0, rng);
  CHECK(zero_noise.topLeftCorner(5, 5).isApprox(mode_scatter(c, 0), 1e-13));
  CHECK(zero_noise.bottomRightCorner(4, 4).isZero(0.0));
  CHECK(zero_noise.topRightCorner(5, 4).isZero(0.0));

  const ModeSpectrum spec0 = eig_sym_desc(mode_scatter(c, 0));
  const Eigen::MatrixXd reduced = augmented_scatter_reduced(spec0, 50, 300, 4, 2.0, rng);
  CHECK(reduced.topLeftCorner(5, 5).isApprox(mode_scatter(c, 0) - 2.0 * Eigen::MatrixXd::Identity(5, 5), 1e-12));
  CHECK(reduced.isApprox(reduced.transpose(), 0.0));
  CHECK_THROWS_AS(augmented_scatter(c, 0, 4, -1.0, rng), ArgumentError);
}

TEST_CASE("augmented scatter of pure noise is centred at zero") {
  const TensorSample noise = center(noise_sample({5, 15, 20}, 5000, 1.0, 4));
  const auto spectra = mode_spectra(noise);
  const double s2 = noise_variance(pooled_scaled_eigenvalues(spectra, 0), NoiseMethod::quantile(0.3));
  RngStream rng(2, 0);
  const ModeSpectrum m = eig_sym_desc(augmented_scatter(noise, 0, 5, s2, rng));
  CHECK(m.eigenvalues.cwiseAbs().maxCoeff() < 0.1 * 300);
}

TEST_CASE("literal and reduced samplers agree in distribution") {
  // Small problem so that the literal sampler is cheap; compare replicate means of f.
  SimModelSpec spec;
  spec.dims = {4, 3, 2};
  spec.latent = {2, 1, 1};
  spec.n = 25;
  spec.sigma2 = 0.5;
  spec.core_spectra = {vec({1.5, 2.0}), vec({1.0}), vec({1.0})};
  spec.seed = 5;
  const TensorSample c = center(generate(spec));
  const auto spectra = mode_spectra(c);
  const double s2 = noise_variance(pooled_scaled_eigenvalues(spectra, 0), NoiseMethod::quantile(0.3));

  AugmentConfig cfg;
  cfg.r = {3};
  cfg.s = {3000};
  cfg.seed = 9;
  cfg.sampler = AugmentSampler::literal;
  const Eigen::VectorXd lit = eigvec_norm_curve(c, spectra[0], 0, cfg, s2);
  cfg.sampler = AugmentSampler::reduced;
  const Eigen::VectorXd red = eigvec_norm_curve(c, spectra[0], 0, cfg, s2);
  // Norms lie in [0, 1]; the standard error of each mean is below 0.01.
  for (Eigen::Index i = 1; i < lit.size(); ++i) CHECK(std::abs(lit(i) - red(i)) < 0.03);
}

TEST_CASE("eigenvector norm curve on strong signal") {
  const SimModelSpec spec = SimModelSpec::benchmark(0.1, 1000, 21);
  const TensorSample c = center(generate(spec));
  const auto spectra = mode_spectra(c);
  const AugmentConfig cfg = desk_config(4);
  const double s2 = noise_variance(pooled_scaled_eigenvalues(spectra, 0), cfg.noise);
  const Eigen::VectorXd f = eigvec_norm_curve(c, spectra[0], 0, cfg, s2);
  CHECK(f(0) == 0.0);
  CHECK(f.minCoeff() >= 0.0);
  CHECK(f.maxCoeff() <= 1.0);
  for (int i = 1; i <= 3; ++i) CHECK(f(i) <= 0.05);
  for (int i = 4; i <= 5; ++i) CHECK(f(i) >= 0.3);

  // Same seed gives the same curve; the result does not depend on replicate order.
  CHECK(eigvec_norm_curve(c, spectra[0], 0, cfg, s2) == f);
}

TEST_CASE("estimate_orders recovers the benchmark orders") {
  const AugmentReport rep = estimate_orders(generate(SimModelSpec::benchmark(0.1, 1000, 8)), desk_config(8));
  CHECK(rep.d_hat() == std::vector<std::size_t>{3, 5, 10});
  for (const auto& m : rep.modes) {
    CHECK(m.phi.size() == m.f.size());
    CHECK(m.g.size() == m.f.size());
    CHECK(m.sigma2_hat > 0);
  }
}

TEST_CASE("zero data gives order zero") {
  const Tensor t({3, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const AugmentReport rep = estimate_orders(TensorSample(std::vector<Tensor>(5, t)), desk_config(1));
  CHECK(rep.d_hat() == std::vector<std::size_t>{0, 0});
  for (const auto& m : rep.modes) {
    CHECK(m.sigma2_hat == 0.0);
    CHECK(m.lambda_hat.isZero(0.0));
  }
}

TEST_CASE("pure-noise behaviour depends on the noise scale") {
  // The +1 in the scree normalization is not scale free: at unit noise variance
  // the thresholded gaps above the 30% quantile are of order one, so Phi(0) is
  // large and the minimum moves away from zero; at small variance Phi vanishes
  // and pure noise is classified as order zero.
  const Dims dims{5, 15, 20};
  int zero_small = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const AugmentReport unit = estimate_orders(noise_sample(dims, 1000, 1.0, seed), desk_config(seed));
    CHECK(unit.modes[0].phi(0) > 0.5);
    const AugmentReport small = estimate_orders(noise_sample(dims, 1000, 0.003, seed), desk_config(seed));
    CHECK(small.modes[0].phi(0) < 0.1);
    if (small.d_hat() == std::vector<std::size_t>{0, 0, 0}) ++zero_small;
  }
  CHECK(zero_small >= 4);
}

TEST_CASE("config validation") {
  AugmentConfig c;
  c.r = {10, 10};
  CHECK_THROWS_AS(c.validate(3), ArgumentError);
  c.r = {0};
  CHECK_THROWS_AS(c.validate(3), ArgumentError);
  c.r = {10};
  c.noise = NoiseMethod::quantile(0.0);
  CHECK_THROWS_AS(c.validate(3), ArgumentError);
  c.noise = NoiseMethod::minimum();
  CHECK_NOTHROW(c.validate(3));
}
