#include <doctest.h>

#include <cmath>

#include "tensorord/simgen.hpp"

using namespace tensorord;

TEST_CASE("generation is deterministic per seed") {
  const SimModelSpec spec = SimModelSpec::benchmark(0.1, 20, 3);
  const TensorSample a = generate(spec), b = generate(spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  SimModelSpec other = spec;
  other.seed = 4;
  CHECK(!(generate(other)[0] == a[0]));
  CHECK(a.dims() == Dims{5, 15, 20});
}

TEST_CASE("spec validation") {
  SimModelSpec s = SimModelSpec::benchmark(0.1, 100, 0);
  CHECK_NOTHROW(s.validate());
  SimModelSpec bad = s;
  bad.n = 1;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = s;
  bad.latent[0] = 6;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = s;
  bad.sigma2 = -1;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = s;
  bad.core_spectra[1](0) = 0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = s;
  bad.core_dof = 2;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("unit-variance core keeps its norm") {
  SimModelSpec s;
  s.dims = {4, 5, 3};
  s.latent = {2, 3, 2};
  s.n = 2000;
  s.sigma2 = 0.0;
  s.core_dof = 200;
  s.core_variance = 1.0;
  for (auto d : s.latent) s.core_spectra.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d)));
  const TensorSample x = generate(s);
  double ss = 0;
  for (const auto& t : x.observations()) ss += t.vec().squaredNorm();
  CHECK(std::abs(ss / (2000.0 * 12.0) - 1.0) < 0.1);

  // Full-rank latent dims without noise give full-rank scatters.
  s.latent = {4, 5, 3};
  s.n = 200;
  s.core_spectra.clear();
  for (auto d : s.latent) s.core_spectra.push_back(Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d), 1.0, 2.0));
  const auto spectra = mode_spectra(center(generate(s)));
  for (const auto& sp : spectra) CHECK(sp.eigenvalues.minCoeff() > 1e-6 * sp.eigenvalues.maxCoeff());
}

TEST_CASE("ground truth noise eigenvalues and signal calibration") {
  const GroundTruth t1 = ground_truth(SimModelSpec::benchmark(0.1, 100, 0));
  CHECK(t1.noise_eigs == std::vector<double>{30.0, 10.0, 7.5});
  const GroundTruth t5 = ground_truth(SimModelSpec::benchmark(0.5, 100, 0));
  CHECK(t5.noise_eigs == std::vector<double>{150.0, 50.0, 37.5});
  // p_k * sigma2 * rho_k is the same in every mode.
  const std::vector<double> p{5, 15, 20};
  for (std::size_t k = 1; k < 3; ++k) CHECK(p[k] * t1.noise_eigs[k] == doctest::Approx(p[0] * t1.noise_eigs[0]));

  // The calibrated core variance reproduces the reference signal levels to their two-decimal rounding.
  const auto ref = benchmark_signal_eigenvalues();
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::VectorXd got = t1.signal_eigs[k].reverse();
    REQUIRE(got.size() == ref[k].size());
    for (Eigen::Index i = 0; i < got.size(); ++i) CHECK(std::abs(got(i) / ref[k](i) - 1.0) < 0.06);
  }
}

TEST_CASE("noise table") {
  const std::vector<double> grid{0.1, 0.5, 1.0};
  const auto rows = noise_table(grid);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].noise_eigs == std::vector<double>{300.0, 100.0, 75.0});
  CHECK(rows[0].snr_tabulated[0] == doctest::Approx(0.162).epsilon(0.001 / 0.162));
  CHECK(std::abs(rows[0].snr_tabulated[1] - 0.756) <= 0.001);
  CHECK(std::abs(rows[0].snr_tabulated[2] - 0.650) <= 0.001);
  CHECK(std::abs(rows[1].snr_tabulated[1] - 0.030) <= 0.001);
  // With the noise norm over p_k entries, mode 1 is unchanged.
  CHECK(rows[0].snr[0] == rows[0].snr_tabulated[0]);
  const std::string table = format_noise_table(rows);
  CHECK(table.find("300.0") != std::string::npos);
  CHECK(table.find("0.162") != std::string::npos);
}

TEST_CASE("Monte Carlo scatter spectrum matches the model") {
  const SimModelSpec spec = SimModelSpec::benchmark(0.1, 4000, 17);
  const auto scatters = model_mode_scatters(spec);
  const GroundTruth truth = ground_truth(spec);
  for (std::size_t k = 0; k < 3; ++k) {
    const ModeSpectrum e = eig_sym_desc(scatters[k]);
    const auto d = static_cast<Eigen::Index>(spec.latent[k]);
    const auto p = e.eigenvalues.size();
    if (k == 0) {
      for (Eigen::Index i = 0; i < d; ++i)
        CHECK(std::abs(e.eigenvalues(i) / (truth.signal_eigs[0](i) + 30.0) - 1.0) < 0.1);
    }
    for (Eigen::Index i = d; i < p; ++i) CHECK(std::abs(e.eigenvalues(i) / truth.noise_eigs[k] - 1.0) < 0.1);
  }
}

TEST_CASE("streamed scatters equal the scatters of the generated sample") {
  const SimModelSpec spec = SimModelSpec::benchmark(0.5, 60, 9);
  const auto streamed = model_mode_scatters(spec);
  const TensorSample c = center(generate(spec));
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXd direct = mode_scatter(c, k);
    CHECK((streamed[k] - direct).norm() <= 1e-12 * direct.norm());
  }
}

TEST_CASE("pure noise samples") {
  const TensorSample z = noise_sample({2, 3}, 4, 0.0, 1);
  for (const auto& t : z.observations()) CHECK(t == Tensor::zeros({2, 3}));
  CHECK_THROWS_AS(noise_sample({2, 3}, 4, -1.0, 1), ArgumentError);
}
