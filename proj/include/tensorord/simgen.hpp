#pragma once

// Synthetic samples from the noisy Tucker model
//
//   X = (Z0 x_k A_k) x_k U_k + sigma * E0 x_k V_k
//
// with a Student-t core Z0, mixing A_k = W_k D_k W_k^T (W_k Haar), U_k the
// first d_k columns of a Haar orthogonal matrix, V_k Haar orthogonal and E0
// standard Gaussian. Mixing matrices are drawn once per dataset.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tensorord/rng.hpp"
#include "tensorord/spectral.hpp"

namespace tensorord {

struct SimModelSpec {
  Dims dims;
  std::vector<std::size_t> latent;
  std::size_t n = 1000;
  double sigma2 = 0.1;
  std::vector<Eigen::VectorXd> core_spectra;  // diagonal of D_k, length d_k
  double core_dof = 3.0;                      // Student-t degrees of freedom of Z0 entries
  double core_variance = 1.0;                 // per-entry variance of Z0
  std::uint64_t seed = 0;

  void validate() const;

  // The three-mode benchmark: dims (5, 15, 20), latent (3, 5, 10), t(3) core.
  static SimModelSpec benchmark(double sigma2, std::size_t n, std::uint64_t seed);
};

// Per-entry core variance used by the benchmark. It makes the core covariance
// eigenvalues of mode k equal (5/3) D_k^2, the benchmark's reference signal levels.
inline constexpr double kBenchmarkCoreVariance = (5.0 / 3.0) / 625.0;

struct MixingMatrices {
  std::vector<Eigen::MatrixXd> core_mixing;  // A_k, d_k x d_k
  std::vector<Eigen::MatrixXd> loadings;     // U_k, p_k x d_k
  std::vector<Eigen::MatrixXd> noise_rotation;  // V_k, p_k x p_k
};

MixingMatrices draw_mixing(const SimModelSpec& spec);

// n i.i.d. observations (not centered).
TensorSample generate(const SimModelSpec& spec);

// Mode scatters of center(generate(spec)), equal up to roundoff, accumulated
// without storing the sample.
std::vector<Eigen::MatrixXd> model_mode_scatters(const SimModelSpec& spec);

// n observations of i.i.d. N(0, sigma2) entries.
TensorSample noise_sample(const Dims& dims, std::size_t n, double sigma2, std::uint64_t seed);

struct GroundTruth {
  std::vector<Eigen::VectorXd> signal_eigs;  // eigenvalues of E(Z_k Z_k^T), descending
  std::vector<double> noise_eigs;            // sigma2 * rho_k
  std::vector<double> snr;                   // ||E(Z_k Z_k^T)||_F^2 / ||E(E_k E_k^T)||_F^2
};

GroundTruth ground_truth(const SimModelSpec& spec);

// ||diag(signal)||_F^2 / (count * noise^2).
double signal_to_noise(const Eigen::VectorXd& signal_eigs, double noise_eig, std::size_t noise_count);

// Reference core covariance eigenvalues of the benchmark, per mode, ascending.
std::vector<Eigen::VectorXd> benchmark_signal_eigenvalues();

struct NoiseTableRow {
  double sigma2 = 0.0;
  std::vector<double> noise_eigs;
  // SNR with the noise norm taken over p_k diagonal entries.
  std::vector<double> snr;
  // SNR with the noise norm taken over p_1 diagonal entries in every mode;
  // this is the normalization behind the benchmark reference table.
  std::vector<double> snr_tabulated;
};

// Noise eigenvalues and SNRs of the benchmark for each noise level, using
// the given core eigenvalue sets (defaults to the benchmark reference sets).
std::vector<NoiseTableRow> noise_table(std::span<const double> sigma2_grid,
                                       const std::vector<Eigen::VectorXd>& signal_sets = benchmark_signal_eigenvalues());

std::string format_noise_table(std::span<const NoiseTableRow> rows);

}  // namespace tensorord
