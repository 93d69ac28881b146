#pragma once

// Augmentation order estimator.
//
// For each mode k the centered k-flattenings are augmented with r_k rows of
// synthetic Gaussian noise whose row scatter matches the estimated noise
// variance. Eigenvectors of the augmented scatter belonging to signal have
// vanishing augmented parts, noise eigenvectors do not. The eigenvector
// evidence f_k is combined with a normalized scree curve Phi_k, and the
// estimated order is the smallest minimizer of g_k(j) = Phi_k(j) + sum_{i<=j} f_k(i).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tensorord/rng.hpp"
#include "tensorord/spectral.hpp"

namespace tensorord {

enum class AugmentSampler {
  // Draws the r x rho_k augmentation block of every observation explicitly.
  literal,
  // Draws the augmented scatter from its exact conditional law given the
  // data scatter: cost independent of n and rho_k.
  reduced,
};

struct AugmentConfig {
  // Per-mode augmentation row counts and replicate counts. A single entry is
  // used for every mode.
  std::vector<std::size_t> r{10};
  std::vector<std::size_t> s{50};
  NoiseMethod noise = NoiseMethod::quantile(0.3);
  std::uint64_t seed = 0;
  AugmentSampler sampler = AugmentSampler::reduced;

  std::size_t r_for(std::size_t k) const { return r.size() == 1 ? r.front() : r.at(k); }
  std::size_t s_for(std::size_t k) const { return s.size() == 1 ? s.front() : s.at(k); }
  void validate(std::size_t order) const;
};

struct AugmentCurves {
  std::size_t mode = 0;
  Eigen::VectorXd phi;         // on {0, ..., p_k}
  Eigen::VectorXd f;           // on {0, ..., p_k}, f(0) = 0
  Eigen::VectorXd g;           // on {0, ..., p_k}
  Eigen::VectorXd lambda_hat;  // thresholded eigenvalues, length p_k
  double sigma2_hat = 0.0;
  std::size_t d_hat = 0;
};

// max(eigenvalue_i - sigma2_hat, 0) for descending eigenvalues.
Eigen::VectorXd thresholded_eigengaps(const Eigen::VectorXd& eigenvalues, double sigma2_hat);

// Phi(l) = lambda_{l+1} / (lambda_1 + ... + lambda_{l+1} + 1), l = 0..p, with lambda_{p+1} = 0.
Eigen::VectorXd scree_curve(const Eigen::VectorXd& lambda_hat);

// Augmented scatter of mode k, built observation by observation:
//   (1/n) sum_i (X*_i - mean X*)(X*_i - mean X*)^T - sigma2_hat I,
// where X*_i stacks unfold(X_i, k) over r rows of i.i.d. N(0, sigma2_hat / rho_k).
Eigen::MatrixXd augmented_scatter(const TensorSample& sample, std::size_t k, std::size_t r, double sigma2_hat,
                                  RngStream& rng);

// Same law as augmented_scatter, sampled from the mode-k scatter spectrum of
// a centered sample of size n. With A = unfold of the stacked data and G the
// stacked augmentation rows, the cross block A G^T / n only depends on G through
// its projection onto the p-dimensional row space of A, and the remaining part
// of G G^T is an independent Wishart matrix.
Eigen::MatrixXd augmented_scatter_reduced(const ModeSpectrum& scatter, std::size_t n, std::size_t rho,
                                          std::size_t r, double sigma2_hat, RngStream& rng);

// f_k on {0, ..., p_k}: mean over s_k replicates of the squared norm of the
// augmented part of the i-th eigenvector. Replicate j uses stream
// (derive_seed(config.seed, k), j).
Eigen::VectorXd eigvec_norm_curve(const TensorSample& sample, const ModeSpectrum& scatter, std::size_t k,
                                  const AugmentConfig& config, double sigma2_hat);

struct Objective {
  Eigen::VectorXd g;
  std::size_t d_hat = 0;
};

// g(j) = phi(j) + sum_{i<=j} f(i); d_hat is the smallest minimizer.
Objective objective_and_argmin(const Eigen::VectorXd& phi, const Eigen::VectorXd& f);

template <typename Curves>
struct OrderReport {
  std::size_t n = 0;
  Dims dims;
  std::vector<Curves> modes;
  std::vector<double> seconds;  // wall clock per mode

  std::vector<std::size_t> d_hat() const {
    std::vector<std::size_t> out;
    for (const auto& c : modes) out.push_back(c.d_hat);
    return out;
  }
};

using AugmentReport = OrderReport<AugmentCurves>;

// Per-mode curves for a single mode given precomputed spectra of the centered sample.
AugmentCurves augment_mode(const TensorSample& centered, std::span<const ModeSpectrum> spectra, std::size_t k,
                           const AugmentConfig& config);

// Full pipeline over all modes. The sample is centered first if needed.
AugmentReport estimate_orders(const TensorSample& sample, const AugmentConfig& config);

}  // namespace tensorord
