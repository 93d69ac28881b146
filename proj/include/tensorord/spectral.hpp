#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tensorord/tensor.hpp"

namespace tensorord {

// n >= 2 observations of identical shape, optionally centered.
class TensorSample {
 public:
  explicit TensorSample(std::vector<Tensor> observations);

  std::size_t size() const { return obs_.size(); }
  std::size_t order() const { return obs_.front().order(); }
  const Dims& dims() const { return obs_.front().dims(); }
  const std::vector<Tensor>& observations() const { return obs_; }
  const Tensor& operator[](std::size_t i) const { return obs_[i]; }

  bool centered() const { return mean_.has_value(); }
  // Per-entry mean removed by center(); empty if the sample is not centered.
  const std::optional<Tensor>& mean() const { return mean_; }

  friend TensorSample center(const TensorSample& sample);

 private:
  std::vector<Tensor> obs_;
  std::optional<Tensor> mean_;
};

// Subtracts the per-entry sample mean and records it. Centering an already
// centered sample re-centers it and keeps the original mean.
TensorSample center(const TensorSample& sample);

// Per-entry mean of a set of equally shaped tensors.
Tensor entrywise_mean(std::span<const Tensor> observations);

// unfold(x, k) * unfold(x, k)^T without materializing the unfolding.
Eigen::MatrixXd mode_gram(const Tensor& x, std::size_t k);

// (1/n) sum_i unfold(X_i, k) unfold(X_i, k)^T of a centered sample.
Eigen::MatrixXd mode_scatter(const TensorSample& sample, std::size_t k);

struct ModeSpectrum {
  std::size_t mode = 0;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
};

// Symmetric eigendecomposition with eigenvalues in descending order. Each
// eigenvector is signed so that its largest-magnitude entry (lowest index on
// ties) is positive.
ModeSpectrum eig_sym_desc(const Eigen::MatrixXd& a, std::size_t mode = 0);

// Spectra of all mode scatters of a centered sample.
std::vector<ModeSpectrum> mode_spectra(const TensorSample& sample);

// Eigenvalues of every mode rescaled to the noise scale of a target mode.
struct PooledEigenSet {
  std::size_t target_mode = 0;
  std::vector<double> values;  // (p_i / p_k) * eigenvalue_{i,j}, grouped by source mode
};

PooledEigenSet pooled_scaled_eigenvalues(std::span<const ModeSpectrum> spectra, std::size_t k);

struct NoiseMethod {
  enum class Kind { quantile, tail_mean, minimum };
  Kind kind = Kind::quantile;
  double q = 0.3;

  static NoiseMethod quantile(double q) { return {Kind::quantile, q}; }
  static NoiseMethod tail_mean(double q) { return {Kind::tail_mean, q}; }
  static NoiseMethod minimum() { return {Kind::minimum, 0.0}; }

  std::string name() const;
  // "quantile", "tail-mean" or "min".
  static NoiseMethod parse(const std::string& name, double q);
};

// Noise-variance estimate from a pooled eigenvalue set:
//   quantile(q):  order statistic ceil(q * N) (1-based) of the pooled values,
//   tail_mean(q): mean of the pooled values <= that order statistic,
//   minimum:      smallest pooled value.
double noise_variance(const PooledEigenSet& pooled, const NoiseMethod& method);

}  // namespace tensorord
