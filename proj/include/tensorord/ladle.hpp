#pragma once

// Bootstrap ladle order estimator.
//
// Eigenvalue evidence phi_B(j) = sigma2_{j+1} / (sum_{i<=q} sigma2_i + 1) is
// combined with the bootstrap variability of the leading j-dimensional
// eigenspace, f_B(j) = mean_b (1 - |det(B_j^T B*_{j,b})|), normalized by
// sum_{i<=q} f_B(i) + 1. The estimate is the smallest minimizer over {0, ..., q}.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tensorord/augment.hpp"
#include "tensorord/rng.hpp"
#include "tensorord/spectral.hpp"

namespace tensorord {

enum class SearchBoundRule {
  // p_k - 1 when p_k <= 10, floor(p_k / log p_k) otherwise.
  adaptive,
  // Always p_k - 1.
  full,
};

struct LadleConfig {
  std::vector<std::size_t> s{200};  // bootstrap samples per mode; one entry applies to all modes
  std::uint64_t seed = 0;
  SearchBoundRule bound = SearchBoundRule::adaptive;
  // When set, g_B(0) is pinned to 0 instead of phi_B(0).
  bool zero_origin = false;

  std::size_t s_for(std::size_t k) const { return s.size() == 1 ? s.front() : s.at(k); }
  void validate(std::size_t order) const;
};

struct LadleCurves {
  std::size_t mode = 0;
  std::size_t q = 0;
  Eigen::VectorXd phi;  // on {0, ..., q}
  Eigen::VectorXd f;    // on {0, ..., q}, f(0) = 0
  Eigen::VectorXd g;    // on {0, ..., q}
  std::size_t d_hat = 0;
};

using LadleReport = OrderReport<LadleCurves>;

std::size_t search_bound(std::size_t p, SearchBoundRule rule = SearchBoundRule::adaptive);

// n indices drawn uniformly with replacement.
std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng);

// Resample of a centered sample, re-centered.
TensorSample bootstrap_resample(const TensorSample& sample, RngStream& rng);

// Mode-k scatters of re-centered bootstrap resamples, computed from cached
// per-observation Gram matrices.
class BootstrapScatter {
 public:
  BootstrapScatter(const TensorSample& centered, std::size_t k);
  Eigen::MatrixXd operator()(std::span<const std::size_t> indices) const;

 private:
  const TensorSample* sample_;
  std::size_t mode_;
  std::vector<Eigen::MatrixXd> grams_;
};

// 1 - |det(a^T b)| for two p x j frames with orthonormal columns, clamped to [0, 1].
double frame_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// f_B on {0, ..., q}. Bootstrap b uses stream (derive_seed(config.seed, k), b).
Eigen::VectorXd eigvec_variation_curve(const TensorSample& centered, const ModeSpectrum& spectrum, std::size_t k,
                                       std::size_t q, const LadleConfig& config);

struct LadleObjective {
  Eigen::VectorXd phi;
  Eigen::VectorXd g;
  std::size_t d_hat = 0;
};

LadleObjective ladle_objective(const ModeSpectrum& spectrum, const Eigen::VectorXd& f, std::size_t q,
                               bool zero_origin = false);

LadleCurves ladle_mode(const TensorSample& centered, const ModeSpectrum& spectrum, std::size_t k,
                       const LadleConfig& config);

LadleReport estimate_orders_ladle(const TensorSample& sample, const LadleConfig& config);

}  // namespace tensorord
