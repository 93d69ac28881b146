#include "tensorord/augment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "tensorord/stats.hpp"

namespace tensorord {

void AugmentConfig::validate(std::size_t order) const {
  const auto check = [order](const std::vector<std::size_t>& v, const char* name) {
    if (v.size() != 1 && v.size() != order)
      throw ArgumentError(std::string(name) + " must have 1 or " + std::to_string(order) + " entries");
    for (auto x : v)
      if (x < 1) throw ArgumentError(std::string(name) + " entries must be >= 1");
  };
  check(r, "r");
  check(s, "s");
  if (noise.kind != NoiseMethod::Kind::minimum && !(noise.q > 0.0 && noise.q < 1.0))
    throw ArgumentError("noise quantile must lie in (0, 1)");
}

Eigen::VectorXd thresholded_eigengaps(const Eigen::VectorXd& eigenvalues, double sigma2_hat) {
  return (eigenvalues.array() - sigma2_hat).max(0.0).matrix();
}

Eigen::VectorXd scree_curve(const Eigen::VectorXd& lambda_hat) {
  const Eigen::Index p = lambda_hat.size();
  Eigen::VectorXd phi(p + 1);
  double cumulative = 0.0;
  for (Eigen::Index l = 0; l <= p; ++l) {
    const double next = l < p ? lambda_hat(l) : 0.0;
    cumulative += next;
    phi(l) = next / (cumulative + 1.0);
  }
  return phi;
}

Eigen::MatrixXd augmented_scatter(const TensorSample& sample, std::size_t k, std::size_t r, double sigma2_hat,
                                  RngStream& rng) {
  if (!(sigma2_hat >= 0.0)) throw ArgumentError("augmented_scatter: noise variance must be non-negative");
  if (!sample.centered()) throw ArgumentError("augmented_scatter requires a centered sample");
  const auto p = static_cast<Eigen::Index>(split_at_mode(sample.dims(), k).extent);
  const auto rho = static_cast<Eigen::Index>(complement_size(sample.dims(), k));
  const auto rr = static_cast<Eigen::Index>(r);
  const double n = static_cast<double>(sample.size());
  const double sd = std::sqrt(sigma2_hat / static_cast<double>(rho));

  std::vector<Eigen::MatrixXd> rows;
  rows.reserve(sample.size());
  Eigen::MatrixXd rows_mean = Eigen::MatrixXd::Zero(rr, rho);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    rows.push_back(gaussian_matrix(rr, rho, sd, rng));
    rows_mean += rows.back();
  }
  rows_mean /= n;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p + rr, p + rr);
  Eigen::MatrixXd stacked(p + rr, rho);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    stacked.topRows(p) = unfold(sample[i], k);
    stacked.bottomRows(rr) = rows[i] - rows_mean;
    out.noalias() += stacked * stacked.transpose();
  }
  out /= n;
  out.diagonal().array() -= sigma2_hat;
  return out;
}

namespace {

// Bartlett factor of a Wishart_r(dof, I) matrix, or a direct Gram matrix when dof < r.
Eigen::MatrixXd wishart_identity(Eigen::Index r, Eigen::Index dof, RngStream& rng) {
  if (dof < r) {
    const Eigen::MatrixXd z = gaussian_matrix(r, dof, 1.0, rng);
    return z * z.transpose();
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    l(i, i) = std::sqrt(rng.chi_square(static_cast<double>(dof - i)));
    for (Eigen::Index j = 0; j < i; ++j) l(i, j) = rng.normal();
  }
  return l * l.transpose();
}

}  // namespace

Eigen::MatrixXd augmented_scatter_reduced(const ModeSpectrum& scatter, std::size_t n, std::size_t rho,
                                          std::size_t r, double sigma2_hat, RngStream& rng) {
  if (!(sigma2_hat >= 0.0)) throw ArgumentError("augmented_scatter: noise variance must be non-negative");
  if (n < 2) throw ArgumentError("augmented_scatter: need n >= 2");
  const Eigen::Index p = scatter.eigenvalues.size();
  const auto rr = static_cast<Eigen::Index>(r);
  const double nn = static_cast<double>(n);
  const double tau2 = sigma2_hat / static_cast<double>(rho);

  // Centered stacked data lives in an (n-1) rho dimensional subspace.
  const auto free_dims = static_cast<Eigen::Index>((n - 1) * rho);
  const Eigen::Index rank = std::min(p, free_dims);

  // root^T root = n * scatter restricted to the leading `rank` directions.
  const Eigen::VectorXd scale =
      (nn * scatter.eigenvalues.head(rank).array().max(0.0)).sqrt().matrix();
  const Eigen::MatrixXd root = scale.asDiagonal() * scatter.eigenvectors.leftCols(rank).transpose();

  const Eigen::MatrixXd h = gaussian_matrix(rr, rank, 1.0, rng);
  const Eigen::MatrixXd w = wishart_identity(rr, free_dims - rank, rng);

  Eigen::MatrixXd out(p + rr, p + rr);
  const Eigen::MatrixXd data_scatter =
      scatter.eigenvectors * scatter.eigenvalues.asDiagonal() * scatter.eigenvectors.transpose();
  out.topLeftCorner(p, p) = 0.5 * (data_scatter + data_scatter.transpose());
  out.topRightCorner(p, rr) = (std::sqrt(tau2) / nn) * root.transpose() * h.transpose();
  out.bottomLeftCorner(rr, p) = out.topRightCorner(p, rr).transpose();
  out.bottomRightCorner(rr, rr) = (tau2 / nn) * (h * h.transpose() + w);
  out.diagonal().array() -= sigma2_hat;
  return out;
}

namespace {

// Mean of the values after sorting, so the result does not depend on the
// order in which replicates were produced.
double order_free_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

Eigen::VectorXd eigvec_norm_curve(const TensorSample& sample, const ModeSpectrum& scatter, std::size_t k,
                                  const AugmentConfig& config, double sigma2_hat) {
  const std::size_t s = config.s_for(k);
  const std::size_t r = config.r_for(k);
  if (s < 1) throw ArgumentError("eigvec_norm_curve: s must be >= 1");
  const auto p = scatter.eigenvalues.size();
  const std::size_t rho = complement_size(sample.dims(), k);
  const std::uint64_t mode_seed = derive_seed(config.seed, k);

  std::vector<std::vector<double>> norms(static_cast<std::size_t>(p), std::vector<double>(s));
  for (std::size_t j = 0; j < s; ++j) {
    RngStream rng(mode_seed, j);
    const Eigen::MatrixXd mstar = config.sampler == AugmentSampler::literal
                                      ? augmented_scatter(sample, k, r, sigma2_hat, rng)
                                      : augmented_scatter_reduced(scatter, sample.size(), rho, r, sigma2_hat, rng);
    const ModeSpectrum spec = eig_sym_desc(mstar, k);
    for (Eigen::Index i = 0; i < p; ++i)
      norms[static_cast<std::size_t>(i)][j] = spec.eigenvectors.col(i).tail(static_cast<Eigen::Index>(r)).squaredNorm();
  }

  Eigen::VectorXd f(p + 1);
  f(0) = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) f(i + 1) = order_free_mean(norms[static_cast<std::size_t>(i)]);
  return f;
}

Objective objective_and_argmin(const Eigen::VectorXd& phi, const Eigen::VectorXd& f) {
  if (phi.size() != f.size() || phi.size() == 0)
    throw ArgumentError("objective_and_argmin: phi and f must have the same non-zero length");
  Objective out;
  out.g.resize(phi.size());
  double cumulative = 0.0;
  for (Eigen::Index j = 0; j < phi.size(); ++j) {
    cumulative += f(j);
    out.g(j) = phi(j) + cumulative;
  }
  Eigen::Index arg = 0;
  for (Eigen::Index j = 1; j < out.g.size(); ++j)
    if (out.g(j) < out.g(arg)) arg = j;
  out.d_hat = static_cast<std::size_t>(arg);
  return out;
}

AugmentCurves augment_mode(const TensorSample& centered, std::span<const ModeSpectrum> spectra, std::size_t k,
                           const AugmentConfig& config) {
  const ModeSpectrum& spectrum = spectra[k];
  AugmentCurves c;
  c.mode = k;
  c.sigma2_hat = noise_variance(pooled_scaled_eigenvalues(spectra, k), config.noise);
  c.lambda_hat = thresholded_eigengaps(spectrum.eigenvalues, c.sigma2_hat);
  c.phi = scree_curve(c.lambda_hat);
  c.f = eigvec_norm_curve(centered, spectrum, k, config, c.sigma2_hat);
  auto objective = objective_and_argmin(c.phi, c.f);
  c.g = std::move(objective.g);
  c.d_hat = objective.d_hat;
  return c;
}

AugmentReport estimate_orders(const TensorSample& sample, const AugmentConfig& config) {
  config.validate(sample.order());
  const TensorSample centered = sample.centered() ? sample : center(sample);
  const auto spectra = mode_spectra(centered);

  AugmentReport report;
  report.n = sample.size();
  report.dims = sample.dims();
  for (std::size_t k = 0; k < sample.order(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    report.modes.push_back(augment_mode(centered, spectra, k, config));
    report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return report;
}

}  // namespace tensorord
