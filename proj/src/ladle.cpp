#include "tensorord/ladle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tensorord {

void LadleConfig::validate(std::size_t order) const {
  if (s.size() != 1 && s.size() != order)
    throw ArgumentError("s must have 1 or " + std::to_string(order) + " entries");
  for (auto x : s)
    if (x < 1) throw ArgumentError("s entries must be >= 1");
}

std::size_t search_bound(std::size_t p, SearchBoundRule rule) {
  if (p < 2) throw ArgumentError("search_bound: p must be at least 2");
  if (rule == SearchBoundRule::full || p <= 10) return p - 1;
  const double pd = static_cast<double>(p);
  return static_cast<std::size_t>(std::floor(pd / std::log(pd)));
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(n);
  return idx;
}

TensorSample bootstrap_resample(const TensorSample& sample, RngStream& rng) {
  if (!sample.centered()) throw ArgumentError("bootstrap_resample requires a centered sample");
  std::vector<Tensor> draws;
  draws.reserve(sample.size());
  for (auto i : bootstrap_indices(sample.size(), rng)) draws.push_back(sample[i]);
  return center(TensorSample(std::move(draws)));
}

namespace {
// Above this many cached doubles per mode, Grams are recomputed per resample.
constexpr std::size_t kGramCacheLimit = std::size_t{1} << 25;
}  // namespace

BootstrapScatter::BootstrapScatter(const TensorSample& centered, std::size_t k) : sample_(&centered), mode_(k) {
  if (!centered.centered()) throw ArgumentError("BootstrapScatter requires a centered sample");
  const std::size_t p = split_at_mode(centered.dims(), k).extent;
  if (p * p * centered.size() <= kGramCacheLimit) {
    grams_.reserve(centered.size());
    for (const auto& x : centered.observations()) grams_.push_back(mode_gram(x, k));
  }
}

Eigen::MatrixXd BootstrapScatter::operator()(std::span<const std::size_t> indices) const {
  const auto& obs = sample_->observations();
  const auto p = static_cast<Eigen::Index>(sample_->dims()[mode_]);
  const double n = static_cast<double>(indices.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(element_count(sample_->dims())));
  for (auto i : indices) {
    acc += grams_.empty() ? mode_gram(obs[i], mode_) : grams_[i];
    mean += obs[i].vec();
  }
  mean /= n;
  acc /= n;
  const Tensor mean_t(sample_->dims(), std::vector<double>(mean.data(), mean.data() + mean.size()));
  acc -= mode_gram(mean_t, mode_);
  return 0.5 * (acc + acc.transpose());
}

double frame_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ArgumentError("frame_discrepancy: frames must have equal shapes");
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd inner = a.transpose() * b;
  const double det = Eigen::HouseholderQR<Eigen::MatrixXd>(inner).absDeterminant();
  return 1.0 - std::clamp(det, 0.0, 1.0);
}

Eigen::VectorXd eigvec_variation_curve(const TensorSample& centered, const ModeSpectrum& spectrum, std::size_t k,
                                       std::size_t q, const LadleConfig& config) {
  const std::size_t s = config.s_for(k);
  if (s < 1) throw ArgumentError("eigvec_variation_curve: s must be >= 1");
  const auto p = static_cast<std::size_t>(spectrum.eigenvalues.size());
  if (q >= p) throw ArgumentError("eigvec_variation_curve: search bound must be below p_k");
  const BootstrapScatter scatter(centered, k);
  const std::uint64_t mode_seed = derive_seed(config.seed, k);

  std::vector<std::vector<double>> discrepancy(q + 1, std::vector<double>(s, 0.0));
  for (std::size_t b = 0; b < s; ++b) {
    RngStream rng(mode_seed, b);
    const auto idx = bootstrap_indices(centered.size(), rng);
    const ModeSpectrum boot = eig_sym_desc(scatter(idx), k);
    for (std::size_t j = 1; j <= q; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      discrepancy[j][b] = frame_discrepancy(spectrum.eigenvectors.leftCols(jj), boot.eigenvectors.leftCols(jj));
    }
  }

  Eigen::VectorXd f(static_cast<Eigen::Index>(q + 1));
  for (std::size_t j = 0; j <= q; ++j) {
    auto& v = discrepancy[j];
    std::sort(v.begin(), v.end());
    f(static_cast<Eigen::Index>(j)) = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(s);
  }
  f(0) = 0.0;
  return f;
}

LadleObjective ladle_objective(const ModeSpectrum& spectrum, const Eigen::VectorXd& f, std::size_t q,
                               bool zero_origin) {
  const auto qq = static_cast<Eigen::Index>(q);
  if (spectrum.eigenvalues.size() < qq + 1)
    throw ArgumentError("ladle_objective: spectrum needs at least q + 1 eigenvalues");
  if (f.size() != qq + 1) throw ArgumentError("ladle_objective: f must be defined on {0, ..., q}");

  const double eig_norm = spectrum.eigenvalues.head(qq).sum() + 1.0;
  const double f_norm = f.segment(1, qq).sum() + 1.0;
  LadleObjective out;
  out.phi = spectrum.eigenvalues.head(qq + 1) / eig_norm;
  out.g = out.phi + f / f_norm;
  if (zero_origin) out.g(0) = 0.0;
  Eigen::Index arg = 0;
  for (Eigen::Index j = 1; j <= qq; ++j)
    if (out.g(j) < out.g(arg)) arg = j;
  out.d_hat = static_cast<std::size_t>(arg);
  return out;
}

LadleCurves ladle_mode(const TensorSample& centered, const ModeSpectrum& spectrum, std::size_t k,
                       const LadleConfig& config) {
  LadleCurves c;
  c.mode = k;
  c.q = search_bound(static_cast<std::size_t>(spectrum.eigenvalues.size()), config.bound);
  c.f = eigvec_variation_curve(centered, spectrum, k, c.q, config);
  auto obj = ladle_objective(spectrum, c.f, c.q, config.zero_origin);
  c.phi = std::move(obj.phi);
  c.g = std::move(obj.g);
  c.d_hat = obj.d_hat;
  return c;
}

LadleReport estimate_orders_ladle(const TensorSample& sample, const LadleConfig& config) {
  config.validate(sample.order());
  const TensorSample centered = sample.centered() ? sample : center(sample);
  LadleReport report;
  report.n = sample.size();
  report.dims = sample.dims();
  for (std::size_t k = 0; k < sample.order(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    const ModeSpectrum spectrum = eig_sym_desc(mode_scatter(centered, k), k);
    report.modes.push_back(ladle_mode(centered, spectrum, k, config));
    report.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return report;
}

}  // namespace tensorord
