#include "tensorord/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tensorord {

TensorSample::TensorSample(std::vector<Tensor> observations) : obs_(std::move(observations)) {
  if (obs_.size() < 2)
    throw ArgumentError("a tensor sample needs at least 2 observations, got " + std::to_string(obs_.size()));
  for (const auto& x : obs_)
    if (x.dims() != obs_.front().dims())
      throw ArgumentError("observations must share dims: " + format_dims(obs_.front().dims()) + " vs " +
                          format_dims(x.dims()));
}

Tensor entrywise_mean(std::span<const Tensor> observations) {
  if (observations.empty()) throw ArgumentError("entrywise_mean of an empty set");
  const auto& dims = observations.front().dims();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(element_count(dims)));
  for (const auto& x : observations) acc += x.vec();
  acc /= static_cast<double>(observations.size());
  return Tensor(dims, std::vector<double>(acc.data(), acc.data() + acc.size()));
}

TensorSample center(const TensorSample& sample) {
  const Tensor mean = entrywise_mean(sample.obs_);
  std::vector<Tensor> out;
  out.reserve(sample.size());
  for (const auto& x : sample.obs_) {
    Eigen::VectorXd v = x.vec() - mean.vec();
    out.emplace_back(x.dims(), std::vector<double>(v.data(), v.data() + v.size()));
  }
  TensorSample result(std::move(out));
  result.mean_ = sample.mean_ ? *sample.mean_ : mean;
  return result;
}

namespace {

// Adds unfold(x, k) unfold(x, k)^T to the lower triangle of g.
void add_gram_lower(const Tensor& x, std::size_t k, Eigen::MatrixXd& g) {
  const auto s = split_at_mode(x.dims(), k);
  const auto p = static_cast<Eigen::Index>(s.extent);
  using ConstRowMajor = Eigen::Map<const RowMajorMatrixX<double>>;
  if (s.post == 1) {
    ConstRowMajor y(x.data().data(), static_cast<Eigen::Index>(s.pre), p);
    g.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
    return;
  }
  for (std::size_t a = 0; a < s.pre; ++a) {
    ConstRowMajor block(x.data().data() + a * s.extent * s.post, p, static_cast<Eigen::Index>(s.post));
    g.selfadjointView<Eigen::Lower>().rankUpdate(block);
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& lower) {
  return lower.selfadjointView<Eigen::Lower>();
}

}  // namespace

Eigen::MatrixXd mode_gram(const Tensor& x, std::size_t k) {
  const auto p = static_cast<Eigen::Index>(split_at_mode(x.dims(), k).extent);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
  add_gram_lower(x, k, g);
  return symmetrized(g);
}

Eigen::MatrixXd mode_scatter(const TensorSample& sample, std::size_t k) {
  if (!sample.centered()) throw ArgumentError("mode_scatter requires a centered sample");
  const auto p = static_cast<Eigen::Index>(split_at_mode(sample.dims(), k).extent);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  for (const auto& x : sample.observations()) add_gram_lower(x, k, acc);
  return symmetrized(acc) / static_cast<double>(sample.size());
}

ModeSpectrum eig_sym_desc(const Eigen::MatrixXd& a, std::size_t mode) {
  if (a.rows() != a.cols()) throw ArgumentError("eig_sym_desc: matrix must be square");
  if (a.size() == 0) throw ArgumentError("eig_sym_desc: empty matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ArgumentError("eig_sym_desc: matrix is not symmetric");
  if (!a.allFinite()) throw ArgumentError("eig_sym_desc: matrix has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

  const Eigen::Index p = a.rows();
  ModeSpectrum out;
  out.mode = mode;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.eigenvectors(arg, j) < 0.0) out.eigenvectors.col(j) = -out.eigenvectors.col(j);
  }
  return out;
}

std::vector<ModeSpectrum> mode_spectra(const TensorSample& sample) {
  std::vector<ModeSpectrum> out;
  out.reserve(sample.order());
  for (std::size_t k = 0; k < sample.order(); ++k) out.push_back(eig_sym_desc(mode_scatter(sample, k), k));
  return out;
}

PooledEigenSet pooled_scaled_eigenvalues(std::span<const ModeSpectrum> spectra, std::size_t k) {
  const std::size_t m = spectra.size();
  if (k >= m) throw ArgumentError("pooled_scaled_eigenvalues: target mode out of range");
  std::vector<const ModeSpectrum*> by_mode(m, nullptr);
  for (const auto& s : spectra) {
    if (s.mode >= m || by_mode[s.mode] != nullptr)
      throw ArgumentError("pooled_scaled_eigenvalues: spectra must cover each mode exactly once");
    by_mode[s.mode] = &s;
  }
  const auto p_target = static_cast<double>(by_mode[k]->eigenvalues.size());
  PooledEigenSet pooled;
  pooled.target_mode = k;
  for (const auto* s : by_mode) {
    const double scale = static_cast<double>(s->eigenvalues.size()) / p_target;
    for (Eigen::Index j = 0; j < s->eigenvalues.size(); ++j) pooled.values.push_back(scale * s->eigenvalues(j));
  }
  return pooled;
}

std::string NoiseMethod::name() const {
  switch (kind) {
    case Kind::quantile:
      return "quantile";
    case Kind::tail_mean:
      return "tail-mean";
    case Kind::minimum:
      return "min";
  }
  return "unknown";
}

NoiseMethod NoiseMethod::parse(const std::string& name, double q) {
  if (name == "quantile") return quantile(q);
  if (name == "tail-mean") return tail_mean(q);
  if (name == "min") return minimum();
  throw ArgumentError("unknown noise method '" + name + "' (expected quantile, tail-mean or min)");
}

namespace {

// 1-based rank ceil(q * N); products within 1e-9 of an integer are taken as
// that integer so that e.g. 0.3 * 40 selects rank 12.
std::size_t quantile_rank(double q, std::size_t n) {
  const double x = q * static_cast<double>(n);
  const double nearest = std::round(x);
  const double rank = std::fabs(x - nearest) < 1e-9 ? nearest : std::ceil(x);
  return std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, n);
}

}  // namespace

double noise_variance(const PooledEigenSet& pooled, const NoiseMethod& method) {
  if (pooled.values.empty()) throw ArgumentError("noise_variance: empty pooled set");
  std::vector<double> v = pooled.values;
  std::sort(v.begin(), v.end());
  if (method.kind == NoiseMethod::Kind::minimum) return v.front();
  if (!(method.q > 0.0 && method.q < 1.0)) throw ArgumentError("noise_variance: q must lie in (0, 1)");
  const std::size_t rank = quantile_rank(method.q, v.size());
  const double quantile = v[rank - 1];
  if (method.kind == NoiseMethod::Kind::quantile) return quantile;
  const auto end = std::upper_bound(v.begin(), v.end(), quantile);
  return std::accumulate(v.begin(), end, 0.0) / static_cast<double>(end - v.begin());
}

}  // namespace tensorord
