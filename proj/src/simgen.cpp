#include "tensorord/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "tensorord/stats.hpp"

namespace tensorord {

namespace {
constexpr std::uint64_t kMixingTag = 0x6d6978;  // "mix"
constexpr std::uint64_t kObservationTag = 0x6f6273;  // "obs"
}  // namespace

void SimModelSpec::validate() const {
  validate_dims(dims);
  const std::size_t m = dims.size();
  if (latent.size() != m) throw ArgumentError("latent dims must have one entry per mode");
  for (std::size_t k = 0; k < m; ++k)
    if (latent[k] < 1 || latent[k] > dims[k])
      throw ArgumentError("latent dimension of mode " + std::to_string(k + 1) + " must lie in [1, p_k]");
  if (n < 2) throw ArgumentError("sample size n must be at least 2");
  if (!(sigma2 >= 0.0)) throw ArgumentError("sigma2 must be non-negative");
  if (core_spectra.size() != m) throw ArgumentError("core_spectra must have one entry per mode");
  for (std::size_t k = 0; k < m; ++k) {
    if (static_cast<std::size_t>(core_spectra[k].size()) != latent[k])
      throw ArgumentError("core spectrum of mode " + std::to_string(k + 1) + " must have d_k entries");
    if (!(core_spectra[k].array() > 0.0).all()) throw ArgumentError("core spectra must be positive");
  }
  if (!(core_dof > 2.0)) throw ArgumentError("core_dof must exceed 2");
  if (!(core_variance > 0.0)) throw ArgumentError("core_variance must be positive");
}

SimModelSpec SimModelSpec::benchmark(double sigma2, std::size_t n, std::uint64_t seed) {
  SimModelSpec spec;
  spec.dims = {5, 15, 20};
  spec.latent = {3, 5, 10};
  spec.n = n;
  spec.sigma2 = sigma2;
  spec.core_dof = 3.0;
  spec.core_variance = kBenchmarkCoreVariance;
  spec.seed = seed;
  Eigen::VectorXd d1(3), d2(5), d3(10);
  d1 << 1.857, 2.785, 3.714;
  d2 << 1.797, 1.887, 2.247, 2.427, 2.696;
  for (Eigen::Index i = 0; i < 10; ++i) d3(i) = 1.282 * (1.0 + 0.05 * static_cast<double>(i));
  spec.core_spectra = {d1, d2, d3};
  return spec;
}

MixingMatrices draw_mixing(const SimModelSpec& spec) {
  spec.validate();
  RngStream rng(derive_seed(spec.seed, kMixingTag), 0);
  MixingMatrices mix;
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    const auto p = static_cast<Eigen::Index>(spec.dims[k]);
    const auto d = static_cast<Eigen::Index>(spec.latent[k]);
    const Eigen::MatrixXd w = haar_orthogonal(d, rng);
    mix.core_mixing.push_back(w * spec.core_spectra[k].asDiagonal() * w.transpose());
    mix.loadings.push_back(haar_orthogonal(p, rng).leftCols(d));
    mix.noise_rotation.push_back(haar_orthogonal(p, rng));
  }
  return mix;
}

TensorSample generate(const SimModelSpec& spec) {
  const MixingMatrices mix = draw_mixing(spec);
  const double t_scale = std::sqrt(spec.core_variance * (spec.core_dof - 2.0) / spec.core_dof);
  const double sigma = std::sqrt(spec.sigma2);
  const Dims latent(spec.latent.begin(), spec.latent.end());
  const std::uint64_t obs_seed = derive_seed(spec.seed, kObservationTag);
  const std::size_t size = element_count(spec.dims);

  // U_k A_k applied in one pass per mode; the core scale rides on mode 0.
  std::vector<Eigen::MatrixXd> signal_maps;
  for (std::size_t k = 0; k < spec.dims.size(); ++k) signal_maps.push_back(mix.loadings[k] * mix.core_mixing[k]);
  signal_maps.front() *= t_scale;

  std::vector<Tensor> obs;
  obs.reserve(spec.n);
  Eigen::VectorXd noise0(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < spec.n; ++i) {
    RngStream rng(obs_seed, i);
    Tensor x = multilinear(student_t_tensor(latent, spec.core_dof, rng), signal_maps);
    if (sigma > 0.0) {
      for (double& e : noise0) e = sigma * rng.normal();
      const Tensor noise = multilinear(Tensor(spec.dims, {noise0.data(), noise0.data() + size}), mix.noise_rotation);
      x = Tensor(spec.dims, [&] {
        std::vector<double> sum(x.data().begin(), x.data().end());
        for (std::size_t j = 0; j < size; ++j) sum[j] += noise.data()[j];
        return sum;
      }());
    }
    obs.push_back(std::move(x));
  }
  return TensorSample(std::move(obs));
}

std::vector<Eigen::MatrixXd> model_mode_scatters(const SimModelSpec& spec) {
  const MixingMatrices mix = draw_mixing(spec);
  const double t_scale = std::sqrt(spec.core_variance * (spec.core_dof - 2.0) / spec.core_dof);
  const double sigma = std::sqrt(spec.sigma2);
  const Dims latent(spec.latent.begin(), spec.latent.end());
  const std::uint64_t obs_seed = derive_seed(spec.seed, kObservationTag);
  const std::size_t m = spec.dims.size();
  const auto size = static_cast<Eigen::Index>(element_count(spec.dims));

  // Observations are X = Y x_k V_k with Y = Z x_k (V_k^T U_k A_k) + sigma E0,
  // which consumes the same variates as generate(). Scatters of X are
  // V_k scatter_k(Y) V_k^T.
  std::vector<Eigen::MatrixXd> signal_maps;
  for (std::size_t k = 0; k < m; ++k)
    signal_maps.push_back(mix.noise_rotation[k].transpose() * mix.loadings[k] * mix.core_mixing[k]);
  signal_maps.front() *= t_scale;

  std::vector<Eigen::MatrixXd> acc;
  for (std::size_t k = 0; k < m; ++k) acc.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.dims[k]),
                                                                          static_cast<Eigen::Index>(spec.dims[k])));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(size);
  for (std::size_t i = 0; i < spec.n; ++i) {
    RngStream rng(obs_seed, i);
    Tensor y = multilinear(student_t_tensor(latent, spec.core_dof, rng), signal_maps);
    if (sigma > 0.0) {
      std::vector<double> data(y.data().begin(), y.data().end());
      for (double& v : data) v += sigma * rng.normal();
      y = Tensor(spec.dims, std::move(data));
    }
    sum += y.vec();
    for (std::size_t k = 0; k < m; ++k) acc[k] += mode_gram(y, k);
  }

  const double n = static_cast<double>(spec.n);
  const Tensor mean(spec.dims, [&] {
    const Eigen::VectorXd v = sum / n;
    return std::vector<double>(v.data(), v.data() + v.size());
  }());
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::MatrixXd centered = acc[k] / n - mode_gram(mean, k);
    const Eigen::MatrixXd rotated = mix.noise_rotation[k] * centered * mix.noise_rotation[k].transpose();
    out.push_back(0.5 * (rotated + rotated.transpose()));
  }
  return out;
}

TensorSample noise_sample(const Dims& dims, std::size_t n, double sigma2, std::uint64_t seed) {
  validate_dims(dims);
  if (!(sigma2 >= 0.0)) throw ArgumentError("sigma2 must be non-negative");
  const double sd = std::sqrt(sigma2);
  const std::uint64_t obs_seed = derive_seed(seed, kObservationTag);
  std::vector<Tensor> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(obs_seed, i);
    const Eigen::MatrixXd e = gaussian_matrix(static_cast<Eigen::Index>(element_count(dims)), 1, sd, rng);
    obs.emplace_back(dims, std::vector<double>(e.data(), e.data() + e.size()));
  }
  return TensorSample(std::move(obs));
}

double signal_to_noise(const Eigen::VectorXd& signal_eigs, double noise_eig, std::size_t noise_count) {
  return signal_eigs.squaredNorm() / (static_cast<double>(noise_count) * noise_eig * noise_eig);
}

GroundTruth ground_truth(const SimModelSpec& spec) {
  spec.validate();
  const std::size_t m = spec.dims.size();
  std::vector<double> traces(m);
  for (std::size_t k = 0; k < m; ++k) traces[k] = spec.core_spectra[k].squaredNorm();

  GroundTruth truth;
  for (std::size_t k = 0; k < m; ++k) {
    double others = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (i != k) others *= traces[i];
    Eigen::VectorXd eig = spec.core_variance * others * spec.core_spectra[k].array().square().matrix();
    std::sort(eig.data(), eig.data() + eig.size(), std::greater<>());
    const double noise = spec.sigma2 * static_cast<double>(complement_size(spec.dims, k));
    truth.snr.push_back(signal_to_noise(eig, noise, spec.dims[k]));
    truth.signal_eigs.push_back(std::move(eig));
    truth.noise_eigs.push_back(noise);
  }
  return truth;
}

std::vector<Eigen::VectorXd> benchmark_signal_eigenvalues() {
  Eigen::VectorXd m1(3), m2(5), m3(10);
  m1 << 5.75, 12.93, 22.99;
  m2 << 5.39, 5.94, 8.41, 9.81, 12.12;
  m3 << 2.74, 3.02, 3.31, 3.62, 3.94, 4.28, 4.63, 4.99, 5.37, 5.76;
  return {m1, m2, m3};
}

std::vector<NoiseTableRow> noise_table(std::span<const double> sigma2_grid,
                                       const std::vector<Eigen::VectorXd>& signal_sets) {
  const Dims dims{5, 15, 20};
  if (signal_sets.size() != dims.size()) throw ArgumentError("noise_table: need one signal set per mode");
  std::vector<NoiseTableRow> rows;
  for (double sigma2 : sigma2_grid) {
    NoiseTableRow row;
    row.sigma2 = sigma2;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const double noise = sigma2 * static_cast<double>(complement_size(dims, k));
      row.noise_eigs.push_back(noise);
      row.snr.push_back(signal_to_noise(signal_sets[k], noise, dims[k]));
      row.snr_tabulated.push_back(signal_to_noise(signal_sets[k], noise, dims.front()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_noise_table(std::span<const NoiseTableRow> rows) {
  std::ostringstream os;
  os << std::setw(8) << "sigma2" << " |" << std::setw(9) << "eig 1" << std::setw(9) << "eig 2" << std::setw(9)
     << "eig 3" << " |" << std::setw(8) << "SNR 1" << std::setw(8) << "SNR 2" << std::setw(8) << "SNR 3" << '\n';
  for (const auto& row : rows) {
    os << std::setw(8) << std::fixed << std::setprecision(1) << row.sigma2 << " |";
    for (double e : row.noise_eigs) os << std::setw(9) << std::setprecision(1) << e;
    os << " |";
    for (double s : row.snr_tabulated) os << std::setw(8) << std::setprecision(3) << s;
    os << '\n';
  }
  return os.str();
}

}  // namespace tensorord
