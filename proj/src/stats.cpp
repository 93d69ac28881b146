#include "tensorord/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace tensorord {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, RngStream& rng) {
  if (!(sd >= 0.0)) throw ArgumentError("gaussian_matrix: sd must be non-negative");
  Eigen::MatrixXd out(rows, cols);
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = sd * rng.normal();
  return out;
}

Tensor student_t_tensor(const Dims& dims, double dof, RngStream& rng) {
  if (!(dof > 2.0)) throw ArgumentError("student_t_tensor: dof must exceed 2 for finite variance");
  validate_dims(dims);
  std::vector<double> data(element_count(dims));
  for (auto& v : data) {
    const double z = rng.normal();
    v = z / std::sqrt(rng.chi_square(dof) / dof);
  }
  return Tensor(dims, std::move(data));
}

Eigen::MatrixXd haar_orthogonal(Eigen::Index p, RngStream& rng) {
  if (p < 1) throw ArgumentError("haar_orthogonal: p must be positive");
  const Eigen::MatrixXd g = gaussian_matrix(p, p, 1.0, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::VectorXd uniform_unit_vector(Eigen::Index p, RngStream& rng) {
  if (p < 1) throw ArgumentError("uniform_unit_vector: p must be positive");
  Eigen::VectorXd v = gaussian_matrix(p, 1, 1.0, rng);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_matrix(p, 1, 1.0, rng);
    norm = v.norm();
  }
  return v / norm;
}

BetaLaw::BetaLaw(double a, double b) : alpha(a), beta(b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("Beta law parameters must be positive");
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double incomplete_beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double beta_cdf(double x, const BetaLaw& law) {
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("beta_cdf: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double a = law.alpha;
  const double b = law.beta;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * incomplete_beta_cf(a, b, x) / a;
  return 1.0 - front * incomplete_beta_cf(b, a, 1.0 - x) / b;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly for small lambda; use the dual
  // theta-function form there.
  if (lambda < 1.18) {
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda *
                       (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_sup_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left) {
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Only the last of a run of ties carries the full ECDF jump.
    const double above = static_cast<double>(i + 1) / n;
    const double below = static_cast<double>(i) / n;
    const bool last_of_run = i + 1 == sorted.size() || sorted[i + 1] != sorted[i];
    const bool first_of_run = i == 0 || sorted[i - 1] != sorted[i];
    if (last_of_run) d = std::max(d, std::fabs(above - cdf(sorted[i])));
    if (first_of_run) d = std::max(d, std::fabs(cdf_left(sorted[i]) - below));
  }
  return d;
}

KsResult ks_test(std::span<const double> samples, const BetaLaw& law) {
  if (samples.size() < 100)
    throw ArgumentError("ks_test needs at least 100 samples, got " + std::to_string(samples.size()));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto cdf = [&law](double x) { return beta_cdf(std::clamp(x, 0.0, 1.0), law); };
  const double d = ks_sup_distance(sorted, cdf, cdf);
  const double rn = std::sqrt(static_cast<double>(sorted.size()));
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

}  // namespace tensorord
