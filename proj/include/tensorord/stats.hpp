#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>

#include "tensorord/rng.hpp"
#include "tensorord/tensor.hpp"

namespace tensorord {

// rows x cols matrix of i.i.d. N(0, sd^2) entries, filled column by column.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, RngStream& rng);

// Tensor of i.i.d. Student-t(dof) entries, dof > 2. Generated as Z / sqrt(chi2(dof)/dof).
Tensor student_t_tensor(const Dims& dims, double dof, RngStream& rng);

// Haar-distributed p x p orthogonal matrix: QR of a Gaussian matrix with the
// signs of diag(R) folded into Q.
Eigen::MatrixXd haar_orthogonal(Eigen::Index p, RngStream& rng);

// Uniform random unit vector in R^p.
Eigen::VectorXd uniform_unit_vector(Eigen::Index p, RngStream& rng);

struct BetaLaw {
  double alpha;
  double beta;

  BetaLaw(double a, double b);
  double mean() const { return alpha / (alpha + beta); }
};

// Regularized incomplete beta function I_x(alpha, beta).
double beta_cdf(double x, const BetaLaw& law);

// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_survival(double lambda);

// sup_x |F_n(x) - F(x)| over a sorted sample. `cdf_left` gives F(x-); for a
// continuous F pass the same function twice.
double ks_sup_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left);

struct KsResult {
  double statistic;
  // Asymptotic p-value (Stephens' small-sample correction of sqrt(N) * D).
  double p_value;
};

// One-sample Kolmogorov-Smirnov test of samples in [0, 1] against a Beta law.
// Requires at least 100 samples.
KsResult ks_test(std::span<const double> samples, const BetaLaw& law);

}  // namespace tensorord
