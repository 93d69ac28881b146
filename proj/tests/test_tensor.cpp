#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tensorord/rng.hpp"
#include "tensorord/stats.hpp"
#include "tensorord/tensor.hpp"

using namespace tensorord;

namespace {

Tensor iota_tensor(const Dims& dims) {
  std::vector<double> v(element_count(dims));
  std::iota(v.begin(), v.end(), 1.0);
  return Tensor(dims, std::move(v));
}

Tensor random_tensor(const Dims& dims, RngStream& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(static_cast<Eigen::Index>(element_count(dims)), 1, 1.0, rng);
  return Tensor(dims, std::vector<double>(g.data(), g.data() + g.size()));
}

// A left-to-right Kronecker product; the first factor varies slowest.
Eigen::MatrixXd kron(const std::vector<Eigen::MatrixXd>& mats) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(1, 1);
  for (const auto& m : mats) {
    Eigen::MatrixXd next(out.rows() * m.rows(), out.cols() * m.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = out(i, j) * m;
    out = next;
  }
  return out;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_CASE("unfold of a matrix gives its columns and rows") {
  const Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(unfold(a, 0) == m);
  CHECK(unfold(a, 1) == Eigen::MatrixXd(m.transpose()));
}

TEST_CASE("unfold of 2x2x2 follows brute-force cyclic enumeration") {
  const Tensor t = iota_tensor({2, 2, 2});
  // Oracle: mode k vectors indexed by the cyclic list (i_{k+1}, ..., i_{k-1}), last fastest.
  for (std::size_t k = 0; k < 3; ++k) {
    Eigen::MatrixXd expect(2, 4);
    const std::size_t a = (k + 1) % 3, b = (k + 2) % 3;
    for (std::size_t ia = 0; ia < 2; ++ia)
      for (std::size_t ib = 0; ib < 2; ++ib)
        for (std::size_t ik = 0; ik < 2; ++ik) {
          std::array<std::size_t, 3> idx{};
          idx[k] = ik;
          idx[a] = ia;
          idx[b] = ib;
          expect(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(ia * 2 + ib)) = t(idx);
        }
    CHECK(unfold(t, k) == expect);
    CHECK(refold(expect, t.dims(), k) == t);
  }
  // Spelled out for mode 2 (0-based 1): columns (i3, i1) = (0,0), (0,1), (1,0), (1,1).
  Eigen::MatrixXd m2(2, 4);
  m2 << 1, 5, 2, 6, 3, 7, 4, 8;
  CHECK(unfold(t, 1) == m2);
}

TEST_CASE("refold inverts unfold exactly") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + rng.index(4);
    Dims dims;
    for (std::size_t i = 0; i < m; ++i) dims.push_back(1 + rng.index(5));
    const Tensor t = random_tensor(dims, rng);
    for (std::size_t k = 0; k < m; ++k) CHECK(refold(unfold(t, k), dims, k) == t);
  }
  CHECK(refold(Eigen::MatrixXd::Zero(3, 8), {2, 3, 4}, 1) == Tensor::zeros({2, 3, 4}));
  CHECK_THROWS_AS(refold(Eigen::MatrixXd::Zero(3, 7), {2, 3, 4}, 1), ArgumentError);
  CHECK_THROWS_AS(unfold(Tensor::zeros({2, 3}), 2), ArgumentError);
}

TEST_CASE("order-one tensors unfold to a column") {
  const Tensor v({4}, {1, 2, 3, 4});
  const Eigen::MatrixXd u = unfold(v, 0);
  CHECK(u.rows() == 4);
  CHECK(u.cols() == 1);
  CHECK(u(2, 0) == 3.0);
}

TEST_CASE("mode_multiply identity, zero and matrix product") {
  RngStream rng(3, 0);
  const Tensor t = random_tensor({3, 4, 2}, rng);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto p = static_cast<Eigen::Index>(t.dim(k));
    CHECK(mode_multiply(t, Eigen::MatrixXd::Identity(p, p), k) == t);
    Dims zd = t.dims();
    zd[k] = 2;
    CHECK(mode_multiply(t, Eigen::MatrixXd::Zero(2, p), k) == Tensor::zeros(zd));
  }
  const Tensor mt({2, 2}, {1, 2, 3, 4});
  Eigen::MatrixXd m(2, 2), a(3, 2);
  m << 1, 2, 3, 4;
  a << 1, -1, 0.5, 2, 3, 0;
  CHECK(unfold(mode_multiply(mt, a, 0), 0).isApprox(a * m, 1e-15));
  CHECK(unfold(mode_multiply(mt, a, 1), 0).isApprox(m * a.transpose(), 1e-15));
  CHECK_THROWS_AS(mode_multiply(mt, Eigen::MatrixXd::Zero(2, 3), 0), ArgumentError);
}

TEST_CASE("Kronecker flattening identity") {
  RngStream rng(17, 0);
  for (const Dims& dims : {Dims{3, 4, 2}, Dims{2, 3, 4, 2}, Dims{5, 3}}) {
    const Tensor t = random_tensor(dims, rng);
    std::vector<Eigen::MatrixXd> mats;
    for (std::size_t k = 0; k < dims.size(); ++k)
      mats.push_back(gaussian_matrix(static_cast<Eigen::Index>(dims[k]) + 1, static_cast<Eigen::Index>(dims[k]),
                                     1.0, rng));
    const Tensor out = multilinear(t, mats);
    const std::size_t m = dims.size();
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<Eigen::MatrixXd> cyc;
      for (std::size_t j = 1; j < m; ++j) cyc.push_back(mats[(k + j) % m]);
      const Eigen::MatrixXd expect = mats[k] * unfold(t, k) * kron(cyc).transpose();
      CHECK(rel_err(unfold(out, k), expect) <= 1e-10);
    }
  }
}

TEST_CASE("multilinear commutes and preserves norms under orthogonal maps") {
  RngStream rng(5, 0);
  const Dims dims{3, 4, 5};
  const Tensor t = random_tensor(dims, rng);
  std::vector<Eigen::MatrixXd> mats, q;
  for (auto p : dims) {
    const auto e = static_cast<Eigen::Index>(p);
    mats.push_back(gaussian_matrix(e, e, 1.0, rng));
    q.push_back(haar_orthogonal(e, rng));
  }
  Tensor fwd = t, rev = t;
  for (std::size_t k = 0; k < 3; ++k) fwd = mode_multiply(fwd, mats[k], k);
  for (std::size_t k = 3; k-- > 0;) rev = mode_multiply(rev, mats[k], k);
  CHECK((fwd.vec() - rev.vec()).norm() <= 1e-12 * fwd.vec().norm());
  CHECK(multilinear(t, mats) == fwd);

  std::vector<Eigen::MatrixXd> ident;
  for (auto p : dims) ident.push_back(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
  CHECK(multilinear(t, ident) == t);
  CHECK(std::abs(frobenius_norm(multilinear(t, q)) - frobenius_norm(t)) <= 1e-12 * frobenius_norm(t));
  CHECK_THROWS_AS(multilinear(t, std::vector<Eigen::MatrixXd>(mats.begin(), mats.end() - 1)), ArgumentError);
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius_norm(Tensor::zeros({2, 3})) == 0.0);
  CHECK(frobenius_norm(Tensor::constant({2, 3, 4}, 1.0)) == doctest::Approx(std::sqrt(24.0)).epsilon(1e-15));
  RngStream rng(1, 1);
  const Tensor t = random_tensor({4, 5}, rng);
  double ss = 0;
  for (double v : t.data()) ss += v * v;
  CHECK(frobenius_norm(t) == doctest::Approx(std::sqrt(ss)).epsilon(1e-14));
}

TEST_CASE("construction validates shapes and entries") {
  CHECK_THROWS_AS(Tensor({2, 0}, {}), ArgumentError);
  CHECK_THROWS_AS(Tensor({2, 2}, {1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(Tensor({1}, {std::nan("")}), ArgumentError);
  CHECK_THROWS_AS(Tensor(Dims{}, {}), ArgumentError);
}
