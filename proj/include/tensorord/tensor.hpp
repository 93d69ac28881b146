#pragma once

// Dense order-m tensors and the basic multilinear algebra on them.
//
// Storage is row-major (last index fastest). Modes are 0-based in this API.
// The k-unfolding lays the k-mode vectors out as columns, ordered cyclically
// by the remaining indices (i_{k+1}, ..., i_{m-1}, i_0, ..., i_{k-1}) with the
// last index of that list varying fastest. With this ordering
//
//   unfold(multilinear(T, A), k) == A_k * unfold(T, k) * kron(A_{k+1}, ..., A_{m-1}, A_0, ..., A_{k-1})^T
//
// where kron's first factor is the slowest-varying one.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tensorord/errors.hpp"

namespace tensorord {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMajorMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Dims = std::vector<std::size_t>;

inline std::size_t element_count(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string format_dims(const Dims& dims) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
  return os.str();
}

inline void validate_dims(const Dims& dims) {
  if (dims.empty()) throw ArgumentError("tensor order must be at least 1");
  for (auto d : dims)
    if (d == 0) throw ArgumentError("tensor dimensions must be positive, got " + format_dims(dims));
}

// Product of all dimensions except mode k (the number of k-mode vectors).
inline std::size_t complement_size(const Dims& dims, std::size_t k) {
  return element_count(dims) / dims.at(k);
}

// Row-major view of a tensor as (pre, p_k, post) with pre = prod_{i<k} p_i and
// post = prod_{i>k} p_i.
struct ModeSplit {
  std::size_t pre;
  std::size_t extent;
  std::size_t post;
};

inline ModeSplit split_at_mode(const Dims& dims, std::size_t k) {
  if (k >= dims.size())
    throw ArgumentError("mode " + std::to_string(k) + " out of range for order-" +
                        std::to_string(dims.size()) + " tensor");
  ModeSplit s{1, dims[k], 1};
  for (std::size_t i = 0; i < k; ++i) s.pre *= dims[i];
  for (std::size_t i = k + 1; i < dims.size(); ++i) s.post *= dims[i];
  return s;
}

template <typename Scalar>
class DenseTensor {
 public:
  using value_type = Scalar;

  DenseTensor(Dims dims, std::vector<Scalar> data) : dims_(std::move(dims)), data_(std::move(data)) {
    validate_dims(dims_);
    if (data_.size() != element_count(dims_))
      throw ArgumentError("tensor data length " + std::to_string(data_.size()) +
                          " does not match dims " + format_dims(dims_));
    for (const auto& v : data_)
      if (!std::isfinite(v)) throw ArgumentError("tensor entries must be finite");
  }

  static DenseTensor constant(Dims dims, Scalar value) {
    validate_dims(dims);
    const auto n = element_count(dims);
    return DenseTensor(std::move(dims), std::vector<Scalar>(n, value));
  }
  static DenseTensor zeros(Dims dims) { return constant(std::move(dims), Scalar(0)); }

  std::size_t order() const { return dims_.size(); }
  const Dims& dims() const { return dims_; }
  std::size_t dim(std::size_t k) const { return dims_.at(k); }
  std::size_t size() const { return data_.size(); }

  std::span<const Scalar> data() const { return data_; }

  // Flat row-major data as an Eigen vector.
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> vec() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  Scalar operator()(std::span<const std::size_t> index) const { return data_[offset(index)]; }
  Scalar operator()(std::initializer_list<std::size_t> index) const {
    return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
  }

  std::size_t offset(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw ArgumentError("index arity does not match tensor order");
    std::size_t off = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (index[i] >= dims_[i]) throw ArgumentError("tensor index out of range");
      off = off * dims_[i] + index[i];
    }
    return off;
  }

  bool operator==(const DenseTensor&) const = default;

 private:
  Dims dims_;
  std::vector<Scalar> data_;
};

using Tensor = DenseTensor<double>;

// p_k x rho_k matrix of k-mode vectors; column j of the result for the entry
// with indices (pre, post) around mode k is post * pre_count + pre.
template <typename Scalar>
MatrixX<Scalar> unfold(const DenseTensor<Scalar>& t, std::size_t k) {
  const auto s = split_at_mode(t.dims(), k);
  const auto src = t.data();
  MatrixX<Scalar> out(s.extent, s.pre * s.post);
  for (std::size_t a = 0; a < s.pre; ++a)
    for (std::size_t i = 0; i < s.extent; ++i) {
      const Scalar* row = src.data() + (a * s.extent + i) * s.post;
      for (std::size_t b = 0; b < s.post; ++b) out(i, b * s.pre + a) = row[b];
    }
  return out;
}

template <typename Derived>
DenseTensor<typename Derived::Scalar> refold(const Eigen::MatrixBase<Derived>& mat, const Dims& dims,
                                             std::size_t k) {
  using Scalar = typename Derived::Scalar;
  validate_dims(dims);
  const auto s = split_at_mode(dims, k);
  if (static_cast<std::size_t>(mat.rows()) != s.extent ||
      static_cast<std::size_t>(mat.cols()) != s.pre * s.post)
    throw ArgumentError("cannot refold " + std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()) +
                        " matrix into dims " + format_dims(dims) + " along mode " + std::to_string(k));
  std::vector<Scalar> data(element_count(dims));
  for (std::size_t a = 0; a < s.pre; ++a)
    for (std::size_t i = 0; i < s.extent; ++i) {
      Scalar* row = data.data() + (a * s.extent + i) * s.post;
      for (std::size_t b = 0; b < s.post; ++b) row[b] = mat(i, b * s.pre + a);
    }
  return DenseTensor<Scalar>(dims, std::move(data));
}

// Pre-multiplies every k-mode vector of t by a (q x p_k).
template <typename Scalar, typename Derived>
DenseTensor<Scalar> mode_multiply(const DenseTensor<Scalar>& t, const Eigen::MatrixBase<Derived>& a,
                                  std::size_t k) {
  const auto s = split_at_mode(t.dims(), k);
  if (static_cast<std::size_t>(a.cols()) != s.extent)
    throw ArgumentError("mode_multiply: matrix has " + std::to_string(a.cols()) + " columns, mode " +
                        std::to_string(k) + " has extent " + std::to_string(s.extent));
  const auto q = static_cast<std::size_t>(a.rows());
  Dims out_dims = t.dims();
  out_dims[k] = q;
  if (q == 0) throw ArgumentError("mode_multiply: matrix must have at least one row");

  const MatrixX<Scalar> op = a.template cast<Scalar>();
  std::vector<Scalar> out(s.pre * q * s.post);
  using ConstBlock = Eigen::Map<const RowMajorMatrixX<Scalar>>;
  using Block = Eigen::Map<RowMajorMatrixX<Scalar>>;
  const auto e_ext = static_cast<Eigen::Index>(s.extent);
  const auto e_q = static_cast<Eigen::Index>(q);
  const auto e_post = static_cast<Eigen::Index>(s.post);
  if (s.post == 1) {
    // Last mode: one (pre x p) * (p x q) product instead of pre matrix-vector products.
    const auto e_pre = static_cast<Eigen::Index>(s.pre);
    Block(out.data(), e_pre, e_q).noalias() = ConstBlock(t.data().data(), e_pre, e_ext) * op.transpose();
    return DenseTensor<Scalar>(std::move(out_dims), std::move(out));
  }
  for (std::size_t b = 0; b < s.pre; ++b) {
    ConstBlock in(t.data().data() + b * s.extent * s.post, e_ext, e_post);
    Block dst(out.data() + b * q * s.post, e_q, e_post);
    dst.noalias() = op * in;
  }
  return DenseTensor<Scalar>(std::move(out_dims), std::move(out));
}

// t x_0 mats[0] x_1 mats[1] ... x_{m-1} mats[m-1]. Products along distinct modes commute.
template <typename Scalar, typename Matrix>
DenseTensor<Scalar> multilinear(const DenseTensor<Scalar>& t, std::span<const Matrix> mats) {
  if (mats.size() != t.order())
    throw ArgumentError("multilinear: expected " + std::to_string(t.order()) + " matrices, got " +
                        std::to_string(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k)
    if (static_cast<std::size_t>(mats[k].cols()) != t.dim(k))
      throw ArgumentError("multilinear: matrix " + std::to_string(k) + " does not match mode extent");
  DenseTensor<Scalar> out = t;
  for (std::size_t k = 0; k < mats.size(); ++k) out = mode_multiply(out, mats[k], k);
  return out;
}

template <typename Scalar>
DenseTensor<Scalar> multilinear(const DenseTensor<Scalar>& t, const std::vector<MatrixX<Scalar>>& mats) {
  return multilinear(t, std::span<const MatrixX<Scalar>>(mats));
}

template <typename Scalar>
Scalar frobenius_norm(const DenseTensor<Scalar>& t) {
  return t.vec().norm();
}

}  // namespace tensorord
