#pragma once

#include <array>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnnmodel/errors.hpp"

namespace dnnmodel {

/// Row-major dense array of arbitrary rank backed by an Eigen vector.
template <typename Scalar_>
class DenseTensor {
 public:
  using Scalar = Scalar_;
  using Index = Eigen::Index;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    check_shape();
    data_ = Vector::Zero(element_count(shape_));
  }

  DenseTensor(std::vector<Index> shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape();
    if (data_.size() != element_count(shape_)) throw ShapeError("tensor data length does not match its shape");
  }

  DenseTensor(std::vector<Index> shape, std::initializer_list<Scalar> values) : shape_(std::move(shape)) {
    check_shape();
    if (static_cast<Index>(values.size()) != element_count(shape_))
      throw ShapeError("tensor data length does not match its shape");
    data_.resize(static_cast<Index>(values.size()));
    Index i = 0;
    for (auto v : values) data_(i++) = v;
  }

  static DenseTensor Zero(std::vector<Index> shape) { return DenseTensor(std::move(shape)); }

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index extent(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  template <typename... Idx>
  Scalar& operator()(Idx... idx) {
    return data_(offset(std::array<Index, sizeof...(Idx)>{static_cast<Index>(idx)...}));
  }
  template <typename... Idx>
  const Scalar& operator()(Idx... idx) const {
    return data_(offset(std::array<Index, sizeof...(Idx)>{static_cast<Index>(idx)...}));
  }

  /// View of the data as a rows x cols row-major matrix; rows*cols must equal size().
  Eigen::Map<RowMajorMatrix> matrix(Index rows, Index cols) {
    if (rows * cols != size()) throw ShapeError("matrix view does not cover the tensor");
    return {data_.data(), rows, cols};
  }
  Eigen::Map<const RowMajorMatrix> matrix(Index rows, Index cols) const {
    if (rows * cols != size()) throw ShapeError("matrix view does not cover the tensor");
    return {data_.data(), rows, cols};
  }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static Index element_count(const std::vector<Index>& shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
  }

  void check_shape() const {
    if (shape_.empty()) throw ShapeError("tensor needs at least one extent");
    for (auto e : shape_)
      if (e < 1) throw ShapeError("tensor extents must be >= 1");
  }

  template <std::size_t N>
  Index offset(const std::array<Index, N>& idx) const {
    if (N != shape_.size()) throw ShapeError("index rank does not match tensor rank");
    Index flat = 0;
    for (std::size_t i = 0; i < N; ++i) flat = flat * shape_[i] + idx[i];
    return flat;
  }

  std::vector<Index> shape_;
  Vector data_;
};

using Tensor = DenseTensor<double>;

/// Tensor with entries drawn uniformly from [-1, 1).
template <typename Scalar, typename Rng>
DenseTensor<Scalar> random_tensor(std::vector<Eigen::Index> shape, Rng& rng) {
  DenseTensor<Scalar> t(std::move(shape));
  std::uniform_real_distribution<Scalar> dist(Scalar(-1), Scalar(1));
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()(i) = dist(rng);
  return t;
}

}  // namespace dnnmodel
