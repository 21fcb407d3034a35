#pragma once

// Order-d complex tensors stored first-index-fastest, and the mu-mode
// product / Tucker kernels built on batched dense matrix products.

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fcgle {

using Dims = std::vector<std::size_t>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

std::size_t element_count(const Dims& dims);

/// Linear position of a multi-index; index[0] runs fastest. Zero-based on both
/// sides, i.e. j = j_1 + n_1 j_2 + n_1 n_2 j_3 + ...
std::size_t vec_index(std::span<const std::size_t> index, const Dims& dims);

/// Inverse of vec_index.
std::vector<std::size_t> multi_index(std::size_t linear, const Dims& dims);

template <typename Real>
class CTensor {
 public:
  using Scalar = std::complex<Real>;

  CTensor() = default;
  explicit CTensor(Dims dims);
  CTensor(Dims dims, std::vector<Scalar> data);

  const Dims& dims() const { return dims_; }
  std::size_t order() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_[mode]; }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<Scalar> values() { return data_; }
  std::span<const Scalar> values() const { return data_; }

  Scalar& operator[](std::size_t j) { return data_[j]; }
  const Scalar& operator[](std::size_t j) const { return data_[j]; }

  Scalar& at(std::span<const std::size_t> index) { return data_[vec_index(index, dims_)]; }
  const Scalar& at(std::span<const std::size_t> index) const {
    return data_[vec_index(index, dims_)];
  }

  void fill(Scalar value);
  bool same_shape(const CTensor& other) const { return dims_ == other.dims_; }
  bool all_finite() const;

  template <typename Other>
  CTensor<Other> cast() const {
    std::vector<std::complex<Other>> out(data_.size());
    for (std::size_t j = 0; j < data_.size(); ++j) out[j] = std::complex<Other>(data_[j]);
    return CTensor<Other>(dims_, std::move(out));
  }

  friend bool operator==(const CTensor& a, const CTensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Dims dims_;
  std::vector<Scalar> data_;
};

/// out = T x_mode M, every mode-fiber of T replaced by M times the fiber.
/// Mode 0 is one GEMM on the contiguous leading dimension; higher modes loop
/// GEMMs over the trailing slabs. `out` is resized when needed.
template <typename Real>
void mu_mode_product_into(const CTensor<Real>& t, const RealMatrix<Real>& m, std::size_t mode,
                          CTensor<Real>& out);
template <typename Real>
void mu_mode_product_into(const CTensor<Real>& t, const ComplexMatrix<Real>& m,
                          std::size_t mode, CTensor<Real>& out);

template <typename Real, typename Matrix>
CTensor<Real> mu_mode_product(const CTensor<Real>& t, const Matrix& m, std::size_t mode) {
  CTensor<Real> out;
  mu_mode_product_into(t, m, mode, out);
  return out;
}

/// T x_1 M_1 x_2 ... x_d M_d, i.e. (M_d kron ... kron M_1) vec(T).
/// `work` is scratch storage reused across calls.
template <typename Real, typename Matrix>
void tucker_into(const CTensor<Real>& t, const std::vector<Matrix>& mats, CTensor<Real>& out,
                 CTensor<Real>& work);

template <typename Real, typename Matrix>
CTensor<Real> tucker(const CTensor<Real>& t, const std::vector<Matrix>& mats) {
  CTensor<Real> out;
  CTensor<Real> work;
  tucker_into(t, mats, out, work);
  return out;
}

template <typename Real>
CTensor<Real> hadamard(const CTensor<Real>& a, const CTensor<Real>& b);

template <typename Real>
CTensor<Real> pointwise_map(const CTensor<Real>& t,
                            const std::function<std::complex<Real>(std::complex<Real>)>& f);

/// sum_k c_k T_k in one fused pass.
template <typename Real>
CTensor<Real> linear_combine(
    const std::vector<std::pair<std::complex<Real>, const CTensor<Real>*>>& terms);

/// Flat binary record: u64 order, u64 dims..., then interleaved re/im f64
/// values first-index-fastest. Little-endian host order.
template <typename Real>
void write_binary(const CTensor<Real>& t, std::ostream& os);
template <typename Real>
void write_binary(const CTensor<Real>& t, const std::string& path);
CTensor<double> read_binary(std::istream& is);
CTensor<double> read_binary(const std::string& path);

/// |u| on the grid as CSV, one row per node in storage order.
/// Header "i1,...,id,x1,...,xd,abs" with one-based node indices.
template <typename Real>
void write_abs_csv(const CTensor<Real>& t, const std::vector<std::vector<double>>& nodes,
                   std::ostream& os);

}  // namespace fcgle
