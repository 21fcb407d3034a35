#include "fcgle/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "fcgle/errors.hpp"

namespace fcgle {

std::size_t element_count(const Dims& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

std::size_t vec_index(std::span<const std::size_t> index, const Dims& dims) {
  if (index.size() != dims.size()) throw DimensionError("vec_index: order mismatch");
  std::size_t j = 0;
  std::size_t stride = 1;
  for (std::size_t mu = 0; mu < dims.size(); ++mu) {
    if (index[mu] >= dims[mu]) throw DimensionError("vec_index: index out of range");
    j += stride * index[mu];
    stride *= dims[mu];
  }
  return j;
}

std::vector<std::size_t> multi_index(std::size_t linear, const Dims& dims) {
  if (linear >= element_count(dims)) throw DimensionError("multi_index: index out of range");
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t mu = 0; mu < dims.size(); ++mu) {
    idx[mu] = linear % dims[mu];
    linear /= dims[mu];
  }
  return idx;
}

template <typename Real>
CTensor<Real>::CTensor(Dims dims) : dims_(std::move(dims)), data_(element_count(dims_)) {}

template <typename Real>
CTensor<Real>::CTensor(Dims dims, std::vector<Scalar> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != element_count(dims_)) {
    throw DimensionError("CTensor: data length does not match dims");
  }
}

template <typename Real>
void CTensor<Real>::fill(Scalar value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename Real>
bool CTensor<Real>::all_finite() const {
  for (const Scalar& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

namespace {

struct ModeSplit {
  std::size_t prefix;  // product of dims before the mode
  std::size_t n;
  std::size_t suffix;  // product of dims after the mode
};

template <typename Real, typename Matrix>
ModeSplit check_mode(const CTensor<Real>& t, const Matrix& m, std::size_t mode,
                     const CTensor<Real>& out) {
  if (mode >= t.order()) throw DimensionError("mu_mode_product: mode out of range");
  const std::size_t n = t.dim(mode);
  if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n) {
    throw DimensionError("mu_mode_product: matrix side does not match tensor dimension");
  }
  if (&out == &t) throw DimensionError("mu_mode_product: output aliases input");
  ModeSplit s{1, n, 1};
  for (std::size_t mu = 0; mu < mode; ++mu) s.prefix *= t.dim(mu);
  for (std::size_t mu = mode + 1; mu < t.order(); ++mu) s.suffix *= t.dim(mu);
  return s;
}

template <typename Real>
void ensure_shape(const CTensor<Real>& t, CTensor<Real>& out) {
  if (!out.same_shape(t)) out = CTensor<Real>(t.dims());
}

}  // namespace

template <typename Real>
void mu_mode_product_into(const CTensor<Real>& t, const RealMatrix<Real>& m, std::size_t mode,
                          CTensor<Real>& out) {
  using CMap = Eigen::Map<ComplexMatrix<Real>>;
  using CConstMap = Eigen::Map<const ComplexMatrix<Real>>;
  using RMap = Eigen::Map<RealMatrix<Real>>;
  using RConstMap = Eigen::Map<const RealMatrix<Real>>;
  const ModeSplit s = check_mode(t, m, mode, out);
  ensure_shape(t, out);
  const auto n = static_cast<Eigen::Index>(s.n);
  if (mode == 0) {
    CConstMap in(t.data(), n, static_cast<Eigen::Index>(s.suffix));
    CMap o(out.data(), n, static_cast<Eigen::Index>(s.suffix));
    o.noalias() = m * in;
    return;
  }
  // A complex P x n slab is a real 2P x n matrix with interleaved rows, so a
  // real right factor needs only a real GEMM.
  const auto rows = static_cast<Eigen::Index>(2 * s.prefix);
  const std::size_t slab = s.prefix * s.n;
  for (std::size_t k = 0; k < s.suffix; ++k) {
    RConstMap in(reinterpret_cast<const Real*>(t.data() + k * slab), rows, n);
    RMap o(reinterpret_cast<Real*>(out.data() + k * slab), rows, n);
    o.noalias() = in * m.transpose();
  }
}

template <typename Real>
void mu_mode_product_into(const CTensor<Real>& t, const ComplexMatrix<Real>& m,
                          std::size_t mode, CTensor<Real>& out) {
  using CMap = Eigen::Map<ComplexMatrix<Real>>;
  using CConstMap = Eigen::Map<const ComplexMatrix<Real>>;
  const ModeSplit s = check_mode(t, m, mode, out);
  ensure_shape(t, out);
  const auto n = static_cast<Eigen::Index>(s.n);
  if (mode == 0) {
    CConstMap in(t.data(), n, static_cast<Eigen::Index>(s.suffix));
    CMap o(out.data(), n, static_cast<Eigen::Index>(s.suffix));
    o.noalias() = m * in;
    return;
  }
  const auto rows = static_cast<Eigen::Index>(s.prefix);
  const std::size_t slab = s.prefix * s.n;
  for (std::size_t k = 0; k < s.suffix; ++k) {
    CConstMap in(t.data() + k * slab, rows, n);
    CMap o(out.data() + k * slab, rows, n);
    o.noalias() = in * m.transpose();
  }
}

template <typename Real, typename Matrix>
void tucker_into(const CTensor<Real>& t, const std::vector<Matrix>& mats, CTensor<Real>& out,
                 CTensor<Real>& work) {
  const std::size_t d = t.order();
  if (mats.size() != d) throw DimensionError("tucker: need one matrix per mode");
  if (&out == &t || &work == &t || &out == &work) {
    throw DimensionError("tucker: output, scratch and input must be distinct");
  }
  if (d == 0) {
    out = t;
    return;
  }
  // Ping-pong so that the last product lands in `out`.
  CTensor<Real>* dst = (d % 2 == 1) ? &out : &work;
  CTensor<Real>* other = (d % 2 == 1) ? &work : &out;
  mu_mode_product_into(t, mats[0], 0, *dst);
  for (std::size_t mu = 1; mu < d; ++mu) {
    mu_mode_product_into(*dst, mats[mu], mu, *other);
    std::swap(dst, other);
  }
}

template <typename Real>
CTensor<Real> hadamard(const CTensor<Real>& a, const CTensor<Real>& b) {
  if (!a.same_shape(b)) throw DimensionError("hadamard: shape mismatch");
  CTensor<Real> out(a.dims());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = a[j] * b[j];
  return out;
}

template <typename Real>
CTensor<Real> pointwise_map(const CTensor<Real>& t,
                            const std::function<std::complex<Real>(std::complex<Real>)>& f) {
  CTensor<Real> out(t.dims());
  const auto n = static_cast<std::ptrdiff_t>(t.size());
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = f(t[j]);
  return out;
}

template <typename Real>
CTensor<Real> linear_combine(
    const std::vector<std::pair<std::complex<Real>, const CTensor<Real>*>>& terms) {
  if (terms.empty()) throw DimensionError("linear_combine: no operands");
  const CTensor<Real>& first = *terms.front().second;
  for (const auto& [c, t] : terms) {
    if (!t->same_shape(first)) throw DimensionError("linear_combine: shape mismatch");
  }
  CTensor<Real> out(first.dims());
  const auto n = static_cast<std::ptrdiff_t>(first.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    std::complex<Real> acc(0);
    for (const auto& [c, t] : terms) acc += c * (*t)[j];
    out[j] = acc;
  }
  return out;
}

template <typename Real>
void write_binary(const CTensor<Real>& t, std::ostream& os) {
  const auto order = static_cast<std::uint64_t>(t.order());
  os.write(reinterpret_cast<const char*>(&order), sizeof order);
  for (std::size_t d : t.dims()) {
    const auto v = static_cast<std::uint64_t>(d);
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  for (const auto& z : t.values()) {
    const double re = static_cast<double>(z.real());
    const double im = static_cast<double>(z.imag());
    os.write(reinterpret_cast<const char*>(&re), sizeof re);
    os.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
}

template <typename Real>
void write_binary(const CTensor<Real>& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_binary(t, os);
}

CTensor<double> read_binary(std::istream& is) {
  std::uint64_t order = 0;
  if (!is.read(reinterpret_cast<char*>(&order), sizeof order) || order > 16) {
    throw std::runtime_error("read_binary: bad header");
  }
  Dims dims(order);
  for (auto& d : dims) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
      throw std::runtime_error("read_binary: truncated header");
    }
    d = static_cast<std::size_t>(v);
  }
  std::vector<std::complex<double>> data(element_count(dims));
  if (!is.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(std::complex<double>)))) {
    throw std::runtime_error("read_binary: truncated payload");
  }
  return CTensor<double>(std::move(dims), std::move(data));
}

CTensor<double> read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_binary(is);
}

template <typename Real>
void write_abs_csv(const CTensor<Real>& t, const std::vector<std::vector<double>>& nodes,
                   std::ostream& os) {
  const std::size_t d = t.order();
  if (nodes.size() != d) throw DimensionError("write_abs_csv: one node vector per mode");
  for (std::size_t mu = 0; mu < d; ++mu) {
    if (nodes[mu].size() != t.dim(mu)) throw DimensionError("write_abs_csv: node count");
  }
  for (std::size_t mu = 0; mu < d; ++mu) os << 'i' << mu + 1 << ',';
  for (std::size_t mu = 0; mu < d; ++mu) os << 'x' << mu + 1 << ',';
  os << "abs\n";
  os << std::setprecision(17);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < t.size(); ++j) {
    for (std::size_t mu = 0; mu < d; ++mu) os << idx[mu] + 1 << ',';
    for (std::size_t mu = 0; mu < d; ++mu) os << nodes[mu][idx[mu]] << ',';
    os << std::abs(t[j]) << '\n';
    for (std::size_t mu = 0; mu < d; ++mu) {
      if (++idx[mu] < t.dim(mu)) break;
      idx[mu] = 0;
    }
  }
}

#define FCGLE_INSTANTIATE_TENSOR(Real)                                                       \
  template class CTensor<Real>;                                                              \
  template void mu_mode_product_into(const CTensor<Real>&, const RealMatrix<Real>&,          \
                                     std::size_t, CTensor<Real>&);                           \
  template void mu_mode_product_into(const CTensor<Real>&, const ComplexMatrix<Real>&,       \
                                     std::size_t, CTensor<Real>&);                           \
  template void tucker_into(const CTensor<Real>&, const std::vector<RealMatrix<Real>>&,       \
                            CTensor<Real>&, CTensor<Real>&);                                 \
  template void tucker_into(const CTensor<Real>&, const std::vector<ComplexMatrix<Real>>&,   \
                            CTensor<Real>&, CTensor<Real>&);                                 \
  template CTensor<Real> hadamard(const CTensor<Real>&, const CTensor<Real>&);               \
  template CTensor<Real> pointwise_map(                                                      \
      const CTensor<Real>&, const std::function<std::complex<Real>(std::complex<Real>)>&);   \
  template CTensor<Real> linear_combine(                                                     \
      const std::vector<std::pair<std::complex<Real>, const CTensor<Real>*>>&);              \
  template void write_binary(const CTensor<Real>&, std::ostream&);                           \
  template void write_binary(const CTensor<Real>&, const std::string&);                      \
  template void write_abs_csv(const CTensor<Real>&, const std::vector<std::vector<double>>&, \
                              std::ostream&);

FCGLE_INSTANTIATE_TENSOR(float)
FCGLE_INSTANTIATE_TENSOR(double)

#undef FCGLE_INSTANTIATE_TENSOR

}  // namespace fcgle
