#include <fftw3.h>

#include <bit>

#include "fcgle/baseline.hpp"
#include "fcgle/errors.hpp"

namespace fcgle {

struct BttbOperator::Fft {
  std::vector<std::complex<double>> buf;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(const Dims& embed) : buf(element_count(embed)) {
    // FFTW is row-major: the last listed dimension runs fastest.
    std::vector<int> n(embed.rbegin(), embed.rend());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const int rank = static_cast<int>(n.size());
    forward = fftw_plan_dft(rank, n.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft(rank, n.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward || !backward) throw NumericalError("bttb: FFT plan creation failed");
  }
  ~Fft() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

namespace {

// Calls f(src_offset, dst_offset) for every leading-dimension row of `dims`
// placed at the origin of the larger array `embed`.
template <typename F>
void for_each_row(const Dims& dims, const Dims& embed, F&& f) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> idx(d, 0);
  const std::size_t rows = element_count(dims) / dims[0];
  std::size_t src = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t dst = 0;
    std::size_t stride = embed[0];
    for (std::size_t mu = 1; mu < d; ++mu) {
      dst += idx[mu] * stride;
      stride *= embed[mu];
    }
    f(src, dst);
    src += dims[0];
    for (std::size_t mu = 1; mu < d; ++mu) {
      if (++idx[mu] < dims[mu]) break;
      idx[mu] = 0;
    }
  }
}

}  // namespace

BttbOperator::BttbOperator(const std::vector<FracOperator>& directions,
                           std::complex<double> coeff, double theta)
    : theta_(theta) {
  if (directions.empty()) throw DimensionError("bttb: need at least one direction");
  for (const auto& op : directions) {
    dims_.push_back(op.size());
    embed_.push_back(std::bit_ceil(2 * op.size()));
  }
  size_ = element_count(dims_);
  fft_ = std::make_unique<Fft>(embed_);

  // Generating array of K: supported on the coordinate axes.
  auto& buf = fft_->buf;
  std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
  std::size_t stride = 1;
  for (std::size_t mu = 0; mu < directions.size(); ++mu) {
    const Eigen::VectorXd col = directions[mu].first_column();
    const std::size_t n = dims_[mu];
    const std::size_t len = embed_[mu];
    buf[0] += coeff * col[0];
    for (std::size_t k = 1; k < n; ++k) {
      buf[k * stride] += coeff * col[static_cast<Eigen::Index>(k)];
      buf[(len - k) * stride] += coeff * col[static_cast<Eigen::Index>(k)];
    }
    stride *= len;
  }
  fftw_execute(fft_->forward);
  const double scale = 1.0 / static_cast<double>(buf.size());
  k_spec_.resize(buf.size());
  op_spec_.resize(buf.size());
  for (std::size_t j = 0; j < buf.size(); ++j) {
    k_spec_[j] = buf[j] * scale;
    op_spec_[j] = (1.0 - theta * buf[j]) * scale;
  }
}

BttbOperator::~BttbOperator() = default;

void BttbOperator::convolve(const CVector& x, CVector& y,
                            const std::vector<std::complex<double>>& spec) const {
  if (static_cast<std::size_t>(x.size()) != size_) {
    throw DimensionError("bttb: vector length does not match operator size");
  }
  auto& buf = fft_->buf;
  std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
  const std::size_t n0 = dims_[0];
  for_each_row(dims_, embed_, [&](std::size_t src, std::size_t dst) {
    std::copy_n(x.data() + src, n0, buf.data() + dst);
  });
  fftw_execute(fft_->forward);
  for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= spec[j];
  fftw_execute(fft_->backward);
  y.resize(x.size());
  for_each_row(dims_, embed_, [&](std::size_t src, std::size_t dst) {
    std::copy_n(buf.data() + dst, n0, y.data() + src);
  });
}

void BttbOperator::apply(const CVector& x, CVector& y) const { convolve(x, y, op_spec_); }

CVector BttbOperator::apply(const CVector& x) const {
  CVector y;
  apply(x, y);
  return y;
}

void BttbOperator::apply_K(const CVector& x, CVector& y) const { convolve(x, y, k_spec_); }

}  // namespace fcgle
