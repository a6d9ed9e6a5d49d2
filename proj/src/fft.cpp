#include "gradepipe/fft.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_map>
#include <vector>

namespace gradepipe {
namespace {

class Radix2 {
 public:
  explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2), reversed_(n) {
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    const int bits = std::countr_zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      reversed_[i] = r;
    }
  }

  void run(std::span<Complex> a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < reversed_[i]) std::swap(a[i], a[reversed_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          Complex w = twiddle_[k * stride];
          if (inverse) w = std::conj(w);
          const Complex t = w * a[start + k + half];
          a[start + k + half] = a[start + k] - t;
          a[start + k] += t;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<Complex> twiddle_;
  std::vector<std::size_t> reversed_;
};

class Bluestein {
 public:
  explicit Bluestein(std::size_t n) : n_(n), m_(std::bit_ceil(2 * n - 1)), inner_(m_), chirp_(n), kernel_(m_) {
    // k^2 mod 2n keeps the chirp phase argument small and exact.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k2 = (k * k) % (2 * n);
      const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
      chirp_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m_ - k] = std::conj(chirp_[k]);
    }
    inner_.run(kernel_, false);
  }

  void run(std::span<Complex> a, bool inverse) const {
    std::vector<Complex> work(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex x = inverse ? std::conj(a[k]) : a[k];
      work[k] = x * chirp_[k];
    }
    inner_.run(work, false);
    for (std::size_t k = 0; k < m_; ++k) work[k] *= kernel_[k];
    inner_.run(work, true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex y = work[k] * scale * chirp_[k];
      a[k] = inverse ? std::conj(y) : y;
    }
  }

 private:
  std::size_t n_;
  std::size_t m_;
  Radix2 inner_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
};

class Plan {
 public:
  explicit Plan(std::size_t n) {
    if (std::has_single_bit(n)) {
      radix2_ = std::make_unique<Radix2>(n);
    } else {
      bluestein_ = std::make_unique<Bluestein>(n);
    }
  }
  void run(std::span<Complex> a, bool inverse) const {
    if (radix2_) {
      radix2_->run(a, inverse);
    } else {
      bluestein_->run(a, inverse);
    }
  }

 private:
  std::unique_ptr<Radix2> radix2_;
  std::unique_ptr<Bluestein> bluestein_;
};

const Plan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

ComplexGrid transform2(const ComplexGrid& grid, bool inverse) {
  if (grid.empty() || grid.channels() != 1) throw Error(Errc::EmptyGrid, "2-D FFT needs a non-empty 1-channel grid");
  const int rows = grid.height();
  const int cols = grid.width();
  ComplexGrid out = grid;
  auto data = out.samples();
  const Plan& row_plan = plan_for(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) row_plan.run(data.subspan(static_cast<std::size_t>(r) * cols, cols), inverse);
  const Plan& col_plan = plan_for(static_cast<std::size_t>(rows));
  std::vector<Complex> column(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) column[r] = out.at(r, c);
    col_plan.run(column, inverse);
    for (int r = 0; r < rows; ++r) out.at(r, c) = column[r];
  }
  if (inverse) {
    const double scale = 1.0 / (static_cast<double>(rows) * cols);
    for (auto& v : data) v *= scale;
  }
  return out;
}

}  // namespace

void fft_inplace(std::span<Complex> data, bool inverse) {
  if (data.empty()) throw Error(Errc::EmptyGrid, "FFT of an empty sequence");
  if (data.size() == 1) return;
  plan_for(data.size()).run(data, inverse);
}

ComplexGrid fft2(const ComplexGrid& grid) { return transform2(grid, false); }
ComplexGrid ifft2(const ComplexGrid& grid) { return transform2(grid, true); }

ComplexGrid to_complex(const GridF& grid) {
  ComplexGrid out(grid.width(), grid.height(), 1);
  auto dst = out.samples();
  const auto src = grid.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Complex(src[i], 0.0);
  return out;
}

}  // namespace gradepipe
