#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "lstsc/errors.hpp"

namespace lstsc {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. `inverse` applies the 1/N scale.
inline void fft_inplace(std::vector<std::complex<double>>& x, bool inverse = false) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw ContractError("fft: length must be a power of two, got " + std::to_string(n));
  }
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
  }
}

// One-sided spectrum (N/2+1 bins) of a real block zero-padded to fft_len.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& block,
                                              std::size_t fft_len) {
  std::vector<std::complex<double>> buf(fft_len, {0.0, 0.0});
  for (std::size_t i = 0; i < block.size() && i < fft_len; ++i) buf[i] = block[i];
  fft_inplace(buf);
  buf.resize(fft_len / 2 + 1);
  return buf;
}

// Real signal from a one-sided spectrum, assuming Hermitian symmetry.
inline std::vector<double> irfft(const std::vector<std::complex<double>>& half,
                                 std::size_t fft_len) {
  if (half.size() != fft_len / 2 + 1) {
    throw ContractError("irfft: expected " + std::to_string(fft_len / 2 + 1) +
                        " bins, got " + std::to_string(half.size()));
  }
  std::vector<std::complex<double>> buf(fft_len);
  for (std::size_t f = 0; f < half.size(); ++f) buf[f] = half[f];
  for (std::size_t f = half.size(); f < fft_len; ++f) buf[f] = std::conj(half[fft_len - f]);
  fft_inplace(buf, true);
  std::vector<double> out(fft_len);
  for (std::size_t i = 0; i < fft_len; ++i) out[i] = buf[i].real();
  return out;
}

// Linear convolution via zero-padded FFT.
inline std::vector<double> fft_convolve(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<std::complex<double>> fa(n, {0.0, 0.0}), fb(n, {0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fft_inplace(fa);
  fft_inplace(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace lstsc
