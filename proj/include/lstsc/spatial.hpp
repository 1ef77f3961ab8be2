#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "lstsc/errors.hpp"
#include "lstsc/stft.hpp"

namespace lstsc {

struct RtfConfig {
  int r_frames = 4;          // short-term average spans r_frames + 1 frames
  double lambda = 0.999;     // forgetting factor of the long-term recursion
  double eps = 1e-12;        // magnitude guard for whitening and denominators
  int reference_channel = 0;

  void validate() const {
    if (r_frames < 0 || r_frames % 2 != 0) {
      throw UsageError("rtf: r_frames must be an even non-negative integer");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) throw UsageError("rtf: lambda must lie in (0,1)");
    if (!(eps > 0.0)) throw UsageError("rtf: eps must be positive");
    if (reference_channel < 0) throw UsageError("rtf: reference_channel must be non-negative");
  }

  static RtfConfig global() { return RtfConfig{.lambda = 0.999}; }
  static RtfConfig local() { return RtfConfig{.lambda = 0.01}; }
};

// Short-term RTF at (l, f): cross-spectrum of each non-reference channel
// against the reference, averaged over the clamped frame window, divided by
// the reference auto-spectrum. Returns M-1 elements ordered by channel index.
inline std::vector<std::complex<double>> short_term_rtf(const MultichannelSpectrogram& spec,
                                                        int l, int f, const RtfConfig& cfg) {
  cfg.validate();
  const int m_count = spec.num_channels();
  if (m_count < 2) {
    throw ContractError("rtf: spatial features need at least 2 channels, got " +
                        std::to_string(m_count));
  }
  if (cfg.reference_channel >= m_count) {
    throw UsageError("rtf: reference_channel out of range");
  }
  if (l < 0 || l >= spec.frames() || f < 0 || f >= spec.bins()) {
    throw ContractError("rtf: frame or bin index out of range");
  }
  const int lo = std::max(0, l - cfg.r_frames / 2);
  const int hi = std::min(spec.frames() - 1, l + cfg.r_frames / 2);

  double auto_ref = 0.0;
  for (int n = lo; n <= hi; ++n) auto_ref += std::norm(spec.at(cfg.reference_channel, n, f));

  std::vector<std::complex<double>> rtf;
  rtf.reserve(m_count - 1);
  for (int m = 0; m < m_count; ++m) {
    if (m == cfg.reference_channel) continue;
    std::complex<double> cross(0.0, 0.0);
    for (int n = lo; n <= hi; ++n) {
      cross += spec.at(m, n, f) * std::conj(spec.at(cfg.reference_channel, n, f));
    }
    rtf.push_back(cross / std::max(auto_ref, cfg.eps));
  }
  return rtf;
}

// Unit-modulus normalization; elements below eps collapse to exactly 0.
inline void whiten_inplace(std::vector<std::complex<double>>& v, double eps) {
  for (auto& x : v) {
    const double mag = std::abs(x);
    x = (mag < eps) ? std::complex<double>(0.0, 0.0) : x / mag;
  }
}

inline std::vector<std::complex<double>> whiten(std::vector<std::complex<double>> v, double eps) {
  whiten_inplace(v, eps);
  return v;
}

// Spatial coherence of two whitened RTF vectors: mean real part of the
// element-wise conjugate product, clamped to [-1, 1].
inline double spatial_coherence(const std::vector<std::complex<double>>& r,
                    const std::vector<std::complex<double>>& r_bar) {
  if (r.size() != r_bar.size()) {
    throw ContractError("lstsc: vector length mismatch (" + std::to_string(r.size()) + " vs " +
                        std::to_string(r_bar.size()) + ")");
  }
  if (r.empty()) throw ContractError("lstsc: empty feature vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    acc += (std::conj(r[i]) * r_bar[i]).real();
  }
  double gamma = acc / static_cast<double>(r.size());
  if (gamma > 1.0 + 1e-9 || gamma < -1.0 - 1e-9) {
    throw ContractError("lstsc: coherence out of range before clamping");
  }
  return std::clamp(gamma, -1.0, 1.0);
}

// Per-bin recursive long-term whitened RTF. Single writer per instance.
class LstscState {
public:
  LstscState(int num_channels, int bins, RtfConfig cfg)
      : cfg_(cfg), bins_(bins), dim_(num_channels - 1),
        long_term_(static_cast<std::size_t>(bins) * dim_),
        initialized_(bins, false) {
    cfg_.validate();
    if (num_channels < 2) throw ContractError("lstsc state: need at least 2 channels");
    if (bins <= 0) throw ContractError("lstsc state: bins must be positive");
  }

  int bins() const { return bins_; }
  int dim() const { return dim_; }
  const RtfConfig& config() const { return cfg_; }
  bool initialized(int f) const { return initialized_[f]; }

  std::vector<std::complex<double>> long_term(int f) const {
    const auto* p = &long_term_[static_cast<std::size_t>(f) * dim_];
    return {p, p + dim_};
  }

  // One recursion step for bin f with an already whitened short-term vector.
  // First observation seeds the state directly.
  void update(int f, const std::vector<std::complex<double>>& r) {
    if (f < 0 || f >= bins_) throw ContractError("lstsc state: bin index out of range");
    if (static_cast<int>(r.size()) != dim_) {
      throw ContractError("lstsc state: dimension mismatch (" + std::to_string(r.size()) +
                          " vs " + std::to_string(dim_) + ")");
    }
    auto* bar = &long_term_[static_cast<std::size_t>(f) * dim_];
    if (!initialized_[f]) {
      std::copy(r.begin(), r.end(), bar);
      initialized_[f] = true;
      return;
    }
    for (int i = 0; i < dim_; ++i) {
      std::complex<double> v = cfg_.lambda * bar[i] + (1.0 - cfg_.lambda) * r[i];
      const double mag = std::abs(v);
      bar[i] = (mag < cfg_.eps) ? std::complex<double>(0.0, 0.0) : v / mag;
    }
  }

private:
  RtfConfig cfg_;
  int bins_;
  int dim_;
  std::vector<std::complex<double>> long_term_;
  std::vector<bool> initialized_;
};

struct CoherenceMap {
  int frames = 0;
  int bins = 0;
  double lambda = 0.0;
  std::vector<double> gamma;  // frame-major

  CoherenceMap() = default;
  CoherenceMap(int t, int f, double lam)
      : frames(t), bins(f), lambda(lam), gamma(static_cast<std::size_t>(t) * f, 0.0) {}

  double& at(int l, int f) { return gamma[static_cast<std::size_t>(l) * bins + f]; }
  double at(int l, int f) const { return gamma[static_cast<std::size_t>(l) * bins + f]; }
};

// Streaming pass over all frames: short-term RTF, whitening, coherence
// against the current long-term state, then the state update. The coherence
// at a freshly seeded bin is defined as 1.
inline CoherenceMap coherence_stream(const MultichannelSpectrogram& spec, const RtfConfig& cfg) {
  cfg.validate();
  if (spec.num_channels() < 2) {
    throw ContractError("coherence: spatial features need at least 2 channels");
  }
  const int frames = spec.frames();
  const int bins = spec.bins();
  CoherenceMap out(frames, bins, cfg.lambda);
  LstscState state(spec.num_channels(), bins, cfg);
  for (int l = 0; l < frames; ++l) {
    for (int f = 0; f < bins; ++f) {
      auto r = short_term_rtf(spec, l, f, cfg);
      whiten_inplace(r, cfg.eps);
      out.at(l, f) = state.initialized(f) ? spatial_coherence(r, state.long_term(f)) : 1.0;
      state.update(f, r);
    }
  }
  return out;
}

}  // namespace lstsc
