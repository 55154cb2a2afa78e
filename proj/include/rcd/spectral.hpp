#ifndef RCD_SPECTRAL_HPP
#define RCD_SPECTRAL_HPP

#include <vector>

#include "rcd/types.hpp"

namespace rcd::spectral {

// Periodogram I(w_k) = |T^{-1/2} sum_t X(t) e^{-i 2 pi w_k t}|^2, kept on the
// one-sided grid k = 0..floor(T/2). Parseval holds on the two-sided grid:
// sum_{k=0}^{T-1} I(w_k) = sum_t X(t)^2.
Spectrum periodogram(const TrialSeries& trial);

// Moving average over 2m+1 bins applied on the two-sided grid with circular
// wrap, restricted back to one side. m = 0 is the identity.
Spectrum smooth(const Spectrum& spectrum, int half_bandwidth);

// Default half-bandwidth ceil(sqrt(T)/2).
int default_half_bandwidth(int series_length);

// Sum of the full two-sided periodogram reconstructed from the one-sided grid.
double two_sided_mass(const Spectrum& spectrum);

// Squared-magnitude tapered STFT with a Hann taper of width 2L+1 rescaled so
// sum w(h)^2 = 1, evaluated at window centers L, L+hop, ... (0-based).
Spectrogram spectrogram(const TrialSeries& trial, int half_window, int hop);

// Optional separable moving-average smoother over (time, frequency); box
// kernels truncated and renormalized at the edges.
Spectrogram smooth_spectrogram(const Spectrogram& sg, int time_half_bandwidth,
                               int freq_half_bandwidth);

// Running cross-trial average of spectra on a fixed grid.
class SpectralStack {
 public:
  void add(const Spectrum& s);  // throws std::invalid_argument on grid mismatch
  Spectrum mean() const;        // throws std::logic_error when empty
  int count() const { return count_; }

 private:
  Spectrum sum_;
  int count_{0};
};

}  // namespace rcd::spectral

#endif  // RCD_SPECTRAL_HPP
