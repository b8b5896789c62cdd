#pragma once

#include "keysched/error.hpp"
#include "keysched/types.hpp"

#include <cmath>
#include <string>

namespace keysched::audiofeat {

inline constexpr int kSampleRate = 16000;
inline constexpr Index kMelBands = 128;
inline constexpr Index kWindowLength = 400;  // 25 ms
inline constexpr Index kHopLength = 160;     // 10 ms
inline constexpr Index kFftSize = 1024;
inline constexpr Index kSpectrogramFrames = 196;
inline constexpr double kMaxFrequency = 8000.0;

/// log(1 + mel power), band-major: rows are mel bands, columns time bins.
struct MelSpectrogram {
  Eigen::MatrixXd values;

  Index bands() const { return values.rows(); }
  Index frames() const { return values.cols(); }
};

// Slaney mel scale: linear below 1 kHz, logarithmic above.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// kMelBands x (kFftSize/2 + 1) triangular filterbank over 0..8 kHz. Each
/// weight is the triangle's area over that FFT bin's frequency cell, and
/// each row is scaled to sum to 1.
Eigen::MatrixXd mel_filterbank();

/// Center frequency of each mel band.
Eigen::VectorXd mel_band_centers();

/// Raw STFT framing count: floor((n - 400) / 160) + 1.
Index raw_frame_count(Index samples);

/// Hann-windowed STFT (no centering) -> power -> mel -> log1p, then the time
/// axis is cropped or zero-padded to kSpectrogramFrames.
MelSpectrogram mel_spectrogram(const AudioClip& clip);

std::string spectrogram_to_csv(const MelSpectrogram& mel);

/// Number of patches a kernel of `kernel` frames with step `stride` yields
/// along an axis of `t_a` frames.
Index patch_token_count(Index t_a, Index kernel, Index stride);

/// Per-channel linear resampling of an N x C embedding table to n_new rows,
/// aligning normalized positions i/(N-1) and j/(n_new-1).
template <typename Derived>
Matrix<typename Derived::Scalar> interp_pos_embeddings(const Eigen::MatrixBase<Derived>& emb, Index n_new) {
  using Scalar = typename Derived::Scalar;
  const Index n = emb.rows();
  if (n < 1 || n_new < 1) throw Error(ErrorCode::InvalidArgument, "embedding tables need at least one row");
  Matrix<Scalar> out(n_new, emb.cols());
  if (n == 1) {
    out = emb.row(0).replicate(n_new, 1);
    return out;
  }
  if (n_new == n) {
    out = emb;
    return out;
  }
  for (Index j = 0; j < n_new; ++j) {
    if (n_new == 1) {
      out.row(j) = emb.row(0);
      continue;
    }
    // exact integer endpoints; interior positions as a rational offset
    const Index num = j * (n - 1);
    const Index lo = num / (n_new - 1);
    const Index rem = num % (n_new - 1);
    if (rem == 0) {
      out.row(j) = emb.row(lo);
    } else {
      const Scalar frac = static_cast<Scalar>(rem) / static_cast<Scalar>(n_new - 1);
      out.row(j) = (Scalar(1) - frac) * emb.row(lo) + frac * emb.row(lo + 1);
    }
  }
  return out;
}

/// Token row used for time step s of t: round(s * (N - 1) / (t - 1)).
Index segment_source_row(Index s, Index tokens, Index steps);

/// One token per time step by nearest-token mapping.
FeatureMatrix segment_features(const FeatureMatrix& tokens, Index steps);

/// Rows of `perstep` at `indices`, in order.
FeatureMatrix gather_rows(const FeatureMatrix& perstep, const Indices& indices);
FeatureMatrix gather_keyframe_rows(const FeatureMatrix& perstep, const KeyframeSchedule& schedule);

/// Mean absolute difference.
double l1_loss(const FeatureMatrix& pred, const FeatureMatrix& gt);

}  // namespace keysched::audiofeat
