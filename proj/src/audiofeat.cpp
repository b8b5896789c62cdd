#include "keysched/audiofeat.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <numbers>
#include <vector>

namespace keysched::audiofeat {

namespace {

constexpr double kLinearHzPerMel = 200.0 / 3.0;
constexpr double kBreakHz = 1000.0;
const double kBreakMel = kBreakHz / kLinearHzPerMel;
const double kLogStep = std::log(6.4) / 27.0;

// Integral of the unit-height triangle (lo, center, hi) from -inf to x.
double triangle_cdf(double x, double lo, double center, double hi) {
  if (x <= lo) return 0.0;
  if (x <= center) return (x - lo) * (x - lo) / (2.0 * (center - lo));
  if (x <= hi) return 0.5 * (center - lo) + 0.5 * (hi - center) - (hi - x) * (hi - x) / (2.0 * (hi - center));
  return 0.5 * (hi - lo);
}

}  // namespace

double hz_to_mel(double hz) {
  if (hz < kBreakHz) return hz / kLinearHzPerMel;
  return kBreakMel + std::log(hz / kBreakHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kBreakMel) return mel * kLinearHzPerMel;
  return kBreakHz * std::exp(kLogStep * (mel - kBreakMel));
}

Eigen::VectorXd mel_band_centers() {
  const double top = hz_to_mel(kMaxFrequency);
  Eigen::VectorXd centers(kMelBands);
  for (Index m = 0; m < kMelBands; ++m)
    centers(m) = mel_to_hz(top * static_cast<double>(m + 1) / static_cast<double>(kMelBands + 1));
  return centers;
}

Eigen::MatrixXd mel_filterbank() {
  const Index bins = kFftSize / 2 + 1;
  const double bin_hz = static_cast<double>(kSampleRate) / static_cast<double>(kFftSize);
  const double top = hz_to_mel(kMaxFrequency);
  std::vector<double> edges(static_cast<size_t>(kMelBands + 2));
  for (size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(kMelBands + 1));

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(kMelBands, bins);
  for (Index m = 0; m < kMelBands; ++m) {
    const double lo = edges[static_cast<size_t>(m)];
    const double center = edges[static_cast<size_t>(m + 1)];
    const double hi = edges[static_cast<size_t>(m + 2)];
    for (Index k = 0; k < bins; ++k) {
      const double cell_lo = std::max(0.0, (static_cast<double>(k) - 0.5) * bin_hz);
      const double cell_hi = std::min(kMaxFrequency, (static_cast<double>(k) + 0.5) * bin_hz);
      if (cell_hi <= cell_lo) continue;
      fb(m, k) = triangle_cdf(cell_hi, lo, center, hi) - triangle_cdf(cell_lo, lo, center, hi);
    }
    fb.row(m) /= fb.row(m).sum();
  }
  return fb;
}

Index raw_frame_count(Index samples) {
  if (samples < kWindowLength) return 0;
  return (samples - kWindowLength) / kHopLength + 1;
}

MelSpectrogram mel_spectrogram(const AudioClip& clip) {
  if (clip.sample_rate != kSampleRate)
    throw Error(ErrorCode::WrongSampleRate, std::to_string(clip.sample_rate) + " Hz, expected 16000");
  const Index frames = raw_frame_count(clip.samples.size());
  if (frames < 1) throw Error(ErrorCode::TooShort, "clip shorter than one 400-sample window");

  Eigen::VectorXd window(kWindowLength);
  for (Index i = 0; i < kWindowLength; ++i)
    window(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kWindowLength));

  const Eigen::MatrixXd fb = mel_filterbank();
  const Index bins = kFftSize / 2 + 1;
  const Index kept = std::min(frames, kSpectrogramFrames);

  Eigen::FFT<double> fft;
  std::vector<double> buffer(static_cast<size_t>(kFftSize), 0.0);
  std::vector<std::complex<double>> spectrum;
  Eigen::VectorXd power(bins);

  MelSpectrogram mel{Eigen::MatrixXd::Zero(kMelBands, kSpectrogramFrames)};
  for (Index f = 0; f < kept; ++f) {
    const auto seg = clip.samples.segment(f * kHopLength, kWindowLength);
    for (Index i = 0; i < kWindowLength; ++i) buffer[static_cast<size_t>(i)] = seg(i) * window(i);
    fft.fwd(spectrum, buffer);
    for (Index k = 0; k < bins; ++k) power(k) = std::norm(spectrum[static_cast<size_t>(k)]);
    mel.values.col(f) = (fb * power).array().log1p().matrix();
  }
  return mel;
}

std::string spectrogram_to_csv(const MelSpectrogram& mel) {
  std::string out;
  char buf[40];
  for (Index b = 0; b < mel.bands(); ++b) {
    for (Index f = 0; f < mel.frames(); ++f) {
      std::snprintf(buf, sizeof buf, f == 0 ? "%.9g" : ",%.9g", mel.values(b, f));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Index patch_token_count(Index t_a, Index kernel, Index stride) {
  if (stride < 1 || kernel < 1) throw Error(ErrorCode::InvalidArgument, "kernel and stride must be positive");
  if (kernel > t_a)
    throw Error(ErrorCode::KernelTooLarge, "kernel " + std::to_string(kernel) + " exceeds length " + std::to_string(t_a));
  return (t_a - kernel) / stride + 1;
}

Index segment_source_row(Index s, Index tokens, Index steps) {
  if (steps == 1) return 0;
  // round half away from zero on a non-negative rational
  return (2 * s * (tokens - 1) + (steps - 1)) / (2 * (steps - 1));
}

FeatureMatrix segment_features(const FeatureMatrix& tokens, Index steps) {
  if (tokens.rows() < 1 || steps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one token and one step");
  FeatureMatrix out(steps, tokens.cols());
  for (Index s = 0; s < steps; ++s) out.row(s) = tokens.row(segment_source_row(s, tokens.rows(), steps));
  return out;
}

FeatureMatrix gather_rows(const FeatureMatrix& perstep, const Indices& indices) {
  FeatureMatrix out(static_cast<Index>(indices.size()), perstep.cols());
  for (size_t i = 0; i < indices.size(); ++i) {
    const Index r = indices[i];
    if (r < 0 || r >= perstep.rows())
      throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r) + " of " + std::to_string(perstep.rows()));
    out.row(static_cast<Index>(i)) = perstep.row(r);
  }
  return out;
}

FeatureMatrix gather_keyframe_rows(const FeatureMatrix& perstep, const KeyframeSchedule& schedule) {
  return gather_rows(perstep, schedule.keyframes);
}

double l1_loss(const FeatureMatrix& pred, const FeatureMatrix& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  if (pred.size() == 0) return 0.0;
  return (pred - gt).cwiseAbs().mean();
}

}  // namespace keysched::audiofeat
