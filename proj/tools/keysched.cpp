// keysched: motion scores, keyframe schedules and conditioning layouts from
// the command line.

#include "keysched/audiofeat.hpp"
#include "keysched/error.hpp"
#include "keysched/eval.hpp"
#include "keysched/flow.hpp"
#include "keysched/ingest.hpp"
#include "keysched/motion.hpp"
#include "keysched/plot.hpp"
#include "keysched/schedule.hpp"
#include "keysched/select.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace keysched;

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kIngest = 2,
  kFlow = 3,
  kInvalidK = 4,
  kAudio = 5,
  kGeometry = 6,
  kEval = 7,
  kOther = 8,
};

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  bad command line\n"
    "  2  input error (missing/malformed PGM, WAV, CSV or JSON; size mismatch; write failure)\n"
    "  3  optical flow error (frames too small, fewer than 2 frames)\n"
    "  4  invalid keyframe count (k < 2 or k >= number of frames)\n"
    "  5  audio feature error (sample rate, clip too short, kernel larger than input)\n"
    "  6  bad window geometry\n"
    "  7  evaluation error (no instance with ground-truth keypoints)\n"
    "  8  any other failure\n"
    "Environment: KEYSCHED_THREADS caps worker threads used for optical flow.";

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDirectory:
    case ErrorCode::MalformedPgm:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::UnsupportedEncoding:
    case ErrorCode::UnsupportedChannels:
    case ErrorCode::UnsupportedRate:
    case ErrorCode::ParseError:
    case ErrorCode::InvariantViolation:
    case ErrorCode::IoError:
      return kIngest;
    case ErrorCode::TooSmall:
    case ErrorCode::TooShort:
      return kFlow;
    case ErrorCode::InvalidK:
      return kInvalidK;
    case ErrorCode::WrongSampleRate:
    case ErrorCode::KernelTooLarge:
      return kAudio;
    case ErrorCode::BadGeometry:
      return kGeometry;
    case ErrorCode::NoValidInstances:
      return kEval;
    default:
      return kOther;
  }
}

int thread_cap() {
  if (const char* env = std::getenv("KEYSCHED_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    ingest::write_file_atomic(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keysched - keyframe selection and scheduling toolkit"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "Per-frame motion scores from a directory of PGM frames");
  std::string frames_dir, scores_out;
  double fps = 24.0;
  bool score_normalize = false;
  flow::FlowParams flow_params;
  score->add_option("--frames", frames_dir, "Directory of P5 PGM frames (filename order)")->required();
  score->add_option("--fps", fps, "Frames per second (metadata)");
  score->add_flag("--normalize", score_normalize, "Divide each score by the pixel count H*W");
  score->add_option("--alpha", flow_params.alpha, "Horn-Schunck smoothness weight (8-bit intensity scale)");
  score->add_option("--iterations", flow_params.iterations, "Jacobi iterations per pyramid level");
  score->add_option("--levels", flow_params.pyramid_levels, "Pyramid levels");
  score->add_option("--out", scores_out, "Output CSV (default stdout)");

  // select
  auto* sel = app.add_subcommand("select", "Keyframe schedule from a scores CSV");
  std::string sel_scores, sel_out;
  select::SelectionParams sel_params;
  bool sel_random = false;
  Index smooth_window = motion::kDefaultSmoothWindow;
  Index min_distance = motion::kDefaultMinDistance;
  double min_prominence = motion::kDefaultMinProminence;
  sel->add_option("--scores", sel_scores, "Input scores CSV")->required();
  sel->add_option("--k", sel_params.t_k, "Number of keyframes");
  sel->add_option("--seed", sel_params.seed, "Seed for --random peak choice");
  sel->add_flag("--random", sel_random, "Choose peaks by seeded random sampling instead of prominence");
  sel->add_option("--window", smooth_window, "Smoothing window (odd)");
  sel->add_option("--distance", min_distance, "Minimum frames between peaks");
  sel->add_option("--prominence", min_prominence, "Minimum peak prominence on the normalized curve");
  sel->add_option("--out", sel_out, "Output JSON (default stdout)");

  // spectrogram
  auto* spec_cmd = app.add_subcommand("spectrogram", "128-band log-mel spectrogram of a 16 kHz PCM16 mono WAV");
  std::string wav_path, mel_out;
  spec_cmd->add_option("--wav", wav_path, "Input WAV")->required();
  spec_cmd->add_option("--out", mel_out, "Output CSV, bands as rows (default stdout)");

  // patches
  auto* patches = app.add_subcommand("patches", "Token count of a patch grid along the time axis");
  Index t_a = audiofeat::kSpectrogramFrames, kernel = 16, patch_stride = 4;
  patches->add_option("--t-a", t_a, "Spectrogram frames");
  patches->add_option("--kernel", kernel, "Patch length");
  patches->add_option("--stride", patch_stride, "Patch stride");

  // windows
  auto* windows = app.add_subcommand("windows", "Overlapping window plan for long-clip generation");
  Index total_frames = 48, window = 12, window_stride = 6;
  std::string windows_out;
  windows->add_option("--frames", total_frames, "Total frames");
  windows->add_option("--window", window, "Window size");
  windows->add_option("--stride", window_stride, "Window stride");
  windows->add_option("--out", windows_out, "Output JSON (default stdout)");

  // eval-ap
  auto* eval_ap = app.add_subcommand("eval-ap", "Average precision of predicted keypoints");
  std::string instances_path;
  double ap_t = 3.0;
  bool strict = false;
  eval_ap->add_option("--instances", instances_path, "Lines of 'gt:i;j;.. pred:k;l;..'")->required();
  eval_ap->add_option("--t", ap_t, "Distance threshold in frames");
  eval_ap->add_flag("--strict", strict, "Require distance < t instead of <= t");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "SVG plot of a smoothed, normalized curve with extrema");
  std::string plot_scores, plot_schedule, plot_out;
  int plot_w = 800, plot_h = 300;
  plot_cmd->add_option("--scores", plot_scores, "Input scores CSV")->required();
  plot_cmd->add_option("--schedule", plot_schedule, "Schedule JSON whose keyframes are drawn");
  plot_cmd->add_option("--width", plot_w, "SVG width");
  plot_cmd->add_option("--height", plot_h, "SVG height");
  plot_cmd->add_option("--out", plot_out, "Output SVG (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*score) {
      const auto seq = ingest::load_frame_sequence(frames_dir, fps);
      const auto curve = flow::motion_curve(seq, flow_params, score_normalize, thread_cap());
      emit(scores_out, ingest::scores_to_csv(curve));
    } else if (*sel) {
      sel_params.mode = sel_random ? select::PeakChoice::SeededRandom : select::PeakChoice::ByProminence;
      const auto raw = ingest::read_scores_csv(sel_scores);
      const auto curve = motion::prepare(raw, smooth_window);
      const auto extrema = motion::detect_extrema(curve, min_distance, min_prominence);
      const auto schedule = select::select_keyframes(curve, extrema, sel_params);
      ingest::validate_schedule(schedule);
      emit(sel_out, ingest::schedule_to_json(schedule));
    } else if (*spec_cmd) {
      const auto clip = ingest::load_wav(wav_path, true);
      emit(mel_out, audiofeat::spectrogram_to_csv(audiofeat::mel_spectrogram(clip)));
    } else if (*patches) {
      std::cout << audiofeat::patch_token_count(t_a, kernel, patch_stride) << "\n";
    } else if (*windows) {
      emit(windows_out, schedule::window_plan_to_json(schedule::freenoise_windows(total_frames, window, window_stride)));
    } else if (*eval_ap) {
      const auto instances = eval::parse_instances(ingest::read_file(instances_path));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.10g\n", eval::average_precision(instances, ap_t, strict));
      std::cout << buf;
    } else if (*plot_cmd) {
      plot::PlotSpec spec;
      spec.width = plot_w;
      spec.height = plot_h;
      spec.curve = motion::prepare(ingest::read_scores_csv(plot_scores));
      spec.extrema = motion::detect_extrema(spec.curve);
      if (!plot_schedule.empty()) spec.schedule = ingest::read_schedule_json(plot_schedule);
      emit(plot_out, plot::render_svg(spec));
    }
  } catch (const Error& e) {
    std::cerr << "keysched: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "keysched: " << e.what() << "\n";
    return kOther;
  }
  return kOk;
}
