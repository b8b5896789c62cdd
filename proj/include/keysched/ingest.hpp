#pragma once

#include "keysched/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace keysched::ingest {

namespace fs = std::filesystem;

// Binary PGM (P5, maxval 255). Pixels are scaled by 1/255.
Frame read_pgm(const fs::path& path);
Frame parse_pgm(std::string_view bytes);
void write_pgm(const Frame& frame, const fs::path& path);

/// Loads every `*.pgm` in `dir`, ordered by filename.
FrameSequence load_frame_sequence(const fs::path& dir, double fps);

/// RIFF/WAVE PCM16 mono. With `strict`, anything but 16 kHz is rejected.
AudioClip load_wav(const fs::path& path, bool strict = true);
AudioClip parse_wav(std::string_view bytes, bool strict = true);
void write_wav(const AudioClip& clip, const fs::path& path);

// `index,score` CSV with a header row.
std::string scores_to_csv(const MotionCurve& curve);
MotionCurve scores_from_csv(std::string_view text);
void write_scores_csv(const MotionCurve& curve, const fs::path& path);
MotionCurve read_scores_csv(const fs::path& path);

std::string schedule_to_json(const KeyframeSchedule& schedule);
KeyframeSchedule schedule_from_json(std::string_view text);
void write_schedule_json(const KeyframeSchedule& schedule, const fs::path& path);
KeyframeSchedule read_schedule_json(const fs::path& path);

/// Throws InvariantViolation unless keyframes are strictly increasing, in
/// [0, total_frames), contain 0, and equal {0} plus the disjoint provenance sets.
void validate_schedule(const KeyframeSchedule& schedule);

std::string read_file(const fs::path& path);
/// Writes to a sibling temp file and renames it into place, so a failed
/// write never leaves a partial file at `path`.
void write_file_atomic(const fs::path& path, std::string_view contents);

}  // namespace keysched::ingest
