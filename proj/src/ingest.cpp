#include "keysched/ingest.hpp"

#include "keysched/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace keysched::ingest {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string_view next_pgm_token(std::string_view bytes, size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

long parse_header_int(std::string_view token) {
  if (token.empty() || token.size() > 9) throw Error(ErrorCode::MalformedPgm, "bad header field");
  long value = 0;
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorCode::MalformedPgm, "non-numeric header field '" + std::string(token) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

uint16_t le16(std::string_view b, size_t at) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[at]) | (static_cast<uint8_t>(b[at + 1]) << 8));
}

uint32_t le32(std::string_view b, size_t at) {
  return static_cast<uint32_t>(le16(b, at)) | (static_cast<uint32_t>(le16(b, at + 2)) << 16);
}

void put_le16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_le32(std::string& out, uint32_t v) {
  put_le16(out, static_cast<uint16_t>(v & 0xffff));
  put_le16(out, static_cast<uint16_t>(v >> 16));
}

Indices json_indices(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, std::string("field '") + key + "' is not an array");
  Indices out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, std::string("non-integer in '") + key + "'");
    out.push_back(v.get<Index>());
  }
  return out;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

Frame parse_pgm(std::string_view bytes) {
  size_t pos = 0;
  if (next_pgm_token(bytes, pos) != "P5") throw Error(ErrorCode::MalformedPgm, "bad magic (expected P5)");
  const long width = parse_header_int(next_pgm_token(bytes, pos));
  const long height = parse_header_int(next_pgm_token(bytes, pos));
  const long maxval = parse_header_int(next_pgm_token(bytes, pos));
  if (maxval != 255) throw Error(ErrorCode::MalformedPgm, "maxval must be 255, got " + std::to_string(maxval));
  if (width < 1 || height < 1) throw Error(ErrorCode::MalformedPgm, "empty image");
  // exactly one whitespace byte separates the header from the raster
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw Error(ErrorCode::MalformedPgm, "truncated header");
  ++pos;
  const size_t count = static_cast<size_t>(width) * static_cast<size_t>(height);
  if (bytes.size() - pos < count) throw Error(ErrorCode::MalformedPgm, "truncated raster");

  Frame frame{Image(height, width)};
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c)
      frame.pixels(r, c) = static_cast<uint8_t>(bytes[pos + static_cast<size_t>(r * width + c)]) / 255.0;
  return frame;
}

Frame read_pgm(const fs::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedPgm) throw Error(e.code(), path.filename().string() + ": " + e.what());
    throw;
  }
}

void write_pgm(const Frame& frame, const fs::path& path) {
  std::string out = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(frame.pixels.size()));
  for (Index r = 0; r < frame.height(); ++r)
    for (Index c = 0; c < frame.width(); ++c) {
      const double v = std::clamp(frame.pixels(r, c), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<uint8_t>(std::lround(v * 255.0))));
    }
  write_file_atomic(path, out);
}

FrameSequence load_frame_sequence(const fs::path& dir, double fps) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::EmptyDirectory, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  if (files.empty()) throw Error(ErrorCode::EmptyDirectory, "no .pgm files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  FrameSequence seq;
  seq.fps = fps;
  seq.frames.reserve(files.size());
  for (const auto& file : files) {
    Frame frame = read_pgm(file);
    if (!seq.frames.empty() && (frame.height() != seq.height() || frame.width() != seq.width()))
      throw Error(ErrorCode::DimensionMismatch,
                  file.filename().string() + " is " + std::to_string(frame.height()) + "x" +
                      std::to_string(frame.width()) + ", expected " + std::to_string(seq.height()) + "x" +
                      std::to_string(seq.width()));
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

AudioClip parse_wav(std::string_view b, bool strict) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
    throw Error(ErrorCode::ParseError, "not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t channels = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const size_t size = le32(b, pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > b.size()) throw Error(ErrorCode::ParseError, "short fmt chunk");
      const uint16_t format = le16(b, body);
      channels = le16(b, body + 2);
      rate = le32(b, body + 4);
      const uint16_t bits = le16(b, body + 14);
      if (format != 1 || bits != 16)
        throw Error(ErrorCode::UnsupportedEncoding,
                    "format " + std::to_string(format) + " with " + std::to_string(bits) + " bits; need PCM16");
      if (channels != 1) throw Error(ErrorCode::UnsupportedChannels, std::to_string(channels) + " channels");
      if (strict && rate != 16000) throw Error(ErrorCode::UnsupportedRate, std::to_string(rate) + " Hz");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(ErrorCode::ParseError, "data chunk before fmt chunk");
      const size_t avail = std::min(size, b.size() - body);
      const size_t n = avail / 2;
      if (n == 0) throw Error(ErrorCode::ParseError, "no samples");
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.samples.resize(static_cast<Index>(n));
      for (size_t i = 0; i < n; ++i)
        clip.samples(static_cast<Index>(i)) = static_cast<int16_t>(le16(b, body + 2 * i)) / 32768.0;
      return clip;
    }
    pos = body + size + (size & 1);
  }
  throw Error(ErrorCode::ParseError, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioClip load_wav(const fs::path& path, bool strict) { return parse_wav(read_file(path), strict); }

void write_wav(const AudioClip& clip, const fs::path& path) {
  const auto n = static_cast<uint32_t>(clip.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  put_le32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_le32(out, 16);
  put_le16(out, 1);
  put_le16(out, 1);
  put_le32(out, static_cast<uint32_t>(clip.sample_rate));
  put_le32(out, static_cast<uint32_t>(clip.sample_rate) * 2);
  put_le16(out, 2);
  put_le16(out, 16);
  out += "data";
  put_le32(out, 2 * n);
  for (Index i = 0; i < clip.samples.size(); ++i) {
    const long s = std::lround(std::clamp(clip.samples(i), -1.0, 1.0) * 32768.0);
    put_le16(out, static_cast<uint16_t>(static_cast<int16_t>(std::clamp(s, -32768L, 32767L))));
  }
  write_file_atomic(path, out);
}

std::string scores_to_csv(const MotionCurve& curve) {
  std::string out = "index,score\n";
  char buf[64];
  for (Index i = 0; i < curve.size(); ++i) {
    if (!std::isfinite(curve.values(i))) throw Error(ErrorCode::InvariantViolation, "non-finite score");
    std::snprintf(buf, sizeof buf, "%ld,%.9f\n", static_cast<long>(i), curve.values(i));
    out += buf;
  }
  return out;
}

MotionCurve scores_from_csv(std::string_view text) {
  std::vector<double> values;
  size_t pos = 0;
  size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != "index,score") throw Error(ErrorCode::ParseError, "missing 'index,score' header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": no comma");
    const std::string idx = line.substr(0, comma);
    const std::string val = line.substr(comma + 1);
    char* stop = nullptr;
    const long index = std::strtol(idx.c_str(), &stop, 10);
    if (idx.empty() || *stop != '\0' || index != static_cast<long>(values.size()))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad index '" + idx + "'");
    const double score = std::strtod(val.c_str(), &stop);
    if (val.empty() || *stop != '\0' || !std::isfinite(score))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad score '" + val + "'");
    values.push_back(score);
  }
  if (!header_seen) throw Error(ErrorCode::ParseError, "empty file");
  if (values.empty()) throw Error(ErrorCode::ParseError, "no score rows");
  MotionCurve curve;
  curve.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  return curve;
}

void write_scores_csv(const MotionCurve& curve, const fs::path& path) {
  write_file_atomic(path, scores_to_csv(curve));
}

MotionCurve read_scores_csv(const fs::path& path) { return scores_from_csv(read_file(path)); }

void validate_schedule(const KeyframeSchedule& s) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvariantViolation, why); };
  if (s.total_frames < 1) fail("total_frames must be positive");
  if (s.keyframes.empty() || s.keyframes.front() != 0) fail("keyframes must start with frame 0");
  for (size_t i = 0; i < s.keyframes.size(); ++i) {
    if (s.keyframes[i] < 0 || s.keyframes[i] >= s.total_frames)
      fail("keyframe " + std::to_string(s.keyframes[i]) + " outside [0, " + std::to_string(s.total_frames) + ")");
    if (i > 0 && s.keyframes[i] <= s.keyframes[i - 1]) fail("keyframes not strictly increasing");
  }
  std::set<Index> provenance{0};
  size_t parts = 1;
  for (const Indices* part : {&s.peaks, &s.valleys, &s.fill}) {
    provenance.insert(part->begin(), part->end());
    parts += part->size();
  }
  if (provenance.size() != parts) fail("peaks/valleys/fill overlap");
  if (!std::equal(provenance.begin(), provenance.end(), s.keyframes.begin(), s.keyframes.end()))
    fail("keyframes differ from {0} + peaks + valleys + fill");
}

std::string schedule_to_json(const KeyframeSchedule& s) {
  nlohmann::ordered_json j;
  j["total_frames"] = s.total_frames;
  j["keyframes"] = s.keyframes;
  j["peaks"] = s.peaks;
  j["valleys"] = s.valleys;
  j["fill"] = s.fill;
  return j.dump(2) + "\n";
}

KeyframeSchedule schedule_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "schedule must be a JSON object");
  if (!j.contains("total_frames") || !j.at("total_frames").is_number_integer())
    throw Error(ErrorCode::ParseError, "missing integer 'total_frames'");
  KeyframeSchedule s;
  s.total_frames = j.at("total_frames").get<Index>();
  s.keyframes = json_indices(j, "keyframes");
  s.peaks = json_indices(j, "peaks");
  s.valleys = json_indices(j, "valleys");
  s.fill = json_indices(j, "fill");
  validate_schedule(s);
  return s;
}

void write_schedule_json(const KeyframeSchedule& schedule, const fs::path& path) {
  validate_schedule(schedule);
  write_file_atomic(path, schedule_to_json(schedule));
}

KeyframeSchedule read_schedule_json(const fs::path& path) { return schedule_from_json(read_file(path)); }

}  // namespace keysched::ingest
