#include "keysched/error.hpp"
#include "keysched/ingest.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace keysched;
using keysched::testing::ScratchDir;
using keysched::testing::error_code;

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

std::string pgm_bytes(int width, int height, const std::string& raster, const std::string& magic = "P5",
                      int maxval = 255) {
  return magic + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n" + std::to_string(maxval) + "\n" +
         raster;
}

}  // namespace

TEST_CASE("pgm pixels are exactly byte / 255") {
  std::string raster;
  for (int v = 0; v < 256; ++v) raster.push_back(static_cast<char>(v));
  const Frame f = ingest::parse_pgm("P5\n# comment line\n16 16\n255\n" + raster);
  REQUIRE(f.height() == 16);
  REQUIRE(f.width() == 16);
  for (int v = 0; v < 256; ++v) CHECK(f.pixels(v / 16, v % 16) == static_cast<double>(v) / 255.0);
}

TEST_CASE("malformed pgm headers") {
  const std::string raster(4, '\x10');
  CHECK(error_code([&] { ingest::parse_pgm(pgm_bytes(2, 2, raster, "P2")); }) == ErrorCode::MalformedPgm);
  CHECK(error_code([&] { ingest::parse_pgm(pgm_bytes(2, 2, raster, "P5", 65535)); }) == ErrorCode::MalformedPgm);
  CHECK(error_code([&] { ingest::parse_pgm(pgm_bytes(2, 2, raster.substr(0, 3))); }) == ErrorCode::MalformedPgm);
}

TEST_CASE("load_frame_sequence") {
  ScratchDir dir("frames");

  SUBCASE("48 frames of 320x512 in filename order") {
    for (int t = 0; t < 48; ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "f%03d.pgm", t);
      write_bytes(dir / name, pgm_bytes(512, 320, std::string(320 * 512, static_cast<char>(t))));
    }
    const auto seq = ingest::load_frame_sequence(dir.path(), 24.0);
    CHECK(seq.size() == 48);
    CHECK(seq.height() == 320);
    CHECK(seq.width() == 512);
    for (int t = 0; t < 48; ++t) CHECK(seq.frames[static_cast<size_t>(t)].pixels(0, 0) == t / 255.0);
  }

  SUBCASE("single frame") {
    write_bytes(dir / "only.pgm", pgm_bytes(3, 2, std::string(6, '\x7f')));
    const auto seq = ingest::load_frame_sequence(dir.path(), 24.0);
    CHECK(seq.size() == 1);
  }

  SUBCASE("mixed sizes") {
    write_bytes(dir / "a.pgm", pgm_bytes(512, 320, std::string(320 * 512, '\0')));
    write_bytes(dir / "b.pgm", pgm_bytes(320, 240, std::string(320 * 240, '\0')));
    CHECK(error_code([&] { ingest::load_frame_sequence(dir.path(), 24.0); }) == ErrorCode::DimensionMismatch);
  }

  SUBCASE("no pgm files") {
    write_bytes(dir / "notes.txt", "hello");
    CHECK(error_code([&] { ingest::load_frame_sequence(dir.path(), 24.0); }) == ErrorCode::EmptyDirectory);
  }
}

TEST_CASE("wav loading") {
  ScratchDir dir("wav");

  SUBCASE("two seconds at 16 kHz") {
    AudioClip clip{Eigen::VectorXd::Zero(32000), 16000};
    for (Index i = 0; i < 32000; ++i) clip.samples(i) = 0.25 * std::sin(0.01 * static_cast<double>(i));
    ingest::write_wav(clip, dir / "a.wav");
    const auto back = ingest::load_wav(dir / "a.wav");
    CHECK(back.samples.size() == 32000);
    CHECK(back.sample_rate == 16000);
    CHECK((back.samples - clip.samples).cwiseAbs().maxCoeff() <= 1.0 / 32768.0);
  }

  SUBCASE("silence decodes to zeros") {
    ingest::write_wav({Eigen::VectorXd::Zero(500), 16000}, dir / "z.wav");
    CHECK(ingest::load_wav(dir / "z.wav").samples.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("sample scaling is s / 32768") {
    ingest::write_wav({Eigen::VectorXd::Constant(4, -1.0), 16000}, dir / "m.wav");
    CHECK(ingest::load_wav(dir / "m.wav").samples(0) == -1.0);
  }

  SUBCASE("44.1 kHz rejected when strict") {
    ingest::write_wav({Eigen::VectorXd::Zero(100), 44100}, dir / "cd.wav");
    CHECK(error_code([&] { ingest::load_wav(dir / "cd.wav", true); }) == ErrorCode::UnsupportedRate);
    CHECK(ingest::load_wav(dir / "cd.wav", false).sample_rate == 44100);
  }

  SUBCASE("stereo and 8-bit rejected") {
    ingest::write_wav({Eigen::VectorXd::Zero(100), 16000}, dir / "s.wav");
    std::string bytes = ingest::read_file(dir / "s.wav");
    std::string stereo = bytes;
    stereo[22] = 2;
    CHECK(error_code([&] { ingest::parse_wav(stereo); }) == ErrorCode::UnsupportedChannels);
    std::string eight = bytes;
    eight[34] = 8;
    CHECK(error_code([&] { ingest::parse_wav(eight); }) == ErrorCode::UnsupportedEncoding);
  }
}

TEST_CASE("scores csv") {
  ScratchDir dir("csv");

  SUBCASE("round trip") {
    MotionCurve c{Eigen::Vector3d(0.0, 0.5, 1.0), CurveStage::Raw};
    ingest::write_scores_csv(c, dir / "s.csv");
    CHECK(ingest::read_scores_csv(dir / "s.csv").values == c.values);
  }

  SUBCASE("header required") {
    CHECK(error_code([] { ingest::scores_from_csv("0,1.0\n1,2.0\n"); }) == ErrorCode::ParseError);
  }

  SUBCASE("scientific notation") {
    CHECK(ingest::scores_from_csv("index,score\n0,1e-3\n").values(0) == 0.001);
  }

  SUBCASE("malformed rows") {
    CHECK(error_code([] { ingest::scores_from_csv("index,score\n0,abc\n"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { ingest::scores_from_csv("index,score\n1,0.5\n"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { ingest::scores_from_csv("index,score\n0,nan\n"); }) == ErrorCode::ParseError);
  }

  SUBCASE("round trip property to 9 decimals") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int trial = 0; trial < 50; ++trial) {
      MotionCurve c{Eigen::VectorXd(1 + static_cast<Index>(rng() % 100)), CurveStage::Raw};
      for (Index i = 0; i < c.size(); ++i) c.values(i) = u(rng);
      const auto back = ingest::scores_from_csv(ingest::scores_to_csv(c));
      REQUIRE(back.size() == c.size());
      CHECK((back.values - c.values).cwiseAbs().maxCoeff() <= 5e-10);
      // a second pass is byte-stable
      CHECK(ingest::scores_to_csv(back) == ingest::scores_to_csv(c));
    }
  }
}

TEST_CASE("schedule json") {
  KeyframeSchedule s;
  s.total_frames = 48;
  for (Index k = 0; k < 48; k += 4) s.keyframes.push_back(k);
  s.fill.assign(s.keyframes.begin() + 1, s.keyframes.end());

  SUBCASE("round trip") {
    ScratchDir dir("json");
    ingest::write_schedule_json(s, dir / "s.json");
    CHECK(ingest::read_schedule_json(dir / "s.json") == s);
  }

  SUBCASE("index equal to total_frames") {
    const std::string text =
        R"({"total_frames":48,"keyframes":[0,48],"peaks":[],"valleys":[],"fill":[48]})";
    CHECK(error_code([&] { ingest::schedule_from_json(text); }) == ErrorCode::InvariantViolation);
  }

  SUBCASE("duplicates") {
    const std::string text =
        R"({"total_frames":48,"keyframes":[0,5,5],"peaks":[5],"valleys":[],"fill":[5]})";
    CHECK(error_code([&] { ingest::schedule_from_json(text); }) == ErrorCode::InvariantViolation);
  }

  SUBCASE("garbage") {
    CHECK(error_code([] { ingest::schedule_from_json("{not json"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { ingest::schedule_from_json(R"({"total_frames":4})"); }) == ErrorCode::ParseError);
  }

  SUBCASE("round trip property") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      KeyframeSchedule r;
      r.total_frames = 2 + static_cast<Index>(rng() % 100);
      r.keyframes.push_back(0);
      for (Index i = 1; i < r.total_frames; ++i) {
        const auto pick = rng() % 5;
        if (pick == 0) r.peaks.push_back(i);
        if (pick == 1) r.valleys.push_back(i);
        if (pick == 2) r.fill.push_back(i);
        if (pick <= 2) r.keyframes.push_back(i);
      }
      CHECK(ingest::schedule_from_json(ingest::schedule_to_json(r)) == r);
    }
  }
}

TEST_CASE("atomic write leaves nothing behind on failure") {
  ScratchDir dir("atomic");
  const auto target = dir / "missing-subdir" / "out.csv";
  CHECK(error_code([&] { ingest::write_file_atomic(target, "x"); }) == ErrorCode::IoError);
  CHECK_FALSE(std::filesystem::exists(target));
}
