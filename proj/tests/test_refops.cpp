#include "keysched/refops.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace keysched;
using keysched::testing::error_code;
using Mat = Eigen::MatrixXd;

namespace {

Mat random_matrix(std::mt19937_64& rng, Index r, Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("attention examples") {
  std::mt19937_64 rng(1);

  SUBCASE("single key returns its value") {
    const Mat q = random_matrix(rng, 5, 4);
    const Mat k = random_matrix(rng, 1, 4);
    const Mat v = random_matrix(rng, 1, 3);
    const Mat out = refops::attention(q, k, v);
    for (Index r = 0; r < 5; ++r) CHECK((out.row(r) - v.row(0)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("saturated softmax selects rows") {
    const Mat q = Mat::Identity(3, 3);
    const Mat k = 100.0 * q;
    const Mat v = Mat::Identity(3, 3);
    CHECK((refops::attention(q, k, v) - v).cwiseAbs().maxCoeff() < 1e-20);
  }

  SUBCASE("zero query averages the values") {
    const Mat v = random_matrix(rng, 6, 2);
    const Mat out = refops::attention(Mat::Zero(2, 4), random_matrix(rng, 6, 4), v);
    for (Index r = 0; r < 2; ++r) CHECK((out.row(r) - v.colwise().mean()).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("shape errors") {
    CHECK(error_code([] { refops::attention(Mat::Zero(2, 3), Mat::Zero(4, 2), Mat::Zero(4, 1)); }) ==
          ErrorCode::ShapeMismatch);
    CHECK(error_code([] { refops::attention(Mat::Zero(2, 3), Mat::Zero(4, 3), Mat::Zero(5, 1)); }) ==
          ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("attention properties") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 6), m = 1 + static_cast<Index>(rng() % 8);
    const Index d = 1 + static_cast<Index>(rng() % 8), e = 1 + static_cast<Index>(rng() % 5);
    const Mat q = random_matrix(rng, n, d, 3.0), k = random_matrix(rng, m, d, 3.0), v = random_matrix(rng, m, e);

    const Mat w = refops::attention_weights(q, k);
    CHECK(w.minCoeff() >= 0.0);
    for (Index r = 0; r < n; ++r) CHECK(std::abs(w.row(r).sum() - 1.0) <= 1e-12);

    const Mat out = refops::attention(q, k, v);
    const Eigen::RowVectorXd lo = v.colwise().minCoeff(), hi = v.colwise().maxCoeff();
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < e; ++c) {
        CHECK(out(r, c) >= lo(c) - 1e-12);
        CHECK(out(r, c) <= hi(c) + 1e-12);
      }

    // an extra constant column in q and k adds the same amount to every
    // logit of a row; only the 1/sqrt(d) factor changes
    Mat q2(n, d + 1), k2(m, d + 1);
    q2 << q, Mat::Constant(n, 1, 1.0);
    k2 << k, Mat::Constant(m, 1, 2.5);
    const Mat shifted = refops::attention(q2, k2, v);
    const Mat rescaled = refops::attention(q * std::sqrt(static_cast<double>(d) / (d + 1.0)), k, v);
    CHECK((shifted - rescaled).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("fuse_features") {
  SUBCASE("hand case") {
    const Mat f_in = Mat::Identity(2, 2);
    const Mat w_q = Mat::Identity(2, 2);
    const refops::KeyValue<double> text{(Mat(1, 2) << 1, 0).finished(), (Mat(1, 2) << 5, 0).finished()};
    const refops::KeyValue<double> audio{(Mat(1, 2) << 0, 3).finished(), (Mat(1, 2) << 0, 3).finished()};
    const refops::KeyValue<double> image{(Mat(1, 2) << 1, 1).finished(), (Mat(1, 2) << 9, 9).finished()};
    const Mat out = refops::fuse_features(f_in, w_q, text, audio, image, {0.5, 0.0});
    CHECK(out == (Mat(2, 2) << 5, 1.5, 5, 1.5).finished());
  }

  std::mt19937_64 rng(3);
  const Mat f_in = random_matrix(rng, 4, 6), w_q = random_matrix(rng, 6, 5);
  const refops::KeyValue<double> text{random_matrix(rng, 3, 5), random_matrix(rng, 3, 2)};
  const refops::KeyValue<double> audio{random_matrix(rng, 7, 5), random_matrix(rng, 7, 2)};
  const refops::KeyValue<double> image{random_matrix(rng, 2, 5), random_matrix(rng, 2, 2)};
  const Mat q = f_in * w_q;
  const Mat sa_t = refops::attention(q, text.keys, text.values);
  const Mat sa_a = refops::attention(q, audio.keys, audio.values);
  const Mat sa_i = refops::attention(q, image.keys, image.values);

  SUBCASE("gates off gives text only") {
    CHECK(refops::fuse_features(f_in, w_q, text, audio, image, {0.0, 0.0}) == sa_t);
  }

  SUBCASE("identical modalities triple") {
    const Mat out = refops::fuse_features(f_in, w_q, text, text, text, {1.0, 1.0});
    CHECK((out - 3.0 * sa_t).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("linear in both gates") {
    for (double l1 : {-1.0, 0.25, 2.0})
      for (double l2 : {-0.5, 0.0, 3.0}) {
        const Mat out = refops::fuse_features(f_in, w_q, text, audio, image, {l1, l2});
        CHECK((out - (sa_t + l1 * sa_a + l2 * sa_i)).cwiseAbs().maxCoeff() <= 1e-14);
      }
  }

  SUBCASE("float instantiation") {
    const refops::KeyValue<float> t{text.keys.cast<float>(), text.values.cast<float>()};
    const Eigen::MatrixXf out =
        refops::fuse_features<float>(f_in.cast<float>(), w_q.cast<float>(), t, t, t, {1.0, 1.0});
    CHECK((out.cast<double>() - 3.0 * sa_t).cwiseAbs().maxCoeff() <= 1e-5);
  }

  SUBCASE("shape errors") {
    CHECK(error_code([&] { refops::fuse_features<double>(f_in, Mat::Zero(5, 5), text, audio, image, {}); }) ==
          ErrorCode::ShapeMismatch);
    const refops::KeyValue<double> wide{random_matrix(rng, 2, 5), random_matrix(rng, 2, 3)};
    CHECK(error_code([&] { refops::fuse_features(f_in, w_q, text, wide, image, {}); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("cfg_combine") {
  using S = refops::GuidanceScales;
  const Mat e0 = Mat::Constant(1, 1, 0.0), e1 = Mat::Constant(1, 1, 1.0);
  const Mat e2 = Mat::Constant(1, 1, 3.0), e3 = Mat::Constant(1, 1, 4.0);

  CHECK(refops::cfg_combine(e0, e1, e2, e3, S{})(0, 0) == 11.5);
  CHECK(refops::cfg_combine(e0, e1, e2, e3, S{2.0, 1.0, 7.5})(0, 0) == 11.5);
  CHECK(S{}.s_aud == 7.5);
  CHECK(S{}.s_img == 2.0);
  CHECK(error_code([&] { refops::cfg_combine(e0, e1, e2, Mat(Mat::Zero(2, 1)), S{}); }) == ErrorCode::ShapeMismatch);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat a = random_matrix(rng, 3, 4), b = random_matrix(rng, 3, 4);
    const Mat c = random_matrix(rng, 3, 4), d = random_matrix(rng, 3, 4);
    CHECK((refops::cfg_combine(a, b, c, d, S{1, 1, 1}) - d).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((refops::cfg_combine(a, b, c, d, S{0, 0, 0}) - a).cwiseAbs().maxCoeff() <= 1e-12);
    // affine in s_img
    const Mat base = refops::cfg_combine(a, b, c, d, S{1.0, 0.5, 2.0});
    const Mat step = refops::cfg_combine(a, b, c, d, S{2.0, 0.5, 2.0});
    CHECK(((step - base) - (b - a)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
