#pragma once

// Reference kernels for the generator's conditioning arithmetic. All weights
// are explicit inputs; nothing here holds parameters.

#include "keysched/error.hpp"
#include "keysched/types.hpp"

#include <cmath>

namespace keysched::refops {

struct GuidanceScales {
  double s_img = 2.0;
  double s_txt = 1.0;
  double s_aud = 7.5;
};

struct FusionWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

template <typename Scalar>
struct KeyValue {
  Matrix<Scalar> keys;
  Matrix<Scalar> values;
};

/// Row-wise softmax(q k^T / sqrt(d)) with max subtraction.
template <typename DerivedQ, typename DerivedK>
Matrix<typename DerivedQ::Scalar> attention_weights(const Eigen::MatrixBase<DerivedQ>& q,
                                                    const Eigen::MatrixBase<DerivedK>& k) {
  using Scalar = typename DerivedQ::Scalar;
  if (q.cols() != k.cols()) throw Error(ErrorCode::ShapeMismatch, "query and key widths differ");
  if (k.rows() < 1) throw Error(ErrorCode::ShapeMismatch, "attention needs at least one key");
  Matrix<Scalar> logits = (q * k.transpose()) / std::sqrt(static_cast<Scalar>(q.cols()));
  logits.colwise() -= logits.rowwise().maxCoeff();
  Matrix<Scalar> w = logits.array().exp().matrix();
  w.array().colwise() /= w.rowwise().sum().array();
  return w;
}

template <typename DerivedQ, typename DerivedK, typename DerivedV>
Matrix<typename DerivedQ::Scalar> attention(const Eigen::MatrixBase<DerivedQ>& q, const Eigen::MatrixBase<DerivedK>& k,
                                            const Eigen::MatrixBase<DerivedV>& v) {
  if (k.rows() != v.rows()) throw Error(ErrorCode::ShapeMismatch, "key and value counts differ");
  return attention_weights(q, k) * v;
}

/// text + lambda1 * audio + lambda2 * image attention on Q = f_in * w_q.
template <typename Scalar>
Matrix<Scalar> fuse_features(const Matrix<Scalar>& f_in, const Matrix<Scalar>& w_q, const KeyValue<Scalar>& text,
                             const KeyValue<Scalar>& audio, const KeyValue<Scalar>& image, const FusionWeights& w) {
  if (f_in.cols() != w_q.rows()) throw Error(ErrorCode::ShapeMismatch, "f_in and w_q do not compose");
  const Matrix<Scalar> q = f_in * w_q;
  Matrix<Scalar> out = attention(q, text.keys, text.values);
  const Matrix<Scalar> a = attention(q, audio.keys, audio.values);
  const Matrix<Scalar> i = attention(q, image.keys, image.values);
  if (a.cols() != out.cols() || i.cols() != out.cols())
    throw Error(ErrorCode::ShapeMismatch, "value widths differ across modalities");
  out += static_cast<Scalar>(w.lambda1) * a + static_cast<Scalar>(w.lambda2) * i;
  return out;
}

/// e_none + s_img (e_img - e_none) + s_txt (e_img_txt - e_img) + s_aud (e_full - e_img_txt)
template <typename Derived>
Matrix<typename Derived::Scalar> cfg_combine(const Eigen::MatrixBase<Derived>& e_none,
                                             const Eigen::MatrixBase<Derived>& e_img,
                                             const Eigen::MatrixBase<Derived>& e_img_txt,
                                             const Eigen::MatrixBase<Derived>& e_full, const GuidanceScales& s) {
  using Scalar = typename Derived::Scalar;
  auto same = [&](const auto& m) { return m.rows() == e_none.rows() && m.cols() == e_none.cols(); };
  if (!same(e_img) || !same(e_img_txt) || !same(e_full))
    throw Error(ErrorCode::ShapeMismatch, "guidance inputs differ in shape");
  return e_none + static_cast<Scalar>(s.s_img) * (e_img - e_none) + static_cast<Scalar>(s.s_txt) * (e_img_txt - e_img) +
         static_cast<Scalar>(s.s_aud) * (e_full - e_img_txt);
}

}  // namespace keysched::refops
