#pragma once

// Central finite-difference check of the tagger gradient. Kept apart from the
// library: it only uses the forward path (encode -> decode -> loss).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lmgeo/tagger.hpp"

namespace lmgeo::testing {

struct TensorCheck {
  std::string name;
  double relative_error = 0.0;
};

inline double forward_loss(const tagger::TaggerParams& p,
                           const TokenizedPage& page,
                           const std::vector<Tag>& gold,
                           const tagger::AdaptiveWeights& w) {
  return tagger::adaptive_loss(
      tagger::decode_scores(p, tagger::bilstm_encode(p, page)), gold, w);
}

// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||) per
// tensor; 0 when both norms vanish.
inline std::vector<TensorCheck> check_gradients(tagger::TaggerParams params,
                                                const TokenizedPage& page,
                                                const std::vector<Tag>& gold,
                                                const tagger::AdaptiveWeights& w,
                                                double eps = 1e-4) {
  using tagger::Matrix;
  auto analytic = tagger::Weights::zeros_like(params.weights());
  tagger::loss_and_gradient(params, page, gold, w, analytic);

  std::vector<Matrix> numeric_tensors;
  params.weights().for_each([&](const std::string&, auto& t) {
    Matrix num(t.rows(), t.cols());
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        const double orig = t(r, c);
        t(r, c) = orig + eps;
        const double up = forward_loss(params, page, gold, w);
        t(r, c) = orig - eps;
        const double down = forward_loss(params, page, gold, w);
        t(r, c) = orig;
        num(r, c) = (up - down) / (2.0 * eps);
      }
    }
    numeric_tensors.push_back(std::move(num));
  });

  std::vector<TensorCheck> out;
  std::size_t k = 0;
  analytic.for_each([&](const std::string& name, const auto& a) {
    const Matrix am = a;
    const Matrix& nm = numeric_tensors[k++];
    const double denom = std::max(am.norm(), nm.norm());
    out.push_back({name, denom < 1e-12 ? 0.0 : (am - nm).norm() / denom});
  });
  return out;
}

}  // namespace lmgeo::testing
