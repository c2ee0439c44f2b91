// Copyright 2026 The EFR Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EFR_REGRET_MATCHING_HPP
#define EFR_REGRET_MATCHING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "efr/deviations.hpp"

namespace efr {

enum class RmVariant { exact, plus, optimistic, pp };

inline RmVariant parse_rm_variant(const std::string& token) {
  if (token == "rm") return RmVariant::exact;
  if (token == "rm_plus") return RmVariant::plus;
  if (token == "rm_optimistic") return RmVariant::optimistic;
  if (token == "rm_pp") return RmVariant::pp;
  throw std::invalid_argument("unknown regret matching variant: " + token);
}

/// Cumulative state of one time-selection regret matcher: one entry per
/// (transformation, time-selection key) pair. Exact variants store signed
/// cumulative regrets; the plus variant stores rectified pseudo-regrets.
struct LocalLearnerState {
  RmVariant variant = RmVariant::exact;
  // x[phi][k]: cumulative (pseudo-)regret for transformation phi under the
  // k-th of its keys.
  std::vector<std::vector<double>> x;
  // Optional predictions added inside the ReLU (optimistic variant).
  std::vector<std::vector<double>> m;

  static LocalLearnerState make(RmVariant variant,
                                const std::vector<int>& keys_per_transform) {
    LocalLearnerState s;
    s.variant = variant;
    s.x.reserve(keys_per_transform.size());
    for (int k : keys_per_transform) s.x.emplace_back(k, 0.0);
    if (variant == RmVariant::optimistic) s.m = s.x;
    return s;
  }
};

struct LinkOutputs {
  std::vector<double> y;
  double z = 0.0;
};

/// y_phi = sum_w w^t (x_{phi,w} [+ m_{phi,w}])^+ and z = sum_phi y_phi.
inline LinkOutputs link_outputs(
    const LocalLearnerState& state,
    const std::vector<std::vector<double>>& weights) {
  LinkOutputs out;
  out.y.assign(state.x.size(), 0.0);
  for (size_t f = 0; f < state.x.size(); ++f) {
    double y = 0.0;
    for (size_t k = 0; k < state.x[f].size(); ++k) {
      double v = state.x[f][k];
      if (state.variant == RmVariant::optimistic) v += state.m[f][k];
      if (v > 0.0) y += weights[f][k] * v;
    }
    out.y[f] = y;
    out.z += y;
  }
  return out;
}

/// Accumulates one round: x += w * rho for the exact/optimistic variants,
/// q = (q + w * rho)^+ for the plus variant.
inline void ts_update(LocalLearnerState& state,
                      const std::vector<double>& instant_regret,
                      const std::vector<std::vector<double>>& weights) {
  for (size_t f = 0; f < state.x.size(); ++f) {
    for (size_t k = 0; k < state.x[f].size(); ++k) {
      double v = state.x[f][k] + weights[f][k] * instant_regret[f];
      if (state.variant == RmVariant::plus && v < 0.0) v = 0.0;
      state.x[f][k] = v;
    }
  }
}

/// 2 U sqrt(M* omega(Phi) T): the per-(phi, w) cumulative regret bound of
/// exact time-selection regret matching.
inline double rm_regret_bound(double utility_bound, int max_keys, int omega,
                              double rounds) {
  return 2.0 * utility_bound * std::sqrt(static_cast<double>(max_keys) *
                                         static_cast<double>(omega) * rounds);
}

namespace detail {

inline double fixed_point_residual(
    const std::vector<ActionTransformation>& phis, const std::vector<double>& y,
    double z, const std::vector<double>& sigma) {
  int n = static_cast<int>(sigma.size());
  std::vector<double> mapped(n, 0.0);
  for (size_t f = 0; f < phis.size(); ++f) {
    if (y[f] == 0.0) continue;
    for (int a = 0; a < n; ++a) {
      mapped[phis[f].apply(a)] += y[f] * sigma[a];
    }
  }
  double resid = 0.0;
  for (int a = 0; a < n; ++a) {
    resid = std::max(resid, std::abs(mapped[a] / z - sigma[a]));
  }
  return resid;
}

inline bool clamp_normalize(std::vector<double>& sigma) {
  double sum = 0.0;
  for (double& v : sigma) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum <= 1e-300) return false;
  for (double& v : sigma) v /= sum;
  return true;
}

}  // namespace detail

/// The strategy sigma with L(sigma) = sigma for the regret matching
/// operator L(sigma) = (1/z) sum_phi y_phi phi(sigma); uniform when z = 0.
/// With externals only L is constant, so sigma follows directly. With
/// internal transformations the column-stochastic transition matrix is
/// solved by SVD, falling back to damped power iteration. Residual is
/// held to 1e-10 in the infinity norm.
inline std::vector<double> fixed_point(
    const std::vector<ActionTransformation>& phis, const std::vector<double>& y,
    double z, int num_actions) {
  std::vector<double> sigma(num_actions, 1.0 / num_actions);
  if (z <= 0.0) return sigma;

  bool internal = false;
  for (size_t f = 0; f < phis.size(); ++f) {
    if (y[f] != 0.0 && phis[f].kind == TransformKind::internal) {
      internal = true;
      break;
    }
  }
  if (!internal) {
    // L is the constant map sigma_a = sum of y over externals targeting a.
    std::fill(sigma.begin(), sigma.end(), 0.0);
    for (size_t f = 0; f < phis.size(); ++f) {
      if (y[f] != 0.0) sigma[phis[f].target] += y[f] / z;
    }
    return sigma;
  }

  // A[a', a] = (1/z) sum_phi y_phi [phi(a) = a']; column-stochastic.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_actions, num_actions);
  for (size_t f = 0; f < phis.size(); ++f) {
    if (y[f] == 0.0) continue;
    for (int a = 0; a < num_actions; ++a) {
      A(phis[f].apply(a), a) += y[f] / z;
    }
  }

  constexpr double kTol = 1e-10;
  Eigen::MatrixXd M = A - Eigen::MatrixXd::Identity(num_actions, num_actions);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(num_actions - 1);
  if (v.sum() < 0.0) v = -v;
  std::vector<double> cand(v.data(), v.data() + num_actions);
  if (detail::clamp_normalize(cand) &&
      detail::fixed_point_residual(phis, y, z, cand) <= kTol) {
    return cand;
  }

  // Damped power iteration: sigma <- (sigma + A sigma) / 2.
  Eigen::VectorXd s = Eigen::VectorXd::Constant(num_actions, 1.0 / num_actions);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd next = 0.5 * (s + A * s);
    next /= next.sum();
    double delta = (next - s).lpNorm<Eigen::Infinity>();
    s = next;
    if (delta < 1e-15) break;
  }
  std::vector<double> pow_sigma(s.data(), s.data() + num_actions);
  double resid = detail::fixed_point_residual(phis, y, z, pow_sigma);
  if (detail::clamp_normalize(pow_sigma) && resid <= kTol) {
    return pow_sigma;
  }
  std::ostringstream os;
  os << "fixed point solver failed to converge; residual " << resid;
  throw std::runtime_error(os.str());
}

// ---------------------------------------------------------------------------
// Matrix-game learners and the positive-regret adversary.
// ---------------------------------------------------------------------------

/// Minimal normal-form learner over a fixed action set, used by the
/// adversary below. Variants: regret matching (exact cumulative regrets),
/// regret matching+ (rectified pseudo-regrets), and regret matching++
/// (accumulated positive instantaneous regrets).
class MatrixLearner {
 public:
  MatrixLearner(RmVariant variant, int num_actions)
      : variant_(variant), x_(num_actions, 0.0),
        cum_regret_(num_actions, 0.0), cum_positive_(num_actions, 0.0) {}

  std::vector<double> policy() const {
    std::vector<double> p(x_.size(), 1.0 / x_.size());
    double z = 0.0;
    for (double v : x_) z += v > 0.0 ? v : 0.0;
    if (z > 0.0) {
      for (size_t a = 0; a < x_.size(); ++a) {
        p[a] = x_[a] > 0.0 ? x_[a] / z : 0.0;
      }
    }
    return p;
  }

  void observe(const std::vector<double>& reward) {
    std::vector<double> p = policy();
    double ev = 0.0;
    for (size_t a = 0; a < x_.size(); ++a) ev += p[a] * reward[a];
    for (size_t a = 0; a < x_.size(); ++a) {
      double rho = reward[a] - ev;
      cum_regret_[a] += rho;
      if (rho > 0.0) cum_positive_[a] += rho;
      switch (variant_) {
        case RmVariant::exact:
        case RmVariant::optimistic:
          x_[a] += rho;
          break;
        case RmVariant::plus:
          x_[a] = std::max(0.0, x_[a] + rho);
          break;
        case RmVariant::pp:
          if (rho > 0.0) x_[a] += rho;
          break;
      }
    }
  }

  /// Q^t_a = sum over rounds of (rho^t_a)^+.
  const std::vector<double>& cumulative_positive() const {
    return cum_positive_;
  }
  /// Plain cumulative regret per action.
  const std::vector<double>& cumulative_regret() const { return cum_regret_; }

 private:
  RmVariant variant_;
  std::vector<double> x_;
  std::vector<double> cum_regret_;
  std::vector<double> cum_positive_;
};

struct AdversaryResult {
  // max_a Q^T_a after each round (1-indexed round t at index t-1).
  std::vector<double> max_cum_positive;
  // max_a cumulative (signed) regret after each round.
  std::vector<double> max_cum_regret;
};

/// The two-action reward adversary: whichever action the learner weights
/// at least one half receives reward zero, the other receives one. Any
/// learner suffers at least T/4 cumulative positive regret.
template <typename Learner>
AdversaryResult run_positive_regret_adversary(Learner& learner, int rounds) {
  AdversaryResult out;
  out.max_cum_positive.reserve(rounds);
  out.max_cum_regret.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    std::vector<double> p = learner.policy();
    std::vector<double> reward =
        p[0] >= 0.5 ? std::vector<double>{0.0, 1.0}
                    : std::vector<double>{1.0, 0.0};
    learner.observe(reward);
    const auto& q = learner.cumulative_positive();
    const auto& r = learner.cumulative_regret();
    out.max_cum_positive.push_back(std::max(q[0], q[1]));
    out.max_cum_regret.push_back(std::max(r[0], r[1]));
  }
  return out;
}

inline AdversaryResult rmpp_adversary(RmVariant variant, int rounds) {
  MatrixLearner learner(variant, 2);
  return run_positive_regret_adversary(learner, rounds);
}

}  // namespace efr

#endif  // EFR_REGRET_MATCHING_HPP
