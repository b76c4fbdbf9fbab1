// Copyright 2026 The mfcpg Authors
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

#include "mfcpg/experiments.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mfcpg/cost.h"
#include "mfcpg/policy_gradient.h"
#include "mfcpg/random.h"

namespace mfcpg {

void ValidateTrainConfig(const TrainConfig& cfg) {
  ValidateCsParams(cfg.cs);
  ValidateLrSchedule(cfg.lr);
  if (cfg.N < 1 || cfg.M < 1 || cfg.K < 1) {
    throw std::invalid_argument("train: N, M and K must be >= 1");
  }
  if (cfg.hidden_width < 1 || cfg.hidden_layers < 0) {
    throw std::invalid_argument("train: invalid hidden layer shape");
  }
}

TrainResult Train(const TrainConfig& cfg, const TrainProgress& progress) {
  ValidateTrainConfig(cfg);
  const int d = cfg.cs.d;
  const FeatureSet features = FeaturesForBeta(cfg.cs.beta);
  TrainResult result;
  result.policy = InitPolicy(
      PolicyLayerDims(FeatureDim(features, d), cfg.hidden_width, cfg.hidden_layers, d),
      cfg.activation, cfg.seed);
  const TimeGrid grid = MakeUniformGrid(0.0, cfg.cs.T, cfg.M);
  const SeededStream stream(cfg.seed);
  AdamState adam(result.policy.num_params());
  result.history.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const auto replica = static_cast<uint32_t>(k);
    const Ensemble e0 = UniformEnsemble(stream, replica, cfg.N, d);
    const CostAndGradient cg = RolloutCostAndGrad(result.policy, e0, grid, cfg.cs,
                                                  DirectNoise(cfg.seed, replica));
    if (!std::isfinite(cg.cost.total)) {
      throw NumericalError("train: non-finite cost at iteration " + std::to_string(k));
    }
    const double lr = LearningRate(cfg.lr, k);
    AdamStep(result.policy.params(), cg.grad, adam, lr);
    const TrainRecord record{k, cg.cost.total, lr};
    result.history.push_back(record);
    if (progress) progress(record);
  }
  return result;
}

double TrailingMeanCost(const std::vector<TrainRecord>& history, int window) {
  if (history.empty() || window < 1) {
    throw std::invalid_argument("trailing mean: empty history or window");
  }
  const size_t n = std::min<size_t>(window, history.size());
  double acc = 0.0;
  for (size_t i = history.size() - n; i < history.size(); ++i) acc += history[i].cost;
  return acc / static_cast<double>(n);
}

McEstimate EvaluatePolicy(const FeedbackPolicy& policy, const CsParams& cs,
                          const EvalSetup& setup) {
  if (setup.reps < 1) throw std::invalid_argument("evaluate: reps must be >= 1");
  if (setup.N < 1) throw std::invalid_argument("evaluate: N must be >= 1");
  const TimeGrid grid = MakeUniformGrid(0.0, cs.T, setup.M);
  const SeededStream stream(setup.seed);
  McEstimate est;
  for (int r = 0; r < setup.reps; ++r) {
    const auto replica = static_cast<uint32_t>(r);
    const Ensemble e0 = setup.initial ? setup.initial(replica)
                                      : UniformEnsemble(stream, replica, setup.N, cs.d);
    const Trajectory traj =
        setup.fine_M > 0
            ? Rollout(e0, policy, grid, cs, RefinedNoise(setup.seed, replica, setup.fine_M))
            : Rollout(e0, policy, grid, cs, DirectNoise(setup.seed, replica));
    const CostBreakdown c = EmpiricalCsCost(traj, cs.gamma1);
    est.samples.push_back(c.total);
    est.mean_cost.total += c.total;
    est.mean_cost.running_state += c.running_state;
    est.mean_cost.running_control += c.running_control;
    est.mean_cost.terminal += c.terminal;
  }
  est.mean_cost.total /= setup.reps;
  est.mean_cost.running_state /= setup.reps;
  est.mean_cost.running_control /= setup.reps;
  est.mean_cost.terminal /= setup.reps;
  double sum = 0.0;
  for (double s : est.samples) sum += s;
  est.mean = sum / setup.reps;
  if (setup.reps > 1) {
    double ss = 0.0;
    for (double s : est.samples) ss += (s - est.mean) * (s - est.mean);
    est.std_error = std::sqrt(ss / (setup.reps - 1) / setup.reps);
  }
  return est;
}

SlopeFit FitLogLogSlope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw std::invalid_argument("slope fit: need at least two points");
  }
  std::vector<double> lx, ly;
  for (const auto& [h, err] : pairs) {
    if (!(h > 0.0) || !(err > 0.0)) {
      throw std::invalid_argument("slope fit: step sizes and errors must be > 0");
    }
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit: all step sizes equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

ConvergenceReport ConvergenceStudy(std::vector<int> M_list, const CsParams& cs,
                                   std::optional<double> reference,
                                   const ValueEstimator& estimator, uint64_t seed) {
  if (M_list.empty()) throw std::invalid_argument("convergence: empty M list");
  std::sort(M_list.begin(), M_list.end());
  if (M_list.front() < 1) throw std::invalid_argument("convergence: M must be >= 1");
  if (reference && !std::isfinite(*reference)) {
    throw std::invalid_argument("convergence: reference must be finite");
  }
  const int fine_M = M_list.back();
  ConvergenceReport report;
  report.cauchy = !reference.has_value();
  std::vector<double> values;
  for (int M : M_list) {
    const TimeGrid grid = MakeUniformGrid(0.0, cs.T, M);
    values.push_back(estimator(grid, fine_M, seed));
  }
  for (size_t i = 0; i < M_list.size(); ++i) {
    ConvergenceRow row;
    row.M = M_list[i];
    row.h = cs.T / M_list[i];
    row.value = values[i];
    if (reference) {
      row.reference = *reference;
    } else if (i + 1 < M_list.size()) {
      row.reference = values[i + 1];
    } else {
      row.reference = values[i];
      row.in_fit = false;
      report.flags.push_back("M=" + std::to_string(row.M) +
                             ": no finer level for a Cauchy difference");
    }
    row.abs_error = std::abs(row.value - row.reference);
    if (row.in_fit && row.abs_error == 0.0) {
      row.in_fit = false;
      report.flags.push_back("M=" + std::to_string(row.M) +
                             ": zero error, excluded from fit");
    }
    if (!report.rows.empty() && row.in_fit && report.rows.back().in_fit &&
        row.abs_error > report.rows.back().abs_error) {
      report.flags.push_back("M=" + std::to_string(row.M) +
                             ": error increased over the previous level");
    }
    report.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> pairs;
  for (const auto& row : report.rows) {
    if (row.in_fit) pairs.emplace_back(row.h, row.abs_error);
  }
  const SlopeFit fit = FitLogLogSlope(pairs);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  return report;
}

ValueEstimator ExactProjectionEstimator(const CsParams& cs,
                                        const RiccatiSolution& ric, int N, int reps) {
  return [cs, &ric, N, reps](const TimeGrid& grid, int fine_M, uint64_t seed) {
    const ExactLqPolicy policy(ric, cs.gamma1);
    EvalSetup setup;
    setup.N = N;
    setup.M = grid.M;
    setup.seed = seed;
    setup.reps = reps;
    setup.fine_M = fine_M;
    return EvaluatePolicy(policy, cs, setup).mean;
  };
}

ValueEstimator TrainedEstimator(const TrainConfig& cfg, int eval_N, int reps) {
  return [cfg, eval_N, reps](const TimeGrid& grid, int fine_M, uint64_t seed) {
    TrainConfig local = cfg;
    local.M = grid.M;
    const TrainResult trained = Train(local);
    const MlpFeedback policy(trained.policy, FeaturesForBeta(cfg.cs.beta));
    EvalSetup setup;
    setup.N = eval_N;
    setup.M = grid.M;
    setup.seed = seed;
    setup.reps = reps;
    setup.fine_M = fine_M;
    return EvaluatePolicy(policy, cfg.cs, setup).mean;
  };
}

GradCheckResult GradientCheck(const TrainConfig& cfg, int coords, double step) {
  ValidateTrainConfig(cfg);
  if (!(step > 0.0)) throw std::invalid_argument("gradcheck: step must be > 0");
  const int d = cfg.cs.d;
  const FeatureSet features = FeaturesForBeta(cfg.cs.beta);
  MlpPolicy policy = InitPolicy(
      PolicyLayerDims(FeatureDim(features, d), cfg.hidden_width, cfg.hidden_layers, d),
      cfg.activation, cfg.seed);
  const Eigen::Index n = policy.num_params();
  if (coords < 1 || coords > n) {
    throw std::invalid_argument("gradcheck: coords must lie in [1, num_params]");
  }
  const TimeGrid grid = MakeUniformGrid(0.0, cfg.cs.T, cfg.M);
  const SeededStream stream(cfg.seed);
  const Ensemble e0 = UniformEnsemble(stream, 0, cfg.N, d);
  const DirectNoise noise(cfg.seed, 0);
  const Vector grad = RolloutCostAndGrad(policy, e0, grid, cfg.cs, noise).grad;

  // Distinct coordinates by a partial Fisher-Yates shuffle.
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  for (int k = 0; k < coords; ++k) {
    const double u = stream.Uniform({Purpose::kCoordinateSample, 0,
                                     static_cast<uint32_t>(k), 0, 0});
    const auto j = k + std::min<Eigen::Index>(
                           static_cast<Eigen::Index>(u * static_cast<double>(n - k)),
                           n - k - 1);
    std::swap(order[k], order[j]);
  }

  auto cost_at = [&](Eigen::Index i, double theta) {
    const double saved = policy.params()[i];
    policy.params()[i] = theta;
    const Trajectory traj = Rollout(e0, MlpFeedback(policy, features), grid, cfg.cs, noise);
    policy.params()[i] = saved;
    return EmpiricalCsCost(traj, cfg.cs.gamma1).total;
  };

  GradCheckResult result;
  for (int k = 0; k < coords; ++k) {
    const Eigen::Index i = order[k];
    const double theta = policy.params()[i];
    const double fd = (cost_at(i, theta + step) - cost_at(i, theta - step)) / (2.0 * step);
    GradCheckEntry entry;
    entry.index = i;
    entry.adjoint = grad[i];
    entry.finite_difference = fd;
    entry.rel_error =
        std::abs(entry.adjoint - entry.finite_difference) /
        std::max({std::abs(entry.adjoint), std::abs(entry.finite_difference), 1e-8});
    result.max_rel_error = std::max(result.max_rel_error, entry.rel_error);
    result.entries.push_back(entry);
  }
  return result;
}

std::string TrainHistoryCsv(const std::vector<TrainRecord>& history) {
  std::ostringstream out;
  out << "iteration,cost,lr\n";
  for (const auto& r : history) {
    out << r.iteration << ',' << FormatDouble(r.cost) << ',' << FormatDouble(r.lr)
        << '\n';
  }
  return out.str();
}

std::string ConvergenceCsv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "M,h,value,reference,abs_error\n";
  for (const auto& r : report.rows) {
    out << r.M << ',' << FormatDouble(r.h) << ',' << FormatDouble(r.value) << ','
        << FormatDouble(r.reference) << ',' << FormatDouble(r.abs_error) << '\n';
  }
  out << "slope," << FormatDouble(report.slope) << '\n';
  return out.str();
}

}  // namespace mfcpg
