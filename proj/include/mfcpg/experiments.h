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

#ifndef MFCPG_EXPERIMENTS_H_
#define MFCPG_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfcpg/cost.h"
#include "mfcpg/dynamics.h"
#include "mfcpg/mlp.h"
#include "mfcpg/optim.h"
#include "mfcpg/riccati.h"

namespace mfcpg {

struct TrainConfig {
  CsParams cs;
  int N = 1000;
  int M = 128;
  int K = 800;
  uint64_t seed = 1;
  LrSchedule lr;
  int hidden_width = 110;
  int hidden_layers = 2;
  Activation activation = Activation::kRelu;
};

void ValidateTrainConfig(const TrainConfig& cfg);

struct TrainRecord {
  int iteration = 0;
  double cost = 0.0;  // before the update of this iteration
  double lr = 0.0;
};

struct TrainResult {
  MlpPolicy policy;
  std::vector<TrainRecord> history;
};

using TrainProgress = std::function<void(const TrainRecord&)>;

// Policy-gradient training: for k = 0..K-1, draw a fresh initial ensemble and
// noise (replica k), roll out, differentiate, take one Adam step at
// LearningRate(lr, k).
TrainResult Train(const TrainConfig& cfg, const TrainProgress& progress = {});

// Mean of the last `window` recorded costs.
double TrailingMeanCost(const std::vector<TrainRecord>& history, int window);

struct EvalSetup {
  int N = 10000;
  int M = 256;
  uint64_t seed = 1;
  int reps = 8;
  // 0: independent increments per grid; otherwise increments are coarsened
  // from a Brownian path on fine_M cells (common random numbers).
  int fine_M = 0;
  // Initial ensemble of repetition r; uniform on [0,1)^d when empty.
  std::function<Ensemble(uint32_t)> initial;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> samples;  // total cost of each repetition
  CostBreakdown mean_cost;      // componentwise average over repetitions
};

// Monte-Carlo estimate of the empirical Cucker-Smale cost under `policy`.
// Repetition r uses replica r of the seeded stream for both the initial
// ensemble and the noise.
McEstimate EvaluatePolicy(const FeedbackPolicy& policy, const CsParams& cs,
                          const EvalSetup& setup);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual of the log-log fit
};

// Least squares of log(err) on log(h). Needs >= 2 pairs, all entries > 0.
SlopeFit FitLogLogSlope(std::span<const std::pair<double, double>> pairs);

struct ConvergenceRow {
  int M = 0;
  double h = 0.0;
  double value = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  bool in_fit = true;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  // Without a reference, errors are the Cauchy differences |V_M - V_2M|.
  bool cauchy = false;
  std::vector<std::string> flags;
};

// Value of the discretized problem on `grid`, using increments coarsened from
// a Brownian path on fine_M cells.
using ValueEstimator =
    std::function<double(const TimeGrid& grid, int fine_M, uint64_t seed)>;

// Evaluates `estimator` for every M in M_list (sorted ascending) with common
// random numbers keyed on the finest grid, then fits the log-log slope of the
// errors. Rows with zero error are excluded from the fit and flagged.
ConvergenceReport ConvergenceStudy(std::vector<int> M_list, const CsParams& cs,
                                   std::optional<double> reference,
                                   const ValueEstimator& estimator, uint64_t seed);

// Exact LQ feedback held constant on each cell of the grid (its value at the
// left endpoint), averaged over `reps` repetitions of N particles. `ric` must
// outlive the estimator.
ValueEstimator ExactProjectionEstimator(const CsParams& cs,
                                        const RiccatiSolution& ric, int N, int reps);

// Trains a policy on each grid (cfg.M replaced by the grid's M), then
// evaluates it with eval_N particles over `reps` repetitions.
ValueEstimator TrainedEstimator(const TrainConfig& cfg, int eval_N, int reps);

struct GradCheckEntry {
  Eigen::Index index = 0;
  double adjoint = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

struct GradCheckResult {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
};

// Compares RolloutCostAndGrad against central differences of width 2 step on
// `coords` distinct parameters drawn at random, for a freshly initialized
// policy on cfg.N particles and cfg.M steps with frozen noise (replica 0 of
// cfg.seed). Relative error is |ad - fd| / max(|ad|, |fd|, 1e-8).
GradCheckResult GradientCheck(const TrainConfig& cfg, int coords, double step = 1e-5);

std::string TrainHistoryCsv(const std::vector<TrainRecord>& history);
std::string ConvergenceCsv(const ConvergenceReport& report);

}  // namespace mfcpg

#endif  // MFCPG_EXPERIMENTS_H_
