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

// mfcpg: command-line driver for the Cucker-Smale mean-field control
// pipeline. See README.md for subcommands, config keys and CSV formats.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mfcpg/config.h"
#include "mfcpg/core.h"
#include "mfcpg/cost.h"
#include "mfcpg/dynamics.h"
#include "mfcpg/experiments.h"
#include "mfcpg/linconvex.h"
#include "mfcpg/mlp.h"
#include "mfcpg/policy_gradient.h"
#include "mfcpg/riccati.h"

namespace mfcpg {
namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

// Invalid input detected after argument parsing (config file, flag values).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  int workers = 0;
};

Config ResolveConfig(const CommonOptions& opts) {
  Config cfg;
  if (!opts.config_path.empty()) cfg = LoadConfig(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

void ApplyWorkers(const CommonOptions& opts) {
  int workers = opts.workers;
  if (workers == 0) {
    if (const char* env = std::getenv("MFCPG_WORKERS"); env && *env) {
      try {
        workers = std::stoi(env);
      } catch (const std::exception&) {
        throw UsageError("MFCPG_WORKERS must be a positive integer");
      }
      if (workers < 1) throw UsageError("MFCPG_WORKERS must be a positive integer");
    }
  }
  if (workers > 0) SetWorkerCount(workers);
}

void PrintBanner(const std::string& command, const Config& cfg) {
  std::cerr << "# mfcpg " << command << "\n# seed = " << cfg.seed
            << "\n# workers = " << WorkerCount() << '\n';
  std::istringstream rendered(RenderConfig(cfg));
  for (std::string line; std::getline(rendered, line);) {
    std::cerr << "# " << line << '\n';
  }
}

void Emit(const CommonOptions& opts, const std::string& text) {
  if (opts.out.empty() || opts.out == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(opts.out, std::ios::binary);
  file << text;
  file.close();
  if (!file) throw std::runtime_error("cannot write " + opts.out);
}

RiccatiSolution SolveFor(const Config& cfg) {
  return SolveRiccati(ToLqParams(cfg.cs), cfg.riccati_steps);
}

void RequireLq(const Config& cfg, const char* command) {
  if (cfg.cs.beta != 0.0) {
    throw UsageError(std::string(command) +
                     ": the exact LQ benchmark needs beta = 0");
  }
}

std::string RunRiccati(const Config& cfg) {
  const RiccatiSolution ric = SolveFor(cfg);
  std::ostringstream out;
  out << "t,nu\n";
  for (int i = 0; i <= ric.grid.M; ++i) {
    out << FormatDouble(ric.grid.nodes[i]) << ',' << FormatDouble(ric.nu[i]) << '\n';
  }
  return out.str();
}

std::string RunSimulate(const Config& cfg, const std::string& policy_arg) {
  std::optional<RiccatiSolution> ric;
  std::optional<MlpPolicy> mlp;
  std::unique_ptr<FeedbackPolicy> policy;
  if (policy_arg == "zero") {
    policy = std::make_unique<ZeroPolicy>();
  } else if (policy_arg == "exact") {
    RequireLq(cfg, "simulate");
    ric = SolveFor(cfg);
    policy = std::make_unique<ExactLqPolicy>(*ric, cfg.cs.gamma1);
  } else {
    mlp = LoadPolicy(policy_arg);
    const FeatureSet features = FeaturesForBeta(cfg.cs.beta);
    if (mlp->layer_dims().front() != FeatureDim(features, cfg.cs.d) ||
        mlp->layer_dims().back() != cfg.cs.d) {
      throw UsageError("simulate: policy " + policy_arg +
                       " does not match the configured d and beta");
    }
    policy = std::make_unique<MlpFeedback>(*mlp, features);
  }
  const TimeGrid grid = MakeUniformGrid(0.0, cfg.cs.T, cfg.M);
  const SeededStream stream(cfg.seed);
  const Ensemble e0 = UniformEnsemble(stream, 0, cfg.N, cfg.cs.d);
  const Trajectory traj = Rollout(e0, *policy, grid, cfg.cs, DirectNoise(cfg.seed, 0));

  const int d = cfg.cs.d;
  std::ostringstream out;
  out << "t";
  if (d == 1) {
    out << ",mean_v";
  } else {
    for (int c = 1; c <= d; ++c) out << ",mean_v" << c;
  }
  out << ",var_v,running_cost\n";
  double running = 0.0;
  for (int m = 0; m <= grid.M; ++m) {
    const EmpiricalMoments mom = ComputeEmpiricalMoments(traj.states[m]);
    out << FormatDouble(grid.nodes[m]);
    for (int c = 0; c < d; ++c) out << ',' << FormatDouble(mom.mean_v[c]);
    out << ',' << FormatDouble(VelocityDispersion(traj.states[m])) << ','
        << FormatDouble(running) << '\n';
    if (m < grid.M) {
      running += grid.h * (VelocityDispersion(traj.states[m]) +
                           cfg.cs.gamma1 * MeanSquaredControl(traj.controls[m]));
    }
  }
  return out.str();
}

std::string RunTrain(const Config& cfg, const std::string& policy_out, int every) {
  const TrainConfig tc = ToTrainConfig(cfg);
  const TrainResult result = Train(tc, [every, &cfg](const TrainRecord& r) {
    if (every > 0 && (r.iteration % every == 0 || r.iteration + 1 == cfg.K)) {
      std::cerr << "iteration " << r.iteration << " cost " << FormatDouble(r.cost)
                << " lr " << FormatDouble(r.lr) << '\n';
    }
  });
  std::cerr << "# trailing 50-iteration mean cost = "
            << FormatDouble(TrailingMeanCost(result.history, 50)) << '\n';
  if (!policy_out.empty()) SavePolicy(policy_out, result.policy);
  return TrainHistoryCsv(result.history);
}

std::string RunConverge(const Config& cfg) {
  const RiccatiSolution ric = SolveFor(cfg);
  std::optional<double> reference;
  ValueEstimator estimator;
  if (cfg.conv_protocol == "exact") {
    RequireLq(cfg, "converge");
    reference = ExactLqValue(ToLqParams(cfg.cs), ric);
    estimator = ExactProjectionEstimator(cfg.cs, ric, cfg.conv_N, cfg.conv_reps);
  } else {
    if (cfg.cs.beta == 0.0) reference = ExactLqValue(ToLqParams(cfg.cs), ric);
    estimator = TrainedEstimator(ToTrainConfig(cfg), cfg.conv_N, cfg.conv_reps);
  }
  const ConvergenceReport report =
      ConvergenceStudy(cfg.conv_M_list, cfg.cs, reference, estimator, cfg.seed);
  if (report.cauchy) std::cerr << "# errors are Cauchy differences |V_M - V_2M|\n";
  for (const auto& flag : report.flags) std::cerr << "# warning: " << flag << '\n';
  return ConvergenceCsv(report);
}

std::string BreakdownRow(const std::string& source, const CostBreakdown& c,
                         double std_error) {
  return source + ',' + FormatDouble(c.total) + ',' + FormatDouble(c.running_state) +
         ',' + FormatDouble(c.running_control) + ',' + FormatDouble(c.terminal) + ',' +
         FormatDouble(std_error) + '\n';
}

std::string RunLqValue(const Config& cfg, bool monte_carlo) {
  RequireLq(cfg, "lqvalue");
  const RiccatiSolution ric = SolveFor(cfg);
  const double exact = ExactLqValue(ToLqParams(cfg.cs), ric);
  std::string out = "source,total,running_state,running_control,terminal,std_error\n";
  // Only the total is available in closed form.
  out += "exact," + FormatDouble(exact) + ",,,,0\n";
  if (monte_carlo) {
    EvalSetup setup;
    setup.N = cfg.eval_N;
    setup.M = cfg.eval_M;
    setup.seed = cfg.seed;
    setup.reps = cfg.eval_reps;
    const McEstimate est =
        EvaluatePolicy(ExactLqPolicy(ric, cfg.cs.gamma1), cfg.cs, setup);
    out += BreakdownRow("monte_carlo", est.mean_cost, est.std_error);
  }
  return out;
}

int Main(int argc, char** argv) {
  CLI::App app{"Mean-field control of Cucker-Smale flocks by policy gradient"};
  app.require_subcommand(1);
  CommonOptions opts;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Override the root seed");
    sub->add_option("--out", opts.out, "Output CSV path (default: stdout)");
    sub->add_option("--workers", opts.workers, "OpenMP worker count")
        ->check(CLI::PositiveNumber);
  };

  auto* riccati = app.add_subcommand("riccati", "Riccati solution nu(t) as CSV t,nu");
  add_common(riccati);

  std::string policy_arg = "exact";
  auto* simulate = app.add_subcommand(
      "simulate", "Trajectory statistics as CSV t,mean_v,var_v,running_cost");
  add_common(simulate);
  simulate->add_option("--policy", policy_arg,
                       "exact, zero, or the path of a saved policy");

  std::string policy_out;
  int every = 50;
  auto* train = app.add_subcommand("train", "Policy-gradient training history as CSV");
  add_common(train);
  train->add_option("--policy-out", policy_out, "Write the trained policy here");
  train->add_option("--log-every", every, "Progress line period on stderr (0: off)");

  auto* converge = app.add_subcommand("converge", "Time-discretization convergence study");
  add_common(converge);

  bool monte_carlo = false;
  auto* lqvalue = app.add_subcommand("lqvalue", "Exact LQ value, optionally checked by MC");
  add_common(lqvalue);
  lqvalue->add_flag("--mc", monte_carlo, "Add a Monte-Carlo estimate");

  int draws = 100;
  auto* lqcheck = app.add_subcommand(
      "lqcheck", "Max relative residual of the linear-convex optimality identity");
  add_common(lqcheck);
  lqcheck->add_option("--draws", draws, "Random coefficient draws")
      ->check(CLI::PositiveNumber);

  int coords = 20;
  int gc_N = 8;
  int gc_M = 4;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Adjoint gradient against finite differences");
  add_common(gradcheck);
  gradcheck->add_option("--coords", coords, "Parameters to check")
      ->check(CLI::PositiveNumber);
  gradcheck->add_option("--particles", gc_N, "Particles")->check(CLI::PositiveNumber);
  gradcheck->add_option("--steps", gc_M, "Time steps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    ApplyWorkers(opts);
    const Config cfg = ResolveConfig(opts);
    PrintBanner(name, cfg);
    std::string text;
    if (sub == riccati) {
      text = RunRiccati(cfg);
    } else if (sub == simulate) {
      text = RunSimulate(cfg, policy_arg);
    } else if (sub == train) {
      text = RunTrain(cfg, policy_out, every);
    } else if (sub == converge) {
      text = RunConverge(cfg);
    } else if (sub == lqvalue) {
      text = RunLqValue(cfg, monte_carlo);
    } else if (sub == lqcheck) {
      const double worst = MaxRelativeOptimalityResidual(cfg.seed, draws);
      Emit(opts, "max_relative_residual," + FormatDouble(worst) + '\n');
      return worst < 1e-12 ? 0 : kExitNumerical;
    } else if (sub == gradcheck) {
      TrainConfig tc = ToTrainConfig(cfg);
      tc.N = gc_N;
      tc.M = gc_M;
      const GradCheckResult result = GradientCheck(tc, coords);
      std::ostringstream out;
      out << "index,adjoint,finite_difference,rel_error\n";
      for (const auto& e : result.entries) {
        out << e.index << ',' << FormatDouble(e.adjoint) << ','
            << FormatDouble(e.finite_difference) << ',' << FormatDouble(e.rel_error)
            << '\n';
      }
      out << "max_rel_error," << FormatDouble(result.max_rel_error) << '\n';
      Emit(opts, out.str());
      std::cerr << "max relative error " << FormatDouble(result.max_rel_error) << '\n';
      return result.max_rel_error < 1e-5 ? 0 : kExitNumerical;
    }
    Emit(opts, text);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "mfcpg " << name << ": config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "mfcpg " << name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "mfcpg " << name << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "mfcpg " << name << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace
}  // namespace mfcpg

int main(int argc, char** argv) { return mfcpg::Main(argc, argv); }
