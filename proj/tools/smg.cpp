// Copyright 2026 The smg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include "CLI11.hpp"
#include "smg/cli.hpp"

namespace {

void add_fixed_delta_flags(CLI::App* sub, smg::cli::RunConfig& c) {
  sub->add_flag("--paper-params", c.paper_params,
                "Use the fixed-delta regularity construction instead of optimizing theta");
  sub->add_option("--k1", c.paper.k1, "Upper bound on exponential rates")->capture_default_str();
  sub->add_option("--k2", c.paper.k2, "Lower bound on uniform supports")->capture_default_str();
  sub->add_option("--alpha0", c.paper.alpha0, "Lower bound on discount rates")->capture_default_str();
  sub->add_option("--delta", c.paper.delta, "Regularity delta")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver toolkit for finite zero-sum semi-Markov games with state-action-dependent discounting"};
  app.require_subcommand(1);
  smg::cli::RunConfig c;

  auto* check = app.add_subcommand("check", "Certify the contraction assumptions of a model");
  check->add_option("model", c.model_path, "Model JSON")->required();
  check->add_option("-o,--report", c.report_out, "Write the certificate JSON here instead of stdout");
  add_fixed_delta_flags(check, c);

  auto* solve = app.add_subcommand("solve", "Run value iteration to an epsilon-equilibrium");
  solve->add_option("model", c.model_path, "Model JSON")->required();
  solve->add_option("--epsilon", c.epsilon, "Stopping threshold on successive iterates")->capture_default_str();
  solve->add_option("--v0", c.v0, "Constant initial value for every state");
  solve->add_option("--v0-file", c.v0_file, "JSON object {state: value} with the initial value");
  solve->add_option("--max-iter", c.max_iter, "Iteration limit (0 = 10 N_eps, capped at 1e6)");
  solve->add_option("-o,--report", c.report_out, "Write the report JSON here instead of stdout");
  solve->add_option("--trace", c.trace_out, "Write the per-iteration CSV trace");
  solve->add_option("--strategies-out", c.strategies_out, "Write the equilibrium strategies JSON");
  add_fixed_delta_flags(solve, c);

  auto* eval = app.add_subcommand("eval", "Evaluate a stationary strategy pair exactly");
  eval->add_option("model", c.model_path, "Model JSON")->required();
  eval->add_option("--strategies", c.strategies_in, "Strategies JSON")->required();
  eval->add_option("-o,--report", c.report_out, "Write the JSON result here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the discounted payoff");
  sim->add_option("model", c.model_path, "Model JSON")->required();
  sim->add_option("--strategies", c.strategies_in, "Strategies JSON")->required();
  sim->add_option("--state", c.state, "Initial state (default: every state)");
  sim->add_option("--trajectories", c.trajectories, "Number of trajectories")->capture_default_str();
  sim->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sim->add_option("--floor", c.discount_floor, "Stop a trajectory once its discount falls below this")
      ->capture_default_str();
  sim->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sim->add_option("-o,--report", c.report_out, "Write the JSON result here instead of stdout");

  auto* game = app.add_subcommand("game", "Solve a zero-sum matrix game");
  game->add_option("matrix", c.matrix, "JSON array of rows, inline or as a file path")->required();
  game->add_option("-o,--report", c.report_out, "Write the JSON result here instead of stdout");

  CLI11_PARSE(app, argc, argv);
  c.subcommand = app.get_subcommands().front()->get_name();
  return smg::cli::run(c);
}
