// Copyright 2026 The Kandinsky Toolkit Authors
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

// kandinsky: command-line front end.
//
//   kandinsky generate  --statement FILE [--n-true N --n-false N --n-cf N] --out DIR
//   kandinsky challenge --id definitions-example|challenge-1|challenge-2|challenge-3
//   kandinsky evaluate  --data DIR (--statement FILE | --statement-id ID)
//   kandinsky split     --data DIR [--data DIR ...] --out DIR
//   kandinsky render    --data DIR --out DIR
//   kandinsky print-config
//
// Settings are resolved as defaults < --config file < environment
// (KANDINSKY_SEED, KANDINSKY_OUT) < flags. The exit status is 0 on success
// and the error code number otherwise.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using kandinsky::cli::RunConfig;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::size_t> n_true, n_false, n_cf;
  std::optional<std::string> statement, statement_id, generator, challenge;
  std::vector<std::string> data;
  std::optional<double> target, max_atom_div, alpha_atoms, alpha_compounds;
  std::optional<int> depth, canvas;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI config file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--set", f.sets, "override a config key: section.key=value");
}

void AddCounts(CLI::App* cmd, Flags& f) {
  cmd->add_option("--n-true", f.n_true, "positive figures per statement");
  cmd->add_option("--n-false", f.n_false, "negative figures per statement");
  cmd->add_option("--n-cf", f.n_cf, "counterfactual figures per statement");
  cmd->add_option("--generator", f.generator, "constructive generator for positives");
}

void AddStatement(CLI::App* cmd, Flags& f) {
  cmd->add_option("--statement", f.statement, "statement file");
  cmd->add_option("--statement-id", f.statement_id, "statement name within a list file");
}

RunConfig Resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) kandinsky::cli::LoadConfigFile(cfg, f.config);
  kandinsky::cli::ApplyEnvironment(cfg, [](const char* name) { return std::getenv(name); });
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw kandinsky::Error(kandinsky::ErrorCode::kInvalidArgument,
                             "--set expects section.key=value, got '" + s + "'");
    }
    kandinsky::cli::SetKey(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.threads) cfg.sampler.threads = *f.threads;
  if (f.n_true) cfg.n_true = *f.n_true;
  if (f.n_false) cfg.n_false = *f.n_false;
  if (f.n_cf) cfg.n_cf = *f.n_cf;
  if (f.statement) cfg.statement_file = *f.statement;
  if (f.statement_id) cfg.statement_id = *f.statement_id;
  if (f.generator) cfg.generator = *f.generator;
  if (f.challenge) cfg.challenge = *f.challenge;
  if (!f.data.empty()) cfg.data_dirs = f.data;
  if (f.target) cfg.split.target_compound_div = *f.target;
  if (f.max_atom_div) cfg.split.max_atom_div = *f.max_atom_div;
  if (f.alpha_atoms) cfg.split.alpha_atoms = *f.alpha_atoms;
  if (f.alpha_compounds) cfg.split.alpha_compounds = *f.alpha_compounds;
  if (f.depth) cfg.split.extract.depth = *f.depth;
  if (f.canvas) cfg.render.canvas_px = *f.canvas;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generator and oracle toolkit for Kandinsky patterns"};
  app.require_subcommand(1);
  Flags f;

  auto* generate = app.add_subcommand("generate", "labelled dataset for each statement");
  AddCommon(generate, f);
  AddStatement(generate, f);
  AddCounts(generate, f);

  auto* challenge = app.add_subcommand("challenge", "dataset for a built-in challenge");
  AddCommon(challenge, f);
  AddStatement(challenge, f);
  AddCounts(challenge, f);
  challenge->add_option("--id", f.challenge, "challenge id")->required();

  auto* evaluate = app.add_subcommand("evaluate", "confusion counts of a hypothesis");
  AddCommon(evaluate, f);
  AddStatement(evaluate, f);
  evaluate->add_option("--data", f.data, "dataset directory")->required();

  auto* split = app.add_subcommand("split", "compositional train/test split");
  AddCommon(split, f);
  split->add_option("--data", f.data, "dataset directories")->required();
  split->add_option("--target", f.target, "target compound divergence");
  split->add_option("--max-atom-div", f.max_atom_div, "atom divergence cap");
  split->add_option("--alpha-atoms", f.alpha_atoms, "Chernoff alpha for atoms");
  split->add_option("--alpha-compounds", f.alpha_compounds, "Chernoff alpha for compounds");
  split->add_option("--depth", f.depth, "compound subtree depth");

  auto* render = app.add_subcommand("render", "re-render a dataset's images");
  AddCommon(render, f);
  render->add_option("--data", f.data, "dataset directory")->required();
  render->add_option("--canvas", f.canvas, "canvas size in pixels");

  auto* print_config = app.add_subcommand("print-config", "print the resolved configuration");
  AddCommon(print_config, f);
  AddStatement(print_config, f);
  AddCounts(print_config, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kandinsky::ErrorCode::kInvalidArgument);
  }

  try {
    const RunConfig cfg = Resolve(f);
    namespace cli = kandinsky::cli;
    cli::json summary;
    if (generate->parsed()) {
      summary = cli::CmdGenerate(cfg);
    } else if (challenge->parsed()) {
      summary = cli::CmdChallenge(cfg);
    } else if (evaluate->parsed()) {
      summary = cli::CmdEvaluate(cfg);
    } else if (split->parsed()) {
      summary = cli::CmdSplit(cfg);
    } else if (render->parsed()) {
      summary = cli::CmdRender(cfg);
    } else {
      kandinsky::cli::CheckConfig(cfg);
      std::cout << cli::ConfigText(cfg);
      return 0;
    }
    std::cout << summary.dump() << "\n";
    return 0;
  } catch (const kandinsky::Error& e) {
    std::cerr << "kandinsky: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "kandinsky: " << e.what() << "\n";
    return static_cast<int>(kandinsky::ErrorCode::kIoFailure);
  }
}
