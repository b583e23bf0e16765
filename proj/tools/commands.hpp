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

#pragma once

// Subcommand implementations for the kandinsky command-line tool. Each
// command takes a fully resolved RunConfig, writes its artifacts and returns
// a one-line JSON summary for stdout.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kandinsky/kandinsky.hpp"

namespace kandinsky::cli {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::size_t n_true = 100;
  std::size_t n_false = 100;
  std::size_t n_cf = 20;
  std::string statement_file;
  std::string statement_id;  // picks one entry of a statement list
  std::string generator;     // constructive generator for positives
  std::string challenge;
  std::vector<std::string> data_dirs;
  UniverseConfig universe;
  gestalt::GestaltConfig gestalt;
  sampler::SamplerConfig sampler;
  splits::SplitConfig split;
  RenderStyle render;
  challenges::Challenge1Config challenge1;
};

// ---------------------------------------------------------------------------
// Config file (INI) reading and writing
// ---------------------------------------------------------------------------

namespace internal {

inline std::string Real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
std::string ListText(const std::vector<T>& values, std::string_view (*name)(T)) {
  std::string out;
  for (const T& v : values) {
    if (!out.empty()) out += ",";
    out += std::string(name(v));
  }
  return out;
}

inline std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

[[noreturn]] inline void BadValue(const std::string& key, const std::string& value,
                                  const std::string& expected) {
  throw Error(ErrorCode::kInvalidArgument,
              "config key '" + key + "': cannot read '" + value + "' as " + expected);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) BadValue(key, value, "a number");
  return out;
}

// One settable key: how to read it from text and how to print it.
struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(RunConfig&)> get;
};

inline const std::vector<std::pair<std::string, Key>>& Keys() {
  static const std::vector<std::pair<std::string, Key>> keys = [] {
    std::vector<std::pair<std::string, Key>> k;
    auto real = [&](std::string name, std::function<double&(RunConfig&)> ref) {
      k.push_back({name, Key{[name, ref](RunConfig& c, const std::string& v) {
                               ref(c) = ParseNumber<double>(name, v);
                             },
                             [ref](RunConfig& c) {
                               return Real(ref(c));
                             }}});
    };
    auto integer = [&](std::string name, std::function<int&(RunConfig&)> ref) {
      k.push_back({name, Key{[name, ref](RunConfig& c, const std::string& v) {
                               ref(c) = ParseNumber<int>(name, v);
                             },
                             [ref](RunConfig& c) {
                               return std::to_string(ref(c));
                             }}});
    };
    auto count = [&](std::string name, std::function<std::size_t&(RunConfig&)> ref) {
      k.push_back({name, Key{[name, ref](RunConfig& c, const std::string& v) {
                               ref(c) = ParseNumber<std::size_t>(name, v);
                             },
                             [ref](RunConfig& c) {
                               return std::to_string(ref(c));
                             }}});
    };
    auto text = [&](std::string name, std::function<std::string&(RunConfig&)> ref) {
      k.push_back({name, Key{[ref](RunConfig& c, const std::string& v) { ref(c) = v; },
                             [ref](RunConfig& c) { return ref(c); }}});
    };

    k.push_back({"run.seed", Key{[](RunConfig& c, const std::string& v) {
                                   c.seed = ParseNumber<std::uint64_t>("run.seed", v);
                                 },
                                 [](RunConfig& c) { return std::to_string(c.seed); }}});
    text("run.out", [](RunConfig& c) -> std::string& { return c.out_dir; });
    count("run.n_true", [](RunConfig& c) -> std::size_t& { return c.n_true; });
    count("run.n_false", [](RunConfig& c) -> std::size_t& { return c.n_false; });
    count("run.n_cf", [](RunConfig& c) -> std::size_t& { return c.n_cf; });
    text("run.statement", [](RunConfig& c) -> std::string& { return c.statement_file; });
    text("run.statement_id", [](RunConfig& c) -> std::string& { return c.statement_id; });
    text("run.generator", [](RunConfig& c) -> std::string& { return c.generator; });
    text("run.challenge", [](RunConfig& c) -> std::string& { return c.challenge; });

    integer("universe.n_min", [](RunConfig& c) -> int& { return c.universe.n_min; });
    integer("universe.n_max", [](RunConfig& c) -> int& { return c.universe.n_max; });
    k.push_back({"universe.shapes",
                 Key{[](RunConfig& c, const std::string& v) {
                       c.universe.allowed_shapes.clear();
                       for (const auto& item : SplitList(v)) {
                         const auto s = ParseShape(item);
                         if (!s) BadValue("universe.shapes", item, "a shape");
                         c.universe.allowed_shapes.push_back(*s);
                       }
                     },
                     [](RunConfig& c) {
                       return ListText<Shape>(c.universe.allowed_shapes, &ShapeName);
                     }}});
    k.push_back({"universe.colors",
                 Key{[](RunConfig& c, const std::string& v) {
                       c.universe.allowed_colors.clear();
                       for (const auto& item : SplitList(v)) {
                         const auto col = ParseColor(item);
                         if (!col) BadValue("universe.colors", item, "a color");
                         c.universe.allowed_colors.push_back(*col);
                       }
                     },
                     [](RunConfig& c) {
                       return ListText<Color>(c.universe.allowed_colors, &ColorName);
                     }}});
    real("universe.size_min", [](RunConfig& c) -> double& { return c.universe.size_min; });
    real("universe.size_max", [](RunConfig& c) -> double& { return c.universe.size_max; });
    real("universe.small_big_threshold",
         [](RunConfig& c) -> double& { return c.universe.small_big_threshold; });
    real("universe.min_gap", [](RunConfig& c) -> double& { return c.universe.min_gap; });

    real("gestalt.circular_residual_tol",
         [](RunConfig& c) -> double& { return c.gestalt.circular_residual_tol; });
    real("gestalt.symmetry_match_tol",
         [](RunConfig& c) -> double& { return c.gestalt.symmetry_match_tol; });
    integer("gestalt.symmetry_axis_steps",
            [](RunConfig& c) -> int& { return c.gestalt.symmetry_axis_steps; });
    real("gestalt.cluster_eps_factor",
         [](RunConfig& c) -> double& { return c.gestalt.cluster_eps_factor; });

    integer("sampler.placement_retries",
            [](RunConfig& c) -> int& { return c.sampler.placement_retries; });
    real("sampler.yield_floor", [](RunConfig& c) -> double& { return c.sampler.yield_floor; });
    integer("sampler.threads", [](RunConfig& c) -> int& { return c.sampler.threads; });
    integer("sampler.max_edits", [](RunConfig& c) -> int& { return c.sampler.max_edits; });
    integer("sampler.near_miss_budget",
            [](RunConfig& c) -> int& { return c.sampler.near_miss_budget; });
    integer("sampler.continuous_edit_samples",
            [](RunConfig& c) -> int& { return c.sampler.continuous_edit_samples; });

    real("split.target_compound_div",
         [](RunConfig& c) -> double& { return c.split.target_compound_div; });
    real("split.max_atom_div", [](RunConfig& c) -> double& { return c.split.max_atom_div; });
    real("split.alpha_atoms", [](RunConfig& c) -> double& { return c.split.alpha_atoms; });
    real("split.alpha_compounds",
         [](RunConfig& c) -> double& { return c.split.alpha_compounds; });
    integer("split.depth", [](RunConfig& c) -> int& { return c.split.extract.depth; });
    integer("split.min_compound_nodes",
            [](RunConfig& c) -> int& { return c.split.extract.min_compound_nodes; });
    integer("split.max_iterations", [](RunConfig& c) -> int& { return c.split.max_iterations; });
    integer("split.samples_per_class",
            [](RunConfig& c) -> int& { return c.split.samples_per_class; });
    integer("split.restarts", [](RunConfig& c) -> int& { return c.split.restarts; });

    integer("render.canvas_px", [](RunConfig& c) -> int& { return c.render.canvas_px; });
    text("render.background", [](RunConfig& c) -> std::string& { return c.render.background; });
    text("render.red", [](RunConfig& c) -> std::string& { return c.render.red; });
    text("render.blue", [](RunConfig& c) -> std::string& { return c.render.blue; });
    text("render.yellow", [](RunConfig& c) -> std::string& { return c.render.yellow; });
    text("render.stroke", [](RunConfig& c) -> std::string& { return c.render.stroke; });
    real("render.stroke_width", [](RunConfig& c) -> double& { return c.render.stroke_width; });

    integer("challenge1.regions_min",
            [](RunConfig& c) -> int& { return c.challenge1.regions_min; });
    integer("challenge1.regions_max",
            [](RunConfig& c) -> int& { return c.challenge1.regions_max; });
    real("challenge1.region_size_min",
         [](RunConfig& c) -> double& { return c.challenge1.region_size_min; });
    real("challenge1.region_size_max",
         [](RunConfig& c) -> double& { return c.challenge1.region_size_max; });
    integer("challenge1.members_min",
            [](RunConfig& c) -> int& { return c.challenge1.members_min; });
    integer("challenge1.members_max",
            [](RunConfig& c) -> int& { return c.challenge1.members_max; });
    real("challenge1.member_size_min",
         [](RunConfig& c) -> double& { return c.challenge1.member_size_min; });
    real("challenge1.member_size_max",
         [](RunConfig& c) -> double& { return c.challenge1.member_size_max; });
    k.push_back({"challenge1.mode",
                 Key{[](RunConfig& c, const std::string& v) {
                       if (v == "interior") {
                         c.challenge1.mode = challenges::PlacementMode::kInterior;
                       } else if (v == "outline") {
                         c.challenge1.mode = challenges::PlacementMode::kOutline;
                       } else {
                         BadValue("challenge1.mode", v, "'interior' or 'outline'");
                       }
                     },
                     [](RunConfig& c) {
                       return std::string(c.challenge1.mode == challenges::PlacementMode::kOutline
                                              ? "outline"
                                              : "interior");
                     }}});
    return k;
  }();
  return keys;
}

inline const Key* FindKey(const std::string& name) {
  for (const auto& [n, key] : Keys()) {
    if (n == name) return &key;
  }
  return nullptr;
}

}  // namespace internal

// Sets "section.key" from text; unknown keys are an error.
inline void SetKey(RunConfig& cfg, const std::string& name, const std::string& value) {
  const internal::Key* key = internal::FindKey(name);
  if (!key) throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + name + "'");
  key->set(cfg, value);
}

inline void LoadConfigText(RunConfig& cfg, const std::string& text, const std::string& name) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kParseFailure,
                name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  name + ": key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : entries) {
      SetKey(cfg, section + "." + key, value.get_value<std::string>());
    }
  }
}

inline void LoadConfigFile(RunConfig& cfg, const std::filesystem::path& path) {
  LoadConfigText(cfg, io::ReadFile(path), path.string());
}

// The complete resolved configuration; loading it back reproduces `cfg`.
inline std::string ConfigText(RunConfig cfg) {
  std::string out;
  std::string section;
  for (const auto& [name, key] : internal::Keys()) {
    const auto dot = name.find('.');
    const std::string s = name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += name.substr(dot + 1) + " = " + key.get(cfg) + "\n";
  }
  if (!cfg.data_dirs.empty()) {
    out += "\n; data directories:";
    for (const auto& d : cfg.data_dirs) out += " " + d;
    out += "\n";
  }
  return out;
}

// Environment overrides: KANDINSKY_SEED and KANDINSKY_OUT.
inline void ApplyEnvironment(RunConfig& cfg,
                             const std::function<const char*(const char*)>& getenv) {
  if (const char* seed = getenv("KANDINSKY_SEED"); seed && *seed) {
    cfg.seed = internal::ParseNumber<std::uint64_t>("KANDINSKY_SEED", seed);
  }
  if (const char* out = getenv("KANDINSKY_OUT"); out && *out) cfg.out_dir = out;
}

inline void CheckConfig(const RunConfig& cfg) {
  CheckUniverse(cfg.universe);
  gestalt::CheckConfig(cfg.gestalt);
  sampler::CheckSamplerConfig(cfg.sampler);
  CheckStyle(cfg.render);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace internal {

inline std::vector<dsl::NamedStatement> LoadStatements(const RunConfig& cfg) {
  if (cfg.statement_file.empty()) {
    throw Error(ErrorCode::kMissingStatement, "no statement file given (--statement)");
  }
  auto all = dsl::LoadStatementFile(cfg.statement_file);
  if (cfg.statement_id.empty()) return all;
  for (auto& s : all) {
    if (s.id == cfg.statement_id) return {std::move(s)};
  }
  throw Error(ErrorCode::kUnknownStatementId, "statement file '" + cfg.statement_file +
                                                  "' has no statement '" + cfg.statement_id + "'");
}

inline json ReportJson(const sampler::GenerationReport& r) {
  return json{{"requested", r.requested},
              {"produced", r.produced},
              {"attempts", r.attempts},
              {"rejection_rate", r.rejection_rate},
              {"skipped", r.skipped}};
}

// Positives, matched negatives and near misses for one pattern.
inline std::vector<DatasetRecord> PatternRecords(const sampler::Pattern& p, const RunConfig& cfg,
                                                 std::uint64_t seed, json& summary) {
  if (cfg.n_cf > 0 && cfg.n_true == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "statement '" + p.id + "': counterfactuals need at least one positive (n_true)");
  }
  std::vector<DatasetRecord> records;
  const auto pos = sampler::GeneratePositives(p, cfg.n_true, seed, cfg.sampler);
  const auto neg = sampler::GenerateNegatives(p, cfg.n_false, seed, cfg.sampler,
                                              pos.figures.empty() ? nullptr : &pos.figures);
  sampler::NearMissBatch cf;
  if (cfg.n_cf > 0) cf = sampler::GenerateNearMisses(p, pos.figures, seed, cfg.sampler, cfg.n_cf);

  auto add = [&](Label label, std::size_t i, const Figure& f, std::uint64_t stream) {
    DatasetRecord r;
    r.id = RecordId(p.id, label, i);
    r.label = label;
    r.statement_id = p.id;
    r.seed = stream;
    r.objects = f.objects;
    r.image_path = ImagePath(r.id, label);
    records.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < pos.figures.size(); ++i) {
    add(Label::kTrue, i, pos.figures[i], pos.stream_seeds[i]);
  }
  for (std::size_t i = 0; i < neg.figures.size(); ++i) {
    add(Label::kFalse, i, neg.figures[i], neg.stream_seeds[i]);
  }
  for (std::size_t i = 0; i < cf.items.size(); ++i) {
    const auto& miss = cf.items[i];
    add(Label::kCounterfactual, i, miss.figure, miss.stream_seed);
    records.back().source_id = RecordId(p.id, Label::kTrue, miss.source_index);
    records.back().edits = miss.trail;
  }
  summary = json{{"id", p.id},
                 {"true", ReportJson(pos.report)},
                 {"false", ReportJson(neg.report)},
                 {"counterfactual", ReportJson(cf.report)}};
  return records;
}

// Seed for the statement at `index` of a multi-statement run.
inline std::uint64_t StatementSeed(std::uint64_t seed, std::size_t index) {
  return index == 0 ? seed : Mix64(seed ^ Mix64(static_cast<std::uint64_t>(index)));
}

inline void WriteRunConfig(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure, "cannot create '" + cfg.out_dir + "': " + ec.message());
  }
  io::WriteFile(std::filesystem::path(cfg.out_dir) / "config.ini", ConfigText(cfg));
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

// Generates a labelled dataset for every statement in the statement file.
inline json CmdGenerate(const RunConfig& cfg) {
  CheckConfig(cfg);
  const auto statements = internal::LoadStatements(cfg);
  sampler::GeneratorRegistry registry;
  challenges::RegisterBuiltinGenerators(registry);
  Dataset data;
  json summaries = json::array();
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const auto& s = statements[i];
    sampler::Pattern p = sampler::MakePattern(s.id, s.statement, cfg.universe, cfg.gestalt);
    if (!cfg.generator.empty()) sampler::AttachConstructive(p, registry, cfg.generator);
    data.oracles.AddStatement(s.id, s.statement, p.context);
    json summary;
    auto records = internal::PatternRecords(p, cfg, internal::StatementSeed(cfg.seed, i), summary);
    data.records.insert(data.records.end(), records.begin(), records.end());
    summaries.push_back(std::move(summary));
  }
  internal::WriteRunConfig(cfg);
  WriteDataset(data, cfg.out_dir, cfg.render, cfg.sampler.threads);
  return json{{"command", "generate"},
              {"out", cfg.out_dir},
              {"seed", cfg.seed},
              {"records", data.records.size()},
              {"statements", std::move(summaries)}};
}

inline std::vector<DatasetRecord> Challenge1Records(const RunConfig& cfg, json& summary) {
  challenges::Challenge1Config c1 = cfg.challenge1;
  c1.threads = cfg.sampler.threads;
  c1.placement_retries = cfg.sampler.placement_retries;
  c1.min_gap = cfg.universe.min_gap;
  if (cfg.n_cf > 0 && cfg.n_true == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "challenge-1: counterfactuals need at least one positive (n_true)");
  }
  const std::string id(kLatentOracle);
  std::vector<DatasetRecord> records;
  auto add = [&](Label label, std::size_t i, const challenges::Challenge1Instance& inst) {
    DatasetRecord r;
    r.id = RecordId(id, label, i);
    r.label = label;
    r.statement_id = id;
    r.seed = inst.stream_seed;
    r.objects = inst.figure.objects;
    r.latent = inst.regions;
    r.image_path = ImagePath(r.id, label);
    records.push_back(std::move(r));
  };
  std::vector<challenges::Challenge1Instance> positives;
  if (cfg.n_true > 0) positives = challenges::GenerateChallenge1(cfg.n_true, cfg.seed, c1);
  for (std::size_t i = 0; i < positives.size(); ++i) add(Label::kTrue, i, positives[i]);

  std::vector<challenges::Challenge1Instance> negatives(cfg.n_false);
  ParallelFor(cfg.n_false, c1.threads, [&](std::size_t i) {
    Rng rng = Rng::Stream(cfg.seed, StreamDomain::kNegatives, i);
    negatives[i] = challenges::Challenge1Negative(challenges::SampleChallenge1(c1, rng), rng);
    negatives[i].stream_seed = rng.seed();
  });
  for (std::size_t i = 0; i < negatives.size(); ++i) add(Label::kFalse, i, negatives[i]);

  for (std::size_t i = 0; i < cfg.n_cf; ++i) {
    Rng rng = Rng::Stream(cfg.seed, StreamDomain::kNearMisses, i);
    const std::size_t source = i % positives.size();
    auto miss = challenges::Challenge1Counterfactual(positives[source], source, rng);
    miss.instance.stream_seed = rng.seed();
    add(Label::kCounterfactual, i, miss.instance);
    records.back().source_id = RecordId(id, Label::kTrue, source);
    records.back().edits = std::vector<sampler::EditOp>{miss.edit};
  }
  summary = json{{"id", id},
                 {"true", positives.size()},
                 {"false", negatives.size()},
                 {"counterfactual", cfg.n_cf}};
  return records;
}

// Generates one of the built-in challenges.
inline json CmdChallenge(RunConfig cfg) {
  const std::string& which = cfg.challenge;
  if (which.empty()) throw Error(ErrorCode::kInvalidArgument, "no challenge id given (--id)");
  const challenges::ChallengeSpec spec = challenges::GetChallenge(which);
  cfg.universe = spec.universe;
  CheckConfig(cfg);
  Dataset data;
  json summaries = json::array();
  if (which == "challenge-1") {
    data.oracles.AddLatent();
    json summary;
    data.records = Challenge1Records(cfg, summary);
    summaries.push_back(std::move(summary));
  } else {
    std::vector<dsl::NamedStatement> statements;
    if (which == "definitions-example") {
      statements = {{"gt", *spec.gt}};
      if (!cfg.statement_file.empty()) statements = internal::LoadStatements(cfg);
    } else {
      if (cfg.statement_file.empty()) {
        throw Error(ErrorCode::kMissingStatement,
                    which + " needs a ground-truth statement (--statement)");
      }
      statements = internal::LoadStatements(cfg);
    }
    sampler::GeneratorRegistry registry;
    challenges::RegisterBuiltinGenerators(registry);
    for (std::size_t i = 0; i < statements.size(); ++i) {
      const auto& s = statements[i];
      sampler::Pattern p =
          which == "challenge-2" ? challenges::Challenge2Pattern(s.id, s.statement, cfg.gestalt)
          : which == "challenge-3"
              ? challenges::Challenge3Pattern(s.id, s.statement, cfg.gestalt)
              : sampler::MakePattern(s.id, s.statement, spec.universe, cfg.gestalt);
      if (!cfg.generator.empty()) sampler::AttachConstructive(p, registry, cfg.generator);
      data.oracles.AddStatement(s.id, s.statement, p.context);
      json summary;
      auto records =
          internal::PatternRecords(p, cfg, internal::StatementSeed(cfg.seed, i), summary);
      data.records.insert(data.records.end(), records.begin(), records.end());
      summaries.push_back(std::move(summary));
    }
  }
  internal::WriteRunConfig(cfg);
  WriteDataset(data, cfg.out_dir, cfg.render, cfg.sampler.threads);
  return json{{"command", "challenge"},
              {"challenge", which},
              {"out", cfg.out_dir},
              {"seed", cfg.seed},
              {"records", data.records.size()},
              {"statements", std::move(summaries)}};
}

// Evaluates hypothesis statements over a dataset and reports, per stored
// label, how many records each hypothesis accepts.
inline json CmdEvaluate(const RunConfig& cfg) {
  CheckConfig(cfg);
  if (cfg.data_dirs.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "evaluate takes exactly one --data directory");
  }
  const Dataset data = ReadDataset(cfg.data_dirs.front());
  std::vector<dsl::NamedStatement> hypotheses;
  if (!cfg.statement_file.empty()) {
    hypotheses = internal::LoadStatements(cfg);
  } else if (!cfg.statement_id.empty()) {
    const auto& entry = data.oracles.Get(cfg.statement_id);
    if (entry.latent) {
      throw Error(ErrorCode::kUnknownStatementId,
                  "'" + cfg.statement_id + "' is a latent oracle, not a statement");
    }
    hypotheses = {{cfg.statement_id, entry.statement}};
  } else {
    throw Error(ErrorCode::kMissingStatement,
                "evaluate needs a hypothesis (--statement FILE or --statement-id ID)");
  }
  const dsl::EvalContext ctx = dsl::EvalContext::From(cfg.universe, cfg.gestalt);
  json results = json::array();
  for (const auto& h : hypotheses) {
    std::map<Label, std::pair<std::size_t, std::size_t>> table;  // label -> (holds, fails)
    for (Label l : {Label::kTrue, Label::kFalse, Label::kCounterfactual}) table[l] = {0, 0};
    std::size_t agree = 0;
    for (const auto& r : data.records) {
      const bool holds = dsl::Evaluate(h.statement, r.figure(), ctx);
      (holds ? table[r.label].first : table[r.label].second)++;
      if (holds == (r.label == Label::kTrue)) ++agree;
    }
    json confusion = json::object();
    for (const auto& [label, counts] : table) {
      confusion[std::string(LabelName(label))] = {{"holds", counts.first},
                                                  {"fails", counts.second}};
    }
    results.push_back(json{{"id", h.id},
                           {"statement", dsl::ToSource(h.statement)},
                           {"holds", table[Label::kTrue].first + table[Label::kFalse].first +
                                         table[Label::kCounterfactual].first},
                           {"agreement", agree},
                           {"confusion", std::move(confusion)}});
  }
  return json{{"command", "evaluate"},
              {"data", cfg.data_dirs.front()},
              {"records", data.records.size()},
              {"hypotheses", std::move(results)}};
}

// Designs a compositional split over one or more datasets.
inline json CmdSplit(const RunConfig& cfg) {
  CheckConfig(cfg);
  if (cfg.data_dirs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "split needs at least one --data directory");
  }
  dsl::StatementLibrary library;
  std::vector<splits::SplitRecord> records;
  std::set<std::string> ids;
  for (const auto& dir : cfg.data_dirs) {
    const Dataset data = ReadDataset(dir);
    for (const auto& [id, entry] : data.oracles.entries()) {
      if (entry.latent) continue;
      auto [it, inserted] = library.emplace(id, entry.statement);
      if (!inserted && dsl::ToSource(it->second) != dsl::ToSource(entry.statement)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "statement id '" + id + "' means different statements in different datasets");
      }
    }
    for (const auto& r : data.records) {
      if (!ids.insert(r.id).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate record id '" + r.id + "'");
      }
      records.push_back({r.id, r.statement_id, r.objects});
    }
  }
  splits::SplitConfig split = cfg.split;
  split.extract.small_big_threshold = cfg.universe.small_big_threshold;
  const splits::SplitResult result = splits::DesignSplit(records, library, split, cfg.seed);

  internal::WriteRunConfig(cfg);
  const std::filesystem::path out(cfg.out_dir);
  auto lines = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& id : v) s += id + "\n";
    return s;
  };
  io::WriteFile(out / "train.txt", lines(result.train_ids));
  io::WriteFile(out / "test.txt", lines(result.test_ids));
  json metrics = {{"records", records.size()},
                  {"train", result.train_ids.size()},
                  {"test", result.test_ids.size()},
                  {"atom_divergence", result.atom_divergence},
                  {"compound_divergence", result.compound_divergence},
                  {"target_compound_div", split.target_compound_div},
                  {"max_atom_div", split.max_atom_div},
                  {"alpha_atoms", split.alpha_atoms},
                  {"alpha_compounds", split.alpha_compounds},
                  {"swaps", result.swaps},
                  {"stop", StopReasonName(result.stop)}};
  io::WriteFile(out / "metrics.json", metrics.dump(2) + "\n");
  json summary = {{"command", "split"}, {"out", cfg.out_dir}};
  summary.update(metrics);
  return summary;
}

// Re-renders every record of a dataset with the configured style.
inline json CmdRender(const RunConfig& cfg) {
  CheckConfig(cfg);
  if (cfg.data_dirs.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "render takes exactly one --data directory");
  }
  const Dataset data = ReadDataset(cfg.data_dirs.front());
  const std::filesystem::path out(cfg.out_dir);
  std::error_code ec;
  for (const char* sub : {"true", "false", "counterfactual"}) {
    std::filesystem::create_directories(out / sub, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot create '" + (out / sub).string() + "'");
  }
  ParallelFor(data.records.size(), cfg.sampler.threads, [&](std::size_t i) {
    const auto& r = data.records[i];
    io::WriteFile(out / r.image_path, RenderSvg(r.figure(), cfg.render));
  });
  return json{{"command", "render"}, {"out", cfg.out_dir}, {"images", data.records.size()}};
}

}  // namespace kandinsky::cli
