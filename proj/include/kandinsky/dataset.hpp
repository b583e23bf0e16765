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

// Dataset records, the label oracles that justify them, and the on-disk
// layout:
//
//   <dir>/manifest.jsonl      one record per line, in record order
//   <dir>/oracles.json        how each statement id is evaluated
//   <dir>/{true,false,counterfactual}/<id>.svg
//
// Labels are re-checked against the oracles on write and on read.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kandinsky/challenges.hpp"
#include "kandinsky/errors.hpp"
#include "kandinsky/evaluate.hpp"
#include "kandinsky/model.hpp"
#include "kandinsky/parallel.hpp"
#include "kandinsky/render.hpp"
#include "kandinsky/sampler.hpp"
#include "kandinsky/statement.hpp"

namespace kandinsky {

enum class Label { kTrue, kFalse, kCounterfactual };

inline std::string_view LabelName(Label l) {
  switch (l) {
    case Label::kTrue: return "true";
    case Label::kFalse: return "false";
    case Label::kCounterfactual: return "counterfactual";
  }
  return "?";
}

inline std::optional<Label> ParseLabel(std::string_view text) {
  for (Label l : {Label::kTrue, Label::kFalse, Label::kCounterfactual}) {
    if (LabelName(l) == text) return l;
  }
  return std::nullopt;
}

struct DatasetRecord {
  std::string id;
  Label label = Label::kTrue;
  std::string statement_id;
  std::uint64_t seed = 0;  // seed of the stream that produced the figure
  std::vector<ObjectSpec> objects;
  std::optional<std::vector<challenges::LatentRegion>> latent;
  std::string image_path;
  // Counterfactuals only: the record they were derived from and the edits.
  std::optional<std::string> source_id;
  std::optional<std::vector<sampler::EditOp>> edits;

  Figure figure() const { return Figure{objects}; }

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

inline std::string RecordId(const std::string& statement_id, Label label, std::size_t index) {
  std::string n = std::to_string(index);
  if (n.size() < 6) n.insert(0, 6 - n.size(), '0');
  return statement_id + "-" + std::string(LabelName(label)) + "-" + n;
}

inline std::string ImagePath(const std::string& id, Label label) {
  return std::string(LabelName(label)) + "/" + id + ".svg";
}

// ---------------------------------------------------------------------------
// Label oracles
// ---------------------------------------------------------------------------

inline constexpr std::string_view kLatentOracle = "challenge-1";

// Maps statement ids to the function that decides membership. Statement ids
// evaluate a DSL statement; the latent oracle checks challenge-1 region
// rules against the record's latent metadata.
class OracleLibrary {
 public:
  struct Entry {
    std::string id;
    bool latent = false;
    dsl::Statement statement;
    dsl::EvalContext context;
  };

  void AddStatement(const std::string& id, dsl::Statement statement, dsl::EvalContext context) {
    entries_[id] = Entry{id, false, std::move(statement), context};
  }
  void AddLatent(const std::string& id = std::string(kLatentOracle)) {
    entries_[id] = Entry{id, true, {}, {}};
  }

  const Entry& Get(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) {
      throw Error(ErrorCode::kUnknownStatementId, "unknown statement id '" + id + "'");
    }
    return it->second;
  }
  bool Has(const std::string& id) const { return entries_.count(id) > 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Whether the record's figure belongs to its statement's pattern.
  bool Member(const DatasetRecord& r) const {
    const Entry& e = Get(r.statement_id);
    if (e.latent) {
      if (!r.latent) {
        throw Error(ErrorCode::kLabelInconsistency,
                    "record '" + r.id + "' has no latent regions to check");
      }
      return challenges::ValidateChallenge1(r.figure(), *r.latent).ok();
    }
    return dsl::Evaluate(e.statement, r.figure(), e.context);
  }

  // Throws LabelInconsistency unless the stored label matches the oracle.
  void Check(const DatasetRecord& r) const {
    const bool member = Member(r);
    if (member != (r.label == Label::kTrue)) {
      throw Error(ErrorCode::kLabelInconsistency,
                  "record '" + r.id + "' is labelled " + std::string(LabelName(r.label)) +
                      " but statement '" + r.statement_id + "' evaluates to " +
                      (member ? "true" : "false"));
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace io {

using json = nlohmann::ordered_json;

inline json ObjectToJson(const ObjectSpec& o) {
  return json{{"shape", ShapeName(o.shape)},
              {"color", ColorName(o.color)},
              {"size", o.size},
              {"x", o.x},
              {"y", o.y}};
}

inline std::string Need(const json& j, const char* key) {
  return "missing or mistyped field '" + std::string(key) + "' in " + j.dump();
}

template <typename T>
T Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::runtime_error(Need(j, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(Need(j, key));
  }
}

inline double RealField(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw std::runtime_error(Need(j, key));
  }
  return j.at(key).get<double>();
}

inline ObjectSpec ObjectFromJson(const json& j) {
  ObjectSpec o;
  const std::string shape = Field<std::string>(j, "shape");
  const std::string color = Field<std::string>(j, "color");
  const auto s = ParseShape(shape);
  const auto c = ParseColor(color);
  if (!s) throw std::runtime_error("unknown shape '" + shape + "'");
  if (!c) throw std::runtime_error("unknown color '" + color + "'");
  o.shape = *s;
  o.color = *c;
  o.size = RealField(j, "size");
  o.x = RealField(j, "x");
  o.y = RealField(j, "y");
  return o;
}

inline json RegionToJson(const challenges::LatentRegion& r) {
  return json{{"shape", ShapeName(r.region_shape)},
              {"x", r.cx},
              {"y", r.cy},
              {"size", r.size},
              {"members", r.members}};
}

inline challenges::LatentRegion RegionFromJson(const json& j) {
  challenges::LatentRegion r;
  const std::string shape = Field<std::string>(j, "shape");
  const auto s = ParseShape(shape);
  if (!s) throw std::runtime_error("unknown region shape '" + shape + "'");
  r.region_shape = *s;
  r.cx = RealField(j, "x");
  r.cy = RealField(j, "y");
  r.size = RealField(j, "size");
  r.members = Field<std::vector<std::size_t>>(j, "members");
  return r;
}

inline json EditToJson(const sampler::EditOp& e) {
  return json{{"kind", sampler::EditKindName(e.kind)},
              {"target", e.target},
              {"value", ObjectToJson(e.value)}};
}

inline sampler::EditOp EditFromJson(const json& j) {
  sampler::EditOp e;
  const std::string kind = Field<std::string>(j, "kind");
  const auto k = sampler::ParseEditKind(kind);
  if (!k) throw std::runtime_error("unknown edit kind '" + kind + "'");
  e.kind = *k;
  e.target = Field<std::size_t>(j, "target");
  if (!j.contains("value")) throw std::runtime_error(Need(j, "value"));
  e.value = ObjectFromJson(j.at("value"));
  return e;
}

inline json RecordToJson(const DatasetRecord& r) {
  json objects = json::array();
  for (const auto& o : r.objects) objects.push_back(ObjectToJson(o));
  json j = {{"id", r.id},
            {"label", LabelName(r.label)},
            {"statement_id", r.statement_id},
            {"seed", r.seed},
            {"objects", std::move(objects)},
            {"image_path", r.image_path}};
  if (r.latent) {
    json regions = json::array();
    for (const auto& region : *r.latent) regions.push_back(RegionToJson(region));
    j["latent"] = json{{"regions", std::move(regions)}};
  } else {
    j["latent"] = nullptr;
  }
  if (r.source_id) j["source_id"] = *r.source_id;
  if (r.edits) {
    json edits = json::array();
    for (const auto& e : *r.edits) edits.push_back(EditToJson(e));
    j["edits"] = std::move(edits);
  }
  return j;
}

inline DatasetRecord RecordFromJson(const json& j) {
  DatasetRecord r;
  r.id = Field<std::string>(j, "id");
  const std::string label = Field<std::string>(j, "label");
  const auto l = ParseLabel(label);
  if (!l) throw std::runtime_error("unknown label '" + label + "'");
  r.label = *l;
  r.statement_id = Field<std::string>(j, "statement_id");
  r.seed = Field<std::uint64_t>(j, "seed");
  if (!j.contains("objects") || !j.at("objects").is_array()) {
    throw std::runtime_error(Need(j, "objects"));
  }
  for (const auto& o : j.at("objects")) r.objects.push_back(ObjectFromJson(o));
  r.image_path = Field<std::string>(j, "image_path");
  if (j.contains("latent") && !j.at("latent").is_null()) {
    const json& latent = j.at("latent");
    if (!latent.contains("regions") || !latent.at("regions").is_array()) {
      throw std::runtime_error(Need(latent, "regions"));
    }
    r.latent.emplace();
    for (const auto& region : latent.at("regions")) r.latent->push_back(RegionFromJson(region));
  }
  if (j.contains("source_id")) r.source_id = Field<std::string>(j, "source_id");
  if (j.contains("edits")) {
    if (!j.at("edits").is_array()) throw std::runtime_error(Need(j, "edits"));
    r.edits.emplace();
    for (const auto& e : j.at("edits")) r.edits->push_back(EditFromJson(e));
  }
  return r;
}

inline json OraclesToJson(const OracleLibrary& oracles) {
  json list = json::array();
  for (const auto& [id, e] : oracles.entries()) {
    if (e.latent) {
      list.push_back(json{{"id", id}, {"kind", "latent"}});
      continue;
    }
    const auto& g = e.context.gestalt;
    list.push_back(json{{"id", id},
                        {"kind", "statement"},
                        {"statement", dsl::ToSource(e.statement)},
                        {"small_big_threshold", e.context.small_big_threshold},
                        {"gestalt",
                         {{"circular_residual_tol", g.circular_residual_tol},
                          {"symmetry_match_tol", g.symmetry_match_tol},
                          {"symmetry_axis_steps", g.symmetry_axis_steps},
                          {"cluster_eps_factor", g.cluster_eps_factor}}}});
  }
  return json{{"oracles", std::move(list)}};
}

inline OracleLibrary OraclesFromJson(const json& j) {
  OracleLibrary oracles;
  if (!j.contains("oracles") || !j.at("oracles").is_array()) {
    throw std::runtime_error(Need(j, "oracles"));
  }
  for (const auto& e : j.at("oracles")) {
    const std::string id = Field<std::string>(e, "id");
    const std::string kind = Field<std::string>(e, "kind");
    if (kind == "latent") {
      oracles.AddLatent(id);
    } else if (kind == "statement") {
      dsl::EvalContext ctx;
      ctx.small_big_threshold = RealField(e, "small_big_threshold");
      if (!e.contains("gestalt")) throw std::runtime_error(Need(e, "gestalt"));
      const json& g = e.at("gestalt");
      ctx.gestalt.circular_residual_tol = RealField(g, "circular_residual_tol");
      ctx.gestalt.symmetry_match_tol = RealField(g, "symmetry_match_tol");
      ctx.gestalt.symmetry_axis_steps = Field<int>(g, "symmetry_axis_steps");
      ctx.gestalt.cluster_eps_factor = RealField(g, "cluster_eps_factor");
      oracles.AddStatement(id, dsl::ParseStatement(Field<std::string>(e, "statement")), ctx);
    } else {
      throw std::runtime_error("unknown oracle kind '" + kind + "'");
    }
  }
  return oracles;
}

inline void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "failed writing '" + path.string() + "'");
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace io

// ---------------------------------------------------------------------------
// Dataset files
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<DatasetRecord> records;
  OracleLibrary oracles;
};

inline std::string ManifestText(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const auto& r : records) out += io::RecordToJson(r).dump() + "\n";
  return out;
}

// Writes manifest, oracle table and one SVG per record. Every label is
// checked before anything is written.
inline void WriteDataset(const Dataset& data, const std::filesystem::path& dir,
                         const RenderStyle& style = {}, int threads = 1) {
  CheckStyle(style);
  for (const auto& r : data.records) data.oracles.Check(r);
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"", "true", "false", "counterfactual"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) {
      throw Error(ErrorCode::kIoFailure,
                  "cannot create '" + (dir / sub).string() + "': " + ec.message());
    }
  }
  ParallelFor(data.records.size(), threads, [&](std::size_t i) {
    const DatasetRecord& r = data.records[i];
    io::WriteFile(dir / r.image_path, RenderSvg(r.figure(), style));
  });
  io::WriteFile(dir / "manifest.jsonl", ManifestText(data.records));
  io::WriteFile(dir / "oracles.json", io::OraclesToJson(data.oracles).dump(2) + "\n");
}

inline OracleLibrary ReadOracles(const std::filesystem::path& dir) {
  const auto path = dir / "oracles.json";
  const std::string text = io::ReadFile(path);
  try {
    return io::OraclesFromJson(io::json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParseFailure, path.string() + ": " + e.what());
  }
}

// Parses a manifest; errors carry the 1-based line number.
inline std::vector<DatasetRecord> ParseManifest(const std::string& text,
                                                const std::string& name = "manifest.jsonl") {
  std::vector<DatasetRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(io::RecordFromJson(io::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParseFailure,
                  name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

inline Dataset ReadDataset(const std::filesystem::path& dir) {
  Dataset data;
  data.oracles = ReadOracles(dir);
  const auto path = dir / "manifest.jsonl";
  data.records = ParseManifest(io::ReadFile(path), path.string());
  for (const auto& r : data.records) data.oracles.Check(r);
  return data;
}

}  // namespace kandinsky
