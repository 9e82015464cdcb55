#pragma once

// JSON form of frontend reports, used by the CLI and its tests.

#include <optional>
#include <string>

#include <json.hpp>

#include "cmtt/frontend.hpp"

namespace cmtt::json {

using nlohmann::ordered_json;

inline std::optional<ErrorKind> error_kind_from(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::Unsupported); ++k)
    if (to_string(static_cast<ErrorKind>(k)) == s) return static_cast<ErrorKind>(k);
  return std::nullopt;
}

inline ordered_json to_json(const Failure& f) {
  ordered_json j;
  j["kind"] = std::string(to_string(f.kind));
  j["message"] = f.message;
  if (!f.rule.empty()) j["rule"] = f.rule;
  if (!f.path.empty()) j["path"] = f.path;
  if (!f.stack.empty()) j["stack"] = f.stack;
  return j;
}

inline Failure failure_from(const ordered_json& j) {
  Failure f{*error_kind_from(j.at("kind").get<std::string>()), j.at("message").get<std::string>(), {}, {}, {}};
  if (j.contains("rule")) f.rule = j["rule"].get<std::string>();
  if (j.contains("path")) f.path = j["path"].get<std::vector<unsigned>>();
  if (j.contains("stack")) f.stack = j["stack"].get<std::string>();
  return f;
}

inline ordered_json to_json(const DeclReport& d) {
  ordered_json e;
  e["name"] = d.name;
  e["calculus"] = std::string(to_string(d.calculus));
  if (!d.variant.empty()) e["variant"] = d.variant;
  e["line"] = d.line;
  e["status"] = std::string(to_string(d.status));
  if (!d.judgment.empty()) e["judgment"] = d.judgment;
  if (!d.type.empty()) e["type"] = d.type;
  if (!d.output.empty()) {
    e["output"] = d.output;
    e["output_type"] = d.output_type;
  }
  if (d.failure) e["error"] = to_json(*d.failure);
  return e;
}

inline DeclReport decl_from(const ordered_json& e) {
  DeclReport d;
  d.name = e.at("name").get<std::string>();
  const std::string calc = e.at("calculus").get<std::string>();
  d.calculus = calc == "circ" ? Calculus::Circ : calc == "forallbox" ? Calculus::ForallBox : Calculus::Box;
  d.variant = e.value("variant", "");
  d.line = e.at("line").get<unsigned>();
  const std::string st = e.at("status").get<std::string>();
  d.status = st == "ok" ? Status::Ok : st == "skipped" ? Status::Skipped : Status::Failed;
  d.judgment = e.value("judgment", "");
  d.type = e.value("type", "");
  d.output = e.value("output", "");
  d.output_type = e.value("output_type", "");
  if (e.contains("error")) d.failure = failure_from(e["error"]);
  return d;
}

inline ordered_json to_json(const FileReport& r) {
  ordered_json j;
  j["file"] = r.file;
  j["ok"] = r.ok();
  if (r.parse_failure) j["parse_error"] = to_json(*r.parse_failure);
  ordered_json decls = ordered_json::array();
  for (const auto& d : r.decls) decls.push_back(to_json(d));
  j["declarations"] = std::move(decls);
  return j;
}

inline FileReport file_from(const ordered_json& j) {
  FileReport r;
  r.file = j.at("file").get<std::string>();
  if (j.contains("parse_error")) r.parse_failure = failure_from(j["parse_error"]);
  for (const auto& e : j.at("declarations")) r.decls.push_back(decl_from(e));
  return r;
}

}  // namespace cmtt::json
