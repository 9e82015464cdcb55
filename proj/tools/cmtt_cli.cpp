// Batch driver: cmtt check|normalize|translate|erase [options] FILES...
//
// Exit status: 0 when every declaration succeeds, 1 when some declaration
// fails, 2 on usage or parse errors.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "cmtt/cmtt.hpp"
#include "report_json.hpp"

namespace {

using nlohmann::ordered_json;

bool use_color() {
  if (const char* c = std::getenv("CMTT_COLOR")) {
    std::string v = c;
    if (v == "always") return true;
    if (v == "never") return false;
  }
  if (std::getenv("NO_COLOR")) return false;
  return isatty(fileno(stdout));
}

struct Paint {
  bool on;
  std::string operator()(const char* code, const std::string& s) const {
    return on ? std::string("\033[") + code + "m" + s + "\033[0m" : s;
  }
};

void print_text(const cmtt::FileReport& r, cmtt::Command cmd, const Paint& paint) {
  if (r.parse_failure) {
    std::cout << r.file << ": " << paint("31", "parse error") << ": " << r.parse_failure->message << '\n';
    return;
  }
  for (const auto& d : r.decls) {
    std::cout << r.file << ':' << d.line << ": " << d.name << ' ';
    switch (d.status) {
      case cmtt::Status::Ok:
        std::cout << paint("32", "ok") << " : " << d.type << '\n';
        if (!d.output.empty()) {
          if (cmd == cmtt::Command::Translate)
            std::cout << "  " << d.output << '\n';
          else
            std::cout << "  => " << d.output << " : " << d.output_type << '\n';
        }
        break;
      case cmtt::Status::Skipped:
        std::cout << paint("33", "skipped") << " (" << cmtt::to_string(cmd) << " does not apply to "
                  << cmtt::to_string(d.calculus) << ")\n";
        break;
      case cmtt::Status::Failed: {
        const auto& f = *d.failure;
        std::cout << paint("31", "error") << ' ' << cmtt::to_string(f.kind) << ": " << f.message << '\n';
        if (!f.rule.empty()) std::cout << "  rule " << f.rule << '\n';
        if (!f.stack.empty()) std::cout << "  stack " << f.stack << '\n';
        break;
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual modal type theory checker"};
  app.require_subcommand(1);

  std::string variant;
  std::size_t fuel = cmtt::default_fuel;
  bool json = false;
  std::vector<std::string> files;

  std::vector<std::pair<CLI::App*, cmtt::Command>> commands;
  for (auto [name, cmd, help] : {
           std::tuple{"check", cmtt::Command::Check, "synthesize types and compare with declared ones"},
           std::tuple{"normalize", cmtt::Command::Normalize, "print beta normal forms of box declarations"},
           std::tuple{"translate", cmtt::Command::Translate, "extract temporal declarations into polymorphic K"},
           std::tuple{"erase", cmtt::Command::Erase, "print simply typed images of box declarations"},
       }) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--variant", variant, "override the modal variant of box declarations")
        ->check(CLI::IsMember({"k", "t", "k4", "s4"}));
    sub->add_option("--fuel", fuel, "reduction step limit")->check(CLI::PositiveNumber);
    sub->add_flag("--json", json, "emit a JSON report");
    sub->add_option("files", files, "source files")->required();
    commands.emplace_back(sub, cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cmtt::Options opt;
  for (const auto& [sub, cmd] : commands)
    if (sub->parsed()) opt.command = cmd;
  if (!variant.empty()) opt.variant = cmtt::parse_variant(variant);
  opt.fuel = fuel;

  std::vector<cmtt::FileReport> reports;
  for (const auto& f : files) reports.push_back(cmtt::process_file(f, opt));

  int status = 0;
  std::string first_failure;
  for (const auto& r : reports) {
    if (r.parse_failure) {
      status = 2;
      if (first_failure.empty()) first_failure = r.file;
      continue;
    }
    for (const auto& d : r.decls) {
      if (d.status != cmtt::Status::Failed) continue;
      if (status == 0) status = 1;
      if (first_failure.empty()) first_failure = r.file + ":" + std::to_string(d.line) + ": " + d.name;
    }
  }

  if (json) {
    ordered_json out;
    out["command"] = std::string(cmtt::to_string(opt.command));
    out["ok"] = status == 0;
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(cmtt::json::to_json(r));
    out["files"] = std::move(arr);
    std::cout << out.dump(2) << '\n';
  } else {
    Paint paint{use_color()};
    for (const auto& r : reports) print_text(r, opt.command, paint);
  }
  if (status != 0) std::cerr << "first failure: " << first_failure << '\n';
  return status;
}
