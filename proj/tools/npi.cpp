#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "npi/harness.hpp"

using namespace npi;

namespace {

// `key=value` pairs from --set.
Params parse_sets(const std::vector<std::string>& sets) {
  Params p;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Config, "--set expects key=value, got '" + s + "'");
    try {
      p.set(s.substr(0, eq), std::stod(s.substr(eq + 1)));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Config, "non-numeric value in --set " + s);
    }
  }
  return p;
}

// Config file: {"example": name, "params": {...}, "grid": N, "trials": T, "seed": S}.
// Command-line flags override file values.
std::string apply_config_file(const std::string& path, RunOptions& o) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad config json: ") + e.what());
  }
  if (!j.contains("example")) throw Error(ErrorKind::Config, "config needs an 'example' key");
  Params file;
  if (j.contains("params"))
    for (const auto& [k, v] : j["params"].items()) file.set(k, v.get<double>());
  file.merge(o.overrides);
  o.overrides = file;
  if (!o.grid && j.contains("grid")) o.grid = j["grid"].get<int>();
  if (!o.trials && j.contains("trials")) o.trials = j["trials"].get<int>();
  if (j.contains("seed")) o.seed = j["seed"].get<uint64_t>();
  return j["example"].get<std::string>();
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for nonlocal Poincare inequalities"};
  app.require_subcommand(1);

  std::string target, out_path, format = "json", sweep_key, sweep_values;
  std::optional<int> grid, trials;
  std::optional<uint64_t> seed;
  std::optional<double> p;
  bool no_timestamp = false, refine = false, list = false;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* s) {
    s->add_option("target", target, "registry example name or a JSON config file");
    s->add_option("--grid", grid, "cells across the widest side of Omega");
    s->add_option("--seed", seed, "random seed");
    s->add_option("--p", p, "exponent p");
    s->add_option("--out", out_path, "write the report here instead of stdout");
    s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_flag("--no-timestamp", no_timestamp, "omit the timestamp for byte-identical reports");
    s->add_option("--set", sets, "parameter override key=value (repeatable)");
  };

  auto* verify = app.add_subcommand("verify", "check the inequality on generated test functions");
  add_common(verify);
  verify->add_option("--trials", trials, "number of test functions");
  auto* sharp = app.add_subcommand("sharp", "p = 2 spectral constant against the bound");
  add_common(sharp);
  sharp->add_flag("--refine", refine, "also solve at twice the resolution");
  auto* absorption = app.add_subcommand("absorption", "absorption-index partition of the flow parameters");
  add_common(absorption);
  auto* jensen = app.add_subcommand("jensen", "reverse Jensen weight check");
  add_common(jensen);
  auto* constants = app.add_subcommand("constants", "evaluate a named constant; extra --key value pairs are inputs");
  add_common(constants);
  constants->allow_extras();
  auto* sweep = app.add_subcommand("sweep", "verify over a ladder of one parameter");
  add_common(sweep);
  sweep->add_option("--trials", trials, "number of test functions");
  sweep->add_option("--key", sweep_key, "parameter to vary")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  auto* ls = app.add_subcommand("list", "list registry examples and constants");
  ls->add_flag("--all", list);

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  const std::string command = cmd->get_name();
  if (command == "list") {
    for (const auto& [k, b] : registry()) std::cout << k << "\n";
    std::cout << "constants:";
    for (const auto& c : constant_names()) std::cout << ' ' << c;
    std::cout << "\n";
    return 0;
  }

  RunOptions o;
  std::string example = target;
  RunOutcome result;
  int code = 0;
  try {
    o.overrides = parse_sets(sets);
    if (p) o.overrides.set("p", *p);
    o.grid = grid;
    o.trials = trials;
    o.refine = refine;
    if (target.size() > 5 && target.substr(target.size() - 5) == ".json") example = apply_config_file(target, o);
    if (seed) o.seed = *seed;
    if (command == "constants") {
      auto extras = cmd->remaining();
      for (size_t i = 0; i < extras.size(); ++i) {
        std::string k = extras[i];
        if (k.rfind("--", 0) != 0 || i + 1 >= extras.size())
          throw Error(ErrorKind::Config, "constants inputs are --key value pairs");
        o.overrides.set(k.substr(2), std::stod(extras[++i]));
      }
    }
    if (example.empty()) throw Error(ErrorKind::Config, "missing example name");

    auto t0 = std::chrono::steady_clock::now();
    if (command == "verify") result = run_verify(example, o);
    else if (command == "sharp") result = run_sharp(example, o);
    else if (command == "absorption") result = run_absorption(example, o);
    else if (command == "jensen") result = run_jensen(example, o);
    else if (command == "constants") result = run_constants(example, o);
    else result = run_sweep(example, sweep_key, parse_values(sweep_values), o);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!no_timestamp) {
      result.report["timestamp"] = utc_timestamp();
      result.report["wall_time_s"] = secs;
    }
    code = result.exit_code;
  } catch (const Error& e) {
    result.report = error_report(command, example, e);
    result.csv = std::string("error,") + kind_name(e.kind()) + "\n";
    code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    result.report = error_report(command, example, Error(ErrorKind::Config, e.what()));
    result.csv = "error,config\n";
    code = 1;
  }

  std::string text = format == "csv" ? result.csv : result.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    f << text;
  }
  if (result.report.contains("error")) std::cerr << "error: " << result.report["error"]["message"].get<std::string>() << "\n";
  return code;
}
