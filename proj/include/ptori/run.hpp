#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ptori/io.hpp"

namespace ptori {

struct CliRequest {
  std::string command;      // solve-map, solve-flow, helicoure, oscillator, hecu, diagnose-operators, compare
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;      // empty: the summary goes to stdout only
  std::optional<int> order;
  std::optional<std::string> branch;
  std::vector<std::string> inputs;  // compare: two manifold.json files or run directories
};

json load_config_file(const std::string& path);

// One run of a solve or diagnose command. Artifacts go to out_dir when it is not empty.
json run_once(const std::string& command, const json& config, const std::string& out_dir);

// compare two runs given as manifold.json paths or run directories
json run_compare(const std::string& a, const std::string& b, double rel_tol = 1e-14);

// machine-readable error record printed on stderr
json error_json(const std::string& kind, int exit_code, const std::string& message);

// Whole CLI invocation including sweeps; returns the exit code and writes the error JSON to err.
int run_cli(const CliRequest& req, std::ostream& out, std::ostream& err);

}  // namespace ptori
