#pragma once

// Desk-scale reproductions: growth of line counts, the subconvex count of the
// translation system, and the local/real density cross-checks. Configuration
// is a flat key = value file; reports are JSON plus CSV tables.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diagline/bigint.hpp"
#include "diagline/instance.hpp"

namespace diagline {

std::string version();

struct ExperimentConfig {
  // Canonical key/value text; every typed field below is derived from it.
  std::map<std::string, std::string> entries;

  int k = 0;
  std::vector<std::int64_t> c;
  std::optional<Instance> instance;  // present when y and n are known

  std::vector<std::int64_t> boxes;
  std::vector<std::int64_t> xs;
  std::vector<std::int64_t> primes;
  int h_max = 2;
  int series_H = 2;
  std::int64_t series_D = 10;
  std::vector<double> etas;
  std::vector<double> Ds;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::uint64_t memory_budget = 2ULL << 30;
  double slope_tol = 0.75;
  double constant_tol = 0.35;
  double rel_diff_tol = 0.05;
  double quad_tol = 0.02;
  std::int64_t averaging_max_x = 8;      // averaging check only for X up to this
  double density_work = 1e9;             // caps h per prime for the residue counts

  std::string hash() const;  // FNV-1a of the canonical key/value text
};

// Parses "a = b" lines ('#' starts a comment). Unknown keys are refused.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Sets one key (CLI override) and re-derives the typed fields.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// All keys with their defaults, as config text.
std::string default_config_text();

// "3..8", "2,3,5", "4,6,8..10".
std::vector<std::int64_t> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

struct CheckResult {
  std::string name;
  bool pass = false;
  bool informational = false;  // reported, never fails the run
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json results = nlohmann::json::object();
  std::map<std::string, std::string> tables;  // name -> CSV text
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  nlohmann::json provenance = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
  std::string csv() const;
  std::string plot_script() const;  // gnuplot commands; empty if nothing to plot
};

ExperimentReport run_asymptotic(const ExperimentConfig& cfg);
ExperimentReport run_subconvexity(const ExperimentConfig& cfg);
ExperimentReport run_density_suite(const ExperimentConfig& cfg);

}  // namespace diagline
