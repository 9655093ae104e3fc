#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "diagline/enumerate.hpp"
#include "diagline/errors.hpp"
#include "diagline/experiments.hpp"
#include "diagline/expsum.hpp"
#include "diagline/instance.hpp"
#include "diagline/localdensity.hpp"
#include "diagline/realdensity.hpp"
#include "diagline/singularity.hpp"
#include "diagline/util.hpp"

using namespace diagline;
using nlohmann::json;

namespace {

struct Output {
  bool csv = false;
  std::string file;

  void emit(const json& j, const std::string& table) const {
    const std::string text = csv ? table : j.dump(2) + "\n";
    if (file.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(file);
    if (!out) throw InvalidInput("cannot write " + file);
    out << text;
  }
};

struct InstanceArgs {
  std::string source = "flagship";
  bool relaxed = false;

  Instance instance() const {
    auto preset = preset_instance(source);
    return preset ? *preset : load_instance(source);
  }
  LineSystem system() const {
    const Instance in = instance();
    return relaxed ? in.relaxed_system() : in.line_system();
  }
};

void add_instance(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("-i,--instance", a.source, "instance JSON file or preset (flagship, chain, quadratic6, singular3)")
      ->capture_default_str();
  cmd->add_flag("--relaxed", a.relaxed, "skip the n check on the base point");
}

void add_output(CLI::App* cmd, Output& o) {
  auto* json_flag = cmd->add_flag_callback("--json", [&o] { o.csv = false; }, "JSON on stdout (default)");
  cmd->add_flag("--csv", o.csv, "CSV on stdout")->excludes(json_flag);
  cmd->add_option("-o,--output", o.file, "write to a file instead of stdout");
}

std::string join_ints(const std::vector<std::int64_t>& v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

json witness_json(const std::optional<HenselWitness>& w) {
  if (!w) return nullptr;
  return {{"certified", w->certified}, {"nu", w->nu}, {"depth", w->depth}, {"z", w->z}};
}

int cmd_count(const InstanceArgs& ia, const Output& out, std::int64_t box, const std::string& method,
              unsigned threads, std::uint64_t budget) {
  const LineSystem ls = ia.system();
  CountOptions opt;
  opt.threads = threads;
  opt.memory_budget = budget;
  CountResult r;
  if (method == "naive")
    r = count_lines_naive(ls, box, opt);
  else if (method == "mitm")
    r = count_lines_mitm(ls, box, opt);
  else
    r = count_lines(ls, box, opt);
  json j = {{"count", r.count.str()},        {"box", r.box},        {"method", to_string(r.method)},
            {"seconds", r.wall_time},        {"join", r.join},      {"instance_digest", r.instance_digest}};
  out.emit(j, "count,box,method,seconds\n" + r.count.str() + "," + std::to_string(r.box) + "," +
                  to_string(r.method) + "," + format_double(r.wall_time) + "\n");
  return 0;
}

int cmd_arcs(const Output& out, int k, double X, std::optional<double> L, std::optional<double> Q, int samples,
             std::uint64_t seed) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  ArcParameters params = default_arc_parameters(k, X);
  if (L) params.L = *L;
  if (Q) params.Q = *Q;
  if (L && !Q) params.Q = std::pow(params.L, k);
  if (params.L >= 2) params.warning.clear();
  std::map<std::string, int> freq = {{"W1", 0}, {"W2", 0}, {"W3", 0}, {"W4", 0}};
  std::string table = "point,label,q,a\n";
  std::vector<double> alpha(static_cast<std::size_t>(k));
  for (int t = 0; t < samples; ++t) {
    std::string point;
    for (int j = 0; j < k; ++j) {
      alpha[static_cast<std::size_t>(j)] = counter_uniform(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(j));
      point += (j ? ";" : "") + format_double(alpha[static_cast<std::size_t>(j)]);
    }
    const ArcLabel lab = classify_arc(alpha, params);
    const std::string name = to_string(lab.cls);
    ++freq[name];
    const auto& w = lab.witness ? lab.witness : lab.one_dim;
    table += point + "," + name + "," + (w ? std::to_string(w->q) : "") + "," + (w ? join_ints(w->a) : "") + "\n";
  }
  json j = {{"k", k}, {"X", X}, {"L", params.L}, {"Q", params.Q}, {"samples", samples}, {"seed", std::to_string(seed)},
            {"labels", freq}};
  if (!params.warning.empty()) j["warning"] = params.warning;
  out.emit(j, table);
  return 0;
}

int cmd_densities(const InstanceArgs& ia, const Output& out, const std::string& primes_text, int h_max,
                  std::int64_t series_D) {
  const LineSystem ls = ia.system();
  json per = json::object();
  std::string table = "p,h,M_p(h),d_h\n";
  for (auto p : parse_int_list(primes_text)) {
    if (!is_prime(p)) throw InvalidInput(std::to_string(p) + " is not prime");
    const auto est = sigma_p_estimate(ls, p, h_max);
    std::vector<std::string> counts;
    for (std::size_t h = 0; h < est.counts.size(); ++h) {
      counts.push_back(est.counts[h].str());
      table += std::to_string(p) + "," + std::to_string(h + 1) + "," + est.counts[h].str() + "," +
               format_double(est.sequence[h]) + "\n";
    }
    per[std::to_string(p)] = {{"d_h", est.sequence}, {"M_p", counts},  {"value", est.value},
                              {"stabilized", est.stabilized}, {"witness", witness_json(est.witness)}};
  }
  const auto ser = truncated_singular_series(ls, series_D);
  json per_q = json::array();
  double prev = 0.0;
  for (std::size_t q = 0; q < ser.sequence.size(); ++q) {
    per_q.push_back({{"q", q + 1}, {"A", ser.sequence[q] - prev}});
    prev = ser.sequence[q];
  }
  const bool ok = std::fabs(ser.imag) < 1e-9;
  json j = {{"sigma_p", per},
            {"series", {{"D", series_D}, {"S_D", ser.value}, {"imag", ser.imag}, {"per_q", per_q}}},
            {"instance_digest", ls.digest()},
            {"checks", {{"series_imaginary_residue", ok}}}};
  out.emit(j, table);
  return ok ? 0 : 1;
}

int cmd_realdensity(const InstanceArgs& ia, const Output& out, const std::string& etas, std::uint64_t samples,
                    std::uint64_t seed, const std::string& Ds, double tol, double threshold, unsigned threads) {
  const LineSystem ls = ia.system();
  SlabSampler sm;
  sm.samples = samples;
  sm.seed = seed;
  sm.threads = threads;
  const auto slab = sigma_infinity_slab(ls, parse_double_list(etas), sm);
  IntegralConfig ic;
  ic.abs_tol = tol;
  const auto integral = extrapolate_singular_integral(ls, parse_double_list(Ds), ic);
  const auto chk = cross_check_real_density(slab.estimate, integral.estimate, threshold);
  json g = json::array(), I = json::array();
  std::string table = "table,x,value\n";
  for (std::size_t i = 0; i < slab.g.size(); ++i) {
    g.push_back({{"eta", slab.etas[i]}, {"g", slab.g[i]}, {"stderr", slab.g_error[i]}});
    table += "g," + format_double(slab.etas[i]) + "," + format_double(slab.g[i]) + "\n";
  }
  for (const auto& row : integral.table) {
    I.push_back({{"D", row.D}, {"I", row.value}, {"error", row.error_indicator}});
    table += "I," + format_double(row.D) + "," + format_double(row.value) + "\n";
  }
  const bool ok = chk.pass && !slab.rejected;
  json j = {{"g_table", g},
            {"sigma_slab", chk.sigma_slab},
            {"slab_rejected", slab.rejected},
            {"I_table", I},
            {"I_extrapolated", chk.I_extrapolated},
            {"rel_diff", chk.rel_diff},
            {"threshold", threshold},
            {"seed", std::to_string(seed)},
            {"instance_digest", ls.digest()},
            {"pass", ok}};
  out.emit(j, table);
  return ok ? 0 : 1;
}

int cmd_singular(const InstanceArgs& ia, const Output& out, const std::string& zfile, std::int64_t enumerate_box) {
  const LineSystem ls = ia.system();
  std::vector<std::vector<std::int64_t>> zs;
  if (!zfile.empty()) {
    std::ifstream in(zfile);
    if (!in) throw InvalidInput("cannot open " + zfile);
    json doc;
    try {
      in >> doc;
      zs = doc.get<std::vector<std::vector<std::int64_t>>>();
    } catch (const json::exception& e) {
      throw InvalidInput("z-list must be a JSON array of integer arrays: " + std::string(e.what()));
    }
  } else if (enumerate_box >= 0) {
    zs = enumerate_line_solutions(ls, enumerate_box);
  } else {
    throw InvalidInput("give --z FILE or --enumerate B");
  }
  const auto reports = classify_solutions(ls, zs);
  json arr = json::array();
  std::string table = "z,solves,guaranteed_nonsingular,rank,nonsingular\n";
  int guaranteed = 0, nonsingular = 0, exceptions = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    guaranteed += r.guaranteed_nonsingular;
    nonsingular += r.nonsingular;
    exceptions += r.guaranteed_nonsingular && !r.nonsingular;
    arr.push_back({{"z", zs[i]},
                   {"solves", r.solves},
                   {"clause_a", r.clause_a},
                   {"clause_b", r.clause_b},
                   {"guaranteed_nonsingular", r.guaranteed_nonsingular},
                   {"rank", r.rank},
                   {"nonsingular", r.nonsingular},
                   {"note", r.note}});
    table += join_ints(zs[i]) + "," + std::to_string(r.solves) + "," + std::to_string(r.guaranteed_nonsingular) +
             "," + std::to_string(r.rank) + "," + std::to_string(r.nonsingular) + "\n";
  }
  json j = {{"reports", arr},
            {"summary",
             {{"solutions", std::to_string(zs.size())},
              {"guaranteed", std::to_string(guaranteed)},
              {"nonsingular", std::to_string(nonsingular)},
              {"exceptions", std::to_string(exceptions)}}},
            {"instance_digest", ls.digest()}};
  out.emit(j, table);
  return exceptions == 0 ? 0 : 1;
}

struct ExperimentArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string json_file, csv_file, plot_file;
};

int cmd_experiment(const std::string& kind, const ExperimentArgs& ea, const Output& out, unsigned threads) {
  ExperimentConfig cfg = ea.config.empty() ? parse_config("") : load_config(ea.config);
  if (threads) set_config_value(cfg, "threads", std::to_string(threads));
  for (const auto& kv : ea.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  ExperimentReport rep;
  if (kind == "asymptotic")
    rep = run_asymptotic(cfg);
  else if (kind == "subconvexity")
    rep = run_subconvexity(cfg);
  else
    rep = run_density_suite(cfg);
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write " + path);
    f << text;
  };
  if (!ea.json_file.empty()) write(ea.json_file, rep.to_json().dump(2) + "\n");
  if (!ea.csv_file.empty()) write(ea.csv_file, rep.csv());
  if (!ea.plot_file.empty()) write(ea.plot_file, rep.plot_script());
  out.emit(rep.to_json(), rep.csv());
  for (const auto& c : rep.checks)
    std::fprintf(stderr, "%s %s: %s\n", c.pass ? "PASS" : c.informational ? "INFO" : "FAIL", c.name.c_str(),
                 c.detail.c_str());
  for (const auto& e : rep.errors) std::fprintf(stderr, "ERROR %s\n", e.c_str());
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral lines on diagonal hypersurfaces: counts, densities and checks"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("-t,--threads", threads, "worker threads (default: DIAGLINE_THREADS or all cores)");

  InstanceArgs ia;
  Output out;

  auto* count = app.add_subcommand("count", "exact count of lines in the box [-B, B]^s");
  std::int64_t box = 1;
  std::string method = "auto";
  std::uint64_t budget = 2ULL << 30;
  add_instance(count, ia);
  add_output(count, out);
  count->add_option("-B,--box", box)->required()->check(CLI::PositiveNumber);
  count->add_option("--method", method)->check(CLI::IsMember({"naive", "mitm", "auto"}))->capture_default_str();
  count->add_option("--memory-budget", budget, "bytes for the join tables")->capture_default_str();

  auto* arcs = app.add_subcommand("arcs", "label random points of the unit cube by arc class");
  int arc_k = 2, arc_samples = 1000;
  double arc_X = 100;
  std::optional<double> arc_L, arc_Q;
  std::uint64_t arc_seed = 1;
  add_output(arcs, out);
  arcs->add_option("-k", arc_k)->capture_default_str();
  arcs->add_option("-X,--X", arc_X)->capture_default_str();
  arcs->add_option("-L,--L", arc_L, "default X^(1/(8k^2))");
  arcs->add_option("-Q,--Q", arc_Q, "default L^k");
  arcs->add_option("--samples", arc_samples)->capture_default_str();
  arcs->add_option("--seed", arc_seed)->capture_default_str();

  auto* dens = app.add_subcommand("densities", "p-adic densities and the truncated singular series");
  std::string primes = "2,3,5,7";
  int h_max = 2;
  std::int64_t series_D = 10;
  add_instance(dens, ia);
  add_output(dens, out);
  dens->add_option("--primes", primes)->capture_default_str();
  dens->add_option("--h-max", h_max)->capture_default_str();
  dens->add_option("--series-D", series_D)->capture_default_str();

  auto* real = app.add_subcommand("realdensity", "real density by slab volumes and by the singular integral");
  std::string etas = "0.2,0.1,0.05", Ds = "4,8";
  std::uint64_t mc = 1'000'000, seed = 1;
  double tol = 0.02, threshold = 0.05;
  add_instance(real, ia);
  add_output(real, out);
  real->add_option("--eta", etas)->capture_default_str();
  real->add_option("--mc-samples", mc)->capture_default_str();
  real->add_option("--seed", seed)->capture_default_str();
  real->add_option("--D", Ds)->capture_default_str();
  real->add_option("--tol", tol, "absolute tolerance of the theta quadrature")->capture_default_str();
  real->add_option("--threshold", threshold, "max relative difference")->capture_default_str();

  auto* sing = app.add_subcommand("singular", "Jacobian rank and non-singularity guarantees per solution");
  std::string zfile;
  std::int64_t enum_box = -1;
  add_instance(sing, ia);
  add_output(sing, out);
  sing->add_option("--z", zfile, "JSON array of z vectors");
  sing->add_option("--enumerate", enum_box, "classify every solution in [-B, B]^s");

  ExperimentArgs ea;
  std::map<std::string, CLI::App*> experiments;
  for (const auto& [name, help] : {std::pair{"asymptotic", "growth of N(B) against the predicted constant"},
                                   std::pair{"subconvexity", "growth of the translation-system count"},
                                   std::pair{"check", "all density cross-checks on one instance"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_output(sub, out);
    sub->add_option("-c,--config", ea.config, "key = value file");
    sub->add_option("--set", ea.sets, "override, key=value (repeatable)");
    sub->add_option("--report", ea.json_file, "also write the JSON report here");
    sub->add_option("--tables", ea.csv_file, "also write the CSV tables here");
    sub->add_option("--plot", ea.plot_file, "write a gnuplot script here");
    experiments[name] = sub;
  }
  auto* defaults = app.add_subcommand("defaults", "print the default experiment config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*count) return cmd_count(ia, out, box, method, threads, budget);
    if (*arcs) return cmd_arcs(out, arc_k, arc_X, arc_L, arc_Q, arc_samples, arc_seed);
    if (*dens) return cmd_densities(ia, out, primes, h_max, series_D);
    if (*real) return cmd_realdensity(ia, out, etas, mc, seed, Ds, tol, threshold, threads);
    if (*sing) return cmd_singular(ia, out, zfile, enum_box);
    if (*defaults) {
      std::cout << default_config_text();
      return 0;
    }
    for (const auto& [name, sub] : experiments)
      if (*sub) return cmd_experiment(name, ea, out, threads);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
