#include "diagline/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "diagline/enumerate.hpp"
#include "diagline/errors.hpp"
#include "diagline/localdensity.hpp"
#include "diagline/realdensity.hpp"
#include "diagline/util.hpp"

namespace diagline {

std::string version() { return "0.1.0"; }

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      {"instance", "none"},      {"system", "strict"},       {"k", ""},
      {"c", ""},                 {"y", ""},                  {"n", ""},
      {"boxes", ""},             {"xs", ""},                 {"primes", "2,3,5,7"},
      {"h_max", "2"},            {"series_H", "2"},          {"series_D", "10"},
      {"etas", "0.2,0.1,0.05"},  {"Ds", "4,8"},              {"mc_samples", "1000000"},
      {"seed", "1"},             {"threads", "0"},           {"memory_budget", "2147483648"},
      {"slope_tol", "0.75"},     {"constant_tol", "0.35"},   {"rel_diff_tol", "0.05"},
      {"quad_tol", "0.02"},      {"averaging_max_x", "8"},   {"density_work", "1e9"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("key " + key + ": not an integer: '" + t + "'");
  }
  if (pos != t.size()) throw InvalidInput("key " + key + ": not an integer: '" + t + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("key " + key + ": not a number: '" + t + "'");
  }
  if (pos != t.size()) throw InvalidInput("key " + key + ": not a number: '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

void derive(ExperimentConfig& cfg) {
  const auto& e = cfg.entries;
  auto get = [&e](const char* key) { return e.at(key); };

  cfg.instance.reset();
  cfg.k = 0;
  cfg.c.clear();
  const std::string inst = get("instance");
  if (inst != "none") {
    if (!get("k").empty() || !get("c").empty() || !get("y").empty() || !get("n").empty())
      throw InvalidInput("give either instance or k/c/y/n, not both");
    auto preset = preset_instance(inst);
    cfg.instance = preset ? *preset : load_instance(inst);
    cfg.k = cfg.instance->k;
    cfg.c = cfg.instance->c;
  } else if (!get("k").empty()) {
    cfg.k = static_cast<int>(parse_int(get("k"), "k"));
    cfg.c = parse_int_list(get("c"));
    const bool has_y = !get("y").empty(), has_n = !get("n").empty();
    if (has_y) {
      Instance in;
      in.k = cfg.k;
      in.c = cfg.c;
      in.y = parse_int_list(get("y"));
      if (in.y.size() != in.c.size()) throw InvalidInput("y and c must have equal length");
      in.n = has_n ? BigInt(trim(get("n"))) : diagonal_value(in.k, in.c, in.y);
      cfg.instance = in;
    } else if (has_n) {
      throw InvalidInput("n given without y");
    }
  }
  if (get("system") != "strict" && get("system") != "relaxed") throw InvalidInput("system must be strict or relaxed");

  cfg.boxes = get("boxes").empty() ? std::vector<std::int64_t>{} : parse_int_list(get("boxes"));
  cfg.xs = get("xs").empty() ? std::vector<std::int64_t>{} : parse_int_list(get("xs"));
  cfg.primes = get("primes").empty() ? std::vector<std::int64_t>{} : parse_int_list(get("primes"));
  for (auto p : cfg.primes)
    if (!is_prime(p)) throw InvalidInput("primes: " + std::to_string(p) + " is not prime");
  cfg.h_max = static_cast<int>(parse_int(get("h_max"), "h_max"));
  cfg.series_H = static_cast<int>(parse_int(get("series_H"), "series_H"));
  cfg.series_D = parse_int(get("series_D"), "series_D");
  cfg.etas = get("etas").empty() ? std::vector<double>{} : parse_double_list(get("etas"));
  cfg.Ds = get("Ds").empty() ? std::vector<double>{} : parse_double_list(get("Ds"));
  cfg.mc_samples = static_cast<std::uint64_t>(parse_int(get("mc_samples"), "mc_samples"));
  cfg.seed = static_cast<std::uint64_t>(parse_int(get("seed"), "seed"));
  cfg.threads = static_cast<unsigned>(parse_int(get("threads"), "threads"));
  cfg.memory_budget = static_cast<std::uint64_t>(parse_int(get("memory_budget"), "memory_budget"));
  cfg.slope_tol = parse_real(get("slope_tol"), "slope_tol");
  cfg.constant_tol = parse_real(get("constant_tol"), "constant_tol");
  cfg.rel_diff_tol = parse_real(get("rel_diff_tol"), "rel_diff_tol");
  cfg.quad_tol = parse_real(get("quad_tol"), "quad_tol");
  cfg.averaging_max_x = parse_int(get("averaging_max_x"), "averaging_max_x");
  cfg.density_work = parse_real(get("density_work"), "density_work");
  if (cfg.h_max < 1 || cfg.series_H < 0 || cfg.series_D < 1) throw InvalidInput("h_max, series_D must be >= 1");
}

bool relaxed(const ExperimentConfig& cfg) { return cfg.entries.at("system") == "relaxed"; }

LineSystem system_for(const ExperimentConfig& cfg) {
  if (!cfg.instance) throw InvalidInput("this run needs an instance (instance = ..., or k, c, y, n)");
  return relaxed(cfg) ? cfg.instance->relaxed_system() : cfg.instance->line_system();
}

CountOptions count_options(const ExperimentConfig& cfg) {
  CountOptions o;
  o.threads = cfg.threads;
  o.memory_budget = cfg.memory_budget;
  return o;
}

void stamp(ExperimentReport& rep, const ExperimentConfig& cfg, const std::string& kind) {
  rep.kind = kind;
  rep.provenance["version"] = version();
  rep.provenance["config_hash"] = cfg.hash();
  rep.provenance["seed"] = std::to_string(cfg.seed);
  rep.provenance["instance_digest"] = cfg.instance ? cfg.instance->digest() : std::string("none");
  nlohmann::json conf = nlohmann::json::object();
  for (const auto& [k, v] : cfg.entries) conf[k] = v;
  rep.provenance["config"] = conf;
}

void check(ExperimentReport& rep, std::string name, bool pass, std::string detail, bool informational = false) {
  rep.checks.push_back({std::move(name), pass, informational, std::move(detail)});
}

std::string num(double v) { return format_double(v); }

// Runs one stage, turning exceptions into report errors.
template <class F>
void stage(ExperimentReport& rep, const std::string& name, F&& body) {
  const auto t0 = Clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    rep.errors.push_back(name + ": " + e.what());
  }
  rep.timings[name] = since(t0);
}

// Largest h <= h_max whose residue histogram stays within `work` updates.
int feasible_h(const LineSystem& ls, std::int64_t p, int h_max, double work) {
  int h = 1;
  while (h < h_max) {
    const double m = std::pow(static_cast<double>(p), h + 1);
    if (std::pow(m, ls.k()) * m * ls.s() > work) break;
    ++h;
  }
  return h;
}

double product_sigma_p(const LineSystem& ls, const ExperimentConfig& cfg, ExperimentReport& rep, std::ostringstream& table) {
  double prod = 1.0;
  nlohmann::json per = nlohmann::json::object();
  table << "p,h,M_p(h),d_h\n";
  for (auto p : cfg.primes) {
    const int h = feasible_h(ls, p, cfg.h_max, cfg.density_work);
    if (h < cfg.h_max)
      rep.warnings.push_back("p=" + std::to_string(p) + ": h capped at " + std::to_string(h) + " by density_work");
    const auto est = sigma_p_estimate(ls, p, h);
    nlohmann::json j;
    j["h"] = h;
    j["value"] = est.value;
    j["stabilized"] = est.stabilized;
    j["d_h"] = est.sequence;
    std::vector<std::string> counts;
    for (const auto& m : est.counts) counts.push_back(m.str());
    j["M_p"] = counts;
    if (est.witness) {
      j["witness"] = {{"certified", est.witness->certified},
                      {"nu", est.witness->nu},
                      {"depth", est.witness->depth},
                      {"z", est.witness->z}};
    } else {
      j["witness"] = nullptr;
    }
    per[std::to_string(p)] = j;
    for (std::size_t i = 0; i < est.sequence.size(); ++i)
      table << p << ',' << i + 1 << ',' << est.counts[i].str() << ',' << num(est.sequence[i]) << '\n';
    prod *= est.value;
  }
  rep.results["sigma_p"] = per;
  return prod;
}

}  // namespace

std::string ExperimentConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
  return hex64(fnv1a64(text));
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw InvalidInput("empty element in list '" + text + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(part, "list"));
      continue;
    }
    const auto lo = parse_int(part.substr(0, dots), "list"), hi = parse_int(part.substr(dots + 2), "list");
    if (hi < lo) throw InvalidInput("empty range '" + part + "'");
    if (hi - lo > 1'000'000) throw InvalidInput("range too long '" + part + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw InvalidInput("empty element in list '" + text + "'");
    out.push_back(parse_real(part, "list"));
  }
  return out;
}

std::string default_config_text() {
  std::string out;
  for (const auto& [k, v] : defaults()) out += k + " = " + v + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : defaults()) cfg.entries[k] = v;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!cfg.entries.count(key)) throw InvalidInput("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    cfg.entries[key] = trim(line.substr(eq + 1));
  }
  derive(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (cfg.entries.empty())
    for (const auto& [k, v] : defaults()) cfg.entries[k] = v;
  if (!cfg.entries.count(key)) throw InvalidInput("unknown config key '" + key + "'");
  cfg.entries[key] = trim(value);
  derive(cfg);
}

bool ExperimentReport::passed() const {
  if (!errors.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass && !c.informational) return false;
  return true;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["provenance"] = provenance;
  j["results"] = results;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"informational", c.informational}, {"detail", c.detail}});
  j["checks"] = cs;
  j["tables"] = tables;
  j["warnings"] = warnings;
  j["errors"] = errors;
  j["passed"] = passed();
  j["timings"] = timings;
  return j;
}

std::string ExperimentReport::csv() const {
  std::string out;
  for (const auto& [name, body] : tables) out += "# " + name + "\n" + body + "\n";
  return out;
}

std::string ExperimentReport::plot_script() const {
  std::string table;
  if (tables.count("counts")) table = "counts";
  if (tables.count("upsilon")) table = "upsilon";
  if (table.empty()) return "";
  std::ostringstream g;
  g << "# gnuplot: extract the '" << table << "' table to " << table << ".csv first\n"
    << "set datafile separator ','\n"
    << "set logscale xy\n"
    << "set key autotitle columnhead\n"
    << "set xlabel '" << (table == "counts" ? "B" : "X") << "'\n"
    << "set ylabel 'count'\n"
    << "f(x) = a * x**b\n"
    << "fit f(x) '" << table << ".csv' using 1:2 via a, b\n"
    << "plot '" << table << ".csv' using 1:2 with points, f(x) with lines\n";
  return g.str();
}

ExperimentReport run_asymptotic(const ExperimentConfig& cfg) {
  if (cfg.boxes.empty()) throw InvalidInput("asymptotic run needs a nonempty box range");
  ExperimentReport rep;
  stamp(rep, cfg, "asymptotic");
  const LineSystem ls = system_for(cfg);
  const int k = ls.k(), s = ls.s();
  const double exponent = s - k * (k + 1) / 2.0;
  rep.results["exponent_target"] = exponent;
  if (s < k * (k + 1)) rep.warnings.push_back("s < k(k+1): the asymptotic formula is not expected to hold");
  if (relaxed(cfg)) rep.warnings.push_back("relaxed system: base point not verified against n");

  std::vector<std::pair<double, double>> points;
  std::vector<BigInt> counts;
  stage(rep, "counts", [&] {
    std::ostringstream t;
    t << "B,N,N_over_B^e\n";
    nlohmann::json arr = nlohmann::json::array();
    for (auto B : cfg.boxes) {
      if (B < 1) throw InvalidInput("boxes must be >= 1");
      const auto res = count_lines_mitm(ls, B, count_options(cfg));
      const double n = res.count.convert_to<double>();
      const double norm = n / std::pow(static_cast<double>(B), exponent);
      points.emplace_back(static_cast<double>(B), n);
      counts.push_back(res.count);
      arr.push_back({{"B", B}, {"N", res.count.str()}, {"normalized", norm}});
      t << B << ',' << res.count.str() << ',' << num(norm) << '\n';
    }
    rep.results["counts"] = arr;
    rep.tables["counts"] = t.str();
  });

  if (points.size() >= 3) {
    stage(rep, "fit", [&] {
      const auto fit = fit_growth_exponent(points);
      rep.results["slope"] = fit.slope;
      rep.results["fit_residual"] = fit.residual;
      check(rep, "slope", std::fabs(fit.slope - exponent) <= cfg.slope_tol,
            "slope " + num(fit.slope) + " vs " + num(exponent) + " +- " + num(cfg.slope_tol));
    });
  } else {
    rep.warnings.push_back("fewer than 3 boxes: no slope fit");
  }

  double sigma_inf = NAN, prod = NAN;
  stage(rep, "sigma_infinity", [&] {
    SlabSampler sm;
    sm.samples = cfg.mc_samples;
    sm.seed = cfg.seed;
    sm.threads = cfg.threads;
    const auto fit = sigma_infinity_slab(ls, cfg.etas, sm);
    sigma_inf = fit.estimate.value;
    rep.results["sigma_infinity"] = {{"value", sigma_inf},
                                     {"residual", fit.estimate.error_indicator},
                                     {"rejected", fit.rejected},
                                     {"g", fit.g},
                                     {"etas", fit.etas}};
    if (fit.rejected) throw std::runtime_error(fit.estimate.note);
  });
  stage(rep, "sigma_p", [&] {
    std::ostringstream t;
    prod = product_sigma_p(ls, cfg, rep, t);
    rep.results["product_sigma_p"] = prod;
    rep.tables["d_h"] = t.str();
  });
  stage(rep, "series", [&] {
    const auto ser = truncated_singular_series(ls, cfg.series_D);
    rep.results["singular_series"] = {{"D", cfg.series_D}, {"value", ser.value}, {"imag", ser.imag}};
    if (!std::isnan(prod) && prod != 0) {
      const double rel = std::fabs(ser.value - prod) / std::fabs(prod);
      check(rep, "series_vs_product", rel <= cfg.constant_tol,
            "S(D) " + num(ser.value) + " vs prod sigma_p " + num(prod), true);
    }
  });
  if (!std::isnan(sigma_inf) && !std::isnan(prod) && !counts.empty()) {
    const double C = sigma_inf * prod;
    const double Bmax = points.back().first;
    const double ratio = points.back().second / std::pow(Bmax, exponent);
    const double rel = std::fabs(ratio - C) / std::fabs(C);
    rep.results["constant"] = C;
    rep.results["ratio_at_max_box"] = ratio;
    rep.results["constant_rel_diff"] = rel;
    check(rep, "constant", rel <= cfg.constant_tol,
          "N(B)/B^e = " + num(ratio) + " vs C = " + num(C) + " (rel " + num(rel) + ")", true);
  }
  return rep;
}

ExperimentReport run_subconvexity(const ExperimentConfig& cfg) {
  if (cfg.k < 1 || cfg.c.empty()) throw InvalidInput("subconvexity run needs k and c");
  if (cfg.xs.empty()) throw InvalidInput("subconvexity run needs a nonempty X range");
  const int k = cfg.k, s = static_cast<int>(cfg.c.size());
  BigInt sum = 0;
  for (auto v : cfg.c) sum += v;
  if (sum == 0) throw InvalidInput("sum of coefficients is zero; the subconvex bound needs it nonzero");
  if (s >= k * (k + 1)) throw InvalidInput("subconvexity run needs s < k(k+1)");
  ExperimentReport rep;
  stamp(rep, cfg, "subconvexity");
  const double bound = (s - 1) / 2.0;
  rep.results["subconvex_exponent"] = bound;
  rep.results["convexity_exponent"] = s - k * (k + 1) / 2.0;

  std::vector<std::pair<double, double>> points;
  stage(rep, "upsilon", [&] {
    std::ostringstream t;
    t << "X,Upsilon\n";
    nlohmann::json arr = nlohmann::json::array();
    for (auto X : cfg.xs) {
      if (X < 1) throw InvalidInput("X must be >= 1");
      const auto res = count_translation_system(cfg.c, k, X, count_options(cfg));
      points.emplace_back(static_cast<double>(X), res.count.convert_to<double>());
      arr.push_back({{"X", X}, {"Upsilon", res.count.str()}});
      t << X << ',' << res.count.str() << '\n';
    }
    rep.results["upsilon"] = arr;
    rep.tables["upsilon"] = t.str();
  });
  if (points.size() >= 3) {
    stage(rep, "fit", [&] {
      const auto fit = fit_growth_exponent(points);
      rep.results["slope"] = fit.slope;
      rep.results["fit_residual"] = fit.residual;
      check(rep, "slope", fit.slope <= bound + 0.5,
            "slope " + num(fit.slope) + " <= " + num(bound + 0.5));
    });
  }
  stage(rep, "averaging", [&] {
    std::ostringstream t;
    t << "X,lhs,shifted_count,rhs,holds\n";
    nlohmann::json arr = nlohmann::json::array();
    for (auto X : cfg.xs) {
      if (X > cfg.averaging_max_x) continue;
      const auto r = verify_averaging_inequality(cfg.c, k, X, count_options(cfg));
      arr.push_back({{"X", X}, {"lhs", r.lhs.str()}, {"shifted_count", r.shifted_count.str()}, {"holds", r.holds}});
      t << X << ',' << r.lhs.str() << ',' << r.shifted_count.str() << ',' << num(r.rhs) << ',' << r.holds << '\n';
      check(rep, "averaging X=" + std::to_string(X), r.holds,
            r.lhs.str() + " <= " + r.shifted_count.str() + "/" + std::to_string(X));
    }
    rep.results["averaging"] = arr;
    rep.tables["averaging"] = t.str();
  });
  return rep;
}

ExperimentReport run_density_suite(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  stamp(rep, cfg, "densities");
  const LineSystem ls = system_for(cfg);
  if (relaxed(cfg)) rep.warnings.push_back("relaxed system: base point not verified against n");

  stage(rep, "sigma_p", [&] {
    std::ostringstream t;
    rep.results["product_sigma_p"] = product_sigma_p(ls, cfg, rep, t);
    rep.tables["d_h"] = t.str();
  });
  stage(rep, "identity", [&] {
    std::ostringstream t;
    t << "p,H,sum_A,p^{H(k-s)}M_p(H),delta\n";
    nlohmann::json arr = nlohmann::json::array();
    for (auto p : cfg.primes) {
      for (int H = 1; H <= cfg.series_H; ++H) {
        const std::string name = "identity p=" + std::to_string(p) + " H=" + std::to_string(H);
        try {
          const auto est = sigma_p_via_series(ls, p, H);
          const double delta = est.error_indicator;
          arr.push_back({{"p", p}, {"H", H}, {"sum_A", est.value}, {"count_side", est.comparison}, {"delta", delta}});
          t << p << ',' << H << ',' << num(est.value) << ',' << num(est.comparison) << ',' << num(delta) << '\n';
          check(rep, name, delta < 1e-6, "delta " + num(delta));
        } catch (const ConsistencyError& e) {
          check(rep, name, false, e.what());
        } catch (const BudgetExceeded& e) {
          rep.warnings.push_back(name + " skipped: " + e.what());
        }
      }
    }
    rep.results["identity"] = arr;
    rep.tables["identity"] = t.str();
  });
  stage(rep, "multiplicativity", [&] {
    const auto a2 = a_of_q(ls, 2), a3 = a_of_q(ls, 3), a6 = a_of_q(ls, 6);
    const double delta = std::abs(a6 - a2 * a3);
    rep.results["multiplicativity"] = {{"A2", {a2.real(), a2.imag()}},
                                       {"A3", {a3.real(), a3.imag()}},
                                       {"A6", {a6.real(), a6.imag()}},
                                       {"delta", delta}};
    check(rep, "multiplicativity A(6) = A(2)A(3)", delta < 1e-8, "delta " + num(delta));
  });
  stage(rep, "series", [&] {
    const auto ser = truncated_singular_series(ls, cfg.series_D);
    rep.results["singular_series"] = {{"D", cfg.series_D}, {"value", ser.value}, {"imag", ser.imag},
                                      {"partial_sums", ser.sequence}};
    check(rep, "series imaginary residue", std::fabs(ser.imag) < 1e-9, "imag " + num(ser.imag));
  });
  if (cfg.etas.empty() || cfg.Ds.empty()) {
    rep.warnings.push_back("real-density cross-check skipped: etas or Ds empty");
    return rep;
  }
  stage(rep, "real_density", [&] {
    SlabSampler sm;
    sm.samples = cfg.mc_samples;
    sm.seed = cfg.seed;
    sm.threads = cfg.threads;
    const auto slab = sigma_infinity_slab(ls, cfg.etas, sm);
    IntegralConfig ic;
    ic.abs_tol = cfg.quad_tol;
    const auto integral = extrapolate_singular_integral(ls, cfg.Ds, ic);
    const auto chk = cross_check_real_density(slab.estimate, integral.estimate, cfg.rel_diff_tol);
    std::ostringstream t;
    t << "eta,g\n";
    for (std::size_t i = 0; i < slab.g.size(); ++i) t << num(slab.etas[i]) << ',' << num(slab.g[i]) << '\n';
    rep.tables["g_table"] = t.str();
    std::ostringstream ti;
    ti << "D,I\n";
    for (const auto& row : integral.table) ti << num(row.D) << ',' << num(row.value) << '\n';
    rep.tables["I_table"] = ti.str();
    rep.results["real_density"] = {{"sigma_slab", chk.sigma_slab},
                                   {"slab_rejected", slab.rejected},
                                   {"I_extrapolated", chk.I_extrapolated},
                                   {"rel_diff", chk.rel_diff}};
    check(rep, "real density two routes", chk.pass && !slab.rejected,
          "slab " + num(chk.sigma_slab) + " vs I " + num(chk.I_extrapolated) + " rel " + num(chk.rel_diff));
  });
  return rep;
}

}  // namespace diagline
