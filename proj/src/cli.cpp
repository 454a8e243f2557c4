#include "fbmclt/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "fbmclt/clt_lab.hpp"
#include "fbmclt/constants.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/fbm.hpp"
#include "fbmclt/functions.hpp"
#include "fbmclt/gaussian_analysis.hpp"
#include "fbmclt/parallel.hpp"

namespace fbmclt::cli {

namespace {

constexpr int kReportVersion = 1;

struct Outcome {
  Json result;
  bool passed = true;
  Json timings = Json::object();
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw PreconditionError("malformed number '" + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

// "a,b;c,d" -> [(a,b), (c,d)]
std::vector<TimeConfig::Interval> parse_intervals(const std::string& text) {
  std::vector<TimeConfig::Interval> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto v = parse_numbers(item, "--intervals");
    if (v.size() != 2) throw PreconditionError("each interval needs two endpoints 'a,b' (got '" + item + "')");
    out.push_back({v[0], v[1]});
  }
  return out;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_numbers(text, "--m")) {
    if (v != std::floor(v)) throw PreconditionError("exponents m_i must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Json quad_json(const QuadResult& q) {
  return Json{{"value", q.value}, {"error", q.error}, {"evaluations", q.evaluations}, {"converged", q.converged}};
}

double tolerance_or(const RunConfig& c, double fallback) { return c.tolerance > 0.0 ? c.tolerance : fallback; }

Outcome run_constants(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  const QuadResult q = c_integral(model);
  const double closed = c_closed(model);
  const double residual = std::abs(q.value - closed) / closed;
  const double tol = tolerance_or(c, 1e-8);
  Outcome o;
  o.passed = residual < tol;
  o.result = Json{{"integral", quad_json(q)}, {"closed", closed}, {"relative_residual", residual}, {"tolerance", tol}};
  return o;
}

Outcome run_norm(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  const double beta = c.beta.value_or(model.beta());
  const TestFunction f = parse_test_function(c.function, c.dim);
  const double tol = tolerance_or(c, 1e-6);
  Outcome o;
  o.result = Json{{"f", f.label()}, {"beta", beta}};
  std::optional<double> direct, fourier;
  if (c.method != "fourier") {
    const QuadResult q = norm_direct(f, beta);
    direct = q.value;
    o.result["direct"] = quad_json(q);
  }
  if (c.method != "direct") {
    const QuadResult q = norm_fourier(f, beta);
    fourier = q.value;
    o.result["fourier"] = quad_json(q);
  }
  o.passed = (!direct || *direct >= 0.0) && (!fourier || *fourier >= 0.0);
  if (direct && fourier) {
    const double gap = std::abs(*direct - *fourier) / std::abs(*fourier);
    o.result["relative_gap"] = gap;
    o.result["tolerance"] = tol;
    o.passed = o.passed && gap < tol;
  }
  return o;
}

Outcome run_moments(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  const TimeConfig config(model, parse_intervals(c.intervals), parse_orders(c.orders));
  const QuadResult q = joint_moment(config);
  Outcome o;
  o.passed = q.converged;
  Json intervals = Json::array();
  for (const auto& iv : config.intervals()) intervals.push_back({iv.a, iv.b});
  o.result = Json{{"intervals", intervals}, {"m", config.multi_index()}, {"moment", quad_json(q)}};
  return o;
}

Outcome run_simulate(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  const FbmGenerator gen(model, c.t, c.grid);
  const FbmPath path = gen.generate(c.seed);
  Outcome o;
  Json terminal = Json::array();
  for (int j = 0; j < model.dim(); ++j) terminal.push_back(path.at(j, c.grid));
  o.result = Json{{"grid_size", c.grid},
                  {"spacing", path.spacing()},
                  {"embedding_size", gen.synthesizer().embedding_size()},
                  {"min_eigenvalue", gen.synthesizer().min_eigenvalue()},
                  {"terminal_value", terminal}};
  if (!c.samples.empty()) {
    std::ostringstream csv;
    path.write_csv(csv);
    write_atomically(c.samples, csv.str());
    o.result["csv"] = c.samples;
  }
  return o;
}

Outcome run_clt_test(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  const TestFunction f = parse_test_function(c.function, c.dim);
  const CltReport r = clt_acceptance(f, model, c.t, c.n, c.grid, c.paths, c.seed, {}, c.conjecture);
  Outcome o;
  o.passed = r.passed;
  o.result = Json{{"exploratory", c.conjecture && !model.theorem_regime()},
                  {"ks", Json{{"statistic", r.ks.statistic}, {"p_value", r.ks.p_value}, {"passed", r.ks_passed}}},
                  {"variance", Json{{"empirical", r.empirical_variance},
                                    {"limit", r.limit_variance},
                                    {"ratio", r.variance_ratio},
                                    {"passed", r.variance_passed}}},
                  {"fourth_moment", Json{{"empirical", r.empirical_fourth},
                                         {"limit", r.limit_fourth},
                                         {"ratio", r.fourth_ratio}}},
                  {"kurtosis", Json{{"empirical", r.empirical_kurtosis}, {"limit", r.limit_kurtosis}}},
                  {"functional_mean", r.functional_mean}};
  if (!c.samples.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "# clt-test " << model.describe() << " f=" << f.label() << " n=" << c.n
        << " t=" << c.t << " M=" << c.grid << " seed=" << c.seed << "\n";
    csv << to_string(r.functional.tag) << "," << to_string(r.limit.tag) << "\n";
    for (std::size_t i = 0; i < r.functional.values.size(); ++i)
      csv << r.functional.values[i] << "," << r.limit.values[i] << "\n";
    write_atomically(c.samples, csv.str());
    o.result["samples_csv"] = c.samples;
  }
  return o;
}

Outcome run_verify(const RunConfig& c) {
  const std::vector<int> ids = c.full ? all_criteria() : quick_criteria();
  Outcome o;
  Json rows = Json::array();
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, VerifyOptions{c.seed});
    o.passed = o.passed && r.passed;
    rows.push_back(Json{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"details", r.details}});
    o.timings[std::to_string(id)] = Json{{"seconds", r.seconds}, {"budget_seconds", r.budget_seconds}};
  }
  o.result = Json{{"tier", c.full ? "full" : "quick"}, {"criteria", rows}};
  return o;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void validate(const RunConfig& c) {
  const HurstModel model(c.hurst, c.dim);
  if (c.subcommand == "constants" && !model.constant_regime())
    throw DomainError("the constant is finite only for 1/(d+2) < H < 1/d (" + model.describe() + ")");
  if (c.subcommand == "clt-test") {
    require_regime(model, c.conjecture);
    require_resolution(c.n, c.grid);
    if (c.paths < 2) throw PreconditionError("--paths must be at least 2");
  }
  if (c.subcommand == "simulate" || c.subcommand == "clt-test") {
    if (!is_power_of_two(c.grid)) throw PreconditionError("--grid must be a power of two");
    if (!(c.t > 0.0)) throw PreconditionError("--t must be positive");
  }
  if (c.quick && c.full) throw PreconditionError("--quick and --full are exclusive");
}

std::string default_report_path(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (const char* dir = std::getenv(kOutDirEnv); dir && *dir)
    return (std::filesystem::path(dir) / (c.subcommand + ".json")).string();
  return "";
}

}  // namespace

Json config_json(const RunConfig& c) {
  Json j{{"subcommand", c.subcommand},
         {"H", c.hurst},
         {"d", c.dim},
         {"f", c.function},
         {"beta", c.beta ? Json(*c.beta) : Json(nullptr)},
         {"method", c.method},
         {"intervals", c.intervals},
         {"m", c.orders},
         {"n", c.n},
         {"t", c.t},
         {"paths", c.paths},
         {"grid", c.grid},
         {"seed", c.seed},
         {"tolerance", c.tolerance},
         {"quick", c.quick},
         {"full", c.full},
         {"conjecture", c.conjecture},
         {"metadata", c.metadata},
         {"out", c.out},
         {"samples", c.samples},
         {"config", c.config_file}};
  return j;
}

std::vector<std::string> config_file_tokens(std::istream& in, const std::string& path) {
  static const std::vector<std::string> kBoolKeys{"quick", "full", "conjecture", "metadata"};
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw PreconditionError(path + ":" + std::to_string(lineno) + ": empty key");
    if (std::find(kBoolKeys.begin(), kBoolKeys.end(), key) != kBoolKeys.end()) {
      if (value == "true" || value == "1") {
        tokens.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw PreconditionError(path + ":" + std::to_string(lineno) + ": '" + key + "' takes true or false");
      }
      continue;
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory " + target.parent_path().string() + ": " + ec.message());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move report into place at " + path + ": " + ec.message());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Central limit theorems for additive functionals of fractional Brownian motion", "fbmclt"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", config.config_file, "Flat key = value file; command-line flags override it");

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--H", config.hurst, "Hurst index")->capture_default_str();
    sub->add_option("--d", config.dim, "Spatial dimension")->capture_default_str();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config.config_file, "Flat key = value file; flags override it");
    sub->add_option("--seed", config.seed, "Master seed")->capture_default_str();
    sub->add_option("--tolerance", config.tolerance, "Pass threshold (0 = subcommand default)");
    sub->add_option("--out", config.out, "JSON report path (default $FBMCLT_OUT_DIR/<subcommand>.json)");
    sub->add_flag("--metadata", config.metadata, "Add a metadata block with timestamp and timings");
  };

  auto* constants = app.add_subcommand("constants", "Limit constant by quadrature and in closed form");
  add_model(constants);
  add_common(constants);

  auto* norm = app.add_subcommand("norm", "Squared norm of a test function, direct and Fourier");
  add_model(norm);
  add_common(norm);
  norm->add_option("--f", config.function, "Test function")->capture_default_str();
  norm->add_option("--beta", config.beta, "Weight exponent (default 1/H - d)");
  norm->add_option("--method", config.method, "direct, fourier or both")
      ->check(CLI::IsMember({"direct", "fourier", "both"}))
      ->capture_default_str();

  auto* moments = app.add_subcommand("moments", "Joint moments of increments of W(L_t(0))");
  add_model(moments);
  add_common(moments);
  moments->add_option("--intervals", config.intervals, "Intervals 'a,b;c,d'")->capture_default_str();
  moments->add_option("--m", config.orders, "Exponents '2' or '2,2'")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "One fBm path on a uniform grid");
  add_model(simulate);
  add_common(simulate);
  simulate->add_option("--t", config.t, "Horizon")->capture_default_str();
  simulate->add_option("--grid", config.grid, "Grid size M (power of two)")->capture_default_str();
  simulate->add_option("--csv", config.samples, "Write the path as CSV");

  auto* clt = app.add_subcommand("clt-test", "Distributional comparison of F_n(t) with its mixed-normal limit");
  add_model(clt);
  add_common(clt);
  clt->add_option("--f", config.function, "Test function")->capture_default_str();
  clt->add_option("--n", config.n, "Scaling parameter n")->capture_default_str();
  clt->add_option("--t", config.t, "Time t")->capture_default_str();
  clt->add_option("--paths", config.paths, "Monte-Carlo paths per sample set")->capture_default_str();
  clt->add_option("--grid", config.grid, "Grid size M (power of two, M >= 16 n)")->capture_default_str();
  clt->add_option("--samples", config.samples, "Write raw samples as CSV");
  clt->add_flag("--conjecture", config.conjecture, "Allow 1/(d+2) < H <= 1/(d+1); results are exploratory");

  auto* verify = app.add_subcommand("verify", "Acceptance suite");
  add_common(verify);
  verify->add_flag("--quick", config.quick, "Quadrature and identity checks (default)");
  verify->add_flag("--full", config.full, "All criteria including Monte-Carlo suites");

  // Splice the config file in right after the subcommand so later flags win.
  std::vector<std::string> tokens(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::string path;
      if (tokens[i] == "--config" && i + 1 < tokens.size()) {
        path = tokens[i + 1];
      } else if (tokens[i].rfind("--config=", 0) == 0) {
        path = tokens[i].substr(9);
      } else {
        continue;
      }
      std::ifstream in(path);
      if (!in) throw PreconditionError("cannot read config file " + path);
      const auto extra = config_file_tokens(in, path);
      const auto sub = std::find_if(tokens.begin(), tokens.end(), [](const std::string& s) { return s.rfind("-", 0) != 0; });
      tokens.insert(sub == tokens.end() ? tokens.end() : sub + 1, extra.begin(), extra.end());
      break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<const char*> args{argc > 0 ? argv[0] : "fbmclt"};
  for (const auto& t : tokens) args.push_back(t.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) config.subcommand = sub->get_name();

  try {
    validate(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    if (config.subcommand == "constants") outcome = run_constants(config);
    else if (config.subcommand == "norm") outcome = run_norm(config);
    else if (config.subcommand == "moments") outcome = run_moments(config);
    else if (config.subcommand == "simulate") outcome = run_simulate(config);
    else if (config.subcommand == "clt-test") outcome = run_clt_test(config);
    else outcome = run_verify(config);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }

  Json report{{"report_version", kReportVersion},
              {"subcommand", config.subcommand},
              {"config", config_json(config)},
              {"result", outcome.result},
              {"passed", outcome.passed}};
  if (config.metadata) {
    report["metadata"] = Json{
        {"timestamp", utc_timestamp()},
        {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        {"workers", worker_count()},
        {"timings", outcome.timings}};
  }
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (const std::string path = default_report_path(config); !path.empty()) {
    try {
      write_atomically(path, text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitFail;
    }
  }
  return outcome.passed ? kExitPass : kExitFail;
}

}  // namespace fbmclt::cli
