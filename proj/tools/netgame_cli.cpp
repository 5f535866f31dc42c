// Command-line front end: network generation, equilibrium solving, action
// simulation, likelihood estimation, Monte Carlo experiments, and the circle
// matching estimator, wired together through JSON configs and CSV files.
//
// Every subcommand is a pure function of its input files, its config, and the
// seed: re-running a command reproduces its outputs byte for byte.  Exit
// codes: 0 success, 2 config or schema error, 3 numerical non-convergence,
// 4 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netgame/estimate.hpp"
#include "netgame/game.hpp"
#include "netgame/io.hpp"
#include "netgame/network.hpp"
#include "netgame/npest.hpp"
#include "netgame/rng.hpp"
#include "netgame/simulate.hpp"

namespace {

using nlohmann::json;

constexpr const char* kSpecVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

// Two-sided normal critical values for the significance stars.
constexpr double kZ10 = 1.6448536269514722;
constexpr double kZ05 = 1.959963984540054;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

// Options shared by all subcommands.  --seed overrides the config's seed
// (generate, simulate) or base_seed (montecarlo); --threads overrides the
// montecarlo worker count; --out is prepended to relative output paths.
struct GlobalOpts {
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
};

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitIo, path + ": cannot open config file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw CliError(kExitConfig, path + ": " + err.what());
  }
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw CliError(kExitConfig, where + ": expected an object");
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw CliError(kExitConfig, where + ": unknown key '" + item.key() + "'");
}

const json& require_key(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw CliError(kExitConfig, where + ": missing key '" + key + "'");
  return *it;
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw CliError(kExitConfig, where + ": expected an integer");
  return v.get<int>();
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw CliError(kExitConfig, where + ": expected a number");
  return v.get<double>();
}

uint64_t as_u64(const json& v, const std::string& where) {
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0)))
    throw CliError(kExitConfig, where + ": expected a non-negative integer");
  return v.get<uint64_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw CliError(kExitConfig, where + ": expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw CliError(kExitConfig, where + ": expected true or false");
  return v.get<bool>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  return as_int(require_key(obj, key, where), where + "." + key);
}

int get_int_or(const json& obj, const std::string& key, int fallback, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_int(*it, where + "." + key);
}

double get_double_or(const json& obj, const std::string& key, double fallback,
                     const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_double(*it, where + "." + key);
}

uint64_t get_u64_or(const json& obj, const std::string& key, uint64_t fallback,
                    const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_u64(*it, where + "." + key);
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  return as_string(require_key(obj, key, where), where + "." + key);
}

bool get_bool_or(const json& obj, const std::string& key, bool fallback,
                 const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_bool(*it, where + "." + key);
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw CliError(kExitConfig, where + ": expected a non-empty array of rows");
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw CliError(kExitConfig, where + ": rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<int>(v.size()), static_cast<int>(cols));
  for (size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols)
      throw CliError(kExitConfig, where + ": rows must all have " + std::to_string(cols) +
                                      " entries");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) =
          as_double(v[r][c], where + " entry (" + std::to_string(r) + "," + std::to_string(c) +
                                 ")");
  }
  return m;
}

netgame::PayoffParams parse_params(const json& obj, const std::string& where) {
  netgame::PayoffParams params;
  params.beta = parse_matrix(require_key(obj, "beta", where), where + ".beta");
  params.alpha = parse_matrix(require_key(obj, "alpha", where), where + ".alpha");
  try {
    params.validate();
  } catch (const std::invalid_argument& err) {
    throw CliError(kExitConfig, where + ": " + err.what());
  }
  return params;
}

json params_to_json(const netgame::PayoffParams& params) {
  json beta = json::array(), alpha = json::array();
  for (int k = 0; k < params.beta.rows(); ++k) {
    json row = json::array();
    for (int c = 0; c < params.beta.cols(); ++c) row.push_back(params.beta(k, c));
    beta.push_back(std::move(row));
  }
  for (int k = 0; k < params.alpha.rows(); ++k) {
    json row = json::array();
    for (int l = 0; l < params.alpha.cols(); ++l) row.push_back(params.alpha(k, l));
    alpha.push_back(std::move(row));
  }
  return json{{"beta", std::move(beta)}, {"alpha", std::move(alpha)}};
}

// Covariate column specifications: [{"name": "x1", "dist": "uniform",
// "a": -0.5, "b": 0.5}, {"name": "x2", "dist": "normal", "mean": 0,
// "sd": 1}, {"name": "x3", "dist": "bernoulli", "p": 0.75}].
struct XSpecs {
  std::vector<netgame::XColumnSpec> cols;
  std::vector<std::string> names;
  json resolved = json::array();
};

XSpecs parse_covariate_specs(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw CliError(kExitConfig, where + ": expected a non-empty array of column specs");
  XSpecs specs;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string ctx = where + "[" + std::to_string(i) + "]";
    const json& col = v[i];
    if (!col.is_object()) throw CliError(kExitConfig, ctx + ": expected an object");
    const std::string name = get_string(col, "name", ctx);
    if (name.empty() || name.find(',') != std::string::npos)
      throw CliError(kExitConfig, ctx + ".name: must be non-empty without commas");
    const std::string dist = get_string(col, "dist", ctx);
    netgame::XColumnSpec spec;
    json entry{{"name", name}, {"dist", dist}};
    if (dist == "uniform") {
      check_keys(col, {"name", "dist", "a", "b"}, ctx);
      spec.dist = netgame::XColumnSpec::Dist::Uniform;
      spec.a = as_double(require_key(col, "a", ctx), ctx + ".a");
      spec.b = as_double(require_key(col, "b", ctx), ctx + ".b");
      if (!(spec.a < spec.b)) throw CliError(kExitConfig, ctx + ": requires a < b");
      entry["a"] = spec.a;
      entry["b"] = spec.b;
    } else if (dist == "normal") {
      check_keys(col, {"name", "dist", "mean", "sd"}, ctx);
      spec.dist = netgame::XColumnSpec::Dist::Normal;
      spec.a = as_double(require_key(col, "mean", ctx), ctx + ".mean");
      spec.b = as_double(require_key(col, "sd", ctx), ctx + ".sd");
      if (!(spec.b > 0)) throw CliError(kExitConfig, ctx + ".sd: must be positive");
      entry["mean"] = spec.a;
      entry["sd"] = spec.b;
    } else if (dist == "bernoulli") {
      check_keys(col, {"name", "dist", "p"}, ctx);
      spec.dist = netgame::XColumnSpec::Dist::Bernoulli;
      spec.a = as_double(require_key(col, "p", ctx), ctx + ".p");
      if (spec.a < 0 || spec.a > 1) throw CliError(kExitConfig, ctx + ".p: must lie in [0, 1]");
      entry["p"] = spec.a;
    } else {
      throw CliError(kExitConfig,
                     ctx + ".dist: expected 'uniform', 'normal', or 'bernoulli'");
    }
    specs.cols.push_back(spec);
    specs.names.push_back(name);
    specs.resolved.push_back(std::move(entry));
  }
  return specs;
}

netgame::MissingPolicy parse_missing(const json& obj, const std::string& where) {
  const auto it = obj.find("missing");
  // Absent cells default to zero, the convention survey data files use.
  if (it == obj.end()) return netgame::MissingPolicy::Zero;
  const std::string value = as_string(*it, where + ".missing");
  if (value == "zero") return netgame::MissingPolicy::Zero;
  if (value == "error") return netgame::MissingPolicy::Error;
  throw CliError(kExitConfig, where + ".missing: expected 'zero' or 'error'");
}

// ---------------------------------------------------------------------------
// Paths and output
// ---------------------------------------------------------------------------

std::string input_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw CliError(kExitIo, path + ": no such file");
  return path;
}

std::string resolve_out(const std::string& path, const GlobalOpts& global) {
  if (global.out_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(global.out_dir) / path).string();
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw CliError(kExitIo, path + ": cannot open for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw CliError(kExitIo, path + ": write failed");
}

json vector_to_json(const Eigen::VectorXd& v, const std::vector<std::string>& names) {
  json obj = json::object();
  for (int i = 0; i < v.size(); ++i) obj[names[i]] = v[i];
  return obj;
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

// Coefficient table with significance stars: one row per packed parameter,
// estimate column starred at the 10% (*) and 5% (**) levels by the normal
// z test, standard errors beside when available.
void print_coefficients(const std::vector<std::string>& names, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& se) {
  size_t width = std::string("coefficient").size();
  for (const auto& name : names) width = std::max(width, name.size());
  const bool have_se = se.size() == theta.size();
  const std::string rule(width + 37, '-');
  char line[256];
  std::cout << "  " << rule << "\n";
  std::snprintf(line, sizeof(line), "  %-*s  %14s %-2s  %14s\n", static_cast<int>(width),
                "coefficient", "estimate", "", "std. error");
  std::cout << line;
  std::cout << "  " << rule << "\n";
  for (int i = 0; i < theta.size(); ++i) {
    std::string stars;
    std::string se_text = "--";
    if (have_se) {
      se_text = fmt("%.6f", se[i]);
      const double z = std::abs(theta[i]) / se[i];
      if (z > kZ05)
        stars = "**";
      else if (z > kZ10)
        stars = "*";
    }
    std::snprintf(line, sizeof(line), "  %-*s  %14s %-2s  %14s\n", static_cast<int>(width),
                  names[i].c_str(), fmt("%.6f", theta[i]).c_str(), stars.c_str(),
                  se_text.c_str());
    std::cout << line;
  }
  std::cout << "  " << rule << "\n";
  std::cout << "  * significant at 10% level, ** significant at 5% level\n";
}

// ---------------------------------------------------------------------------
// Shared data loading
// ---------------------------------------------------------------------------

struct LoadedData {
  netgame::Dataset data;
  std::vector<std::string> covariate_names;
  int num_actions = 0;
};

// Reads the edges/covariates/outcomes triple named in the config.  The
// player count is the covariate row count; K defaults to the largest
// observed action.
LoadedData load_dataset(const json& cfg, const std::string& where) {
  const std::string covariates_path = input_file(get_string(cfg, "covariates", where));
  const std::string edges_path = input_file(get_string(cfg, "edges", where));
  const std::string outcomes_path = input_file(get_string(cfg, "outcomes", where));

  netgame::CovariateTable table =
      netgame::load_covariates(covariates_path, parse_missing(cfg, where));
  const int n = static_cast<int>(table.x.rows());
  netgame::DirectedNetwork net = netgame::load_edges(edges_path, n);
  std::vector<int> y = netgame::load_outcomes(outcomes_path, n);

  int num_actions = get_int_or(cfg, "K", *std::max_element(y.begin(), y.end()), where);
  if (num_actions < 1)
    throw CliError(kExitConfig, where + ": K must be at least 1 (all outcomes are action 0?)");

  LoadedData loaded{netgame::Dataset{netgame::GameState{std::move(net), std::move(table.x)},
                                     std::move(y)},
                    std::move(table.names), num_actions};
  try {
    loaded.data.state.validate();
    loaded.data.validate(num_actions);
  } catch (const std::invalid_argument& err) {
    throw CliError(kExitConfig, where + ": " + err.what());
  }
  return loaded;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_generate(const json& cfg, const GlobalOpts& global) {
  check_keys(cfg, {"network", "n", "seed", "covariates", "edges_out", "covariates_out"},
             "generate");
  const std::string kind = get_string(cfg, "network", "generate");
  if (kind != "circle" && kind != "random")
    throw CliError(kExitConfig, "generate.network: expected 'circle' or 'random'");
  const int n = get_int(cfg, "n", "generate");
  const uint64_t seed = global.seed.value_or(get_u64_or(cfg, "seed", 0, "generate"));
  XSpecs specs = parse_covariate_specs(require_key(cfg, "covariates", "generate"),
                                       "generate.covariates");
  const std::string edges_out =
      resolve_out(get_string(cfg, "edges_out", "generate"), global);
  const std::string covariates_out =
      resolve_out(get_string(cfg, "covariates_out", "generate"), global);

  // Sub-stream 0 drives the network and sub-stream 1 the covariates, the
  // same layout a Monte Carlo replication uses, so generate with seed s
  // reproduces replication r's data when s = derive_stream(base_seed, r).
  netgame::DirectedNetwork net = kind == "circle"
                                     ? netgame::generate_circle(n)
                                     : netgame::generate_random(n, netgame::derive_stream(seed, 0));
  netgame::Rng cov_rng(netgame::derive_stream(seed, 1));
  Eigen::MatrixXd x = netgame::draw_covariates(n, specs.cols, cov_rng);

  netgame::save_edges(edges_out, net);
  netgame::save_covariates(covariates_out, x, specs.names);

  int max_out = 0, max_in = 0;
  for (int i = 0; i < n; ++i) {
    max_out = std::max(max_out, net.num_friends(i));
    max_in = std::max(max_in, net.centrality(i));
  }
  std::cout << "network: " << kind << "  players: " << n << "  edges: " << net.num_edges()
            << "\n";
  std::cout << "out-degree mean: "
            << netgame::format_double(static_cast<double>(net.num_edges()) / n)
            << "  max: " << max_out << "  max centrality: " << max_in << "\n";
  std::cout << "wrote " << edges_out << "\n";
  std::cout << "wrote " << covariates_out << "\n";
  return kExitOk;
}

int cmd_solve(const json& cfg, const GlobalOpts& global) {
  check_keys(cfg,
             {"edges", "covariates", "missing", "beta", "alpha", "tol", "max_iter",
              "profile_out", "report_out"},
             "solve");
  const std::string covariates_path = input_file(get_string(cfg, "covariates", "solve"));
  const std::string edges_path = input_file(get_string(cfg, "edges", "solve"));
  netgame::CovariateTable table =
      netgame::load_covariates(covariates_path, parse_missing(cfg, "solve"));
  const int n = static_cast<int>(table.x.rows());
  netgame::GameState state{netgame::load_edges(edges_path, n), std::move(table.x)};

  netgame::PayoffParams params = parse_params(cfg, "solve");
  if (params.num_covariates() != state.x.cols())
    throw CliError(kExitConfig, "solve.beta: has " + std::to_string(params.num_covariates()) +
                                    " columns but the covariate file has " +
                                    std::to_string(state.x.cols()));

  netgame::SolveOptions options;
  options.tol = get_double_or(cfg, "tol", options.tol, "solve");
  options.max_iter = get_int_or(cfg, "max_iter", options.max_iter, "solve");
  const std::string profile_out = resolve_out(get_string(cfg, "profile_out", "solve"), global);

  auto [profile, report] = netgame::solve_equilibrium(state, params, options);
  netgame::save_profile(profile_out, profile);

  std::cout << "lambda: " << netgame::format_double(report.lambda)
            << "  iterations: " << report.iterations
            << "  final step: " << netgame::format_double(report.final_step)
            << "  converged: " << (report.converged ? "yes" : "no") << "\n";
  std::cout << "wrote " << profile_out << "\n";

  const json result{{"spec_version", kSpecVersion},
                    {"command", "solve"},
                    {"config",
                     {{"edges", edges_path},
                      {"covariates", covariates_path},
                      {"theta", params_to_json(params)},
                      {"tol", options.tol},
                      {"max_iter", options.max_iter},
                      {"profile_out", profile_out}}},
                    {"lambda", report.lambda},
                    {"iterations", report.iterations},
                    {"final_step", report.final_step},
                    {"converged", report.converged}};
  if (cfg.contains("report_out"))
    write_json_file(resolve_out(get_string(cfg, "report_out", "solve"), global), result);
  return report.converged ? kExitOk : kExitNumeric;
}

int cmd_simulate(const json& cfg, const GlobalOpts& global) {
  check_keys(cfg, {"profile", "seed", "outcomes_out"}, "simulate");
  const std::string profile_path = input_file(get_string(cfg, "profile", "simulate"));
  const uint64_t seed = global.seed.value_or(get_u64_or(cfg, "seed", 0, "simulate"));
  const std::string outcomes_out =
      resolve_out(get_string(cfg, "outcomes_out", "simulate"), global);

  netgame::ChoiceProfile profile = netgame::load_profile(profile_path);
  netgame::SimDraw draw = netgame::draw_actions(profile, seed);
  netgame::save_outcomes(outcomes_out, draw.actions);

  std::vector<int> counts(profile.num_actions() + 1, 0);
  for (int action : draw.actions) ++counts[action];
  std::cout << "players: " << profile.num_players() << "  seed: " << seed << "\n";
  for (size_t k = 0; k < counts.size(); ++k)
    std::cout << "action " << k << ": " << counts[k] << "\n";
  std::cout << "wrote " << outcomes_out << "\n";
  return kExitOk;
}

int cmd_estimate(const json& cfg, const GlobalOpts& global) {
  check_keys(cfg,
             {"edges", "covariates", "outcomes", "K", "missing", "h", "h0", "a", "init",
              "alpha_bound", "grad_tol", "step_tol", "max_iter", "solver_tol",
              "solver_max_iter", "std_errors", "result_out"},
             "estimate");
  LoadedData loaded = load_dataset(cfg, "estimate");
  const int n = loaded.data.state.net.num_players();

  const double h0 = get_double_or(cfg, "h0", 0.1, "estimate");
  const double a = get_double_or(cfg, "a", 0.5, "estimate");
  const int h = get_int_or(cfg, "h", netgame::choose_h(n, h0, a), "estimate");
  if (h < 0) throw CliError(kExitConfig, "estimate.h: must be non-negative");

  netgame::AmleOptions options;
  options.alpha_bound = get_double_or(cfg, "alpha_bound", options.alpha_bound, "estimate");
  options.grad_tol = get_double_or(cfg, "grad_tol", options.grad_tol, "estimate");
  options.step_tol = get_double_or(cfg, "step_tol", options.step_tol, "estimate");
  options.max_iter = get_int_or(cfg, "max_iter", options.max_iter, "estimate");
  options.solver_tol = get_double_or(cfg, "solver_tol", options.solver_tol, "estimate");
  options.solver_max_iter =
      get_int_or(cfg, "solver_max_iter", options.solver_max_iter, "estimate");
  options.compute_std_errors = get_bool_or(cfg, "std_errors", true, "estimate");
  if (cfg.contains("init")) {
    check_keys(cfg["init"], {"beta", "alpha"}, "estimate.init");
    options.init = parse_params(cfg["init"], "estimate.init");
  }

  netgame::EstimateResult result = netgame::amle(loaded.data, h, options);

  const std::vector<std::string> names =
      netgame::param_names(loaded.num_actions, loaded.covariate_names);
  const Eigen::VectorXd theta = netgame::pack_params(result.theta);
  print_coefficients(names, theta, result.std_errors);
  std::cout << "  average log-likelihood: " << fmt("%.6f", result.loglik) << "   h: " << h
            << "   players: " << n << "\n";
  std::cout << "  converged: " << (result.converged ? "yes" : "no")
            << "   iterations: " << result.iterations
            << "   projected gradient: " << netgame::format_double(result.grad_norm) << "\n";
  if (result.se_suppressed)
    std::cout << "  standard errors suppressed: information matrix condition "
              << netgame::format_double(result.fisher_condition) << "\n";

  json out{{"spec_version", kSpecVersion},
           {"command", "estimate"},
           {"config",
            {{"edges", get_string(cfg, "edges", "estimate")},
             {"covariates", get_string(cfg, "covariates", "estimate")},
             {"outcomes", get_string(cfg, "outcomes", "estimate")},
             {"K", loaded.num_actions},
             {"h", h},
             {"alpha_bound", options.alpha_bound},
             {"grad_tol", options.grad_tol},
             {"step_tol", options.step_tol},
             {"max_iter", options.max_iter},
             {"solver_tol", options.solver_tol},
             {"std_errors", options.compute_std_errors}}},
           {"h", h},
           {"converged", result.converged},
           {"iterations", result.iterations},
           {"grad_norm", result.grad_norm},
           {"loglik", result.loglik},
           {"theta_hat", vector_to_json(theta, names)},
           {"se", result.std_errors.size() > 0 ? vector_to_json(result.std_errors, names)
                                               : json()},
           {"se_suppressed", result.se_suppressed},
           {"fisher_condition", result.fisher_condition}};
  if (cfg.contains("result_out"))
    write_json_file(resolve_out(get_string(cfg, "result_out", "estimate"), global), out);
  return result.converged ? kExitOk : kExitNumeric;
}

int cmd_montecarlo(const json& cfg, const GlobalOpts& global) {
  check_keys(cfg,
             {"network", "n", "replications", "base_seed", "beta", "alpha", "covariates",
              "h", "h0", "a", "solver_tol", "estimation", "threads", "replications_out",
              "summary_out"},
             "montecarlo");
  netgame::McDesign design;
  const std::string kind = get_string(cfg, "network", "montecarlo");
  if (kind == "circle")
    design.network = netgame::McDesign::NetworkKind::Circle;
  else if (kind == "random")
    design.network = netgame::McDesign::NetworkKind::Random;
  else
    throw CliError(kExitConfig, "montecarlo.network: expected 'circle' or 'random'");
  design.n = get_int(cfg, "n", "montecarlo");
  design.replications = get_int(cfg, "replications", "montecarlo");
  if (design.replications < 1)
    throw CliError(kExitConfig, "montecarlo.replications: must be positive");
  design.base_seed = global.seed.value_or(get_u64_or(cfg, "base_seed", 0, "montecarlo"));
  design.theta = parse_params(cfg, "montecarlo");
  XSpecs specs = parse_covariate_specs(require_key(cfg, "covariates", "montecarlo"),
                                       "montecarlo.covariates");
  design.x = specs.cols;
  if (design.theta.num_covariates() != static_cast<int>(specs.cols.size()))
    throw CliError(kExitConfig, "montecarlo.beta: has " +
                                    std::to_string(design.theta.num_covariates()) +
                                    " columns but " + std::to_string(specs.cols.size()) +
                                    " covariates are specified");

  const double h0 = get_double_or(cfg, "h0", 0.1, "montecarlo");
  const double a = get_double_or(cfg, "a", 0.5, "montecarlo");
  design.h = get_int_or(cfg, "h", netgame::choose_h(design.n, h0, a), "montecarlo");
  if (design.h < 0) throw CliError(kExitConfig, "montecarlo.h: must be non-negative");
  design.solver_tol = get_double_or(cfg, "solver_tol", design.solver_tol, "montecarlo");

  // Per-replication standard errors are off by default: the summary only
  // needs the sampling spread of the point estimates.
  design.estimation.compute_std_errors = false;
  json est_resolved = json::object();
  if (cfg.contains("estimation")) {
    const json& est = cfg["estimation"];
    check_keys(est,
               {"alpha_bound", "grad_tol", "step_tol", "max_iter", "solver_tol",
                "solver_max_iter", "std_errors"},
               "montecarlo.estimation");
    auto& opts = design.estimation;
    opts.alpha_bound = get_double_or(est, "alpha_bound", opts.alpha_bound, "montecarlo.estimation");
    opts.grad_tol = get_double_or(est, "grad_tol", opts.grad_tol, "montecarlo.estimation");
    opts.step_tol = get_double_or(est, "step_tol", opts.step_tol, "montecarlo.estimation");
    opts.max_iter = get_int_or(est, "max_iter", opts.max_iter, "montecarlo.estimation");
    opts.solver_tol = get_double_or(est, "solver_tol", opts.solver_tol, "montecarlo.estimation");
    opts.solver_max_iter =
        get_int_or(est, "solver_max_iter", opts.solver_max_iter, "montecarlo.estimation");
    opts.compute_std_errors =
        get_bool_or(est, "std_errors", opts.compute_std_errors, "montecarlo.estimation");
  }
  est_resolved = {{"alpha_bound", design.estimation.alpha_bound},
                  {"grad_tol", design.estimation.grad_tol},
                  {"step_tol", design.estimation.step_tol},
                  {"max_iter", design.estimation.max_iter},
                  {"solver_tol", design.estimation.solver_tol},
                  {"std_errors", design.estimation.compute_std_errors}};

  const int threads = global.threads.value_or(get_int_or(cfg, "threads", 1, "montecarlo"));
  if (threads < 1) throw CliError(kExitConfig, "montecarlo.threads: must be positive");

  netgame::McResult result = netgame::run_montecarlo(design, threads);

  const std::vector<std::string> names = netgame::param_names(design.theta.num_actions(),
                                                              specs.names);
  if (cfg.contains("replications_out")) {
    const std::string path =
        resolve_out(get_string(cfg, "replications_out", "montecarlo"), global);
    std::ofstream out(path);
    if (!out) throw CliError(kExitIo, path + ": cannot open for writing");
    out << "rep,converged,iterations,loglik";
    for (const auto& name : names) out << ',' << name;
    out << '\n';
    for (size_t r = 0; r < result.replications.size(); ++r) {
      const auto& rep = result.replications[r];
      out << r << ',' << (rep.converged ? 1 : 0) << ',' << rep.iterations << ','
          << (rep.converged ? netgame::format_double(rep.loglik) : "nan");
      for (size_t i = 0; i < names.size(); ++i)
        out << ','
            << (rep.converged ? netgame::format_double(rep.theta[static_cast<int>(i)]) : "nan");
      out << '\n';
    }
    if (!out) throw CliError(kExitIo, path + ": write failed");
    std::cout << "wrote " << path << "\n";
  }

  const int used = design.replications - result.failures;
  std::cout << "replications: " << design.replications << "  converged: " << used
            << "  failures: " << result.failures << "\n";
  if (used > 0) {
    size_t width = std::string("coefficient").size();
    for (const auto& name : names) width = std::max(width, name.size());
    char line[256];
    std::snprintf(line, sizeof(line), "  %-*s  %14s  %14s\n", static_cast<int>(width),
                  "coefficient", "mean", "sd");
    std::cout << line;
    for (size_t i = 0; i < names.size(); ++i) {
      std::snprintf(line, sizeof(line), "  %-*s  %14s  %14s\n", static_cast<int>(width),
                    names[i].c_str(), fmt("%.6f", result.mean[static_cast<int>(i)]).c_str(),
                    fmt("%.6f", result.sd[static_cast<int>(i)]).c_str());
      std::cout << line;
    }
  }

  const json summary{{"spec_version", kSpecVersion},
                     {"command", "montecarlo"},
                     {"config",
                      {{"network", kind},
                       {"n", design.n},
                       {"replications", design.replications},
                       {"base_seed", design.base_seed},
                       {"theta", params_to_json(design.theta)},
                       {"covariates", specs.resolved},
                       {"h", design.h},
                       {"solver_tol", design.solver_tol},
                       {"estimation", est_resolved},
                       {"threads", threads}}},
                     {"replications", design.replications},
                     {"failures", result.failures},
                     {"mean", used > 0 ? vector_to_json(result.mean, names) : json()},
                     {"sd", used > 0 ? vector_to_json(result.sd, names) : json()}};
  if (cfg.contains("summary_out"))
    write_json_file(resolve_out(get_string(cfg, "summary_out", "montecarlo"), global), summary);
  return used > 0 ? kExitOk : kExitNumeric;
}

int cmd_npestimate(const json& cfg, const GlobalOpts& global, int flag_target, int flag_h) {
  check_keys(cfg, {"edges", "covariates", "outcomes", "K", "missing", "target", "h",
                   "result_out"},
             "npestimate");
  LoadedData loaded = load_dataset(cfg, "npestimate");
  const int n = loaded.data.state.net.num_players();

  // Command-line --target/--h take precedence over the config keys.
  int target = flag_target != 0 ? flag_target : get_int_or(cfg, "target", 0, "npestimate");
  if (target < 1 || target > n)
    throw CliError(kExitConfig, "npestimate: target must be a player id in 1.." +
                                    std::to_string(n));
  int h = flag_h >= 0 ? flag_h : get_int_or(cfg, "h", -1, "npestimate");

  netgame::NpEstimate estimate;
  try {
    estimate = netgame::np_estimate(loaded.data, target - 1, h);
  } catch (const std::invalid_argument& err) {
    throw CliError(kExitConfig, std::string("npestimate: ") + err.what());
  }

  std::cout << "target: " << target << "  h: " << estimate.h
            << "  matches: " << estimate.matches
            << "  estimate: " << netgame::format_double(estimate.estimate) << "\n";

  const json out{{"spec_version", kSpecVersion},
                 {"command", "npestimate"},
                 {"config",
                  {{"edges", get_string(cfg, "edges", "npestimate")},
                   {"covariates", get_string(cfg, "covariates", "npestimate")},
                   {"outcomes", get_string(cfg, "outcomes", "npestimate")},
                   {"target", target},
                   {"h", estimate.h}}},
                 {"estimate", estimate.estimate},
                 {"matches", estimate.matches},
                 {"h", estimate.h}};
  if (cfg.contains("result_out"))
    write_json_file(resolve_out(get_string(cfg, "result_out", "npestimate"), global), out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium computation and estimation for discrete games on networks"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  std::string config_path;
  uint64_t seed_flag = 0;
  int threads_flag = 0;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed_flag, "override the config seed");
  auto* threads_opt = app.add_option("--threads", threads_flag, "override the worker count");
  app.add_option("--out", global.out_dir, "directory for relative output paths");

  auto* generate = app.add_subcommand("generate", "write a network and covariate files");
  auto* solve = app.add_subcommand("solve", "compute an equilibrium profile");
  auto* simulate = app.add_subcommand("simulate", "draw actions from a profile");
  auto* estimate = app.add_subcommand("estimate", "fit payoff parameters to data");
  auto* montecarlo = app.add_subcommand("montecarlo", "replicate simulate-and-estimate");
  auto* npestimate = app.add_subcommand("npestimate", "circle matching estimator");

  int np_target = 0;
  int np_h = -1;
  // Long-only help here so "--h" (the window radius) does not clash with
  // the default "-h" short flag.
  npestimate->set_help_flag("--help", "print help");
  npestimate->add_option("--target", np_target, "player id (1-based)");
  npestimate->add_option("--h", np_h, "window radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    app.exit(err);
    return kExitConfig;
  }

  try {
    if (*seed_opt) global.seed = seed_flag;
    if (*threads_opt) global.threads = threads_flag;
    if (!global.out_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(global.out_dir, ec);
      if (ec)
        throw CliError(kExitIo, global.out_dir + ": cannot create directory: " + ec.message());
    }
    const json cfg = load_config(config_path);

    if (generate->parsed()) return cmd_generate(cfg, global);
    if (solve->parsed()) return cmd_solve(cfg, global);
    if (simulate->parsed()) return cmd_simulate(cfg, global);
    if (estimate->parsed()) return cmd_estimate(cfg, global);
    if (montecarlo->parsed()) return cmd_montecarlo(cfg, global);
    if (npestimate->parsed()) return cmd_npestimate(cfg, global, np_target, np_h);
    return kExitConfig;
  } catch (const CliError& err) {
    std::cerr << "netgame: error: " << err.what() << "\n";
    return err.code;
  } catch (const netgame::CsvError& err) {
    std::cerr << "netgame: error: " << err.what() << "\n";
    const std::string what = err.what();
    const bool io = what.find("cannot open") != std::string::npos ||
                    what.find("write failed") != std::string::npos;
    return io ? kExitIo : kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "netgame: error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "netgame: error: " << err.what() << "\n";
    return kExitNumeric;
  }
}
