// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <json.hpp>

#include "smoothing/batch_io.hpp"
#include "smoothing/cascade.hpp"
#include "smoothing/errors.hpp"
#include "smoothing/fixed_point.hpp"
#include "smoothing/text_util.hpp"
#include "smoothing/verify.hpp"
#include "smoothing/weights.hpp"

namespace smoothlab {

namespace sm = smoothing;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSubcommands = {"simulate", "solve", "table", "verify",
                                               "examples"};
const std::vector<std::string> kKeys = {"subcommand", "offspring", "alpha", "method", "count",
                                        "seed",       "workers",   "t-grid", "format", "output",
                                        "id",         "n",         "rho",   "p"};

constexpr std::int64_t kDefaultTreeCount = 100'000;
constexpr std::int64_t kDefaultVerifyCount = 20'000;

std::string num(double v) { return sm::format_exact(v); }

void require(bool ok, const std::string& message) {
  if (!ok) throw sm::ParseError(message);
}

// E W log W of the power-law family in closed form; valid for the signed
// continuation alpha > 1 too.
double power_law_w_log_w(double alpha, double b) {
  const double s = alpha * b - 1.0;
  return alpha * b * (std::log(b) / (s + 1.0) - s / ((s + 1.0) * (s + 1.0)));
}

json derived_quantities(const sm::OffspringLaw& offspring, double alpha) {
  const double b = offspring.mean();
  if (!(alpha * b > 1.0)) {
    throw sm::ValidationError("constraint alpha > 1/b violated (alpha=" + num(alpha) +
                              ", 1/b=" + num(1.0 / b) + ")");
  }
  const double ew2 = sm::power_law_moment(alpha, b, 2);
  const double wlogw = power_law_w_log_w(alpha, b);
  json d;
  d["b"] = b;
  d["gamma"] = 1.0 - 1.0 / (alpha * b - 1.0);
  d["beta"] = sm::extinction_beta(offspring, alpha);
  d["phi_second_derivative"] = offspring.factorial_moment2();
  d["ew2"] = ew2;
  d["ew_log_w"] = wlogw;
  d["l2_condition"] = ew2 < b;
  d["kp_condition"] = wlogw < std::log(b);
  d["simulable"] = alpha <= 1.0;
  if (ew2 < b) d["ey2"] = sm::limit_second_moment(offspring, alpha);
  return d;
}

void print_derived(const json& d, std::ostream& log) {
  log << "b=" << num(d["b"].get<double>()) << " gamma=" << num(d["gamma"].get<double>())
      << " beta=" << num(d["beta"].get<double>()) << " E W^2=" << num(d["ew2"].get<double>())
      << " E W log W=" << num(d["ew_log_w"].get<double>())
      << " L2=" << (d["l2_condition"].get<bool>() ? "true" : "false")
      << " KP=" << (d["kp_condition"].get<bool>() ? "true" : "false") << "\n";
}

std::string join_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      if (i) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string rows_json(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  json list = json::array();
  for (const auto& row : rows) {
    json j;
    for (std::size_t i = 0; i < header.size(); ++i) j[header[i]] = row[i];
    list.push_back(std::move(j));
  }
  return list.dump(2) + "\n";
}

void emit(const RunConfig& config, const std::string& content, json sidecar, std::ostream& out) {
  if (config.output.empty()) {
    out << content;
    return;
  }
  sm::write_file_atomically(config.output, content);
  sidecar["config"] = config.to_map();
  sm::write_file_atomically(sm::sidecar_path(config.output), sidecar.dump(2) + "\n");
}

const sm::OffspringLaw parse_offspring(const RunConfig& config) {
  require(!config.offspring.empty(), config.subcommand + ": --offspring is required");
  return sm::OffspringLaw::parse(config.offspring);
}

double require_alpha(const RunConfig& config) {
  require(config.alpha.has_value(), config.subcommand + ": --alpha is required");
  return *config.alpha;
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const auto offspring = parse_offspring(config);
  const double alpha = require_alpha(config);
  const auto derived = derived_quantities(offspring, alpha);
  print_derived(derived, log);
  const auto spec = sm::make_cascade_spec(offspring, alpha, sm::parse_method(config.method),
                                          config.seed, config.workers);
  sm::validate(spec);
  const auto batch = sm::simulate(spec, config.count);
  const auto grid = config.grid.values();
  const auto summary = sm::batch_stats(batch, grid);
  log << "n=" << summary.count << " mean=" << num(summary.mean)
      << " E Y^2=" << num(summary.second_moment) << " zero fraction="
      << num(summary.zero_fraction) << "\n";

  std::string content;
  std::string format = config.format;
  if (config.format == "csv") {
    content = sm::encode_batch_csv(batch);
  } else if (config.format == "bin") {
    require(!config.output.empty(), "simulate: --format bin needs --output");
    content = sm::encode_batch_binary(batch);
    format = "binary";
  } else {
    json j;
    j["count"] = summary.count;
    j["mean"] = summary.mean;
    j["mean_se"] = summary.mean_se;
    j["second_moment"] = summary.second_moment;
    j["second_moment_se"] = summary.second_moment_se;
    j["zero_fraction"] = summary.zero_fraction;
    json lap = json::array();
    for (const auto& p : summary.laplace) {
      lap.push_back({{"t", p.t}, {"value", p.value}, {"std_error", p.std_error}});
    }
    j["laplace"] = std::move(lap);
    content = j.dump(2) + "\n";
  }
  json sidecar;
  sidecar["spec"] = spec.describe();
  sidecar["spec_hash"] = sm::hash_hex(spec.hash());
  sidecar["seed"] = config.seed;
  sidecar["worker_count"] = config.workers;
  sidecar["chunk_size"] = sm::kChunkSize;
  sidecar["format"] = format;
  sidecar["derived"] = derived;
  emit(config, content, std::move(sidecar), out);
  return kOk;
}

int run_solve(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const auto offspring = parse_offspring(config);
  const double alpha = require_alpha(config);
  const auto derived = derived_quantities(offspring, alpha);
  print_derived(derived, log);
  const sm::FixedPointSolver solver(offspring, alpha);
  const auto grid = config.grid.values();
  const std::vector<std::string> header = {"t", "u", "g", "implicit_residual",
                                           "laplace_residual"};
  std::vector<std::vector<double>> rows;
  for (const auto& r : sm::tabulate(solver, grid)) {
    rows.push_back({r.t, r.u, r.g, r.implicit_residual, r.laplace_residual});
  }
  json sidecar;
  sidecar["format"] = config.format;
  sidecar["derived"] = derived;
  emit(config, config.format == "csv" ? join_csv(header, rows) : rows_json(header, rows),
       std::move(sidecar), out);
  return kOk;
}

int run_table(const RunConfig& config, std::ostream& out, std::ostream& log) {
  require(config.example_id != 0, "table: --id is required");
  const auto sol = sm::make_example(config.example_id, config.params);
  const auto derived = derived_quantities(sol.offspring(), sol.alpha());
  log << sol.describe() << "\n";
  print_derived(derived, log);
  const sm::FixedPointSolver solver(sol.offspring(), sol.alpha());
  const std::vector<std::string> header = {"t", "u_closed", "g_closed", "u_solver", "g_solver",
                                           "abs_diff"};
  std::vector<std::vector<double>> rows;
  for (double t : config.grid.values()) {
    const double us = solver.solve_u(t);
    const double gs = sol.offspring().pgf(us);
    rows.push_back({t, sol.u(t), sol.g(t), us, gs, std::abs(gs - sol.g(t))});
  }
  json sidecar;
  sidecar["format"] = config.format;
  sidecar["example"] = sol.describe();
  sidecar["derived"] = derived;
  emit(config, config.format == "csv" ? join_csv(header, rows) : rows_json(header, rows),
       std::move(sidecar), out);
  return kOk;
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& log) {
  sm::MatrixOptions options;
  options.seed = config.seed;
  options.worker_count = config.workers;
  options.tree_count = config.count;
  const auto method = sm::parse_method(config.method);
  if (const auto* pool = std::get_if<sm::PoolMethod>(&method)) {
    options.pool_size = pool->pool_size;
    options.pool_iterations = pool->iterations;
    options.pool_normalize = pool->normalize;
  } else {
    options.tree_depth = std::get<sm::TreeMethod>(method).depth;
  }
  const auto report = sm::run_matrix(options);
  const std::string table = report.summary_table();
  if (config.output.empty()) {
    out << report.to_json();
    log << table;
  } else {
    out << table;
    json sidecar;
    sidecar["format"] = "json";
    sidecar["spec_hash"] = sm::hash_hex(report.spec_hash);
    emit(config, report.to_json(), std::move(sidecar), out);
  }
  return report.pass() ? kOk : kVerificationFailed;
}

void describe_example(const sm::AnalyticSolution& sol, std::ostream& out) {
  out << sol.describe() << "\n";
  out << "  offspring " << sol.offspring().describe() << ", alpha=" << num(sol.alpha())
      << ", b=" << num(sol.b()) << ", gamma=" << num(sol.gamma()) << "\n";
  out << "  beta=" << num(sol.beta()) << " E Y=1 E Y^2=" << num(sol.second_moment_formula())
      << (sol.simulable() ? "" : " (alpha > 1: analytic continuation, not simulable)") << "\n";
  out << "  g(1)=" << num(sol.g(1.0)) << " u(1)=" << num(sol.u(1.0)) << "\n";
}

int run_examples(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.example_id != 0) {
    describe_example(sm::make_example(config.example_id, config.params), out);
    return kOk;
  }
  for (int id = 1; id <= 6; ++id) {
    describe_example(sm::make_example(id, sm::default_example_params(id)), out);
  }
  return kOk;
}

}  // namespace

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["subcommand"] = subcommand;
  if (!offspring.empty()) m["offspring"] = offspring;
  if (alpha) m["alpha"] = num(*alpha);
  m["method"] = method;
  m["count"] = std::to_string(count);
  m["seed"] = std::to_string(seed);
  m["workers"] = std::to_string(workers);
  m["t-grid"] = grid.describe();
  m["format"] = format;
  if (!output.empty()) m["output"] = output;
  if (example_id != 0) {
    m["id"] = std::to_string(example_id);
    m["n"] = std::to_string(params.n);
    m["rho"] = num(params.rho);
    m["p"] = num(params.p);
  }
  return m;
}

RunConfig config_from_map(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    require(std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end(),
            "unknown config key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  RunConfig c;
  c.subcommand = get("subcommand").value_or("");
  require(std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) != kSubcommands.end(),
          "subcommand must be one of simulate, solve, table, verify, examples");
  c.offspring = get("offspring").value_or("");
  if (auto v = get("alpha")) c.alpha = sm::parse_double(*v, "alpha");
  if (auto v = get("method")) c.method = *v;
  c.count = c.subcommand == "verify" ? kDefaultVerifyCount : kDefaultTreeCount;
  if (auto v = get("count")) c.count = sm::parse_int64(*v, "count");
  require(c.count >= 1, "count must be >= 1");
  if (auto v = get("seed")) {
    const auto seed = sm::parse_int64(*v, "seed");
    require(seed >= 0, "seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (auto v = get("workers")) c.workers = sm::parse_int(*v, "workers");
  require(c.workers >= 1, "workers must be >= 1");
  if (auto v = get("t-grid")) c.grid = sm::parse_grid(*v);
  if (auto v = get("format")) c.format = sm::to_lower(*v);
  const bool bin_ok = c.subcommand == "simulate";
  require(c.format == "csv" || c.format == "json" || (bin_ok && c.format == "bin"),
          "format must be csv or json" + std::string(bin_ok ? " or bin" : ""));
  c.output = get("output").value_or("");
  if (auto v = get("id")) {
    c.example_id = sm::parse_int(*v, "id");
    require(c.example_id >= 1 && c.example_id <= 6, "id must be in 1..6");
    c.params = sm::default_example_params(c.example_id);
    if (auto n = get("n")) c.params.n = sm::parse_int(*n, "n");
    if (auto rho = get("rho")) c.params.rho = sm::parse_double(*rho, "rho");
    if (auto p = get("p")) c.params.p = sm::parse_double(*p, "p");
    if (c.alpha) c.params.alpha = *c.alpha;
  } else {
    require(!get("n") && !get("rho") && !get("p"), "n, rho and p need an example --id");
  }
  // Validate the method text eagerly so usage errors surface before work.
  sm::parse_method(c.method);
  return c;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  const std::string text = sm::read_file(path);
  std::map<std::string, std::string> m;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw sm::ParseError("config '" + path + "': " + e.what());
    }
    require(j.contains("config") && j["config"].is_object(),
            "config '" + path + "': JSON config needs a \"config\" object");
    for (const auto& [key, value] : j["config"].items()) {
      m[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return m;
  }
  int line_no = 0;
  for (const auto& raw : sm::split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = sm::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config '" + path + "' line " + std::to_string(line_no) + ": expected key = value");
    m[sm::to_lower(sm::trim(line.substr(0, eq)))] = sm::trim(line.substr(eq + 1));
  }
  return m;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  if (config.subcommand == "simulate") return run_simulate(config, out, log);
  if (config.subcommand == "solve") return run_solve(config, out, log);
  if (config.subcommand == "table") return run_table(config, out, log);
  if (config.subcommand == "verify") return run_verify(config, out, log);
  return run_examples(config, out, log);
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"smoothlab: fixed points of the smoothing transformation"};
  app.require_subcommand(1);
  std::map<std::string, std::string> flags;
  std::string config_path;
  struct Flag {
    const char* key;
    const char* help;
  };
  const std::vector<Flag> flag_list = {
      {"offspring", "offspring law, e.g. geometric:p=0.75"},
      {"alpha", "weight parameter alpha"},
      {"method", "tree:depth=D or pool:M=..,K=.."},
      {"count", "tree samples (verify: per example)"},
      {"seed", "random seed"},
      {"workers", "OpenMP worker count"},
      {"t-grid", "min:max:points[:log|:linear], 0+ prefix adds t=0"},
      {"format", "csv | json (| bin for simulate)"},
      {"output", "output path (default stdout)"},
      {"id", "example id 1..6"},
      {"n", "example parameter n"},
      {"rho", "example parameter rho"},
      {"p", "example parameter p"},
  };
  std::map<std::string, std::string> storage;
  for (const auto& name : kSubcommands) {
    auto* sub = app.add_subcommand(name, name + " subcommand");
    sub->add_option("--config", config_path, "key = value config file or JSON sidecar");
    for (const auto& f : flag_list) sub->add_option(std::string("--") + f.key, storage[f.key], f.help);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    app.exit(e, help, log);
    return kUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    if (!config_path.empty()) flags = read_config_file(config_path);
    for (const auto& f : flag_list) {
      if (sub->count(std::string("--") + f.key) > 0) flags[f.key] = storage[f.key];
    }
    flags["subcommand"] = sub->get_name();
    return run(config_from_map(flags), out, log);
  } catch (const sm::ParseError& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const sm::ValidationError& e) {
    log << "constraint violation: " << e.what() << "\n";
    return kConstraint;
  } catch (const sm::DomainError& e) {
    log << "constraint violation: " << e.what() << "\n";
    return kConstraint;
  } catch (const sm::Error& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace smoothlab
