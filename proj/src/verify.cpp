// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "smoothing/batch_io.hpp"
#include "smoothing/fixed_point.hpp"
#include "smoothing/grid.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |diff| / se with 0/0 read as 0.
double z_score(double diff, double se) {
  if (diff == 0.0) return 0.0;
  return se > 0.0 ? std::abs(diff) / se : kInf;
}

void check_grid(std::span<const double> t_grid, const char* who) {
  if (t_grid.empty()) throw DomainError(std::string(who) + ": empty t-grid");
  for (double t : t_grid) {
    if (!(t >= 0.0 && t <= 20.0)) {
      throw DomainError(std::string(who) + ": t-grid must lie in [0, 20]");
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

TestRecord as_sentinel(TestRecord inner, std::string name) {
  inner.name = std::move(name);
  inner.sentinel = true;
  inner.detail = (inner.pass ? "NOT detected: " : "detected: ") + inner.detail;
  inner.pass = !inner.pass;
  return inner;
}

int method_generations(const Method& m) {
  if (const auto* tree = std::get_if<TreeMethod>(&m)) return tree->depth;
  return std::get<PoolMethod>(m).iterations;
}

}  // namespace

bool VerificationReport::pass() const {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(), [](const TestRecord& r) { return r.pass; });
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json out;
  out["spec_hash"] = hash_hex(spec_hash);
  out["verdict"] = pass() ? "pass" : "fail";
  auto& list = out["records"];
  list = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["statistic"] = std::isfinite(r.statistic) ? nlohmann::ordered_json(r.statistic)
                                                 : nlohmann::ordered_json("inf");
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["sentinel"] = r.sentinel;
    j["std_errors"] = r.std_errors;
    j["detail"] = r.detail;
    list.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string VerificationReport::summary_table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %12s %12s  %s\n", "check", "statistic", "threshold",
                "result");
  out << line;
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%-34s %12s %12s  %s\n", r.name.c_str(),
                  fmt(r.statistic).c_str(), fmt(r.threshold).c_str(), r.pass ? "PASS" : "FAIL");
    out << line;
  }
  out << "verdict: " << (pass() ? "PASS" : "FAIL") << " (" << records.size() << " checks)\n";
  return out.str();
}

LaplaceGate scaled_gate(std::size_t count) {
  LaplaceGate gate;
  const double n = static_cast<double>(count);
  if (n > 0.0 && n < kCapReferenceCount) gate.abs_cap *= std::sqrt(kCapReferenceCount / n);
  return gate;
}

TestRecord compare_laplace(const SampleBatch& batch, const std::function<double(double)>& g,
                           std::span<const double> t_grid, const LaplaceGate& gate) {
  check_grid(t_grid, "compare_laplace");
  const auto summary = batch_stats(batch, t_grid);
  TestRecord r;
  r.name = "laplace";
  r.threshold = gate.abs_cap;
  r.pass = true;
  double worst_z = 0.0;
  double worst_t = 0.0;
  for (const auto& pt : summary.laplace) {
    const double diff = pt.value - g(pt.t);
    const double z = z_score(diff, pt.std_error);
    r.std_errors.push_back(pt.std_error);
    if (std::abs(diff) > r.statistic) {
      r.statistic = std::abs(diff);
      worst_t = pt.t;
    }
    worst_z = std::max(worst_z, z);
    if (z > gate.se_multiple || std::abs(diff) > gate.abs_cap) r.pass = false;
  }
  r.detail = "sup|diff| at t=" + fmt(worst_t) + ", max z=" + fmt(worst_z) + " (gate " +
             fmt(gate.se_multiple) + " SE)";
  return r;
}

TestRecord compare_laplace_batches(const SampleBatch& a, const SampleBatch& b,
                                   std::span<const double> t_grid, double se_multiple) {
  check_grid(t_grid, "compare_laplace_batches");
  const auto sa = batch_stats(a, t_grid);
  const auto sb = batch_stats(b, t_grid);
  TestRecord r;
  r.name = "laplace-cross";
  r.threshold = se_multiple;
  r.pass = true;
  double worst_diff = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double diff = sa.laplace[i].value - sb.laplace[i].value;
    const double se = std::hypot(sa.laplace[i].std_error, sb.laplace[i].std_error);
    r.std_errors.push_back(se);
    const double z = z_score(diff, se);
    r.statistic = std::max(r.statistic, z);
    worst_diff = std::max(worst_diff, std::abs(diff));
    if (z > se_multiple) r.pass = false;
  }
  r.detail = "max combined z, sup|diff|=" + fmt(worst_diff);
  return r;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges slowly; the tail is ~1 here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("kolmogorov_critical: level in (0, 1)");
  double lo = 0.2, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_sf(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("normal_critical: level in (0, 1)");
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TestRecord ks_continuous(const SampleBatch& batch, const AnalyticSolution& sol,
                         const KsOptions& options) {
  std::vector<double> nonzero;
  nonzero.reserve(static_cast<std::size_t>(batch.count()));
  for (double v : batch.values()) {
    if (v != 0.0) nonzero.push_back(v);
  }
  if (nonzero.size() < 1000) {
    throw InsufficientDataError("ks_continuous: need >= 1000 nonzero values, have " +
                                std::to_string(nonzero.size()));
  }
  std::sort(nonzero.begin(), nonzero.end());
  const auto cdf = sol.cdf_sorted(nonzero);
  const double atom = sol.atom();
  const double n = static_cast<double>(nonzero.size());
  double d = 0.0;
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    const double f = (cdf[i] - atom) / (1.0 - atom);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double relax = options.pool ? 2.0 : 1.0;

  TestRecord r;
  r.name = "ks";
  r.statistic = d;
  r.threshold = relax * kolmogorov_critical(options.level) / std::sqrt(n);
  const bool ks_pass = d <= r.threshold;

  // Binomial test of the zero count.
  const double total = static_cast<double>(batch.count());
  const double zeros = static_cast<double>(batch.zero_count());
  const double atom_se = std::sqrt(atom * (1.0 - atom) / total);
  const double shortfall = std::max(0.0, atom - zeros / total - options.atom_allowance);
  const double excess = std::max(0.0, zeros / total - atom);
  const double atom_diff = zeros / total < atom ? shortfall : excess;
  const double atom_z = z_score(atom_diff, atom_se);
  const double atom_crit = relax * normal_critical(options.level);
  const bool atom_pass = atom_z <= atom_crit;

  r.std_errors = {atom_se};
  r.pass = ks_pass && atom_pass;
  r.detail = "D=" + fmt(d) + " (n=" + std::to_string(nonzero.size()) + "), zero fraction " +
             fmt(zeros / total) + " vs atom " + fmt(atom) + " z=" + fmt(atom_z) + " (crit " +
             fmt(atom_crit) + ")";
  return r;
}

TestRecord moment_check(const SampleBatch& batch, const CascadeSpec& spec) {
  const auto* law = std::get_if<WeightLaw>(&spec.weights);
  if (law == nullptr) throw DomainError("moment_check: needs power-law weights");
  const auto summary = batch_stats(batch, {});
  const double target2 = limit_second_moment(spec.offspring, law->alpha());
  const double z1 = z_score(summary.mean - 1.0, summary.mean_se);
  const double z2 = z_score(summary.second_moment - target2, summary.second_moment_se);
  TestRecord r;
  r.name = "moments";
  r.statistic = std::max(z1, z2);
  r.threshold = 5.0;
  r.pass = z1 <= 5.0 && z2 <= 5.0;
  r.std_errors = {summary.mean_se, summary.second_moment_se};
  r.detail = "mean " + fmt(summary.mean) + " z=" + fmt(z1) + "; E Y^2 " +
             fmt(summary.second_moment) + " vs " + fmt(target2) + " z=" + fmt(z2);
  return r;
}

double generation_extinction(const OffspringLaw& offspring, double alpha, int generations) {
  double t = 0.0;
  for (int i = 0; i < generations; ++i) {
    t = offspring.pgf(std::clamp(alpha * t + 1.0 - alpha, 0.0, 1.0));
  }
  return t;
}

TestRecord extinction_check(const SampleBatch& batch, const CascadeSpec& spec) {
  const auto* law = std::get_if<WeightLaw>(&spec.weights);
  if (law == nullptr) throw DomainError("extinction_check: needs power-law weights");
  const double beta = extinction_beta(spec.offspring, law->alpha());
  const double reached =
      generation_extinction(spec.offspring, law->alpha(), method_generations(spec.method));
  const double allowance = std::max(0.0, beta - reached);
  const double se = std::sqrt(beta * (1.0 - beta) / static_cast<double>(batch.count()));
  TestRecord r;
  r.name = "extinction";
  r.statistic = std::abs(batch.zero_fraction() - beta);
  r.threshold = 5.0 * se + allowance;
  r.pass = r.statistic <= r.threshold;
  r.std_errors = {se};
  r.detail = "zero fraction " + fmt(batch.zero_fraction()) + " vs beta " + fmt(beta) +
             " (finite-generation value " + fmt(reached) + ")";
  return r;
}

std::vector<TestRecord> sentinel_records(const MatrixOptions& options) {
  const auto grid = options.t_grid.empty() ? log_grid(1e-2, 20.0, 20) : options.t_grid;
  const auto ex1 = make_example(1, default_example_params(1));
  const auto ex4 = make_example(4, default_example_params(4));
  std::vector<TestRecord> out;

  const SampleBatch ones(std::vector<double>(10'000, 1.0), 0, 0);
  out.push_back(as_sentinel(compare_laplace(ones, [&](double t) { return ex1.g(t); }, grid),
                            "sentinel/wrong-distribution"));

  const auto spec1 = make_cascade_spec(ex1.offspring(), 1.0, TreeMethod{8}, options.seed,
                                       options.worker_count);
  out.push_back(as_sentinel(ks_continuous(simulate_tree(spec1, 5000), ex4),
                            "sentinel/cross-example"));

  const auto spec0 = make_cascade_spec(ex1.offspring(), 1.0, TreeMethod{0}, options.seed,
                                       options.worker_count);
  out.push_back(as_sentinel(moment_check(simulate_tree(spec0, 10'000), spec0),
                            "sentinel/depth-0-moments"));
  return out;
}

VerificationReport run_matrix(const MatrixOptions& options) {
  const auto grid = options.t_grid.empty() ? log_grid(1e-2, 20.0, 20) : options.t_grid;
  VerificationReport report;
  std::string all_specs;
  for (int id = 1; id <= 6; ++id) {
    const auto sol = make_example(id, default_example_params(id));
    const std::vector<Method> methods = {
        TreeMethod{options.tree_depth},
        PoolMethod{options.pool_size, options.pool_iterations, options.pool_normalize}};
    for (const auto& method : methods) {
      const bool pool = std::holds_alternative<PoolMethod>(method);
      const auto spec = make_cascade_spec(sol.offspring(), sol.alpha(), method, options.seed,
                                          options.worker_count);
      validate(spec);
      all_specs += spec.describe() + "\n";
      const auto batch = simulate(spec, options.tree_count);
      const std::string prefix =
          "ex" + std::to_string(id) + (pool ? "/pool/" : "/tree/");

      auto laplace =
          compare_laplace(batch, [&](double t) { return sol.g(t); }, grid,
                          scaled_gate(static_cast<std::size_t>(batch.count())));
      laplace.name = prefix + "laplace";
      report.records.push_back(std::move(laplace));

      const double beta = sol.atom();
      KsOptions ks_options;
      ks_options.pool = pool;
      ks_options.atom_allowance =
          beta - generation_extinction(sol.offspring(), sol.alpha(), method_generations(method));
      auto ks = ks_continuous(batch, sol, ks_options);
      ks.name = prefix + "ks";
      report.records.push_back(std::move(ks));

      auto moments = moment_check(batch, spec);
      moments.name = prefix + "moments";
      report.records.push_back(std::move(moments));

      auto extinction = extinction_check(batch, spec);
      extinction.name = prefix + "extinction";
      report.records.push_back(std::move(extinction));
    }
  }
  for (auto& r : sentinel_records(options)) report.records.push_back(std::move(r));

  // FNV-1a over the canonical descriptions of every simulated spec.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : all_specs) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  report.spec_hash = h;
  return report;
}

}  // namespace smoothing
