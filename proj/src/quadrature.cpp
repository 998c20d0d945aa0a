// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "smoothing/errors.hpp"

namespace smoothing {

namespace {

// Kronrod nodes (positive half, descending) and weights; Gauss-7 weights for
// the odd-indexed nodes. Values from QUADPACK qk15.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

QuadratureResult gauss_kronrod_15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);
  double fv1[7], fv2[7];
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double resabs = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    kronrod += kWgk[j] * (fv1[j] + fv2[j]);
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * (fv1[j] + fv2[j]);
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  }
  resabs *= abs_half;
  resasc *= abs_half;

  // QUADPACK error heuristics: scaled Kronrod-Gauss difference with a
  // roundoff floor.
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }

  QuadratureResult r;
  r.value = kronrod * half;
  r.error = err;
  r.evaluations = 15;
  r.intervals = 1;
  return r;
}

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: interval endpoints must be finite");
  }

  std::priority_queue<Panel> panels;
  const auto first = gauss_kronrod_15(f, a, b);
  panels.push({a, b, first.value, first.error});
  double total = first.value;
  double total_error = first.error;
  int evaluations = first.evaluations;

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  // Panels whose error is already at the roundoff floor cannot improve.
  auto at_floor = [](const Panel& p) {
    return p.error <= 50.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value) * 1.0001;
  };

  while (total_error > target()) {
    if (static_cast<int>(panels.size()) >= opts.max_intervals) {
      std::ostringstream msg;
      msg << "integrate: tolerance " << target() << " not reached on [" << a << ", " << b
          << "] after " << panels.size() << " panels (error estimate " << total_error << ")";
      throw QuadratureError(msg.str());
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b || at_floor(worst)) {
      // Cannot split further at double resolution; accept what we have.
      break;
    }
    panels.pop();
    const auto left = gauss_kronrod_15(f, worst.a, mid);
    const auto right = gauss_kronrod_15(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push({worst.a, mid, left.value, left.error});
    panels.push({mid, worst.b, right.value, right.error});
    if (!std::isfinite(total)) {
      throw QuadratureError("integrate: non-finite integrand value");
    }
  }

  // Resum to shed the drift of the running updates.
  QuadratureResult result;
  result.intervals = static_cast<int>(panels.size());
  result.evaluations = evaluations;
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) {
    return std::abs(l.value) < std::abs(r.value);
  });
  for (const auto& p : all) {
    result.value += p.value;
    result.error += p.error;
  }
  return result;
}

QuadratureResult integrate_panels(const Integrand& f, std::span<const double> breakpoints,
                                  const QuadratureOptions& opts) {
  QuadratureResult total;
  if (breakpoints.size() < 2) return total;
  QuadratureOptions per_panel = opts;
  per_panel.abs_tol = opts.abs_tol / static_cast<double>(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto r = integrate(f, breakpoints[i], breakpoints[i + 1], per_panel);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.intervals += r.intervals;
  }
  return total;
}

QuadratureResult integrate_to_infinity(const Integrand& f, double a, double first_width,
                                       const QuadratureOptions& opts) {
  QuadratureResult total;
  QuadratureOptions per_panel = opts;
  per_panel.abs_tol = opts.abs_tol / 64.0;
  double lo = a;
  double width = first_width;
  for (int k = 0; k < 200; ++k) {
    const auto r = integrate(f, lo, lo + width, per_panel);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.intervals += r.intervals;
    if (k >= 3 && std::abs(r.value) < per_panel.abs_tol) return total;
    lo += width;
    width *= 2.0;
  }
  throw QuadratureError("integrate_to_infinity: integrand does not decay");
}

}  // namespace smoothing
