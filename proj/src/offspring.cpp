// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothing/offspring.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "smoothing/errors.hpp"
#include "smoothing/text_util.hpp"

namespace smoothing {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double horner(const std::vector<double>& coef, double x) {
  double acc = 0.0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * x + *it;
  return acc;
}

void require_probability(double p, const char* name, bool allow_one) {
  if (!(p > 0.0) || p > 1.0 || (!allow_one && p == 1.0)) {
    std::ostringstream msg;
    msg << "offspring: parameter " << name << " = " << p << " must satisfy 0 < " << name
        << (allow_one ? " <= 1" : " < 1");
    throw ValidationError(msg.str());
  }
}

std::vector<double> point_mass_mix(std::initializer_list<std::pair<int, double>> atoms) {
  int top = 0;
  for (const auto& [k, w] : atoms) top = std::max(top, k);
  std::vector<double> pmf(static_cast<std::size_t>(top) + 1, 0.0);
  for (const auto& [k, w] : atoms) pmf[static_cast<std::size_t>(k)] += w;
  return pmf;
}

}  // namespace

OffspringLaw::OffspringLaw(Variant law) : law_(std::move(law)) {
  std::visit(
      Overloaded{
          [&](const offspring::Deterministic& d) {
            if (d.n < 1) throw ValidationError("offspring: deterministic law needs n >= 1");
            if (static_cast<std::size_t>(d.n) + 1 >= kMaxSupport) {
              throw ValidationError("offspring: deterministic n too large");
            }
            build_polynomial(point_mass_mix({{d.n + 1, 1.0}}));
          },
          [&](const offspring::Binary& l) {
            require_probability(l.rho, "rho", true);
            build_polynomial(point_mass_mix({{0, 1.0 - l.rho}, {2, l.rho}}));
          },
          [&](const offspring::Delayed& l) {
            require_probability(l.rho, "rho", true);
            if (l.n < 1) throw ValidationError("offspring: delayed law needs n >= 1");
            if (static_cast<std::size_t>(l.n) + 1 >= kMaxSupport) {
              throw ValidationError("offspring: delayed n too large");
            }
            build_polynomial(point_mass_mix({{1, 1.0 - l.rho}, {l.n + 1, l.rho}}));
          },
          [&](const offspring::Geometric& l) {
            require_probability(l.p, "p", false);
            const double r = l.p / (1.0 - l.p);
            mean_ = r;
            factorial_moment2_ = 2.0 * r * r;
          },
          [&](const offspring::ShiftedGeometric& l) {
            require_probability(l.p, "p", false);
            const double r = l.p / (1.0 - l.p);
            mean_ = 1.0 + r;
            factorial_moment2_ = 2.0 * r * r + 2.0 * r;
          },
          [&](const offspring::SquareGeometric& l) {
            require_probability(l.p, "p", false);
            const double r = l.p / (1.0 - l.p);
            mean_ = 2.0 + r;
            factorial_moment2_ = 2.0 * r * r + 4.0 * r + 2.0;
          },
          [&](const offspring::GenericPmf& l) {
            if (l.q.empty()) throw ValidationError("offspring: empty pmf");
            if (l.q.size() > kMaxSupport) {
              throw ValidationError("offspring: pmf support exceeds 2^16 points");
            }
            double total = 0.0;
            for (double v : l.q) {
              if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ValidationError("offspring: pmf entries must be finite and >= 0");
              }
              total += v;
            }
            if (std::abs(total - 1.0) > 1e-9) {
              std::ostringstream msg;
              msg << "offspring: pmf sums to " << total << ", expected 1";
              throw ValidationError(msg.str());
            }
            std::vector<double> q = l.q;
            if (std::abs(total - 1.0) > 8.0 * std::numeric_limits<double>::epsilon() *
                                            static_cast<double>(q.size())) {
              for (double& v : q) v /= total;
            }
            std::get<offspring::GenericPmf>(law_).q = q;
            build_polynomial(std::move(q));
          },
      },
      law_);

  if (!(mean_ > 1.0)) {
    std::ostringstream msg;
    msg << "offspring: mean b = " << mean_ << " must satisfy b > 1";
    throw ValidationError(msg.str());
  }
  if (!std::isfinite(factorial_moment2_)) {
    throw ValidationError("offspring: E N(N-1) must be finite");
  }
}

void OffspringLaw::build_polynomial(std::vector<double> pmf) {
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  pmf_ = std::move(pmf);
  const std::size_t m = pmf_.size();

  // psi coefficients: T_k = P(N > k); chi coefficients: S_j = sum_{k>j} T_k.
  psi_coef_.assign(m > 1 ? m - 1 : 1, 0.0);
  double tail = 0.0;
  for (std::size_t k = m; k-- > 1;) {
    tail += pmf_[k];
    psi_coef_[k - 1] = tail;
  }
  chi_coef_.assign(psi_coef_.size() > 1 ? psi_coef_.size() - 1 : 1, 0.0);
  double tail2 = 0.0;
  for (std::size_t k = psi_coef_.size(); k-- > 1;) {
    tail2 += psi_coef_[k];
    chi_coef_[k - 1] = tail2;
  }

  mean_ = std::accumulate(psi_coef_.begin(), psi_coef_.end(), 0.0);
  factorial_moment2_ = 2.0 * std::accumulate(chi_coef_.begin(), chi_coef_.end(), 0.0);

  // Vose alias table.
  alias_cut_.assign(m, 1.0);
  alias_index_.resize(m);
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t k = 0; k < m; ++k) {
    scaled[k] = pmf_[k] * static_cast<double>(m);
    alias_index_[k] = static_cast<std::uint32_t>(k);
    (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_cut_[s] = scaled[s];
    alias_index_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
}

double OffspringLaw::pgf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "pgf: x = " << x << " outside [0, 1]";
    throw DomainError(msg.str());
  }
  return std::visit(
      Overloaded{
          [&](const offspring::Deterministic& d) { return std::pow(x, d.n + 1); },
          [&](const offspring::Binary& l) { return 1.0 - l.rho + l.rho * x * x; },
          [&](const offspring::Delayed& l) {
            return (1.0 - l.rho) * x + l.rho * std::pow(x, l.n + 1);
          },
          [&](const offspring::Geometric& l) { return (1.0 - l.p) / (1.0 - l.p * x); },
          [&](const offspring::ShiftedGeometric& l) {
            return (1.0 - l.p) * x / (1.0 - l.p * x);
          },
          [&](const offspring::SquareGeometric& l) {
            return (1.0 - l.p) * x * x / (1.0 - l.p * x);
          },
          [&](const offspring::GenericPmf&) { return horner(pmf_, x); },
      },
      law_);
}

double OffspringLaw::probability(std::int64_t k) const {
  if (k < 0) return 0.0;
  auto geometric = [k](double p, std::int64_t shift) {
    if (k < shift) return 0.0;
    return (1.0 - p) * std::pow(p, static_cast<double>(k - shift));
  };
  return std::visit(
      Overloaded{
          [&](const offspring::Geometric& l) { return geometric(l.p, 0); },
          [&](const offspring::ShiftedGeometric& l) { return geometric(l.p, 1); },
          [&](const offspring::SquareGeometric& l) { return geometric(l.p, 2); },
          [&](const auto&) {
            return static_cast<std::size_t>(k) < pmf_.size() ? pmf_[static_cast<std::size_t>(k)]
                                                             : 0.0;
          },
      },
      law_);
}

double OffspringLaw::pgf_divided_difference(double x, double y) const {
  for (double v : {x, y}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << "pgf_divided_difference: " << v << " outside [0, 1]";
      throw DomainError(msg.str());
    }
  }
  return std::visit(
      Overloaded{
          [&](const offspring::Geometric& l) {
            return l.p * (1.0 - l.p) / ((1.0 - l.p * x) * (1.0 - l.p * y));
          },
          [&](const offspring::ShiftedGeometric& l) {
            return (1.0 - l.p) / ((1.0 - l.p * x) * (1.0 - l.p * y));
          },
          [&](const offspring::SquareGeometric& l) {
            return (1.0 - l.p) * (x + y - l.p * x * y) / ((1.0 - l.p * x) * (1.0 - l.p * y));
          },
          [&](const auto&) {
            // sum_j c_j x^j with c_j = sum_{k>j} q_k y^(k-1-j); all terms >= 0.
            double c = 0.0;
            double result = 0.0;
            for (std::size_t j = pmf_.size() - 1; j-- > 0;) {
              c = pmf_[j + 1] + y * c;
              result = result * x + c;
            }
            return result;
          },
      },
      law_);
}

double OffspringLaw::tail_ratio(double x) const {
  return std::visit(Overloaded{
                        [&](const offspring::Geometric& l) { return l.p / (1.0 - l.p * x); },
                        [&](const offspring::ShiftedGeometric& l) { return 1.0 / (1.0 - l.p * x); },
                        [&](const offspring::SquareGeometric& l) {
                          return (1.0 + (1.0 - l.p) * x) / (1.0 - l.p * x);
                        },
                        [&](const auto&) { return horner(psi_coef_, x); },
                    },
                    law_);
}

double OffspringLaw::tail_ratio_slope(double x) const {
  return std::visit(Overloaded{
                        [&](const offspring::Geometric& l) {
                          return l.p * l.p / ((1.0 - l.p) * (1.0 - l.p * x));
                        },
                        [&](const offspring::ShiftedGeometric& l) {
                          return l.p / ((1.0 - l.p) * (1.0 - l.p * x));
                        },
                        [&](const offspring::SquareGeometric& l) {
                          return 1.0 / ((1.0 - l.p) * (1.0 - l.p * x));
                        },
                        [&](const auto&) { return horner(chi_coef_, x); },
                    },
                    law_);
}

double OffspringLaw::pgf_inverse(double y) const {
  const double floor_value = pgf(0.0);
  if (!(y >= floor_value && y <= 1.0)) {
    std::ostringstream msg;
    msg << "pgf_inverse: y = " << y << " outside [phi(0), 1] = [" << floor_value << ", 1]";
    throw DomainError(msg.str());
  }
  if (y == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pgf(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::int64_t OffspringLaw::sample(RandomStream& rng) const {
  auto geometric = [&rng](double p) {
    return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / std::log(p)));
  };
  return std::visit(
      Overloaded{
          [&](const offspring::Deterministic& d) { return std::int64_t{d.n} + 1; },
          [&](const offspring::Binary& l) {
            return rng.uniform_open() < l.rho ? std::int64_t{2} : std::int64_t{0};
          },
          [&](const offspring::Delayed& l) {
            return rng.uniform_open() < l.rho ? std::int64_t{l.n} + 1 : std::int64_t{1};
          },
          [&](const offspring::Geometric& l) { return geometric(l.p); },
          [&](const offspring::ShiftedGeometric& l) { return 1 + geometric(l.p); },
          [&](const offspring::SquareGeometric& l) { return 2 + geometric(l.p); },
          [&](const offspring::GenericPmf&) {
            const auto k = rng.uniform_index(alias_cut_.size());
            return rng.uniform_open() < alias_cut_[k] ? static_cast<std::int64_t>(k)
                                                      : static_cast<std::int64_t>(alias_index_[k]);
          },
      },
      law_);
}

std::string OffspringLaw::describe() const {
  return std::visit(
      Overloaded{
          [](const offspring::Deterministic& d) { return "deterministic:n=" + std::to_string(d.n); },
          [](const offspring::Binary& l) { return "binary:rho=" + format_exact(l.rho); },
          [](const offspring::Delayed& l) {
            return "delayed:rho=" + format_exact(l.rho) + ",n=" + std::to_string(l.n);
          },
          [](const offspring::Geometric& l) { return "geometric:p=" + format_exact(l.p); },
          [](const offspring::ShiftedGeometric& l) {
            return "shifted-geometric:p=" + format_exact(l.p);
          },
          [](const offspring::SquareGeometric& l) {
            return "square-geometric:p=" + format_exact(l.p);
          },
          [](const offspring::GenericPmf& l) {
            std::string out = "pmf:";
            for (std::size_t k = 0; k < l.q.size(); ++k) {
              if (k) out += ',';
              out += format_exact(l.q[k]);
            }
            return out;
          },
      },
      law_);
}

OffspringLaw OffspringLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("offspring: expected '<family>:<parameters>', got '" + std::string(text) + "'");
  }
  const std::string family = to_lower(trim(text.substr(0, colon)));
  const std::string_view body = text.substr(colon + 1);

  if (family == "pmf") {
    std::vector<double> q;
    for (const auto& item : split(body, ',')) q.push_back(parse_double(item, "pmf entry"));
    return OffspringLaw(offspring::GenericPmf{std::move(q)});
  }

  std::map<std::string, std::string> kv = parse_key_values(body, ',');
  auto take = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError("offspring: family '" + family + "' needs parameter '" + key + "'");
    }
    std::string value = it->second;
    kv.erase(it);
    return value;
  };
  auto finish = [&](OffspringLaw law) {
    if (!kv.empty()) {
      throw ParseError("offspring: unknown parameter '" + kv.begin()->first + "' for family '" +
                       family + "'");
    }
    return law;
  };

  if (family == "deterministic") {
    return finish(OffspringLaw(offspring::Deterministic{parse_int(take("n"), "n")}));
  }
  if (family == "binary") {
    return finish(OffspringLaw(offspring::Binary{parse_double(take("rho"), "rho")}));
  }
  if (family == "delayed") {
    const double rho = parse_double(take("rho"), "rho");
    const int n = parse_int(take("n"), "n");
    return finish(OffspringLaw(offspring::Delayed{rho, n}));
  }
  if (family == "geometric") {
    return finish(OffspringLaw(offspring::Geometric{parse_double(take("p"), "p")}));
  }
  if (family == "shifted-geometric" || family == "shifted_geometric") {
    return finish(OffspringLaw(offspring::ShiftedGeometric{parse_double(take("p"), "p")}));
  }
  if (family == "square-geometric" || family == "square_geometric") {
    return finish(OffspringLaw(offspring::SquareGeometric{parse_double(take("p"), "p")}));
  }
  throw ParseError("offspring: unknown family '" + family + "'");
}

}  // namespace smoothing
