#include "evsite/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "evsite/errors.hpp"

namespace evsite {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Servers as seen by the chain: real-valued c_eff or its floor.
double chain_servers(const QueueParams& q) {
  const double c_eff = effective_servers(q);
  if (q.convention == ServerConvention::kFloor) return std::max(1.0, std::floor(c_eff));
  return c_eff;
}

double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

double outage_rate(const OutageStats& stats) {
  if (!(stats.households_total > 0.0) || !(stats.days_total >= 1.0)) {
    throw ValidationError("outage stats need H_total > 0 and D_total >= 1");
  }
  double num = 0.0;
  for (const OutageEvent& e : stats.events) {
    if (!(e.days >= 0.0) || !(e.households >= 0.0)) {
      throw ValidationError("outage events must be non-negative");
    }
    num += e.days * e.households;
  }
  const double p = num / (stats.households_total * stats.days_total);
  if (p >= 1.0) {
    throw InfeasibleError(fmt::format("outage rate p = {} >= 1 leaves no effective ports", p));
  }
  return p;
}

void validate_params(const QueueParams& q) {
  if (!(q.lambda >= 0.0) || !std::isfinite(q.lambda)) {
    throw ValidationError("arrival rate must be finite and >= 0");
  }
  if (!(q.mu > 0.0) || !std::isfinite(q.mu)) throw ValidationError("service rate must be > 0");
  if (q.c < 1) throw ValidationError("port count c must be >= 1");
  if (!(q.p >= 0.0 && q.p < 1.0)) throw ValidationError("outage fraction p must lie in [0, 1)");
  if (q.N < q.c) throw ValidationError(fmt::format("capacity N = {} is below c = {}", q.N, q.c));
}

double effective_servers(const QueueParams& q) { return q.c * (1.0 - q.p); }

std::vector<double> stationary_distribution(const QueueParams& q) {
  validate_params(q);
  const double servers = chain_servers(q);
  std::vector<double> pi(static_cast<std::size_t>(q.N) + 1, 0.0);
  if (q.lambda == 0.0) {
    pi[0] = 1.0;
    return pi;
  }
  // Product form in log space: π_n ∝ Π_{k<=n} λ / (min(k, s)·μ).
  std::vector<double> logw(pi.size(), 0.0);
  for (std::size_t n = 1; n < pi.size(); ++n) {
    const double rate = std::min(static_cast<double>(n), servers) * q.mu;
    logw[n] = logw[n - 1] + std::log(q.lambda) - std::log(rate);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (std::size_t n = 0; n < pi.size(); ++n) {
    pi[n] = std::exp(logw[n] - top);
    total += pi[n];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericError("stationary distribution failed to normalise");
  }
  for (double& v : pi) v /= total;
  return pi;
}

double printed_p0(const QueueParams& q) {
  const double c_eff = effective_servers(q);
  const int s = static_cast<int>(std::floor(c_eff));
  if (s < 1) return kNaN;
  const double a = q.lambda / q.mu;
  const double rho = q.lambda / (c_eff * q.mu);
  double sum = 0.0, term = 1.0;
  for (int n = 0; n < s; ++n) {
    sum += term;
    term *= a / (n + 1);
  }
  // term is now a^s / s!
  const int m = q.N - s + 1;
  double geo = 0.0;
  if (std::abs(1.0 - rho) > 1e-9) {
    geo = (1.0 - std::pow(rho, m)) / (1.0 - rho);
  } else {
    for (int k = 0; k < m; ++k) geo += std::pow(rho, k);
  }
  return 1.0 / (sum + term * geo);
}

double printed_lq(const QueueParams& q) {
  const double c_eff = effective_servers(q);
  const int s = static_cast<int>(std::floor(c_eff));
  const int s1 = static_cast<int>(std::floor(c_eff + 1.0));
  const double rho = q.lambda / (c_eff * q.mu);
  const double denom_gap = s - rho;
  if (s < 1 || denom_gap == 0.0) return kNaN;
  const double a = q.lambda / q.mu;
  const double head = printed_p0(q) * std::pow(a, s1) / (std::tgamma(s1 + 1.0) * denom_gap * denom_gap);
  const int m = q.N - s + 1;
  return head * (1.0 - std::pow(rho, m) - m * (1.0 - rho) * std::pow(rho, q.N - s));
}

QueueMetrics stationary_metrics(const QueueParams& q) {
  const std::vector<double> pi = stationary_distribution(q);
  QueueMetrics m;
  m.c_eff = effective_servers(q);
  m.rho_eff = q.lambda / (m.c_eff * q.mu);
  m.P0 = pi.front();
  m.p_block = pi.back();
  const double servers = chain_servers(q);
  for (std::size_t n = 0; n < pi.size(); ++n) {
    const double excess = static_cast<double>(n) - servers;
    if (excess > 0.0) m.Lq += excess * pi[n];
  }
  if (q.lambda > 0.0) {
    m.Wq = m.Lq / (q.lambda * (1.0 - m.p_block));
    m.Wq_raw = m.Lq / q.lambda;
  }
  m.printed_P0 = printed_p0(q);
  m.printed_Lq = printed_lq(q);
  if (spdlog::should_log(spdlog::level::debug)) {
    const double dp = rel_dev(m.P0, m.printed_P0);
    const double dl = rel_dev(m.Lq, m.printed_Lq);
    if (!(dp <= 1e-6) || !(dl <= 1e-6)) {
      spdlog::debug("queue λ={} μ={} c={} p={} N={}: printed closed form deviates "
                    "(P0 rel {:.3g}, Lq rel {:.3g})",
                    q.lambda, q.mu, q.c, q.p, q.N, dp, dl);
    }
    if (q.lambda > 0.0 && rel_dev(m.Wq, m.Wq_raw) > 1e-6) {
      spdlog::debug("queue λ={} c={}: Wq admitted {:.6g} vs raw {:.6g}", q.lambda, q.c, m.Wq,
                    m.Wq_raw);
    }
  }
  return m;
}

std::string_view to_string(ChargerType t) { return t == ChargerType::kDCFC ? "DCFC" : "L2"; }

std::string_view to_string(AreaType a) {
  switch (a) {
    case AreaType::kUrban: return "urban";
    case AreaType::kSuburban: return "suburban";
    case AreaType::kMixed: return "mixed";
    case AreaType::kRural: return "rural";
  }
  return "urban";
}

ChargerType parse_charger_type(std::string_view s) {
  if (s == "DCFC") return ChargerType::kDCFC;
  if (s == "L2") return ChargerType::kL2;
  throw ValidationError(fmt::format("unknown charger type '{}' (expected DCFC or L2)", s));
}

AreaType parse_area_type(std::string_view s) {
  if (s == "urban") return AreaType::kUrban;
  if (s == "suburban") return AreaType::kSuburban;
  if (s == "mixed") return AreaType::kMixed;
  if (s == "rural") return AreaType::kRural;
  throw ValidationError(fmt::format("unknown area type '{}'", s));
}

double CostTable::multiplier(AreaType a) const {
  switch (a) {
    case AreaType::kUrban: return mult_urban;
    case AreaType::kSuburban: return mult_suburban;
    case AreaType::kMixed: return mult_mixed;
    case AreaType::kRural: return mult_rural;
  }
  return 1.0;
}

CostParams CostTable::params(ChargerType t, AreaType a, double c_salary) const {
  CostParams p;
  p.charger_type = t;
  p.c_salary = c_salary;
  p.c_port = t == ChargerType::kDCFC ? dcfc_unit : l2_unit;
  p.c_install = (t == ChargerType::kDCFC ? dcfc_install : l2_install) * multiplier(a);
  return p;
}

double station_cost(const CostParams& cost, double c_eff) {
  return (cost.c_port + cost.c_install) * c_eff;
}

double waiting_cost(double c_salary, const QueueMetrics& m) { return c_salary * m.Lq * m.Wq; }

int required_ports(double lambda, double mu, double p, double cap) {
  if (!(cap > 0.0)) throw ValidationError("utilisation cap must be > 0");
  if (lambda <= 0.0) return 1;
  int c = std::max(1, static_cast<int>(std::ceil(lambda / (cap * (1.0 - p) * mu))) - 1);
  // Walk to the exact boundary with the same expression the metrics use.
  while (lambda / (c * (1.0 - p) * mu) > cap) ++c;
  return c;
}

SitePlan optimize_ports(double lambda, double mu, double p, const CostParams& cost,
                        const PortCaps& caps, std::string site_id) {
  if (caps.c_min < 1 || caps.c_max < caps.c_min || caps.n_extra < 0) {
    throw ValidationError("port caps need 1 <= c_min <= c_max and n_extra >= 0");
  }
  if (!(p >= 0.0 && p < 1.0)) throw InfeasibleError(fmt::format("outage fraction {} >= 1", p));
  const int needed = required_ports(lambda, mu, p, caps.utilisation_cap);
  const int lo = std::max(caps.c_min, needed);
  if (lo > caps.c_max) {
    throw InfeasibleError(fmt::format(
        "site {}: λ = {:.4g} needs at least {} ports to keep ρ_eff <= {} but the cap is {}",
        site_id.empty() ? "?" : site_id, lambda, needed, caps.utilisation_cap, caps.c_max));
  }
  SitePlan best;
  best.site_id = std::move(site_id);
  best.charger_type = cost.charger_type;
  bool have = false;
  for (int c = lo; c <= caps.c_max; ++c) {
    QueueParams q{lambda, mu, c, p, c + caps.n_extra, caps.convention};
    const QueueMetrics m = stationary_metrics(q);
    const double cs = station_cost(cost, m.c_eff);
    const double cw = waiting_cost(cost.c_salary, m);
    const double obj = cs / 365.0 + cw;
    if (!have || obj < best.objective) {
      have = true;
      best.c = c;
      best.N = q.N;
      best.metrics = m;
      best.c_station = cs;
      best.c_waiting = cw;
      best.objective = obj;
    }
  }
  return best;
}

}  // namespace evsite
