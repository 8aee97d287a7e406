#include "evsite/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "evsite/errors.hpp"

namespace evsite {

double CountyStats::beta() const {
  if (!(vehicle_count > 0.0)) {
    throw ValidationError(fmt::format("county {}: vehicle_count must be > 0 to form β", county_id));
  }
  return ev_count / vehicle_count;
}

double county_cagr(double share_prev, double share_next) {
  if (!(share_prev >= 0.0) || !(share_next >= 0.0)) {
    throw ValidationError("EV shares must be non-negative");
  }
  if (share_prev == 0.0) return 0.0;
  return share_next / share_prev - 1.0;
}

Envelope::Envelope(std::map<int, double> caps) : caps_(std::move(caps)) {
  double prev = 0.0;
  for (const auto& [year, cap] : caps_) {
    if (!(cap >= 0.0 && cap <= 1.0)) {
      throw ValidationError(fmt::format("envelope cap for {} must lie in [0, 1]", year));
    }
    if (cap < prev) throw ValidationError("penetration envelope must be non-decreasing");
    prev = cap;
  }
}

double Envelope::at(int year) const {
  auto it = caps_.upper_bound(year);
  if (it == caps_.begin()) return 1.0;
  return std::prev(it)->second;
}

double project_share(double beta_base, double g, int year_offset, double cap) {
  if (!(beta_base >= 0.0 && beta_base <= 1.0)) throw ValidationError("base share must lie in [0, 1]");
  if (!(g > -1.0)) throw ValidationError("growth rate must exceed -1");
  const double grown = beta_base * std::pow(1.0 + g, year_offset);
  return std::min({grown, cap, 1.0});
}

ArrivalProfile arrival_rates(const std::string& site_id, std::span<const std::optional<double>> counts,
                             double beta) {
  std::vector<std::string> gaps;
  for (std::size_t t = 0; t < 24; ++t) {
    if (t >= counts.size() || !counts[t]) gaps.push_back(fmt::format("h{}", t));
  }
  if (counts.size() > 24) {
    throw ValidationError(fmt::format("site {}: {} hourly counts given, expected 24", site_id,
                                      counts.size()));
  }
  if (!gaps.empty()) {
    throw ValidationError(
        fmt::format("site {}: missing hourly counts {}", site_id, fmt::join(gaps, ", ")));
  }
  std::array<double, 24> dense{};
  for (std::size_t t = 0; t < 24; ++t) dense[t] = *counts[t];
  return arrival_rates(site_id, dense, beta);
}

ArrivalProfile arrival_rates(const std::string& site_id, const std::array<double, 24>& counts,
                             double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("EV share β must lie in [0, 1]");
  ArrivalProfile out;
  out.site_id = site_id;
  out.counts = counts;
  double day = 0.0;
  for (std::size_t t = 0; t < 24; ++t) {
    if (!(counts[t] >= 0.0) || !std::isfinite(counts[t])) {
      throw ValidationError(fmt::format("site {}: count h{} must be finite and >= 0", site_id, t));
    }
    out.lambda[t] = counts[t] * beta;
    if (t >= kDayStartHour && t <= kDayEndHour) day += out.lambda[t];
  }
  out.design = day / (kDayEndHour - kDayStartHour + 1);
  return out;
}

double implied_cagr(double base, double target, int years) {
  if (!(base > 0.0) || !(target > 0.0) || years < 1) {
    throw ValidationError("implied CAGR needs positive endpoints and years >= 1");
  }
  return std::pow(target / base, 1.0 / years) - 1.0;
}

std::vector<long long> capacity_path(double base_ports, double cagr, int years) {
  if (!(base_ports > 0.0)) throw ValidationError("capacity path needs a positive base");
  if (years < 0) throw ValidationError("capacity path years must be >= 0");
  std::vector<long long> out;
  for (int t = 0; t <= years; ++t) {
    out.push_back(std::llround(base_ports * std::pow(1.0 + cagr, t)));
  }
  return out;
}

}  // namespace evsite
