#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evsite {

struct CountyStats {
  std::string county_id;
  double ev_count = 0.0;
  double vehicle_count = 0.0;
  double share_2024 = 0.0;
  double share_2025 = 0.0;
  double avg_hourly_wage = 0.0;

  double beta() const;  // EVs / vehicles; throws when vehicle_count <= 0
};

// Growth from two consecutive annual shares. A zero base share gives g = 0.
double county_cagr(double share_prev, double share_next);

// Statewide cap on EV share per year, applied piecewise-constant from each
// listed year onward. Empty means no cap.
class Envelope {
 public:
  Envelope() = default;
  explicit Envelope(std::map<int, double> caps);

  double at(int year) const;
  bool empty() const { return caps_.empty(); }
  const std::map<int, double>& caps() const { return caps_; }

 private:
  std::map<int, double> caps_;
};

// min(β·(1+g)^k, cap, 1).
double project_share(double beta_base, double g, int year_offset, double cap = 1.0);

inline constexpr int kDayStartHour = 8;
inline constexpr int kDayEndHour = 19;  // inclusive

struct ArrivalProfile {
  std::string site_id;
  std::array<double, 24> counts{};
  std::array<double, 24> lambda{};
  double design = 0.0;  // mean λ over hours 8..19
};

// Missing (nullopt) hours raise a ValidationError naming each gap.
ArrivalProfile arrival_rates(const std::string& site_id, std::span<const std::optional<double>> counts,
                             double beta);
ArrivalProfile arrival_rates(const std::string& site_id, const std::array<double, 24>& counts,
                             double beta);

// (target/base)^(1/years) − 1.
double implied_cagr(double base, double target, int years);

// base·(1+g)^t rounded to the nearest integer for t = 0..years.
std::vector<long long> capacity_path(double base_ports, double cagr, int years);

}  // namespace evsite
