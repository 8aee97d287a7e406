#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evsite {

struct OutageEvent {
  double days = 0.0;        // O_d
  double households = 0.0;  // H_d, affected households per day
};

struct OutageStats {
  std::vector<OutageEvent> events;
  double households_total = 1.0;
  double days_total = 365.0;
};

// p = Σ O_d·H_d / (H_total·D_total). Throws InfeasibleError when p >= 1.
double outage_rate(const OutageStats& stats);

// How fractional effective servers enter the chain.
enum class ServerConvention {
  kContinuous,  // service min(n, c_eff)·μ, queue counted beyond c_eff
  kFloor,       // s = max(1, ⌊c_eff⌋) whole servers
};

struct QueueParams {
  double lambda = 0.0;
  double mu = 1.0;
  int c = 1;
  double p = 0.0;
  int N = 1;
  ServerConvention convention = ServerConvention::kContinuous;
};

void validate_params(const QueueParams& q);

double effective_servers(const QueueParams& q);

// Stationary distribution π_0..π_N of the birth-death chain.
std::vector<double> stationary_distribution(const QueueParams& q);

struct QueueMetrics {
  double c_eff = 0.0;
  double rho_eff = 0.0;
  double P0 = 1.0;
  double Lq = 0.0;
  double Wq = 0.0;        // Lq / (λ(1 − π_N)), admitted-rate form
  double Wq_raw = 0.0;    // Lq / λ as printed
  double p_block = 0.0;   // π_N
  // Printed closed forms, kept for comparison only. NaN when undefined
  // (⌊c_eff⌋ = 0 or ρ_eff = 1).
  double printed_P0 = 0.0;
  double printed_Lq = 0.0;
};

QueueMetrics stationary_metrics(const QueueParams& q);

// The printed P0 and Lq expressions, evaluated verbatim.
double printed_p0(const QueueParams& q);
double printed_lq(const QueueParams& q);

enum class ChargerType { kL2, kDCFC };
enum class AreaType { kUrban, kSuburban, kMixed, kRural };

std::string_view to_string(ChargerType t);
std::string_view to_string(AreaType a);
ChargerType parse_charger_type(std::string_view s);
AreaType parse_area_type(std::string_view s);

struct CostParams {
  double c_port = 0.0;
  double c_install = 0.0;
  double c_salary = 0.0;
  ChargerType charger_type = ChargerType::kDCFC;
};

// Per-port purchase and install costs for both charger types, install scaled
// by area type.
struct CostTable {
  double dcfc_unit = 113100.0;
  double dcfc_install = 80350.0;
  double l2_unit = 3400.0;
  double l2_install = 4100.0;
  double mult_urban = 1.0;
  double mult_suburban = 0.9;
  double mult_mixed = 0.8;
  double mult_rural = 0.7;

  double multiplier(AreaType a) const;
  CostParams params(ChargerType t, AreaType a, double c_salary) const;
};

inline constexpr double kMuDcfc = 2.0;
inline constexpr double kMuL2 = 0.25;

double station_cost(const CostParams& cost, double c_eff);
double waiting_cost(double c_salary, const QueueMetrics& m);

struct PortCaps {
  double utilisation_cap = 0.9;
  int c_min = 1;
  int c_max = 30;
  int n_extra = 10;  // N = c + n_extra
  ServerConvention convention = ServerConvention::kContinuous;
};

struct SitePlan {
  std::string site_id;
  ChargerType charger_type = ChargerType::kDCFC;
  int c = 0;
  int N = 0;
  QueueMetrics metrics;
  double c_station = 0.0;
  double c_waiting = 0.0;
  double objective = 0.0;
};

// Smallest c with λ/(c(1 − p)μ) <= cap, ignoring c_max.
int required_ports(double lambda, double mu, double p, double cap);

// Exhaustive scan over feasible c in [max(c_min, required), c_max]; argmin of
// C_station/365 + C_waiting, ties to the smaller c.
SitePlan optimize_ports(double lambda, double mu, double p, const CostParams& cost,
                        const PortCaps& caps, std::string site_id = "");

}  // namespace evsite
