// evsite command-line interface.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "evsite/config.hpp"
#include "evsite/errors.hpp"
#include "evsite/io.hpp"
#include "evsite/pipeline.hpp"
#include "evsite/queueing.hpp"
#include "evsite/synthetic.hpp"

namespace {

using namespace evsite;

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool debug = false;
  bool verbose = false;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "pipeline config (JSON)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "override the global seed");
  cmd->add_flag("--debug", c.debug, "debug logging and intermediate artifacts");
  cmd->add_flag("-v,--verbose", c.verbose, "log stage progress");
  cmd->add_option("--set", c.set, "override a config key, e.g. --set mclp.radius_m=8000")
      ->take_all();
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg = load_config(c.config, c.set);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  validate_config(cfg);
  return cfg;
}

void print_json(const nlohmann::json& doc) { std::cout << dump_json(doc); }

int cmd_validate(const Common& c) {
  const PipelineConfig cfg = resolve(c);
  const InputReport report = validate_inputs(cfg);
  for (const std::string& w : report.warnings) std::cout << "warning: " << w << '\n';
  std::cout << fmt::format("ok ({} warnings)\n", report.warnings.size());
  return 0;
}

int cmd_run(const Common& c) {
  const PipelineConfig cfg = resolve(c);
  const BuildPlan plan = run(cfg, {c.debug});
  double capital = 0.0;
  for (const YearCapital& y : plan.capital) capital += y.capital;
  std::cout << fmt::format("{} sites, coverage {:.4f}, capital {:.0f}, outputs in {}\n",
                           plan.sites.size(),
                           plan.demand_total > 0 ? plan.demand_covered / plan.demand_total : 1.0,
                           capital, cfg.output_dir.string());
  return 0;
}

struct QueueArgs {
  double lambda = 0.0;
  std::string type = "DCFC";
  std::optional<double> mu;
  std::optional<double> p;
  std::optional<int> c;
  std::string area = "urban";
  double salary = 0.0;
};

int cmd_queue(const Common& c, const QueueArgs& q) {
  const PipelineConfig cfg = resolve(c);
  const ChargerType type = parse_charger_type(q.type);
  const double mu = q.mu.value_or(cfg.mu(type));
  const double p = q.p.value_or(outage_rate(cfg.outage));
  const CostParams cost = cfg.costs.params(type, parse_area_type(q.area), q.salary);
  SitePlan plan;
  if (q.c) {
    const QueueParams params{q.lambda, mu, *q.c, p, *q.c + cfg.n_extra, cfg.convention};
    plan.charger_type = type;
    plan.c = *q.c;
    plan.N = params.N;
    plan.metrics = stationary_metrics(params);
    plan.c_station = station_cost(cost, plan.metrics.c_eff);
    plan.c_waiting = waiting_cost(q.salary, plan.metrics);
    plan.objective = plan.c_station / 365.0 + plan.c_waiting;
  } else {
    const PortCaps caps{cfg.utilisation_cap, 1, cfg.c_max, cfg.n_extra, cfg.convention};
    plan = optimize_ports(q.lambda, mu, p, cost, caps, "cli");
  }
  const QueueMetrics& m = plan.metrics;
  print_json({{"type", q.type},
              {"lambda", q.lambda},
              {"mu", mu},
              {"p", p},
              {"c", plan.c},
              {"N", plan.N},
              {"c_eff", m.c_eff},
              {"rho_eff", m.rho_eff},
              {"feasible", m.rho_eff <= cfg.utilisation_cap},
              {"P0", m.P0},
              {"Lq", m.Lq},
              {"Wq", m.Wq},
              {"p_block", m.p_block},
              {"C_station", plan.c_station},
              {"C_waiting", plan.c_waiting},
              {"objective", plan.objective}});
  return 0;
}

int cmd_mclp(const Common& c, const std::string& candidates, const std::string& demand) {
  const PipelineConfig cfg = resolve(c);
  const GridSpec spec = cfg.grid();
  const SolverRun solved =
      solve_mclp(read_candidates(candidates, spec), read_demand_points(demand, spec), cfg);
  const std::string csv = selection_csv(solved);
  if (c.out.empty()) {
    std::cout << csv;
  } else {
    write_text(std::filesystem::path(c.out) / "selection.csv", csv);
  }
  spdlog::info("mclp: {} sites cover {:.4f} of demand", solved.selection.steps.size(),
               solved.selection.coverage_fraction);
  return 0;
}

int cmd_report(const Common& c, const std::string& plan_path) {
  const PipelineConfig cfg = resolve(c);
  const nlohmann::json report = recompute_report(cfg, plan_path);
  if (c.out.empty()) {
    print_json(report);
  } else {
    write_text(std::filesystem::path(c.out) / "report.json", dump_json(report));
  }
  return 0;
}

int cmd_fixture(const std::string& dir, std::optional<std::uint64_t> seed) {
  FixtureOptions opts;
  if (seed) opts.seed = *seed;
  write_fixture(dir, opts);
  std::cout << fmt::format("fixture written to {}\n", dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV charging site planner"};
  app.require_subcommand(1);

  Common common;
  auto* validate = app.add_subcommand("validate", "check the config and every input file");
  add_common(validate, common);
  auto* run_cmd = app.add_subcommand("run", "run the full pipeline");
  add_common(run_cmd, common);

  QueueArgs qa;
  auto* queue = app.add_subcommand("queue", "single-site queue calculator");
  add_common(queue, common);
  queue->add_option("--lambda", qa.lambda, "arrival rate per hour")->required();
  queue->add_option("--type", qa.type, "DCFC or L2");
  queue->add_option("--mu", qa.mu, "service rate per port and hour");
  queue->add_option("--p", qa.p, "outage fraction (default: from config)");
  queue->add_option("--ports", qa.c, "evaluate this port count instead of optimising");
  queue->add_option("--area", qa.area, "urban, suburban, mixed or rural");
  queue->add_option("--salary", qa.salary, "hourly wage for the waiting cost");

  std::string candidates, demand;
  auto* mclp = app.add_subcommand("mclp", "greedy coverage solver on candidate/demand files");
  add_common(mclp, common);
  mclp->add_option("--candidates", candidates, "candidates.csv")->required();
  mclp->add_option("--demand", demand, "demand_points.csv")->required();

  std::string plan_path;
  auto* report = app.add_subcommand("report", "recompute metrics for an existing build plan");
  add_common(report, common);
  report->add_option("--plan", plan_path, "build_plan.geojson")->required();

  std::string fixture_dir;
  std::optional<std::uint64_t> fixture_seed;
  auto* fixture = app.add_subcommand("fixture", "write the synthetic input fixture");
  fixture->add_option("dir", fixture_dir, "target directory")->required();
  fixture->add_option("--seed", fixture_seed, "fixture seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  auto logger = spdlog::stderr_color_mt("evsite");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
  spdlog::set_level(common.debug     ? spdlog::level::debug
                    : common.verbose ? spdlog::level::info
                                     : spdlog::level::warn);

  try {
    if (*validate) return cmd_validate(common);
    if (*run_cmd) return cmd_run(common);
    if (*queue) return cmd_queue(common, qa);
    if (*mclp) return cmd_mclp(common, candidates, demand);
    if (*report) return cmd_report(common, plan_path);
    if (*fixture) return cmd_fixture(fixture_dir, fixture_seed);
  } catch (const ValidationError& e) {
    spdlog::error("validation: {}", e.what());
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    spdlog::error("infeasible: {}", e.what());
    return kExitInfeasible;
  } catch (const IoError& e) {
    spdlog::error("io: {}", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("io: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
