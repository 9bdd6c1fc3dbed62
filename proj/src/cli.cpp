#include "kpp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kpp/experiments.hpp"
#include "kpp/io.hpp"
#include "kpp/model.hpp"
#include "kpp/solvers.hpp"

namespace kpp::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kTable, kJson };

// Flags shared by every subcommand. Each overrides the config value when
// given on the command line.
struct InputFlags {
  Requirements req;
  MeasuredInputs meas;
  std::string config_path;
  std::string format = "table";

  std::vector<std::pair<CLI::Option*, std::function<void(Requirements&, MeasuredInputs&)>>>
      overrides;
  CLI::Option* config_opt = nullptr;

  template <class T>
  void bind(CLI::App* app, const std::string& flag, T* slot, const std::string& help,
            std::function<void(Requirements&, MeasuredInputs&, T)> apply) {
    CLI::Option* opt = app->add_option(flag, *slot, help);
    overrides.emplace_back(opt, [slot, apply](Requirements& r, MeasuredInputs& m) {
      apply(r, m, *slot);
    });
  }

  void attach(CLI::App* app) {
    bind<double>(app, "--throughput-mbps", &req.target_throughput, "Target throughput T (MB/s)",
                 [](auto& r, auto&, double v) { r.target_throughput = v; });
    bind<Count>(app, "--consumers", &req.consumers, "Consumers c",
                [](auto& r, auto&, Count v) { r.consumers = v; });
    bind<Count>(app, "--replication-factor", &req.replication_factor, "Replication factor r",
                [](auto& r, auto&, Count v) { r.replication_factor = v; });
    bind<double>(app, "--latency-max-ms", &req.max_replication_latency,
                 "Maximum replication latency L (ms)",
                 [](auto& r, auto&, double v) { r.max_replication_latency = v; });
    bind<double>(app, "--unavailability-max-ms", &req.max_unavailability,
                 "Maximum unavailability U (ms)",
                 [](auto& r, auto&, double v) { r.max_unavailability = v; });
    bind<Count>(app, "--brokers-available", &req.available_brokers, "Available brokers B",
                [](auto& r, auto&, Count v) { r.available_brokers = v; });
    bind<double>(app, "--producer-throughput-mbps", &meas.producer_throughput_per_partition,
                 "Producer throughput per partition T_p (MB/s)",
                 [](auto&, auto& m, double v) { m.producer_throughput_per_partition = v; });
    bind<double>(app, "--consumer-throughput-mbps", &meas.consumer_throughput_per_partition,
                 "Consumer throughput per partition T_c (MB/s)",
                 [](auto&, auto& m, double v) { m.consumer_throughput_per_partition = v; });
    bind<Count>(app, "--max-open-file-handles", &meas.max_open_file_handles,
                "Open file handles per broker H_max",
                [](auto&, auto& m, Count v) { m.max_open_file_handles = v; });
    bind<double>(app, "--replication-latency-ms", &meas.replication_latency_per_partition,
                 "Replication latency per partition l_r (ms)",
                 [](auto&, auto& m, double v) { m.replication_latency_per_partition = v; });
    bind<double>(app, "--leader-election-ms", &meas.leader_election_time,
                 "Leader election time per partition u (ms)",
                 [](auto&, auto& m, double v) { m.leader_election_time = v; });
    config_opt = app->add_option("--config", config_path, "Config file (falls back to $KPP_CONFIG)");
    app->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "json", "json-like"}));
  }

  Format output_format() const { return format == "table" ? Format::kTable : Format::kJson; }

  std::optional<std::string> effective_config_path() const {
    if (config_opt->count() > 0) return config_path;
    if (const char* env = std::getenv("KPP_CONFIG"); env != nullptr && *env != '\0')
      return std::string(env);
    return std::nullopt;
  }

  // defaults <- config <- flags
  LoadedConfig resolve(std::ostream& err, const Requirements& req_defaults = {}) const {
    LoadedConfig cfg;
    cfg.requirements = req_defaults;
    if (auto path = effective_config_path()) {
      cfg = load_config_file(*path, req_defaults, MeasuredInputs{});
      for (const auto& n : cfg.notices) err << "note: " << n << '\n';
    }
    for (const auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(cfg.requirements, cfg.measured);
    }
    validate(cfg.requirements);
    validate(cfg.measured);
    return cfg;
  }
};

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

json metrics_json(const PlanMetrics& m) {
  return json{{"replication_latency_ms", m.replication_latency},
              {"unavailability_ms", m.unavailability},
              {"handles_per_broker", m.handles_per_broker},
              {"partitions_per_broker", m.partitions_per_broker},
              {"producer_capacity_mbps", m.producer_capacity},
              {"consumer_capacity_mbps", m.consumer_capacity}};
}

json constraints_json(const ConstraintPass& p) {
  return json{{"throughput", p.throughput},
              {"os_load", p.os_load},
              {"latency", p.latency},
              {"unavailability", p.unavailability},
              {"broker_bound", p.broker_bound}};
}

void print_metrics_table(std::ostream& out, const Plan& plan, const PlanMetrics& m) {
  const auto row = [&](std::string_view name, const std::string& value) {
    out << "  " << std::left << std::setw(24) << name << value << '\n';
  };
  row("partitions", std::to_string(plan.partitions));
  row("brokers", std::to_string(plan.brokers));
  row("replication_latency_ms", format_real(m.replication_latency));
  row("unavailability_ms", format_real(m.unavailability));
  row("handles_per_broker", format_real(m.handles_per_broker));
  row("partitions_per_broker", format_real(m.partitions_per_broker));
  row("producer_capacity_mbps", format_real(m.producer_capacity));
  row("consumer_capacity_mbps", format_real(m.consumer_capacity));
  out << "constraints:\n";
  row("throughput", pass_fail(m.pass.throughput));
  row("os_load", pass_fail(m.pass.os_load));
  row("latency", pass_fail(m.pass.latency));
  row("unavailability", pass_fail(m.pass.unavailability));
  row("broker_bound", pass_fail(m.pass.broker_bound));
}

// Prints a plan with its metrics; returns the exit code it implies.
int report_plan(std::ostream& out, Format fmt, std::string_view method, const Plan& plan,
                const Requirements& req, const MeasuredInputs& meas, json extra = json::object()) {
  const PlanMetrics m = evaluate_plan(plan, req, meas);
  const bool feasible = m.pass.all();
  if (fmt == Format::kJson) {
    json doc{{"method", method},
             {"status", "plan"},
             {"partitions", plan.partitions},
             {"brokers", plan.brokers},
             {"feasible", feasible},
             {"metrics", metrics_json(m)},
             {"constraints", constraints_json(m.pass)}};
    for (auto& [k, v] : extra.items()) doc[k] = v;
    out << doc.dump(2) << '\n';
  } else {
    out << "method: " << method << '\n';
    for (auto& [k, v] : extra.items()) out << k << ": " << v.dump() << '\n';
    print_metrics_table(out, plan, m);
    out << (feasible ? "feasible\n" : "infeasible\n");
  }
  return feasible ? kExitFeasible : kExitInfeasible;
}

int report_no_plan(std::ostream& out, Format fmt, std::string_view method,
                   const SolveOutcome& outcome) {
  if (fmt == Format::kJson) {
    const char* status = outcome.status == SolveStatus::kNoFeasible ? "no_feasible"
                         : outcome.status == SolveStatus::kStructurallyInfeasible
                             ? "structurally_infeasible"
                             : "degenerate_range";
    out << json{{"method", method}, {"status", status}, {"message", outcome.message()}}.dump(2)
        << '\n';
  } else {
    out << outcome.message() << '\n';
  }
  return kExitInfeasible;
}

int cmd_plan(const InputFlags& flags, const std::string& method_text, std::uint64_t seed,
             bool with_replicas, std::ostream& out, std::ostream& err) {
  const LoadedConfig cfg = flags.resolve(err);
  const Requirements& req = cfg.requirements;
  const MeasuredInputs& meas = cfg.measured;
  const Format fmt = flags.output_format();

  if (method_text == "lp") {
    const LpRelaxation lp = lp_relax(req, meas);
    if (!lp.rounded.plan) return report_no_plan(out, fmt, "lp", lp.rounded);
    json extra{{"real_partitions", lp.real.partitions_real},
               {"real_brokers", lp.real.brokers_real},
               {"real_feasible", lp.real_feasible}};
    return report_plan(out, fmt, "lp", *lp.rounded.plan, req, meas, std::move(extra));
  }

  SolveOutcome outcome;
  if (method_text == "bromin") {
    outcome = bromin(req, meas);
  } else if (method_text == "bromax") {
    outcome = bromax(req, meas);
  } else {
    outcome = ms_cnfl(req, seed, MsCnflOptions{with_replicas});
  }
  if (!outcome.plan) return report_no_plan(out, fmt, method_text, outcome);
  return report_plan(out, fmt, method_text, *outcome.plan, req, meas);
}

int cmd_check(const InputFlags& flags, Count partitions, Count brokers, std::ostream& out,
              std::ostream& err) {
  const Plan plan{partitions, brokers};
  try {
    validate(plan);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const LoadedConfig cfg = flags.resolve(err);
  return report_plan(out, flags.output_format(), "check", plan, cfg.requirements, cfg.measured);
}

int cmd_compare(const InputFlags& flags, Count trials, std::uint64_t seed, bool with_replicas,
                std::ostream& out, std::ostream& err) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  const LoadedConfig cfg = flags.resolve(err);
  const Requirements& req = cfg.requirements;
  const MeasuredInputs& meas = cfg.measured;

  json rows = json::array();
  const auto heuristic_row = [&](std::string_view name, const SolveOutcome& o) {
    json row{{"method", name}};
    if (o.plan) {
      const PlanMetrics m = evaluate_plan(*o.plan, req, meas);
      row["status"] = "plan";
      row["partitions"] = o.plan->partitions;
      row["brokers"] = o.plan->brokers;
      row["metrics"] = metrics_json(m);
      row["constraints"] = constraints_json(m.pass);
    } else {
      row["status"] = o.message();
    }
    rows.push_back(std::move(row));
  };

  const SolveOutcome min_out = bromin(req, meas);
  const SolveOutcome max_out = bromax(req, meas);
  heuristic_row("bromin", min_out);
  heuristic_row("bromax", max_out);

  json ms{{"method", "mscnfl"}};
  if (auto agg = aggregate_mscnfl(req, meas, trials, seed, MsCnflOptions{with_replicas})) {
    ms["status"] = "mean";
    ms["trials"] = agg->trials;
    ms["partitions"] = agg->mean_partitions;
    ms["brokers"] = agg->mean_brokers;
    ms["metrics"] = json{{"replication_latency_ms", agg->mean_replication_latency},
                         {"unavailability_ms", agg->mean_unavailability},
                         {"handles_per_broker", agg->mean_handles_per_broker},
                         {"partitions_per_broker", agg->mean_partitions_per_broker}};
    ms["violation_rates"] = json{{"throughput", agg->throughput_violation_rate},
                                 {"os_load", agg->os_violation_rate},
                                 {"latency", agg->latency_violation_rate},
                                 {"unavailability", agg->unavailability_violation_rate},
                                 {"broker_bound", agg->broker_bound_violation_rate}};
  } else {
    ms["status"] = SolveOutcome{Method::kMsCnfl, SolveStatus::kDegenerateRange, {}}.message();
  }
  rows.push_back(std::move(ms));

  const LpRelaxation lp = lp_relax(req, meas);
  heuristic_row("lp", lp.rounded);
  rows.back()["real_partitions"] = lp.real.partitions_real;
  rows.back()["real_feasible"] = lp.real_feasible;

  const int code = (min_out.plan || max_out.plan) ? kExitFeasible : kExitInfeasible;

  if (flags.output_format() == Format::kJson) {
    out << rows.dump(2) << '\n';
    return code;
  }

  out << std::left << std::setw(8) << "method" << std::setw(11) << "partitions" << std::setw(9)
      << "brokers" << std::setw(12) << "latency_ms" << std::setw(14) << "unavail_ms"
      << std::setw(10) << "handles" << std::setw(9) << "lat" << std::setw(9) << "unav"
      << std::setw(9) << "os" << "status\n";
  for (const json& row : rows) {
    out << std::setw(8) << row["method"].get<std::string>();
    if (!row.contains("partitions")) {
      out << row["status"].get<std::string>() << '\n';
      continue;
    }
    const auto num = [](const json& v) {
      return v.is_number_integer() ? std::to_string(v.get<Count>()) : format_real(v.get<double>());
    };
    out << std::setw(11) << num(row["partitions"]) << std::setw(9) << num(row["brokers"])
        << std::setw(12) << num(row["metrics"]["replication_latency_ms"]) << std::setw(14)
        << num(row["metrics"]["unavailability_ms"]) << std::setw(10)
        << num(row["metrics"]["handles_per_broker"]);
    if (row.contains("violation_rates")) {
      const json& v = row["violation_rates"];
      out << std::setw(9) << format_real(v["latency"].get<double>()) << std::setw(9)
          << format_real(v["unavailability"].get<double>()) << std::setw(9)
          << format_real(v["os_load"].get<double>())
          << "mean of " << row["trials"].get<Count>() << " trials\n";
    } else {
      const json& c = row["constraints"];
      out << std::setw(9) << pass_fail(c["latency"].get<bool>()) << std::setw(9)
          << pass_fail(c["unavailability"].get<bool>()) << std::setw(9)
          << pass_fail(c["os_load"].get<bool>())
          << (c["throughput"].get<bool>() && c["broker_bound"].get<bool>() ? "plan"
                                                                          : "plan (infeasible)")
          << '\n';
    }
  }
  return code;
}

struct SweepFlags {
  std::string axis;
  Count from = 0, to = 0, step = 1;
  CLI::Option* from_opt = nullptr;
  CLI::Option* to_opt = nullptr;
  CLI::Option* step_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  bool preset = false;
  unsigned threads = 1;
  std::string out_path;
};

int cmd_sweep(const InputFlags& flags, const SweepFlags& sf, Count trials, std::uint64_t seed,
              bool with_replicas, std::ostream& out, std::ostream& err) {
  std::optional<SweepAxis> axis;
  if (!sf.axis.empty()) axis = parse_axis(sf.axis);

  const bool range_given = sf.from_opt->count() + sf.to_opt->count() > 0;
  if (range_given && (sf.from_opt->count() == 0 || sf.to_opt->count() == 0))
    throw UsageError("--from and --to must be given together");
  if (sf.preset && !axis) throw UsageError("--preset requires --axis");

  Requirements defaults;
  if (sf.preset) defaults = default_sweep_spec(*axis).base_requirements;
  const LoadedConfig cfg = flags.resolve(err, defaults);

  SweepSpec spec;
  if (cfg.sweep && (!axis || *axis == cfg.sweep->axis)) spec = *cfg.sweep;
  if (axis) spec.axis = *axis;

  if (range_given) {
    try {
      spec.axis_values = axis_range(sf.from, sf.to, sf.step);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  } else if (sf.preset) {
    spec.axis_values = default_sweep_spec(*axis).axis_values;
  } else if (!cfg.sweep || (axis && *axis != cfg.sweep->axis)) {
    throw UsageError("sweep needs --axis with --from/--to/--step, --preset, or a [sweep] config");
  }

  spec.base_requirements = cfg.requirements;
  spec.base_measured = cfg.measured;
  if (sf.trials_opt->count() > 0) spec.mscnfl_trials = trials;
  if (sf.seed_opt->count() > 0) spec.master_seed = seed;
  if (with_replicas) spec.mscnfl.confluent_includes_replicas = true;
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  const std::string csv = write_csv(run_sweep(spec, sf.threads));
  if (sf.out_path.empty()) {
    out << csv;
  } else {
    std::ofstream file(sf.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + sf.out_path + "'");
    file << csv;
  }
  return kExitFeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kpp: partition and broker planner for a Kafka topic", "kpp"};
  app.require_subcommand(1);

  InputFlags plan_flags, check_flags, compare_flags, sweep_flags;
  std::string method = "bromin";
  Count partitions = 0, brokers = 0;
  Count trials = 1000;
  std::uint64_t seed = 0;
  bool with_replicas = false;
  SweepFlags sf;

  auto* plan = app.add_subcommand("plan", "Compute (P, b) with one method");
  plan_flags.attach(plan);
  plan->add_option("--method", method, "bromin | bromax | lp | mscnfl")
      ->check(CLI::IsMember({"bromin", "bromax", "lp", "mscnfl"}));
  plan->add_option("--seed", seed, "MS-CNFL seed");
  plan->add_flag("--confluent-with-replicas", with_replicas,
                 "MS-CNFL: multiply the Confluent bound by r");

  auto* check = app.add_subcommand("check", "Evaluate a given (P, b)");
  check_flags.attach(check);
  check->add_option("--partitions", partitions, "Partitions P")->required();
  check->add_option("--brokers", brokers, "Brokers b")->required();

  auto* compare = app.add_subcommand("compare", "Compare all methods at one point");
  compare_flags.attach(compare);
  compare->add_option("--trials", trials, "MS-CNFL trials");
  compare->add_option("--seed", seed, "MS-CNFL master seed");
  compare->add_flag("--confluent-with-replicas", with_replicas,
                    "MS-CNFL: multiply the Confluent bound by r");

  auto* sweep = app.add_subcommand("sweep", "Sweep one axis and emit CSV");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", sf.axis, "consumers | brokers | replication")
      ->check(CLI::IsMember({"consumers", "brokers", "replication"}));
  sf.from_opt = sweep->add_option("--from", sf.from, "First axis value");
  sf.to_opt = sweep->add_option("--to", sf.to, "Last axis value (inclusive)");
  sf.step_opt = sweep->add_option("--step", sf.step, "Axis step");
  sf.trials_opt = sweep->add_option("--trials", trials, "MS-CNFL trials per point");
  sf.seed_opt = sweep->add_option("--seed", seed, "Master seed");
  sweep->add_flag("--preset", sf.preset, "Use the built-in range and fixed values for --axis");
  sweep->add_option("--threads", sf.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  sweep->add_option("--out", sf.out_path, "Write CSV here instead of stdout");
  sweep->add_flag("--confluent-with-replicas", with_replicas,
                  "MS-CNFL: multiply the Confluent bound by r");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitFeasible;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitFeasible;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_flags, method, seed, with_replicas, out, err);
    if (check->parsed()) return cmd_check(check_flags, partitions, brokers, out, err);
    if (compare->parsed()) return cmd_compare(compare_flags, trials, seed, with_replicas, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sf, trials, seed, with_replicas, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace kpp::cli
