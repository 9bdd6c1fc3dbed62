#include "kpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "kpp/kernels.hpp"
#include "kpp/rng.hpp"

namespace kpp {

namespace {

constexpr std::size_t kTrialChunk = 1024;

bool sweepable(Method m) {
  return m == Method::kBroMin || m == Method::kBroMax || m == Method::kMsCnfl;
}

SweepRow solve_point(const SweepSpec& spec, std::size_t point_index, Method method) {
  const Count value = spec.axis_values[point_index];
  const Requirements req = with_axis_value(spec.base_requirements, spec.axis, value);
  const MeasuredInputs& meas = spec.base_measured;

  SweepRow row;
  row.axis = spec.axis;
  row.axis_value = value;
  row.method = method;

  if (method == Method::kMsCnfl) {
    auto agg = aggregate_mscnfl(req, meas, spec.mscnfl_trials,
                                point_seed(spec.master_seed, point_index), spec.mscnfl);
    row.status = agg ? SolveStatus::kPlan : SolveStatus::kDegenerateRange;
    row.mscnfl = agg;
    return row;
  }

  const SolveOutcome out = method == Method::kBroMin ? bromin(req, meas) : bromax(req, meas);
  row.status = out.status;
  if (out.plan) {
    row.plan = out.plan;
    row.metrics = evaluate_plan(*out.plan, req, meas);
  }
  return row;
}

std::vector<SweepRow> solve_all_methods(const SweepSpec& spec, std::size_t point_index) {
  std::vector<Method> methods = spec.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) {
    return method_name(a) < method_name(b);
  });
  std::vector<SweepRow> rows;
  rows.reserve(methods.size());
  for (Method m : methods) rows.push_back(solve_point(spec, point_index, m));
  return rows;
}

}  // namespace

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kConsumers: return "consumers";
    case SweepAxis::kAvailableBrokers: return "brokers";
    case SweepAxis::kReplicationFactor: return "replication";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::kConsumers, SweepAxis::kAvailableBrokers,
                      SweepAxis::kReplicationFactor}) {
    if (axis_name(a) == name) return a;
  }
  return std::nullopt;
}

Requirements with_axis_value(Requirements base, SweepAxis axis, Count value) {
  switch (axis) {
    case SweepAxis::kConsumers: base.consumers = value; break;
    case SweepAxis::kAvailableBrokers: base.available_brokers = value; break;
    case SweepAxis::kReplicationFactor: base.replication_factor = value; break;
  }
  return base;
}

void validate(const SweepSpec& spec) {
  if (spec.axis_values.empty()) throw ValidationError("axis_values must be non-empty");
  if (spec.axis_values.front() < 1) throw ValidationError("axis_values must be positive");
  for (std::size_t i = 1; i < spec.axis_values.size(); ++i) {
    if (spec.axis_values[i] <= spec.axis_values[i - 1])
      throw ValidationError("axis_values must be strictly increasing");
  }
  for (Method m : spec.methods) {
    if (!sweepable(m)) throw ValidationError("sweep methods must be bromin, bromax or mscnfl");
  }
  if (spec.mscnfl_trials < 1) throw ValidationError("mscnfl_trials must be >= 1");
  validate(spec.base_requirements);
  validate(spec.base_measured);
}

std::vector<Count> axis_range(Count from, Count to, Count step) {
  if (step < 1) throw ValidationError("step must be >= 1");
  if (from < 1) throw ValidationError("from must be >= 1");
  if (from > to) throw ValidationError("from must not exceed to");
  std::vector<Count> values;
  for (Count v = from; v <= to; v += step) values.push_back(v);
  return values;
}

SweepSpec default_sweep_spec(SweepAxis axis) {
  SweepSpec spec;
  spec.axis = axis;
  spec.base_requirements = Requirements{};
  switch (axis) {
    case SweepAxis::kConsumers:
      spec.axis_values = axis_range(50, 1000, 50);
      spec.base_requirements.available_brokers = 20;
      spec.base_requirements.replication_factor = 3;
      break;
    case SweepAxis::kAvailableBrokers:
      spec.axis_values = axis_range(3, 50, 1);
      spec.base_requirements.consumers = 100;
      spec.base_requirements.replication_factor = 3;
      break;
    case SweepAxis::kReplicationFactor:
      spec.axis_values = axis_range(2, 15, 1);
      spec.base_requirements.consumers = 100;
      spec.base_requirements.available_brokers = 20;
      break;
  }
  return spec;
}

std::uint64_t trial_seed(std::uint64_t seed, Count trial) {
  return derive_seed(seed, static_cast<std::uint64_t>(trial));
}

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t point_index) {
  // Separate the point and trial derivations so (p, t) never collides with
  // (t, p).
  return derive_seed(SplitMix64::mix(master_seed ^ 0x706f696e74ULL), point_index);
}

std::optional<MsCnflAggregate> aggregate_mscnfl(const Requirements& req,
                                                const MeasuredInputs& meas, Count trials,
                                                std::uint64_t seed,
                                                const MsCnflOptions& opts) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  validate(req);
  validate(meas);
  if (ms_cnfl_ranges(req, opts).partitions_ms < 1) return std::nullopt;

  const auto k = kernels::make_coefficients(req, meas);
  std::vector<double> partitions(kTrialChunk), brokers(kTrialChunk), latency(kTrialChunk),
      unavailability(kTrialChunk), handles(kTrialChunk), per_broker(kTrialChunk);
  std::vector<std::uint8_t> pass(kTrialChunk);

  MsCnflAggregate agg;
  agg.trials = trials;
  Count violations[5] = {};

  for (Count first = 0; first < trials; first += static_cast<Count>(kTrialChunk)) {
    const auto n =
        static_cast<std::size_t>(std::min<Count>(static_cast<Count>(kTrialChunk), trials - first));
    for (std::size_t i = 0; i < n; ++i) {
      const Plan p = *ms_cnfl(req, trial_seed(seed, first + static_cast<Count>(i)), opts).plan;
      partitions[i] = static_cast<double>(p.partitions);
      brokers[i] = static_cast<double>(p.brokers);
    }
    const kernels::MetricColumns cols{
        std::span(latency).first(n), std::span(unavailability).first(n),
        std::span(handles).first(n), std::span(per_broker).first(n), std::span(pass).first(n)};
    kernels::evaluate_plans(k, std::span<const double>(partitions).first(n),
                            std::span<const double>(brokers).first(n), cols);

    // Summed in trial order so the result is independent of the kernel.
    for (std::size_t i = 0; i < n; ++i) {
      agg.mean_partitions += partitions[i];
      agg.mean_brokers += brokers[i];
      agg.mean_replication_latency += latency[i];
      agg.mean_unavailability += unavailability[i];
      agg.mean_handles_per_broker += handles[i];
      agg.mean_partitions_per_broker += per_broker[i];
      const ConstraintPass ok = kernels::unpack(pass[i]);
      violations[0] += !ok.throughput;
      violations[1] += !ok.os_load;
      violations[2] += !ok.latency;
      violations[3] += !ok.unavailability;
      violations[4] += !ok.broker_bound;
    }
  }

  const auto t = static_cast<double>(trials);
  agg.mean_partitions /= t;
  agg.mean_brokers /= t;
  agg.mean_replication_latency /= t;
  agg.mean_unavailability /= t;
  agg.mean_handles_per_broker /= t;
  agg.mean_partitions_per_broker /= t;
  agg.throughput_violation_rate = static_cast<double>(violations[0]) / t;
  agg.os_violation_rate = static_cast<double>(violations[1]) / t;
  agg.latency_violation_rate = static_cast<double>(violations[2]) / t;
  agg.unavailability_violation_rate = static_cast<double>(violations[3]) / t;
  agg.broker_bound_violation_rate = static_cast<double>(violations[4]) / t;
  return agg;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  validate(spec);
  const std::size_t points = spec.axis_values.size();
  std::vector<std::vector<SweepRow>> per_point(points);

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points)));
  if (workers == 1) {
    for (std::size_t i = 0; i < points; ++i) per_point[i] = solve_all_methods(spec, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < points; i = next.fetch_add(1)) {
          per_point[i] = solve_all_methods(spec, i);
        }
      });
    }
  }

  SweepResult result;
  for (auto& rows : per_point) {
    for (auto& row : rows) result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace kpp
