#pragma once

// Parameter sweeps comparing the solvers along one requirement axis.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "kpp/model.hpp"
#include "kpp/solvers.hpp"

namespace kpp {

enum class SweepAxis { kConsumers, kAvailableBrokers, kReplicationFactor };

/// CSV / CLI spelling: consumers, brokers, replication.
std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

/// Copy of `base` with the axis field set to `value`.
Requirements with_axis_value(Requirements base, SweepAxis axis, Count value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kConsumers;
  std::vector<Count> axis_values;
  Requirements base_requirements;
  MeasuredInputs base_measured;
  std::vector<Method> methods{Method::kBroMin, Method::kBroMax, Method::kMsCnfl};
  Count mscnfl_trials = 1000;
  std::uint64_t master_seed = 0;
  MsCnflOptions mscnfl;

  bool operator==(const SweepSpec&) const = default;
};

/// Throws ValidationError on empty or non-increasing axis values, a method
/// outside {bromin, bromax, mscnfl}, or trials < 1.
void validate(const SweepSpec& spec);

/// Reconstructed default sweeps: consumers 50..1000/50 (B=20, r=3), available
/// brokers 3..50 (c=100, r=3), replication factor 2..15 (c=100, B=20).
SweepSpec default_sweep_spec(SweepAxis axis);

/// Inclusive arithmetic range; throws ValidationError if from > to or step < 1.
std::vector<Count> axis_range(Count from, Count to, Count step);

struct MsCnflAggregate {
  Count trials = 0;
  double mean_partitions = 0;
  double mean_brokers = 0;
  double mean_replication_latency = 0;
  double mean_unavailability = 0;
  double mean_handles_per_broker = 0;
  double mean_partitions_per_broker = 0;
  // Fraction of trials failing each constraint.
  double throughput_violation_rate = 0;
  double os_violation_rate = 0;
  double latency_violation_rate = 0;
  double unavailability_violation_rate = 0;
  double broker_bound_violation_rate = 0;
};

/// Seed of trial `trial` under `seed`; trial i of aggregate_mscnfl is
/// ms_cnfl(req, trial_seed(seed, i)).
std::uint64_t trial_seed(std::uint64_t seed, Count trial);

/// Seed handed to aggregate_mscnfl for sweep point `point_index`.
std::uint64_t point_seed(std::uint64_t master_seed, std::size_t point_index);

/// Means and violation fractions over `trials` independent MS-CNFL draws.
/// Returns nullopt when the draw range is degenerate.
std::optional<MsCnflAggregate> aggregate_mscnfl(const Requirements& req,
                                                const MeasuredInputs& meas, Count trials,
                                                std::uint64_t seed,
                                                const MsCnflOptions& opts = {});

struct SweepRow {
  SweepAxis axis = SweepAxis::kConsumers;
  Count axis_value = 0;
  Method method = Method::kBroMin;
  SolveStatus status = SolveStatus::kNoFeasible;

  // Exactly one of these is set when status == kPlan.
  std::optional<Plan> plan;
  std::optional<MsCnflAggregate> mscnfl;
  std::optional<PlanMetrics> metrics;  // set together with `plan`

  bool feasible() const { return status == SolveStatus::kPlan; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Runs every method at every axis value. Points are spread over `threads`
/// workers; the output does not depend on the thread count.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

}  // namespace kpp
