#pragma once

// Data-parallel constraint kernels.
//
// Two consumers drive these: exhaustive enumeration of partition counts at a
// fixed broker count, and element-wise metric evaluation of many randomly
// drawn plans. Every kernel has a scalar reference and an AVX2 variant; the
// variant is picked at runtime from the CPU and both produce bit-identical
// output (same operation order, no FMA contraction).
//
// All arithmetic is in double. Inside exact_domain() that matches the
// integer-exact predicates in model.hpp.

#include <cstdint>
#include <span>
#include <string_view>

#include "kpp/model.hpp"

namespace kpp::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);

/// Best available ISA, unless overridden with set_active_isa() or the
/// KPP_FORCE_SCALAR environment variable.
Isa active_isa();

/// Pins dispatch to `isa`; falls back to scalar if it is unavailable.
void set_active_isa(Isa isa);
void reset_active_isa();

/// Bit positions in the per-plan pass mask.
enum PassBit : std::uint8_t {
  kThroughputOk = 1u << 0,
  kOsLoadOk = 1u << 1,
  kLatencyOk = 1u << 2,
  kUnavailabilityOk = 1u << 3,
  kBrokerBoundOk = 1u << 4,
};
inline constexpr std::uint8_t kAllPass =
    kThroughputOk | kOsLoadOk | kLatencyOk | kUnavailabilityOk | kBrokerBoundOk;

ConstraintPass unpack(std::uint8_t bits);

/// Problem constants flattened to doubles for the vector lanes.
struct Coefficients {
  double target_throughput;
  double producer_throughput;
  double consumer_throughput;
  double consumers;
  double replication_factor;
  double replication_latency;
  double leader_election;
  double max_open_file_handles;
  double max_replication_latency;
  double max_unavailability;
  double available_brokers;
};

Coefficients make_coefficients(const Requirements& req, const MeasuredInputs& meas);

/// True when every product the kernels form for plans with P <= max_partitions
/// and b <= max_brokers stays an exactly representable integer, so the double
/// comparisons agree with the exact model predicates.
bool exact_domain(const Requirements& req, const MeasuredInputs& meas,
                  Count max_partitions, Count max_brokers);

/// mask[i] = pass bits of plan (first_partition + i, brokers).
void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask);
void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask, Isa isa);

struct MetricColumns {
  std::span<double> replication_latency;
  std::span<double> unavailability;
  std::span<double> handles_per_broker;
  std::span<double> partitions_per_broker;
  std::span<std::uint8_t> pass;
};

/// Element-wise PlanMetrics over (partitions[i], brokers[i]). Inputs are
/// integral counts stored as double; every output span must match in size.
void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out);
void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out,
                    Isa isa);

}  // namespace kpp::kernels
