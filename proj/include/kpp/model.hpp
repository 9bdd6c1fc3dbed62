#pragma once

// Domain types and constraint predicates for sizing a single Kafka topic.
//
// Units are fixed across the library: data rates in MB/s, durations in
// milliseconds, file handles as a plain count.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kpp {

using Count = std::int64_t;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cluster characteristics obtained from benchmarking the deployment.
struct MeasuredInputs {
  double producer_throughput_per_partition = 10.0;  // MB/s
  double consumer_throughput_per_partition = 20.0;  // MB/s
  Count max_open_file_handles = 10000;              // per broker
  double replication_latency_per_partition = 1.0;   // ms
  double leader_election_time = 5.0;                // ms

  bool operator==(const MeasuredInputs&) const = default;
};

/// What the application asks of the topic.
struct Requirements {
  double target_throughput = 100.0;       // MB/s
  Count consumers = 100;
  Count replication_factor = 3;
  double max_replication_latency = 200.0;  // ms
  double max_unavailability = 2000.0;      // ms
  Count available_brokers = 10;

  bool operator==(const Requirements&) const = default;
};

/// Partition and broker counts chosen for the topic.
struct Plan {
  Count partitions = 1;
  Count brokers = 1;

  bool operator==(const Plan&) const = default;
};

struct ConstraintPass {
  bool throughput = false;
  bool os_load = false;
  bool latency = false;
  bool unavailability = false;
  bool broker_bound = false;

  bool all() const {
    return throughput && os_load && latency && unavailability && broker_bound;
  }
  bool operator==(const ConstraintPass&) const = default;
};

struct PlanMetrics {
  double replication_latency = 0;   // ms
  double unavailability = 0;        // ms
  double handles_per_broker = 0;
  double partitions_per_broker = 0;
  double producer_capacity = 0;     // MB/s
  double consumer_capacity = 0;     // MB/s
  ConstraintPass pass;
};

// Throw ValidationError naming the first violated invariant.
void validate(const MeasuredInputs& meas);
void validate(const Requirements& req);
void validate(const Plan& plan);

/// Smallest integral partition count meeting the throughput and consumer
/// parallelism lower bound.
Count min_partitions(const Requirements& req, const MeasuredInputs& meas);

/// Largest partition count the open-file-handle budget of `brokers` allows.
Count max_partitions_os(Count brokers, const Requirements& req,
                        const MeasuredInputs& meas);

bool check_throughput(const Plan& plan, const Requirements& req,
                      const MeasuredInputs& meas);
bool check_os_load(const Plan& plan, const Requirements& req,
                   const MeasuredInputs& meas);
bool check_latency(const Plan& plan, const Requirements& req,
                   const MeasuredInputs& meas);
bool check_unavailability(const Plan& plan, const Requirements& req,
                          const MeasuredInputs& meas);
bool check_broker_bound(const Plan& plan, const Requirements& req);

bool is_feasible(const Plan& plan, const Requirements& req,
                 const MeasuredInputs& meas);

PlanMetrics evaluate_plan(const Plan& plan, const Requirements& req,
                          const MeasuredInputs& meas);

/// r > B leaves no admissible broker count at all.
inline bool structurally_infeasible(const Requirements& req) {
  return req.replication_factor > req.available_brokers;
}

namespace detail {

/// a*b*c <= d*e. Exact in 128-bit integers when every operand is an
/// integer below 2^31 in magnitude, plain double arithmetic otherwise.
bool product_leq(double a, double b, double c, double d, double e);

}  // namespace detail

}  // namespace kpp
