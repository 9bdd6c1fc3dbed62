#include "kpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpp {

namespace {

constexpr Count kMaxCount = (Count{1} << 31) - 1;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

}  // namespace

void validate(const MeasuredInputs& meas) {
  require(positive_finite(meas.producer_throughput_per_partition),
          "producer_throughput_per_partition must be > 0");
  require(positive_finite(meas.consumer_throughput_per_partition),
          "consumer_throughput_per_partition must be > 0");
  require(meas.max_open_file_handles >= 1, "max_open_file_handles must be >= 1");
  require(meas.max_open_file_handles <= kMaxCount,
          "max_open_file_handles exceeds supported range");
  require(positive_finite(meas.replication_latency_per_partition),
          "replication_latency_per_partition must be > 0");
  require(positive_finite(meas.leader_election_time),
          "leader_election_time must be > 0");
}

void validate(const Requirements& req) {
  require(positive_finite(req.target_throughput), "target_throughput must be > 0");
  require(req.consumers >= 1, "consumers must be >= 1");
  require(req.replication_factor >= 1, "replication_factor must be >= 1");
  require(positive_finite(req.max_replication_latency),
          "max_replication_latency must be > 0");
  require(positive_finite(req.max_unavailability), "max_unavailability must be > 0");
  require(req.available_brokers >= 1, "available_brokers must be >= 1");
  require(req.consumers <= kMaxCount && req.replication_factor <= kMaxCount &&
              req.available_brokers <= kMaxCount,
          "count exceeds supported range");
}

void validate(const Plan& plan) {
  require(plan.partitions >= 1, "partitions must be >= 1");
  require(plan.brokers >= 1, "brokers must be >= 1");
}

namespace detail {

namespace {

bool small_integer(double x) {
  return std::fabs(x) <= static_cast<double>(kMaxCount) && std::trunc(x) == x;
}

}  // namespace

bool product_leq(double a, double b, double c, double d, double e) {
  if (small_integer(a) && small_integer(b) && small_integer(c) &&
      small_integer(d) && small_integer(e)) {
    using I = __int128;
    const I lhs = I(static_cast<std::int64_t>(a)) * I(static_cast<std::int64_t>(b)) *
                  I(static_cast<std::int64_t>(c));
    const I rhs = I(static_cast<std::int64_t>(d)) * I(static_cast<std::int64_t>(e));
    return lhs <= rhs;
  }
  return (a * b) * c <= d * e;
}

}  // namespace detail

using detail::product_leq;

bool check_throughput(const Plan& plan, const Requirements& req,
                      const MeasuredInputs& meas) {
  const auto p = static_cast<double>(plan.partitions);
  return product_leq(req.target_throughput, 1, 1, p,
                     meas.producer_throughput_per_partition) &&
         product_leq(req.target_throughput, 1, 1, p,
                     meas.consumer_throughput_per_partition) &&
         plan.partitions >= req.consumers;
}

bool check_os_load(const Plan& plan, const Requirements& req,
                   const MeasuredInputs& meas) {
  return product_leq(static_cast<double>(plan.partitions),
                     static_cast<double>(req.replication_factor), 1,
                     static_cast<double>(plan.brokers),
                     static_cast<double>(meas.max_open_file_handles));
}

bool check_latency(const Plan& plan, const Requirements& req,
                   const MeasuredInputs& meas) {
  return product_leq(static_cast<double>(plan.partitions),
                     static_cast<double>(req.replication_factor),
                     meas.replication_latency_per_partition,
                     static_cast<double>(plan.brokers), req.max_replication_latency);
}

bool check_unavailability(const Plan& plan, const Requirements& req,
                          const MeasuredInputs& meas) {
  return product_leq(static_cast<double>(plan.partitions), meas.leader_election_time, 1,
                     static_cast<double>(plan.brokers), req.max_unavailability);
}

bool check_broker_bound(const Plan& plan, const Requirements& req) {
  return req.replication_factor <= plan.brokers &&
         plan.brokers <= req.available_brokers;
}

Count min_partitions(const Requirements& req, const MeasuredInputs& meas) {
  const double real_bound =
      std::max({req.target_throughput / meas.producer_throughput_per_partition,
                req.target_throughput / meas.consumer_throughput_per_partition,
                static_cast<double>(req.consumers)});
  // The division can land one ulp off an integer; settle on the exact
  // smallest P by stepping with the predicate itself.
  Count p = std::max<Count>(1, static_cast<Count>(std::ceil(real_bound)));
  const auto passes = [&](Count candidate) {
    return check_throughput(Plan{candidate, 1}, req, meas);
  };
  while (!passes(p)) ++p;
  while (p > 1 && passes(p - 1)) --p;
  return p;
}

Count max_partitions_os(Count brokers, const Requirements& req,
                        const MeasuredInputs& meas) {
  return brokers * meas.max_open_file_handles / req.replication_factor;
}

bool is_feasible(const Plan& plan, const Requirements& req,
                 const MeasuredInputs& meas) {
  return check_throughput(plan, req, meas) && check_os_load(plan, req, meas) &&
         check_latency(plan, req, meas) && check_unavailability(plan, req, meas) &&
         check_broker_bound(plan, req);
}

PlanMetrics evaluate_plan(const Plan& plan, const Requirements& req,
                          const MeasuredInputs& meas) {
  const auto p = static_cast<double>(plan.partitions);
  const auto b = static_cast<double>(plan.brokers);
  const auto r = static_cast<double>(req.replication_factor);

  PlanMetrics m;
  m.replication_latency = ((p * r) * meas.replication_latency_per_partition) / b;
  m.unavailability = (p * meas.leader_election_time) / b;
  m.handles_per_broker = (p * r) / b;
  m.partitions_per_broker = p / b;
  m.producer_capacity = p * meas.producer_throughput_per_partition;
  m.consumer_capacity = p * meas.consumer_throughput_per_partition;
  m.pass.throughput = check_throughput(plan, req, meas);
  m.pass.os_load = check_os_load(plan, req, meas);
  m.pass.latency = check_latency(plan, req, meas);
  m.pass.unavailability = check_unavailability(plan, req, meas);
  m.pass.broker_bound = check_broker_bound(plan, req);
  return m;
}

}  // namespace kpp
