#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace kpp::kernels {

namespace {

constexpr double kExactLimit = 9007199254740992.0;  // 2^53

bool cpu_has_avx2() {
#if defined(KPP_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  const char* force = std::getenv("KPP_FORCE_SCALAR");
  if (force != nullptr && *force != '\0' && *force != '0') return Isa::kScalar;
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

// -1 means "not pinned".
std::atomic<int> g_pinned{-1};

void check_columns(std::span<const double> partitions, std::span<const double> brokers,
                   const MetricColumns& out) {
  const auto n = partitions.size();
  if (brokers.size() != n || out.replication_latency.size() != n ||
      out.unavailability.size() != n || out.handles_per_broker.size() != n ||
      out.partitions_per_broker.size() != n || out.pass.size() != n) {
    throw std::invalid_argument("evaluate_plans: column sizes differ");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && cpu_has_avx2());
}

Isa active_isa() {
  const int pinned = g_pinned.load(std::memory_order_relaxed);
  if (pinned >= 0) return static_cast<Isa>(pinned);
  static const Isa detected = detect();
  return detected;
}

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::kScalar;
  g_pinned.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_active_isa() { g_pinned.store(-1, std::memory_order_relaxed); }

ConstraintPass unpack(std::uint8_t bits) {
  return ConstraintPass{(bits & kThroughputOk) != 0, (bits & kOsLoadOk) != 0,
                        (bits & kLatencyOk) != 0, (bits & kUnavailabilityOk) != 0,
                        (bits & kBrokerBoundOk) != 0};
}

Coefficients make_coefficients(const Requirements& req, const MeasuredInputs& meas) {
  return Coefficients{
      req.target_throughput,
      meas.producer_throughput_per_partition,
      meas.consumer_throughput_per_partition,
      static_cast<double>(req.consumers),
      static_cast<double>(req.replication_factor),
      meas.replication_latency_per_partition,
      meas.leader_election_time,
      static_cast<double>(meas.max_open_file_handles),
      req.max_replication_latency,
      req.max_unavailability,
      static_cast<double>(req.available_brokers),
  };
}

bool exact_domain(const Requirements& req, const MeasuredInputs& meas,
                  Count max_partitions, Count max_brokers) {
  const auto p = std::fabs(static_cast<double>(max_partitions));
  const auto b = std::fabs(static_cast<double>(max_brokers));
  const auto r = static_cast<double>(req.replication_factor);
  const double products[] = {
      p * meas.producer_throughput_per_partition,
      p * meas.consumer_throughput_per_partition,
      req.target_throughput,
      p * r * meas.replication_latency_per_partition,
      b * req.max_replication_latency,
      b * static_cast<double>(meas.max_open_file_handles),
      p * meas.leader_election_time,
      b * req.max_unavailability,
  };
  for (double x : products) {
    if (!(x < kExactLimit)) return false;
  }
  return true;
}

void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask, Isa isa) {
#if defined(KPP_BUILD_AVX2)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) {
    avx2::scan_partitions(k, brokers, first_partition, mask);
    return;
  }
#endif
  (void)isa;
  scalar::scan_partitions(k, brokers, first_partition, mask);
}

void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask) {
  scan_partitions(k, brokers, first_partition, mask, active_isa());
}

void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out, Isa isa) {
  check_columns(partitions, brokers, out);
#if defined(KPP_BUILD_AVX2)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) {
    avx2::evaluate_plans(k, partitions, brokers, out);
    return;
  }
#endif
  (void)isa;
  scalar::evaluate_plans(k, partitions, brokers, out);
}

void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out) {
  evaluate_plans(k, partitions, brokers, out, active_isa());
}

}  // namespace kpp::kernels
