#include "kernels_impl.hpp"

namespace kpp::kernels::scalar {

namespace {

// Mirrors the double path of detail::product_leq operand for operand.
inline std::uint8_t pass_bits(const Coefficients& k, double p, double b) {
  std::uint8_t bits = 0;
  if (k.target_throughput <= p * k.producer_throughput &&
      k.target_throughput <= p * k.consumer_throughput && p >= k.consumers)
    bits |= kThroughputOk;
  if (p * k.replication_factor <= b * k.max_open_file_handles) bits |= kOsLoadOk;
  if ((p * k.replication_factor) * k.replication_latency <= b * k.max_replication_latency)
    bits |= kLatencyOk;
  if (p * k.leader_election <= b * k.max_unavailability) bits |= kUnavailabilityOk;
  if (k.replication_factor <= b && b <= k.available_brokers) bits |= kBrokerBoundOk;
  return bits;
}

}  // namespace

void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask) {
  const auto b = static_cast<double>(brokers);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto p = static_cast<double>(first_partition + static_cast<Count>(i));
    mask[i] = pass_bits(k, p, b);
  }
}

void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out) {
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const double p = partitions[i];
    const double b = brokers[i];
    const double pr = p * k.replication_factor;
    out.replication_latency[i] = (pr * k.replication_latency) / b;
    out.unavailability[i] = (p * k.leader_election) / b;
    out.handles_per_broker[i] = pr / b;
    out.partitions_per_broker[i] = p / b;
    out.pass[i] = pass_bits(k, p, b);
  }
}

}  // namespace kpp::kernels::scalar
