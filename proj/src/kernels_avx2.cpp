// Built with -mavx2 only; reached through the dispatcher after a CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace kpp::kernels::avx2 {

namespace {

struct Broadcast {
  __m256d target_throughput;
  __m256d producer_throughput;
  __m256d consumer_throughput;
  __m256d consumers;
  __m256d replication_factor;
  __m256d replication_latency;
  __m256d leader_election;
  __m256d max_open_file_handles;
  __m256d max_replication_latency;
  __m256d max_unavailability;
  __m256d available_brokers;

  explicit Broadcast(const Coefficients& k)
      : target_throughput(_mm256_set1_pd(k.target_throughput)),
        producer_throughput(_mm256_set1_pd(k.producer_throughput)),
        consumer_throughput(_mm256_set1_pd(k.consumer_throughput)),
        consumers(_mm256_set1_pd(k.consumers)),
        replication_factor(_mm256_set1_pd(k.replication_factor)),
        replication_latency(_mm256_set1_pd(k.replication_latency)),
        leader_election(_mm256_set1_pd(k.leader_election)),
        max_open_file_handles(_mm256_set1_pd(k.max_open_file_handles)),
        max_replication_latency(_mm256_set1_pd(k.max_replication_latency)),
        max_unavailability(_mm256_set1_pd(k.max_unavailability)),
        available_brokers(_mm256_set1_pd(k.available_brokers)) {}
};

inline __m256i select_bit(__m256d cond, std::uint8_t bit) {
  return _mm256_and_si256(_mm256_castpd_si256(cond), _mm256_set1_epi64x(bit));
}

// Same comparisons, same operand order as the scalar pass_bits().
inline __m256i pass_bits(const Broadcast& k, __m256d p, __m256d b) {
  const __m256d pr = _mm256_mul_pd(p, k.replication_factor);

  __m256d thr = _mm256_cmp_pd(k.target_throughput, _mm256_mul_pd(p, k.producer_throughput),
                              _CMP_LE_OQ);
  thr = _mm256_and_pd(thr, _mm256_cmp_pd(k.target_throughput,
                                         _mm256_mul_pd(p, k.consumer_throughput),
                                         _CMP_LE_OQ));
  thr = _mm256_and_pd(thr, _mm256_cmp_pd(p, k.consumers, _CMP_GE_OQ));

  const __m256d os =
      _mm256_cmp_pd(pr, _mm256_mul_pd(b, k.max_open_file_handles), _CMP_LE_OQ);
  const __m256d lat = _mm256_cmp_pd(_mm256_mul_pd(pr, k.replication_latency),
                                    _mm256_mul_pd(b, k.max_replication_latency),
                                    _CMP_LE_OQ);
  const __m256d unav = _mm256_cmp_pd(_mm256_mul_pd(p, k.leader_election),
                                     _mm256_mul_pd(b, k.max_unavailability), _CMP_LE_OQ);
  const __m256d brk = _mm256_and_pd(_mm256_cmp_pd(k.replication_factor, b, _CMP_LE_OQ),
                                    _mm256_cmp_pd(b, k.available_brokers, _CMP_LE_OQ));

  __m256i bits = select_bit(thr, kThroughputOk);
  bits = _mm256_or_si256(bits, select_bit(os, kOsLoadOk));
  bits = _mm256_or_si256(bits, select_bit(lat, kLatencyOk));
  bits = _mm256_or_si256(bits, select_bit(unav, kUnavailabilityOk));
  bits = _mm256_or_si256(bits, select_bit(brk, kBrokerBoundOk));
  return bits;
}

inline void store_bits(__m256i bits, std::uint8_t* dst) {
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), bits);
  for (int j = 0; j < 4; ++j) dst[j] = static_cast<std::uint8_t>(lanes[j]);
}

}  // namespace

void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask) {
  const Broadcast kv(k);
  const __m256d b = _mm256_set1_pd(static_cast<double>(brokers));
  const __m256d step = _mm256_set1_pd(4.0);
  const auto first = static_cast<double>(first_partition);
  __m256d p = _mm256_setr_pd(first, first + 1, first + 2, first + 3);

  const std::size_t n = mask.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store_bits(pass_bits(kv, p, b), mask.data() + i);
    p = _mm256_add_pd(p, step);
  }
  if (i < n) {
    scalar::scan_partitions(k, brokers, first_partition + static_cast<Count>(i),
                            mask.subspan(i));
  }
}

void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out) {
  const Broadcast kv(k);
  const std::size_t n = partitions.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(partitions.data() + i);
    const __m256d b = _mm256_loadu_pd(brokers.data() + i);
    const __m256d pr = _mm256_mul_pd(p, kv.replication_factor);
    _mm256_storeu_pd(out.replication_latency.data() + i,
                     _mm256_div_pd(_mm256_mul_pd(pr, kv.replication_latency), b));
    _mm256_storeu_pd(out.unavailability.data() + i,
                     _mm256_div_pd(_mm256_mul_pd(p, kv.leader_election), b));
    _mm256_storeu_pd(out.handles_per_broker.data() + i, _mm256_div_pd(pr, b));
    _mm256_storeu_pd(out.partitions_per_broker.data() + i, _mm256_div_pd(p, b));
    store_bits(pass_bits(kv, p, b), out.pass.data() + i);
  }
  if (i < n) {
    const MetricColumns tail{
        out.replication_latency.subspan(i), out.unavailability.subspan(i),
        out.handles_per_broker.subspan(i), out.partitions_per_broker.subspan(i),
        out.pass.subspan(i)};
    scalar::evaluate_plans(k, partitions.subspan(i), brokers.subspan(i), tail);
  }
}

}  // namespace kpp::kernels::avx2
