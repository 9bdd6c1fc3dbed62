#pragma once

// Per-ISA entry points behind the dispatcher in kernels_dispatch.cpp.

#include "kpp/kernels.hpp"

namespace kpp::kernels {

namespace scalar {
void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask);
void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out);
}  // namespace scalar

#if defined(KPP_BUILD_AVX2)
namespace avx2 {
void scan_partitions(const Coefficients& k, Count brokers, Count first_partition,
                     std::span<std::uint8_t> mask);
void evaluate_plans(const Coefficients& k, std::span<const double> partitions,
                    std::span<const double> brokers, const MetricColumns& out);
}  // namespace avx2
#endif

}  // namespace kpp::kernels
