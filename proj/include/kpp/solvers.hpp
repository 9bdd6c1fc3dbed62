#pragma once

// Solvers for the topic partitioning integer program.
//
// bromin/bromax are the two broker-scan heuristics; brute_force_* enumerate
// the whole feasible region and serve as exact oracles; ms_cnfl draws a
// configuration the way vendor rules of thumb would; lp_relax solves the
// real relaxation and shows what naive rounding does to it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kpp/model.hpp"

namespace kpp {

enum class Method {
  kBroMin,
  kBroMax,
  kMsCnfl,
  kBruteForceMax,
  kBruteForceMinBrokers,
  kLpRelax,
};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class SolveStatus {
  kPlan,
  kNoFeasible,
  kStructurallyInfeasible,  // r > B, nothing to search
  kDegenerateRange,         // MS-CNFL partition range is empty
};

struct SolveOutcome {
  Method method = Method::kBroMin;
  SolveStatus status = SolveStatus::kNoFeasible;
  std::optional<Plan> plan;

  bool has_plan() const { return plan.has_value(); }
  std::string message() const;

  bool operator==(const SolveOutcome&) const = default;
};

SolveOutcome bromin(const Requirements& req, const MeasuredInputs& meas);
SolveOutcome bromax(const Requirements& req, const MeasuredInputs& meas);

// Literal double loops (brokers outer, partitions descending inner). O(H_max)
// per broker count; kept to pin the closed form used by bromin/bromax.
SolveOutcome bromin_scan(const Requirements& req, const MeasuredInputs& meas);
SolveOutcome bromax_scan(const Requirements& req, const MeasuredInputs& meas);

/// Largest P that passes the OS-load, latency and unavailability bounds at
/// `brokers`; 0 if none does. Equals the first hit of the descending scan.
Count max_partitions_at(Count brokers, const Requirements& req,
                        const MeasuredInputs& meas);

SolveOutcome brute_force_max(const Requirements& req, const MeasuredInputs& meas);
SolveOutcome brute_force_min_brokers(const Requirements& req,
                                     const MeasuredInputs& meas);

struct MsCnflOptions {
  // Multiply the Confluent per-broker bound by r ("including replicas").
  bool confluent_includes_replicas = false;

  bool operator==(const MsCnflOptions&) const = default;
};

struct MsCnflRanges {
  Count partitions_ms = 0;         // floor(1000 * B / r)
  Count partitions_confluent = 0;  // 100 * B, optionally * r
  Count brokers = 0;               // B
};

MsCnflRanges ms_cnfl_ranges(const Requirements& req, const MsCnflOptions& opts = {});

/// One benchmark draw: P = min(U[1, 1000B/r], U[1, 100B]), b = U[1, B].
/// The result is deliberately not checked for feasibility.
SolveOutcome ms_cnfl(const Requirements& req, std::uint64_t seed,
                     const MsCnflOptions& opts = {});

struct RealPlan {
  double partitions_real = 0;
  double brokers_real = 0;
};

struct LpRelaxation {
  bool real_feasible = false;
  RealPlan real;
  /// Both coordinates floored; has a plan whenever the real LP is feasible.
  SolveOutcome rounded;
  bool rounded_feasible = false;
};

LpRelaxation lp_relax(const Requirements& req, const MeasuredInputs& meas);

}  // namespace kpp
