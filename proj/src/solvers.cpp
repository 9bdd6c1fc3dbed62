#include "kpp/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "kpp/kernels.hpp"
#include "kpp/rng.hpp"

namespace kpp {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::kBroMin, "bromin"},
    {Method::kBroMax, "bromax"},
    {Method::kMsCnfl, "mscnfl"},
    {Method::kBruteForceMax, "brute_force_max"},
    {Method::kBruteForceMinBrokers, "brute_force_min_brokers"},
    {Method::kLpRelax, "lp"},
}};

SolveOutcome with_status(Method m, SolveStatus s) { return SolveOutcome{m, s, std::nullopt}; }

SolveOutcome with_plan(Method m, Plan p) { return SolveOutcome{m, SolveStatus::kPlan, p}; }

void validate_inputs(const Requirements& req, const MeasuredInputs& meas) {
  validate(req);
  validate(meas);
}

// Largest P in [0, cap] with pred(P), given pred monotone (true then false)
// and `guess` close to the answer.
template <class Pred>
Count largest_passing(Count cap, double guess, Pred pred) {
  Count p = cap;
  if (std::isfinite(guess) && guess < static_cast<double>(cap)) {
    p = std::max<Count>(0, static_cast<Count>(std::floor(guess)));
  }
  while (p < cap && pred(p + 1)) ++p;
  while (p > 0 && !pred(p)) --p;
  return p;
}

template <class BrokerRange>
SolveOutcome scan_literal(Method method, BrokerRange brokers, const Requirements& req,
                          const MeasuredInputs& meas) {
  const Count lower = min_partitions(req, meas);
  for (Count b : brokers) {
    for (Count p = max_partitions_os(b, req, meas); p >= lower; --p) {
      const Plan plan{p, b};
      if (check_latency(plan, req, meas) && check_unavailability(plan, req, meas)) {
        return with_plan(method, plan);
      }
    }
  }
  return with_status(method, SolveStatus::kNoFeasible);
}

std::vector<Count> ascending(Count from, Count to) {
  std::vector<Count> v;
  for (Count b = from; b <= to; ++b) v.push_back(b);
  return v;
}

// Highest feasible P at broker count b found by testing every candidate in
// [1, floor(b * H_max / r)]; 0 when none is feasible.
class Enumerator {
 public:
  Enumerator(const Requirements& req, const MeasuredInputs& meas)
      : req_(req),
        meas_(meas),
        coeffs_(kernels::make_coefficients(req, meas)),
        vectorized_(kernels::exact_domain(
            req, meas, max_partitions_os(req.available_brokers, req, meas),
            req.available_brokers)) {}

  Count highest_feasible(Count b) {
    const Count top = max_partitions_os(b, req_, meas_);
    Count best = 0;
    if (!vectorized_) {
      for (Count p = 1; p <= top; ++p) {
        if (is_feasible(Plan{p, b}, req_, meas_)) best = p;
      }
      return best;
    }
    for (Count first = 1; first <= top; first += kChunk) {
      const auto n = static_cast<std::size_t>(std::min<Count>(kChunk, top - first + 1));
      std::span<std::uint8_t> mask(mask_.data(), n);
      kernels::scan_partitions(coeffs_, b, first, mask);
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i] == kernels::kAllPass) best = first + static_cast<Count>(i);
      }
    }
    return best;
  }

 private:
  static constexpr Count kChunk = 4096;

  const Requirements& req_;
  const MeasuredInputs& meas_;
  kernels::Coefficients coeffs_;
  bool vectorized_;
  std::array<std::uint8_t, kChunk> mask_{};
};

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

std::string SolveOutcome::message() const {
  switch (status) {
    case SolveStatus::kPlan:
      return "P=" + std::to_string(plan->partitions) + " b=" + std::to_string(plan->brokers);
    case SolveStatus::kNoFeasible:
      return "No feasible solution found.";
    case SolveStatus::kStructurallyInfeasible:
      return "Structurally infeasible: replication factor exceeds available brokers.";
    case SolveStatus::kDegenerateRange:
      return "Degenerate MS-CNFL range: floor(1000*B/r) < 1.";
  }
  return {};
}

Count max_partitions_at(Count brokers, const Requirements& req,
                        const MeasuredInputs& meas) {
  const Count os = max_partitions_os(brokers, req, meas);
  const auto b = static_cast<double>(brokers);
  const auto r = static_cast<double>(req.replication_factor);

  const Count lat = largest_passing(
      os, b * req.max_replication_latency / (r * meas.replication_latency_per_partition),
      [&](Count p) { return check_latency(Plan{p, brokers}, req, meas); });
  return largest_passing(lat, b * req.max_unavailability / meas.leader_election_time,
                         [&](Count p) {
                           return check_unavailability(Plan{p, brokers}, req, meas);
                         });
}

SolveOutcome bromin(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBroMin, SolveStatus::kStructurallyInfeasible);
  const Count lower = min_partitions(req, meas);
  for (Count b = req.replication_factor; b <= req.available_brokers; ++b) {
    const Count p = max_partitions_at(b, req, meas);
    if (p >= lower) return with_plan(Method::kBroMin, Plan{p, b});
  }
  return with_status(Method::kBroMin, SolveStatus::kNoFeasible);
}

SolveOutcome bromax(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBroMax, SolveStatus::kStructurallyInfeasible);
  const Count lower = min_partitions(req, meas);
  for (Count b = req.available_brokers; b >= req.replication_factor; --b) {
    const Count p = max_partitions_at(b, req, meas);
    if (p >= lower) return with_plan(Method::kBroMax, Plan{p, b});
  }
  return with_status(Method::kBroMax, SolveStatus::kNoFeasible);
}

SolveOutcome bromin_scan(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBroMin, SolveStatus::kStructurallyInfeasible);
  return scan_literal(Method::kBroMin,
                      ascending(req.replication_factor, req.available_brokers), req, meas);
}

SolveOutcome bromax_scan(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBroMax, SolveStatus::kStructurallyInfeasible);
  auto brokers = ascending(req.replication_factor, req.available_brokers);
  std::reverse(brokers.begin(), brokers.end());
  return scan_literal(Method::kBroMax, brokers, req, meas);
}

SolveOutcome brute_force_max(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBruteForceMax, SolveStatus::kStructurallyInfeasible);
  Enumerator e(req, meas);
  std::optional<Plan> best;
  for (Count b = req.replication_factor; b <= req.available_brokers; ++b) {
    const Count p = e.highest_feasible(b);
    // >= so that ties go to the larger broker count.
    if (p > 0 && (!best || p >= best->partitions)) best = Plan{p, b};
  }
  if (!best) return with_status(Method::kBruteForceMax, SolveStatus::kNoFeasible);
  return with_plan(Method::kBruteForceMax, *best);
}

SolveOutcome brute_force_min_brokers(const Requirements& req,
                                     const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  if (structurally_infeasible(req))
    return with_status(Method::kBruteForceMinBrokers, SolveStatus::kStructurallyInfeasible);
  Enumerator e(req, meas);
  for (Count b = req.replication_factor; b <= req.available_brokers; ++b) {
    const Count p = e.highest_feasible(b);
    if (p > 0) return with_plan(Method::kBruteForceMinBrokers, Plan{p, b});
  }
  return with_status(Method::kBruteForceMinBrokers, SolveStatus::kNoFeasible);
}

MsCnflRanges ms_cnfl_ranges(const Requirements& req, const MsCnflOptions& opts) {
  MsCnflRanges ranges;
  ranges.partitions_ms = 1000 * req.available_brokers / req.replication_factor;
  ranges.partitions_confluent = 100 * req.available_brokers;
  if (opts.confluent_includes_replicas) ranges.partitions_confluent *= req.replication_factor;
  ranges.brokers = req.available_brokers;
  return ranges;
}

SolveOutcome ms_cnfl(const Requirements& req, std::uint64_t seed, const MsCnflOptions& opts) {
  validate(req);
  const MsCnflRanges ranges = ms_cnfl_ranges(req, opts);
  if (ranges.partitions_ms < 1) return with_status(Method::kMsCnfl, SolveStatus::kDegenerateRange);

  SplitMix64 rng(seed);
  const auto ms = rng.uniform(static_cast<std::uint64_t>(ranges.partitions_ms));
  const auto confluent = rng.uniform(static_cast<std::uint64_t>(ranges.partitions_confluent));
  const auto brokers = rng.uniform(static_cast<std::uint64_t>(ranges.brokers));
  return with_plan(Method::kMsCnfl, Plan{static_cast<Count>(std::min(ms, confluent)),
                                         static_cast<Count>(brokers)});
}

LpRelaxation lp_relax(const Requirements& req, const MeasuredInputs& meas) {
  validate_inputs(req, meas);
  LpRelaxation lp;
  lp.rounded = with_status(Method::kLpRelax, SolveStatus::kStructurallyInfeasible);
  if (structurally_infeasible(req)) return lp;

  // Every upper bound is P <= b * const and the lower bound does not depend
  // on b, so the real optimum sits at b = B.
  const auto big_b = static_cast<double>(req.available_brokers);
  const auto r = static_cast<double>(req.replication_factor);
  const double per_broker =
      std::min({static_cast<double>(meas.max_open_file_handles) / r,
                req.max_replication_latency / (r * meas.replication_latency_per_partition),
                req.max_unavailability / meas.leader_election_time});
  const double lower =
      std::max({req.target_throughput / meas.producer_throughput_per_partition,
                req.target_throughput / meas.consumer_throughput_per_partition,
                static_cast<double>(req.consumers)});

  lp.real = RealPlan{big_b * per_broker, big_b};
  lp.real_feasible = lp.real.partitions_real >= lower;
  if (!lp.real_feasible) {
    lp.rounded = with_status(Method::kLpRelax, SolveStatus::kNoFeasible);
    return lp;
  }

  const Plan rounded{std::max<Count>(1, static_cast<Count>(std::floor(lp.real.partitions_real))),
                     req.available_brokers};
  lp.rounded = with_plan(Method::kLpRelax, rounded);
  lp.rounded_feasible = is_feasible(rounded, req, meas);
  return lp;
}

}  // namespace kpp
