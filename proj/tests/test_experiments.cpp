#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kpp/experiments.hpp"
#include "kpp/io.hpp"
#include "kpp/kernels.hpp"
#include "test_support.hpp"

using namespace kpp;
using kpp::test::default_measured;
using kpp::test::requirements;

namespace {

SweepSpec consumer_spec(std::vector<Count> values, std::vector<Method> methods) {
  SweepSpec spec;
  spec.axis = SweepAxis::kConsumers;
  spec.axis_values = std::move(values);
  spec.base_requirements = requirements(1, 3, 10);
  spec.methods = std::move(methods);
  spec.mscnfl_trials = 200;
  spec.master_seed = 9;
  return spec;
}

std::vector<const SweepRow*> rows_for(const SweepResult& r, Method m) {
  std::vector<const SweepRow*> out;
  for (const auto& row : r.rows)
    if (row.method == m) out.push_back(&row);
  return out;
}

}  // namespace

TEST_CASE("run_sweep consumer examples") {
  const auto result = run_sweep(consumer_spec({100, 500, 1000}, {Method::kBroMin, Method::kBroMax}));
  REQUIRE(result.rows.size() == 6);

  const auto mins = rows_for(result, Method::kBroMin);
  REQUIRE(mins.size() == 3);
  CHECK(mins[0]->plan == Plan{200, 3});
  CHECK(mins[1]->plan == Plan{533, 8});
  CHECK_FALSE(mins[2]->feasible());
  CHECK_FALSE(mins[2]->metrics.has_value());

  const auto maxes = rows_for(result, Method::kBroMax);
  CHECK(maxes[0]->plan->partitions == 666);
  CHECK(maxes[1]->plan->partitions == 666);
  CHECK_FALSE(maxes[2]->feasible());
}

TEST_CASE("rows are ordered by axis value then method name") {
  const auto result = run_sweep(
      consumer_spec({100, 200}, {Method::kMsCnfl, Method::kBroMin, Method::kBroMax}));
  REQUIRE(result.rows.size() == 6);
  const char* expected[] = {"bromax", "bromin", "mscnfl"};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(result.rows[i].axis_value == (i < 3 ? 100 : 200));
    CHECK(method_name(result.rows[i].method) == expected[i % 3]);
  }
}

TEST_CASE("empty method set gives no rows") {
  const auto result = run_sweep(consumer_spec({100}, {}));
  CHECK(result.rows.empty());
}

TEST_CASE("structural infeasibility becomes a flagged row") {
  SweepSpec spec;
  spec.axis = SweepAxis::kReplicationFactor;
  spec.axis_values = {2, 3, 4, 5};
  spec.base_requirements = requirements(10, 1, 4);
  spec.mscnfl_trials = 10;
  const auto result = run_sweep(spec);
  REQUIRE(result.rows.size() == 12);
  for (const auto& row : result.rows) {
    if (row.axis_value == 5 && row.method != Method::kMsCnfl) {
      CHECK(row.status == SolveStatus::kStructurallyInfeasible);
      CHECK_FALSE(row.feasible());
    }
  }
  // MS-CNFL still draws at r > B; its range is floor(4000 / 5) >= 1.
  CHECK(result.rows.back().method == Method::kMsCnfl);
  CHECK(result.rows.back().feasible());
}

TEST_CASE("aggregate_mscnfl") {
  const auto meas = default_measured();

  SUBCASE("one trial equals the single draw") {
    const auto req = requirements(100, 3, 10);
    const auto agg = aggregate_mscnfl(req, meas, 1, 77);
    REQUIRE(agg);
    const Plan p = *ms_cnfl(req, trial_seed(77, 0)).plan;
    const PlanMetrics m = evaluate_plan(p, req, meas);
    CHECK(agg->mean_partitions == static_cast<double>(p.partitions));
    CHECK(agg->mean_brokers == static_cast<double>(p.brokers));
    CHECK(agg->mean_replication_latency == m.replication_latency);
    CHECK(agg->mean_unavailability == m.unavailability);
    CHECK(agg->mean_handles_per_broker == m.handles_per_broker);
    CHECK(agg->mean_partitions_per_broker == m.partitions_per_broker);
    CHECK(agg->latency_violation_rate == (m.pass.latency ? 0.0 : 1.0));
    CHECK(agg->os_violation_rate == (m.pass.os_load ? 0.0 : 1.0));
    CHECK(agg->unavailability_violation_rate == (m.pass.unavailability ? 0.0 : 1.0));
  }
  SUBCASE("degenerate draw") {
    const auto agg = aggregate_mscnfl(requirements(1, 1000, 1), meas, 500, 3);
    REQUIRE(agg);
    CHECK(agg->mean_partitions == 1.0);
    CHECK(agg->mean_brokers == 1.0);
  }
  SUBCASE("latency is violated on average at r=3, B=20") {
    const auto agg = aggregate_mscnfl(requirements(100, 3, 20), meas, 1000, 1);
    REQUIRE(agg);
    CHECK(agg->mean_replication_latency > 200.0);
    CHECK(agg->latency_violation_rate > 0.0);
  }
  SUBCASE("empty range") {
    CHECK_FALSE(aggregate_mscnfl(requirements(1, 1001, 1), meas, 10, 3).has_value());
  }
  SUBCASE("independent of kernel and chunking") {
    const auto req = requirements(100, 4, 17);
    kernels::set_active_isa(kernels::Isa::kScalar);
    const auto s = aggregate_mscnfl(req, meas, 2500, 5);
    kernels::set_active_isa(kernels::Isa::kAvx2);
    const auto v = aggregate_mscnfl(req, meas, 2500, 5);
    kernels::reset_active_isa();
    REQUIRE(s);
    REQUIRE(v);
    CHECK(s->mean_replication_latency == v->mean_replication_latency);
    CHECK(s->mean_unavailability == v->mean_unavailability);
    CHECK(s->latency_violation_rate == v->latency_violation_rate);

    // Plain per-trial loop through the model gives the same sums.
    double lat = 0;
    Count viol = 0;
    for (Count t = 0; t < 2500; ++t) {
      const auto m = evaluate_plan(*ms_cnfl(req, trial_seed(5, t)).plan, req, meas);
      lat += m.replication_latency;
      viol += !m.pass.latency;
    }
    CHECK(s->mean_replication_latency == lat / 2500.0);
    CHECK(s->latency_violation_rate == static_cast<double>(viol) / 2500.0);
  }
  SUBCASE("trials < 1") {
    CHECK_THROWS_AS(aggregate_mscnfl(requirements(1, 1, 1), meas, 0, 3), ValidationError);
  }
}

TEST_CASE("seed derivation separates points and trials") {
  CHECK(point_seed(1, 0) != point_seed(1, 1));
  CHECK(point_seed(1, 0) != point_seed(2, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(point_seed(1, 0), 1) != trial_seed(point_seed(1, 1), 0));
}

TEST_CASE("sweep output does not depend on thread count") {
  SweepSpec spec = default_sweep_spec(SweepAxis::kAvailableBrokers);
  spec.mscnfl_trials = 300;
  spec.master_seed = 123;
  const std::string one = write_csv(run_sweep(spec, 1));
  CHECK(one == write_csv(run_sweep(spec, 1)));
  CHECK(one == write_csv(run_sweep(spec, 4)));
  CHECK(one == write_csv(run_sweep(spec, 13)));

  spec.master_seed = 124;
  CHECK(one != write_csv(run_sweep(spec, 1)));
}

TEST_CASE("default sweep shapes") {
  SUBCASE("consumers") {
    auto spec = default_sweep_spec(SweepAxis::kConsumers);
    spec.methods = {Method::kBroMin, Method::kBroMax};
    const auto r = run_sweep(spec);
    const auto mins = rows_for(r, Method::kBroMin);
    const auto maxes = rows_for(r, Method::kBroMax);
    REQUIRE(mins.size() == 20);
    for (std::size_t i = 0; i < mins.size(); ++i) {
      REQUIRE(mins[i]->feasible());
      REQUIRE(maxes[i]->feasible());
      CHECK(maxes[i]->plan == maxes[0]->plan);
      if (i > 0) {
        CHECK(mins[i]->plan->partitions >= mins[i - 1]->plan->partitions);
        CHECK(mins[i]->plan->brokers >= mins[i - 1]->plan->brokers);
      }
    }
  }
  SUBCASE("available brokers") {
    auto spec = default_sweep_spec(SweepAxis::kAvailableBrokers);
    spec.methods = {Method::kBroMin, Method::kBroMax};
    const auto r = run_sweep(spec);
    const auto mins = rows_for(r, Method::kBroMin);
    const auto maxes = rows_for(r, Method::kBroMax);
    for (std::size_t i = 1; i < mins.size(); ++i) {
      CHECK(maxes[i]->plan->partitions >= maxes[i - 1]->plan->partitions);
      CHECK(mins[i]->plan == mins[0]->plan);
    }
  }
  SUBCASE("replication factor") {
    auto spec = default_sweep_spec(SweepAxis::kReplicationFactor);
    spec.methods = {Method::kBroMin, Method::kBroMax};
    const auto r = run_sweep(spec);
    const auto mins = rows_for(r, Method::kBroMin);
    const auto maxes = rows_for(r, Method::kBroMax);
    for (std::size_t i = 1; i < mins.size(); ++i) {
      CHECK(maxes[i]->plan->partitions <= maxes[i - 1]->plan->partitions);
      CHECK(mins[i]->plan->brokers >= mins[i - 1]->plan->brokers);
    }
  }
}

TEST_CASE("sweep spec validation") {
  auto spec = consumer_spec({}, {Method::kBroMin});
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.axis_values = {5, 5};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.axis_values = {5, 4};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.axis_values = {5};
  spec.methods = {Method::kLpRelax};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.methods = {Method::kMsCnfl};
  spec.mscnfl_trials = 0;
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);

  CHECK(axis_range(2, 2, 1) == std::vector<Count>{2});
  CHECK(axis_range(100, 1000, 450) == std::vector<Count>{100, 550, 1000});
  CHECK_THROWS_AS(axis_range(10, 5, 1), ValidationError);
  CHECK_THROWS_AS(axis_range(1, 5, 0), ValidationError);
}

TEST_CASE("axis names") {
  for (auto a : {SweepAxis::kConsumers, SweepAxis::kAvailableBrokers, SweepAxis::kReplicationFactor})
    CHECK(parse_axis(axis_name(a)) == a);
  CHECK_FALSE(parse_axis("partitions").has_value());
}
