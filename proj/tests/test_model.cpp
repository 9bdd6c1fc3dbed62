#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "kpp/model.hpp"
#include "test_support.hpp"

using namespace kpp;
using kpp::test::default_measured;
using kpp::test::requirements;

namespace {

// Throughput lower bound read literally over reals, scanned upward.
Count min_partitions_by_scan(const Requirements& req, const MeasuredInputs& meas) {
  for (Count p = 1;; ++p) {
    const auto x = static_cast<double>(p);
    if (x >= req.target_throughput / meas.producer_throughput_per_partition &&
        x >= req.target_throughput / meas.consumer_throughput_per_partition &&
        p >= req.consumers)
      return p;
  }
}

Count max_partitions_os_by_scan(Count b, const Requirements& req, const MeasuredInputs& meas) {
  Count p = 0;
  while ((p + 1) * req.replication_factor <= b * meas.max_open_file_handles) ++p;
  return p;
}

MeasuredInputs unit_measured() {
  MeasuredInputs m;
  m.producer_throughput_per_partition = 1;
  m.consumer_throughput_per_partition = 1;
  m.max_open_file_handles = 1;
  m.replication_latency_per_partition = 1;
  m.leader_election_time = 1;
  return m;
}

Requirements unit_requirements() {
  Requirements r;
  r.target_throughput = 1;
  r.consumers = 1;
  r.replication_factor = 1;
  r.max_replication_latency = 1;
  r.max_unavailability = 1;
  r.available_brokers = 1;
  return r;
}

}  // namespace

TEST_CASE("min_partitions") {
  const auto meas = default_measured();
  Requirements req = requirements(5, 3, 10);

  CHECK(min_partitions(req, meas) == 10);

  req.consumers = 100;
  CHECK(min_partitions_by_scan(req, meas) == 100);
  CHECK(min_partitions(req, meas) == 100);

  req.consumers = 1;
  req.target_throughput = 105;
  CHECK(min_partitions(req, meas) == 11);
}

TEST_CASE("min_partitions agrees with the upward scan") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto in = test::random_instance(rng);
    CHECK(min_partitions(in.req, in.meas) == min_partitions_by_scan(in.req, in.meas));
  }
}

TEST_CASE("min_partitions is not fooled by inexact division") {
  // 30 / 0.1 is 300.00000000000006 in double, so a bare ceil gives 301.
  MeasuredInputs meas = default_measured();
  meas.producer_throughput_per_partition = 0.1;
  Requirements req = requirements(1, 1, 1);
  req.target_throughput = 30;
  const Count p = min_partitions(req, meas);
  CHECK(p == 300);
  CHECK(check_throughput(Plan{p, 1}, req, meas));
  CHECK_FALSE(check_throughput(Plan{p - 1, 1}, req, meas));
}

TEST_CASE("max_partitions_os") {
  MeasuredInputs meas = default_measured();
  Requirements req = requirements(1, 1, 10);

  meas.max_open_file_handles = 1;
  CHECK(max_partitions_os(1, req, meas) == 1);

  meas.max_open_file_handles = 10000;
  req.replication_factor = 3;
  CHECK(max_partitions_os(3, req, meas) == 10000);
  CHECK(max_partitions_os_by_scan(10, req, meas) == 33333);
  CHECK(max_partitions_os(10, req, meas) == 33333);
}

TEST_CASE("check_latency boundary") {
  const auto meas = default_measured();
  const auto req = requirements(100, 3, 10);
  CHECK(check_latency(Plan{200, 3}, req, meas));
  CHECK_FALSE(check_latency(Plan{201, 3}, req, meas));
  CHECK(check_latency(Plan{1, 1}, unit_requirements(), unit_measured()));
}

TEST_CASE("check_unavailability boundary") {
  const auto meas = default_measured();
  const auto req = requirements(100, 3, 10);
  CHECK(check_unavailability(Plan{1200, 3}, req, meas));
  CHECK_FALSE(check_unavailability(Plan{1201, 3}, req, meas));
  CHECK(check_unavailability(Plan{1, 1}, unit_requirements(), unit_measured()));
}

TEST_CASE("is_feasible") {
  const auto meas = default_measured();
  const auto req = requirements(100, 3, 10);
  CHECK(is_feasible(Plan{200, 3}, req, meas));
  CHECK_FALSE(is_feasible(Plan{200, 2}, req, meas));
  CHECK_FALSE(is_feasible(Plan{667, 10}, req, meas));
  CHECK_FALSE(check_latency(Plan{667, 10}, req, meas));
  CHECK(is_feasible(Plan{666, 10}, req, meas));
  CHECK_FALSE(is_feasible(Plan{99, 10}, req, meas));
  CHECK_FALSE(is_feasible(Plan{200, 11}, req, meas));
}

TEST_CASE("fractional inputs compare in real arithmetic") {
  MeasuredInputs meas = default_measured();
  meas.replication_latency_per_partition = 0.5;
  const auto req = requirements(1, 3, 10);
  // 400 * 3 * 0.5 = 600 = 3 * 200
  CHECK(check_latency(Plan{400, 3}, req, meas));
  CHECK_FALSE(check_latency(Plan{401, 3}, req, meas));
}

TEST_CASE("exact integer comparison beyond double precision") {
  // 2 * 1082163457 * 2130771458 == (2^31 - 1)^2 + 3; double rounds both
  // sides to the same value.
  const double m = 2147483647.0;
  CHECK((2.0 * 1082163457.0) * 2130771458.0 <= m * m);
  CHECK_FALSE(detail::product_leq(2, 1082163457, 2130771458, m, m));
  CHECK(detail::product_leq(m, m, 1, m, m));
}

TEST_CASE("evaluate_plan") {
  const auto meas = default_measured();
  const auto req = requirements(100, 3, 10);

  SUBCASE("binding latency at b=3") {
    const auto m = evaluate_plan(Plan{200, 3}, req, meas);
    CHECK(m.replication_latency == 200.0);
    CHECK(m.unavailability == doctest::Approx(1000.0 / 3.0).epsilon(1e-12));
    CHECK(m.handles_per_broker == 200.0);
    CHECK(m.producer_capacity == 2000.0);
    CHECK(m.consumer_capacity == 4000.0);
    CHECK(m.pass.all());
  }
  SUBCASE("all ones") {
    const auto m = evaluate_plan(Plan{1, 1}, unit_requirements(), unit_measured());
    CHECK(m.replication_latency == 1.0);
    CHECK(m.unavailability == 1.0);
    CHECK(m.handles_per_broker == 1.0);
    CHECK(m.partitions_per_broker == 1.0);
    CHECK(m.producer_capacity == 1.0);
    CHECK(m.consumer_capacity == 1.0);
  }
  SUBCASE("b=10") {
    const auto m = evaluate_plan(Plan{666, 10}, req, meas);
    CHECK(m.replication_latency == doctest::Approx(199.8).epsilon(1e-12));
    CHECK(m.unavailability == doctest::Approx(333.0).epsilon(1e-12));
    CHECK(m.handles_per_broker == doctest::Approx(199.8).epsilon(1e-12));
  }
}

TEST_CASE("metric booleans match the predicates") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Count> pd(1, 5000), bd(1, 40);
  for (int i = 0; i < 5000; ++i) {
    const auto in = (i % 2) ? test::random_instance(rng) : test::random_fractional_instance(rng);
    const Plan plan{pd(rng), bd(rng)};
    const auto m = evaluate_plan(plan, in.req, in.meas);
    CHECK(m.pass.throughput == check_throughput(plan, in.req, in.meas));
    CHECK(m.pass.os_load == check_os_load(plan, in.req, in.meas));
    CHECK(m.pass.latency == check_latency(plan, in.req, in.meas));
    CHECK(m.pass.unavailability == check_unavailability(plan, in.req, in.meas));
    CHECK(m.pass.broker_bound == check_broker_bound(plan, in.req));
    CHECK(m.pass.all() == is_feasible(plan, in.req, in.meas));
  }
}

TEST_CASE("upper-bound predicates are monotone") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<Count> pd(1, 3000), bd(1, 30), step(1, 50);
  for (int i = 0; i < 3000; ++i) {
    const auto in = test::random_fractional_instance(rng);
    const Plan plan{pd(rng), bd(rng)};
    const Plan more_p{plan.partitions + step(rng), plan.brokers};
    const Plan more_b{plan.partitions, plan.brokers + step(rng)};
    for (auto pred : {check_latency, check_unavailability, check_os_load}) {
      if (!pred(plan, in.req, in.meas)) CHECK_FALSE(pred(more_p, in.req, in.meas));
      if (pred(plan, in.req, in.meas)) CHECK(pred(more_b, in.req, in.meas));
    }
  }
}

TEST_CASE("min_partitions monotonicity") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto in = test::random_instance(rng);
    const Count base = min_partitions(in.req, in.meas);

    auto req = in.req;
    req.target_throughput += 37;
    CHECK(min_partitions(req, in.meas) >= base);
    req = in.req;
    req.consumers += 13;
    CHECK(min_partitions(req, in.meas) >= base);

    auto meas = in.meas;
    meas.producer_throughput_per_partition += 3;
    CHECK(min_partitions(in.req, meas) <= base);
    meas = in.meas;
    meas.consumer_throughput_per_partition += 3;
    CHECK(min_partitions(in.req, meas) <= base);
  }
}

TEST_CASE("feasibility is monotone in brokers up to B") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<Count> pd(1, 3000);
  for (int i = 0; i < 3000; ++i) {
    const auto in = test::random_instance(rng);
    const Count r = in.req.replication_factor;
    const Count big_b = in.req.available_brokers;
    const Count b = std::uniform_int_distribution<Count>(r, big_b)(rng);
    const Plan plan{pd(rng), b};
    if (!is_feasible(plan, in.req, in.meas)) continue;
    for (Count bb = b; bb <= big_b; ++bb) CHECK(is_feasible(Plan{plan.partitions, bb}, in.req, in.meas));
  }
}

TEST_CASE("validation") {
  auto req = requirements(1, 1, 1);
  CHECK_NOTHROW(validate(req));
  req.replication_factor = 0;
  CHECK_THROWS_AS(validate(req), ValidationError);
  req = requirements(0, 1, 1);
  CHECK_THROWS_AS(validate(req), ValidationError);
  req = requirements(1, 1, 1);
  req.max_unavailability = 0;
  CHECK_THROWS_AS(validate(req), ValidationError);

  MeasuredInputs meas;
  meas.leader_election_time = -1;
  CHECK_THROWS_AS(validate(meas), ValidationError);
  meas = MeasuredInputs{};
  meas.max_open_file_handles = 0;
  CHECK_THROWS_AS(validate(meas), ValidationError);

  CHECK_THROWS_AS(validate(Plan{0, 1}), ValidationError);
  CHECK_THROWS_AS(validate(Plan{1, 0}), ValidationError);
  CHECK(structurally_infeasible(requirements(1, 5, 4)));
}
