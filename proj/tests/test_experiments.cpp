#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pam/errors.hpp"
#include "pam/experiments.hpp"
#include "pam/rng.hpp"

using namespace pam;

namespace {

TrialConfig small_config() {
  TrialConfig c;
  c.alpha = 2.0;
  c.d = 1;
  c.N = 60;
  c.trials = 12;
  c.master_seed = 42;
  return c;
}

std::vector<TrialRecord> synthetic_records(std::size_t count, double alpha, std::uint64_t seed) {
  // w/N drawn from the limit law by inverting its CDF.
  CounterRng rng(seed);
  std::vector<TrialRecord> out(count);
  for (auto& r : out) {
    r.alpha = alpha;
    r.d = 1;
    r.N = 1000;
    r.has_law = true;
    const double u = rng.uniform();
    const double x = u < 0.5 ? std::pow(2 * u, 1 / (alpha + 1)) - 1 : 1 - std::pow(2 * (1 - u), 1 / (alpha + 1));
    r.w_over_N = {x};
  }
  return out;
}

}  // namespace

TEST_CASE("trial batches are deterministic and schedule independent") {
  auto c = small_config();
  const auto a = run_trials(c);
  c.threads = 3;
  const auto b = run_trials(c);
  REQUIRE(a.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(to_json(a[i], true) == to_json(b[i], true));
    CHECK(a[i].trial == i);
  }
  CHECK(to_json(a[0], false).find("runtime_ms") != std::string::npos);
  CHECK(to_json(a[0], true).find("runtime_ms") == std::string::npos);
}

TEST_CASE("trial record invariants") {
  auto c = small_config();
  c.trials = 30;
  for (const auto& r : run_trials(c)) {
    REQUIRE(r.ok());
    CHECK(r.p_w >= 0.0);
    CHECK(r.p_w <= 1.0);
    CHECK(r.p_z1 <= 1.0);
    CHECK(r.p_z2 <= 1.0);
    CHECK(r.two_point_mass <= 1.0 + 1e-12);
    CHECK(r.two_point_mass >= std::max(r.p_z1, r.p_z2));
    CHECK(std::abs(r.w_over_N[0]) <= 1.0);
    CHECK(r.w_equals_z1 == (r.w == r.z1));
    CHECK(r.comparator.has_value());
    CHECK(r.gaps.z12 >= 0.0);
    CHECK(r.gaps.n_times_z12 == doctest::Approx(c.N * r.gaps.z12));
  }
}

TEST_CASE("trial fields nest across N") {
  const auto c = small_config();
  const auto big = sample_pareto_field(trial_seed(c.master_seed, 3), c.alpha, BallIndex(1, 200));
  const auto small = sample_pareto_field(trial_seed(c.master_seed, 3), c.alpha, BallIndex(1, 60));
  CHECK(big.restricted(60).fingerprint() == small.fingerprint());
}

TEST_CASE("gap-only trials skip the endpoint law") {
  auto c = small_config();
  c.endpoint_law = false;
  c.N = 1000;
  const auto r = run_trials(c);
  CHECK_FALSE(r[0].has_law);
  CHECK(r[0].gaps.z12 > 0.0);
  CHECK(to_json(r[0], true).find("\"p_w\":null") != std::string::npos);
}

TEST_CASE("path samples attach an event-C estimate") {
  auto c = small_config();
  c.trials = 2;
  c.N = 40;
  c.path_samples = 200;
  const auto r = run_trials(c);
  for (const auto& t : r) {
    REQUIRE(t.event_C.has_value());
    CHECK(t.event_C->samples == 200);
    CHECK(t.event_C->ci.lo <= t.event_C->estimate);
  }
}

TEST_CASE("config validation names the parameter") {
  const auto expect_message = [](TrialConfig c, const std::string& word) {
    try {
      validate(c);
      FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find(word) != std::string::npos);
    }
  };
  auto c = small_config();
  c.trials = 0;
  expect_message(c, "trials");
  c = small_config();
  c.alpha = 0.0;
  expect_message(c, "alpha");
  c = small_config();
  c.d = 2;
  expect_message(c, "kernel");
  c = small_config();
  c.N = 0;
  expect_message(c, "N");
  c = small_config();
  c.path_samples = 50;
  expect_message(c, "samples");
  c = small_config();
  c.d = 3;
  c.kernel = uniform_kernel(3);
  c.N = 5000;
  expect_message(c, "memory");
}

TEST_CASE("capacity failures stay inside the record") {
  TrialConfig c;
  c.d = 3;
  c.kernel = uniform_kernel(3);
  c.N = 700;
  const auto r = run_trial(c, 0);
  CHECK_FALSE(r.ok());
  CHECK(to_json(r, true).find("\"error\":\"") != std::string::npos);
}

TEST_CASE("endpoint limit law") {
  CHECK(endpoint_limit_constant(2.0) == 1.5);
  CHECK(endpoint_limit_cdf(0.0, 2.0) == 0.5);
  CHECK(endpoint_limit_cdf(-1.0, 2.0) == 0.0);
  CHECK(endpoint_limit_cdf(1.0, 2.0) == 1.0);
  for (double a : {0.5, 1.0, 2.0}) {
    for (double x : {-0.7, -0.2, 0.3, 0.8}) {
      const double h = 1e-6;
      const double density = (endpoint_limit_cdf(x + h, a) - endpoint_limit_cdf(x - h, a)) / (2 * h);
      CHECK(density == doctest::Approx(endpoint_limit_constant(a) * std::pow(1 - std::abs(x), a)).epsilon(1e-6));
      CHECK(endpoint_limit_cdf(x, a) + endpoint_limit_cdf(-x, a) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("endpoint distribution test") {
  auto records = synthetic_records(2000, 2.0, 3);
  records[5].ties_detected = true;
  records[6].error = "boom";
  const auto report = endpoint_distribution_test(records);
  CHECK(report.used == 1998);
  CHECK(report.ties_excluded == 1);
  CHECK(report.failed_excluded == 1);
  CHECK(report.ks_distance < 0.05);
  CHECK(report.passed);
  CHECK(report.p_value > 0.001);

  // A uniform sample on [-1,1] is far from the limit law.
  auto wrong = synthetic_records(2000, 2.0, 4);
  CounterRng rng(9);
  for (auto& r : wrong) r.w_over_N = {2 * rng.uniform() - 1};
  CHECK_FALSE(endpoint_distribution_test(wrong).passed);

  CHECK_THROWS_AS(endpoint_distribution_test(synthetic_records(99, 2.0, 1)), PreconditionError);
  auto mixed = synthetic_records(200, 2.0, 1);
  mixed[10].N = 500;
  CHECK_THROWS_AS(endpoint_distribution_test(mixed), PreconditionError);
}

TEST_CASE("w = z1 frequency") {
  auto records = synthetic_records(200, 2.0, 1);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].w_equals_z1 = i % 10 != 0;
    records[i].w_in_top2 = i % 100 != 0;
  }
  const auto f = w_equals_z1_frequency(records);
  CHECK(f.trials == 200);
  CHECK(f.z1_fraction == doctest::Approx(0.9));
  CHECK(f.top2_fraction == doctest::Approx(0.99));
  CHECK(f.z1_ci.lo < 0.9);
  CHECK(f.z1_ci.hi > 0.9);
  CHECK_THROWS_AS(w_equals_z1_frequency(synthetic_records(10, 2.0, 1)), PreconditionError);
}

TEST_CASE("constant field localizes at the origin") {
  const auto field = FieldRealization::constant(BallIndex(1, 50), 1.0);
  const auto law = endpoint_law(final_front(field, uniform_kernel(1), 50));
  const auto modified = modified_field_stats(field, 50);
  const auto mass = localization_mass(law, modified);
  CHECK(law.w == LatticeSite{0});
  CHECK(modified.z(1) == LatticeSite{0});
  CHECK(mass.w_equals_z1);
}

TEST_CASE("w/N histogram") {
  auto records = synthetic_records(500, 2.0, 8);
  records[0].w_over_N = {1.0};
  records[1].w_over_N = {-1.0};
  const auto h = w_over_N_histogram(records);
  REQUIRE(h.size() == 50);
  CHECK(h.front().left == -1.0);
  CHECK(h.back().right == 1.0);
  CHECK(h[25].left == doctest::Approx(0.0));
  std::uint64_t total = 0;
  for (const auto& b : h) total += b.count;
  CHECK(total == 500);
  CHECK(h.back().count >= 1);
  CHECK(h.front().count >= 1);
  std::ostringstream out;
  write_histogram_csv(out, h);
  CHECK(out.str().rfind("bin_left,bin_right,count\n-1,-0.95999999999999996,", 0) == 0);
}

TEST_CASE("batch summary") {
  auto c = small_config();
  c.trials = 15;
  const auto records = run_trials(c);
  const auto s = summarize(records);
  CHECK(s.trials == 15);
  CHECK(s.failures == 0);
  CHECK(s.median_p_w > 0.0);
  CHECK(s.mean_two_point_mass <= 1.0 + 1e-12);
  CHECK(s.comparator_agreement >= 0.0);
  CHECK(std::isnan(s.median_event_C));
  CHECK(to_json(s).find("\"median_event_C\":null") != std::string::npos);
}

TEST_CASE("two-peak scenario construction") {
  const auto kernel = uniform_kernel(1);
  const auto s = build_two_peak_scenario(400, 0.05, std::nullopt, kernel, 2.0);
  CHECK(s.m_alpha == 2.0);
  CHECK(s.eta == doctest::Approx(1.0));
  CHECK(s.x == 400);
  CHECK(s.y == 1200);
  CHECK(s.window_lo == -2800);
  CHECK(s.window_hi == 2940);
  CHECK(s.xi_x() == doctest::Approx(1.025 * 20.0));
  CHECK(s.xi_y() == doctest::Approx(1.025 * 20.0 * 5.0 / 3.0));
  REQUIRE(s.clauses.size() == 4);
  for (const auto& c : s.clauses) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
  CHECK(s.all_clauses_hold());

  SUBCASE("recheck catches a tampered field") {
    auto t = s;
    t.field = s.field.with_value(LatticeSite{410}, 20.3);
    const auto clauses = check_scenario_clauses(t);
    CHECK_FALSE(clauses[0].passed);
    CHECK_FALSE(clauses[2].passed);
    t.field = s.field.with_value(LatticeSite{700}, 0.0);
    CHECK(check_scenario_clauses(t)[3].passed);
    std::vector<double> zeros(s.field.xi().begin(), s.field.xi().end());
    for (int i = 401; i < 1200; ++i) zeros[s.field.ball().index_of(LatticeSite{i})] = 1.0;
    t.field = FieldRealization::from_values(s.field.ball(), zeros, 2.0);
    CHECK_FALSE(check_scenario_clauses(t)[3].passed);
  }
}

TEST_CASE("two-peak scenario preconditions") {
  const auto kernel = uniform_kernel(1);
  const auto message = [&](int n, double alpha, const WalkKernel& k) {
    try {
      build_two_peak_scenario(n, 0.05, std::nullopt, k, alpha);
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(400, 0.9, kernel).find("alpha must exceed 1") != std::string::npos);
  const auto lazy = parse_kernel("0.05,0.9,0.05", 1);
  CHECK(message(400, 2.0, lazy).find("log(kappa(1)/kappa(0)) > -m_alpha") != std::string::npos);
  CHECK(message(10, 2.0, kernel).find("m_alpha < n^(1/alpha)/2") != std::string::npos);
  CHECK(message(400, 2.0, kernel).empty());
}

TEST_CASE("switch detection") {
  const auto kernel = uniform_kernel(1);
  const auto s = build_two_peak_scenario(100, 0.05, std::nullopt, kernel, 2.0);
  REQUIRE(s.all_clauses_hold());
  const auto r = detect_switch(s, kernel);
  // (N+1)(psi_N(y) - psi_N(x)) vanishes exactly at N = 6n - 1.
  CHECK(r.N_star == 598);
  const auto tie = std::find_if(r.scan.begin(), r.scan.end(), [](const ScanRow& row) { return row.tie; });
  REQUIRE(tie != r.scan.end());
  CHECK(tie->N == 599);
  CHECK(std::count_if(r.scan.begin(), r.scan.end(), [](const ScanRow& row) { return row.tie; }) == 1);
  CHECK(r.w_is_z2);
  CHECK(r.w == LatticeSite{300});
  CHECK(r.z1 == LatticeSite{100});
  CHECK(r.top_two_are_x_y);
  CHECK(r.sign_change_at_ends);
  CHECK(r.scaled_gap_increasing);
  REQUIRE(r.scan.size() == 101);
  CHECK(r.scan.front().N == 550);
  CHECK(r.scan.back().N == 650);
  for (std::size_t i = 1; i < r.scan.size(); ++i) {
    CHECK(r.scan[i].scaled_psi_gap - r.scan[i - 1].scaled_psi_gap ==
          doctest::Approx(s.xi_y() - s.xi_x()).epsilon(1e-9));
  }

  SUBCASE("no switch when the far peak is lowered") {
    auto t = s;
    t.field = s.field.with_value(LatticeSite{300}, 0.9 * s.xi_x());
    CHECK_THROWS_AS(detect_switch(t, kernel), ScenarioError);
  }
  SUBCASE("retry wrapper") {
    const auto run = run_scenario_with_retry(100, 0.05, std::nullopt, kernel, 2.0);
    CHECK(run.attempts.size() == 1);
    CHECK(run.scenario.N_star == run.result.N_star);
    std::ostringstream out;
    write_scan_csv(out, run.result);
    CHECK(out.str().rfind("N,psi_gap,scaled_psi_gap,tie,w,z1,z2,p_w\n550,", 0) == 0);
  }
}
