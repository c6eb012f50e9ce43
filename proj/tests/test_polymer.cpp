#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "pam/errors.hpp"
#include "pam/logmath.hpp"
#include "pam/oracle.hpp"
#include "pam/polymer.hpp"
#include "pam/rng.hpp"

using namespace pam;

namespace {

// P(S_N = x) for the bare walk by direct convolution in linear space.
std::map<LatticeSite, double> bare_walk_law(const WalkKernel& kernel, int N) {
  std::map<LatticeSite, double> law{{LatticeSite::origin(kernel.dim()), 1.0}};
  for (int n = 0; n < N; ++n) {
    std::map<LatticeSite, double> next;
    for (const auto& [x, p] : law)
      for (std::size_t s = 0; s < kernel.size(); ++s) next[x + kernel.steps()[s]] += p * kernel.probs()[s];
    law = std::move(next);
  }
  return law;
}

double logsumexp_of(const std::vector<double>& v) { return log_sum_exp(v); }

}  // namespace

TEST_CASE("make_kernel validation") {
  CHECK_NOTHROW(make_kernel(1, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK_THROWS_AS(make_kernel(1, std::vector<double>{0.5, 0.0, 0.5}), PreconditionError);
  CHECK_NOTHROW(make_kernel(2, std::vector<double>(5, 0.2)));
  CHECK_THROWS_AS(make_kernel(1, std::vector<double>{0.6, 0.6, -0.2}), PreconditionError);
  CHECK_THROWS_AS(make_kernel(1, std::vector<double>{0.25, 0.25, 0.25}), PreconditionError);
  CHECK_THROWS_AS(make_kernel(1, std::vector<double>{0.5, 0.5}), PreconditionError);
  CHECK_THROWS_AS(make_kernel(2, std::vector<double>{0.25, 0.25, 0.5, 0.0, 0.0}), PreconditionError);

  const auto k = make_kernel(1, std::map<LatticeSite, double>{{LatticeSite{-1}, 0.25}, {LatticeSite{0}, 0.5},
                                                               {LatticeSite{1}, 0.25}});
  CHECK(k.hold() == 0.5);
  CHECK(k.prob(LatticeSite{1}) == 0.25);
  CHECK_THROWS_AS(make_kernel(1, std::map<LatticeSite, double>{{LatticeSite{0}, 1.0}}), PreconditionError);

  const auto k2 = parse_kernel("0.1,0.2,0.4,0.2,0.1", 2);
  CHECK(k2.prob(LatticeSite{-1, 0}) == 0.1);
  CHECK(k2.prob(LatticeSite{0, -1}) == 0.2);
  CHECK(k2.hold() == 0.4);
  CHECK(k2.prob(LatticeSite{1, 0}) == 0.1);
  CHECK(parse_kernel("uniform", 3).size() == 7);
  CHECK_THROWS_AS(parse_kernel("0.5,x,0.5", 1), PreconditionError);
}

TEST_CASE("forward recursion, one step") {
  const auto field = FieldRealization::from_values(BallIndex(1, 1), {1.0, 0.0, 2.0});
  const auto kernel = uniform_kernel(1);
  const auto fronts = forward_recursion(field, kernel, 1);
  REQUIRE(fronts.horizon() == 1);
  CHECK(fronts.at(0).logw == std::vector<double>{0.0});
  const auto& f1 = fronts.at(1);
  for (int x = -1; x <= 1; ++x) {
    CHECK(f1.log_weight(LatticeSite{x}) == doctest::Approx(std::log(1.0 / 3) + field(LatticeSite{x})).epsilon(1e-14));
  }
  CHECK(f1.log_weight(LatticeSite{2}) == kNegInf);

  const EndpointLaw law = endpoint_law(fronts);
  const double e = std::exp(1.0);
  CHECK(law.logU == doctest::Approx(std::log((e + 1 + e * e) / 3)).epsilon(1e-14));
  CHECK(law.p_of(LatticeSite{1}) == doctest::Approx(e * e / (e * e + e + 1)).epsilon(1e-14));
  CHECK(law.p_of(LatticeSite{1}) == doctest::Approx(0.66524).epsilon(1e-4));
  CHECK(law.w == LatticeSite{1});
  CHECK_FALSE(law.ties_detected);
}

TEST_CASE("zero potential gives the bare walk law") {
  for (int d = 1; d <= 2; ++d) {
    const int N = d == 1 ? 12 : 6;
    const auto kernel = d == 1 ? make_kernel(1, std::vector<double>{0.2, 0.5, 0.3}) : uniform_kernel(2);
    const auto field = FieldRealization::constant(BallIndex(d, N), 0.0);
    const auto front = final_front(field, kernel, N);
    for (const auto& [x, p] : bare_walk_law(kernel, N)) {
      CHECK(std::exp(front.log_weight(x)) == doctest::Approx(p).epsilon(1e-13));
    }
  }
  // Symmetric kernel, zero field: the law peaks at the origin.
  const auto law = endpoint_law(final_front(FieldRealization::constant(BallIndex(1, 6), 0.0), uniform_kernel(1), 6));
  CHECK(law.w == LatticeSite{0});
}

TEST_CASE("front invariants") {
  const auto field = sample_pareto_field(3, 1.0, BallIndex(2, 9));
  const auto fronts = forward_recursion(field, uniform_kernel(2), 9);
  for (int n = 0; n <= 9; ++n) {
    const auto& f = fronts.at(n);
    CHECK(f.n == n);
    CHECK(f.ball.radius() == n);
    CHECK(f.log_weight(LatticeSite{n + 1, 0}) == kNegInf);
    for (double v : f.logw) CHECK(std::isfinite(v));
  }
  const auto law = endpoint_law(fronts);
  CHECK(std::abs(logsumexp_of(law.log_p)) < 1e-9);
  CHECK(law.log_p_of(LatticeSite{5, 5}) == kNegInf);
}

TEST_CASE("recursion errors") {
  const auto field = sample_pareto_field(3, 1.0, BallIndex(1, 4));
  CHECK_THROWS_AS(forward_recursion(field, uniform_kernel(1), 5), PreconditionError);
  CHECK_THROWS_AS(forward_recursion(field, uniform_kernel(2), 3), PreconditionError);
  auto other = sample_pareto_field(4, 1.0, BallIndex(1, 4));
  const auto f0 = initial_front(1, other.fingerprint());
  CHECK_THROWS_AS(advance_front(f0, field, uniform_kernel(1)), ProvenanceError);
}

TEST_CASE("DP matches enumeration at small N") {
  SUBCASE("d=1, N=10, log U") {
    const auto field = sample_pareto_field(21, 2.0, BallIndex(1, 10));
    const auto truth = enumerate_paths(field, uniform_kernel(1), 10);
    const auto law = endpoint_law(final_front(field, uniform_kernel(1), 10));
    CHECK(std::abs(law.logU - truth.logU) <= 1e-10 * std::abs(truth.logU));
  }
  SUBCASE("d=1, N=8, pointwise law") {
    const auto field = sample_pareto_field(22, 1.0, BallIndex(1, 8));
    const auto kernel = make_kernel(1, std::vector<double>{0.3, 0.45, 0.25});
    const auto truth = enumerate_paths(field, kernel, 8);
    const auto law = endpoint_law(final_front(field, kernel, 8));
    for (std::size_t i = 0; i < law.log_p.size(); ++i) {
      CHECK(std::abs(std::exp(law.log_p[i]) / std::exp(truth.log_p[i]) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("constant potential factors out") {
  const auto kernel = make_kernel(1, std::vector<double>{0.3, 0.45, 0.25});
  const auto flat = endpoint_law(final_front(FieldRealization::constant(BallIndex(1, 30), 7.5), kernel, 30));
  const auto bare = bare_walk_law(kernel, 30);
  for (const auto& [x, p] : bare) CHECK(flat.p_of(x) == doctest::Approx(p).epsilon(1e-11));
}

TEST_CASE("shifting the potential leaves the law unchanged") {
  const auto kernel = uniform_kernel(1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto field = sample_pareto_field(seed, 1.5, BallIndex(1, 60));
    std::vector<double> shifted(field.xi().begin(), field.xi().end());
    for (double& v : shifted) v += 3.25;
    const auto moved = FieldRealization::from_values(field.ball(), shifted);
    const auto a = endpoint_law(final_front(field, kernel, 60));
    const auto b = endpoint_law(final_front(moved, kernel, 60));
    CHECK(b.logU == doctest::Approx(a.logU + 60 * 3.25).epsilon(1e-12));
    for (std::size_t i = 0; i < a.log_p.size(); ++i) CHECK(std::abs(a.log_p[i] - b.log_p[i]) < 1e-9);
    CHECK(a.w == b.w);
    const auto ma = modified_field_stats(field);
    const auto mb = modified_field_stats(moved);
    MESSAGE("z1 " << ma.z(1).to_string() << " vs " << mb.z(1).to_string());
  }
}

TEST_CASE("raising xi at w cannot lower p(w)") {
  const auto kernel = uniform_kernel(2);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto field = sample_pareto_field(seed, 1.0, BallIndex(2, 15));
    const auto before = endpoint_law(final_front(field, kernel, 15));
    const auto boosted = field.with_value(before.w, field(before.w) + 0.7);
    const auto after = endpoint_law(final_front(boosted, kernel, 15));
    CHECK(after.p_of(before.w) >= before.p_of(before.w));
  }
}

TEST_CASE("localization_mass") {
  const auto kernel = uniform_kernel(1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto field = sample_pareto_field(seed, 2.0, BallIndex(1, 200));
    const auto law = endpoint_law(final_front(field, kernel, 200));
    const auto m = localization_mass(law, modified_field_stats(field, 200));
    CHECK(m.p_w >= m.p_z1);
    CHECK(m.p_w >= m.p_z2);
    CHECK(m.two_point_mass == doctest::Approx(m.p_z1 + m.p_z2));
    CHECK(m.two_point_mass <= 1.0 + 1e-12);
  }
  const auto field = sample_pareto_field(1, 2.0, BallIndex(1, 50));
  const auto law = endpoint_law(final_front(field, kernel, 40));
  CHECK_THROWS_AS(localization_mass(law, modified_field_stats(field, 50)), ProvenanceError);
  const auto other = sample_pareto_field(2, 2.0, BallIndex(1, 50));
  CHECK_THROWS_AS(localization_mass(law, modified_field_stats(other, 40)), ProvenanceError);
}

TEST_CASE("comparator_1d") {
  const auto kernel = make_kernel(1, std::vector<double>{0.2, 0.5, 0.3});
  SUBCASE("|x| = 1 has an empty interior sum") {
    const auto field = FieldRealization::from_values(BallIndex(1, 1), {1.0, 2.0, 6.0});
    CHECK(comparator_log_b(field, kernel, 1, 1) == doctest::Approx(6.0 + std::log(0.3)).epsilon(1e-15));
  }
  SUBCASE("origin case") {
    const auto field = FieldRealization::from_values(BallIndex(1, 3), {1, 1, 1, 4, 1, 1, 1});
    CHECK(comparator_log_b(field, kernel, 3, 0) == doctest::Approx(4 * 4.0 + 3 * std::log(0.5)));
  }
  SUBCASE("symmetric field and kernel") {
    const auto sym = uniform_kernel(1);
    std::vector<double> v = {1.0, 9.0, 1.5, 2.0, 1.5, 9.0, 1.0};
    const auto field = FieldRealization::from_values(BallIndex(1, 3), v);
    const auto r = comparator_1d(field, 3, sym);
    CHECK(r.log_b_z1 == r.log_b_z2);
  }
  SUBCASE("log b equals the reach-and-stick path weight for x != 0") {
    // Guards the (N+1-|x|) count: the path visits x at times |x|..N.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const int N = 9;
      const auto field = sample_pareto_field(seed, 1.0, BallIndex(1, N));
      for (int x : {-4, -1, 2, 9}) {
        const int sgn = x > 0 ? 1 : -1;
        double w = 0.0;
        int pos = 0;
        for (int i = 1; i <= N; ++i) {
          const int step = pos == x ? 0 : sgn;
          pos += step;
          w += field(LatticeSite{pos}) + kernel.log_prob(LatticeSite{step});
        }
        CHECK(comparator_log_b(field, kernel, N, x) == doctest::Approx(w).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(comparator_1d(sample_pareto_field(1, 1.0, BallIndex(2, 3)), 3, uniform_kernel(2)),
                  PreconditionError);
}

TEST_CASE("law csv export") {
  const auto field = FieldRealization::from_values(BallIndex(1, 1), {0.0, 0.0, 0.0});
  const auto law = endpoint_law(final_front(field, uniform_kernel(1), 1));
  std::ostringstream out;
  write_law_csv(out, law);
  CHECK(out.str().rfind("x1,log_p\n-1,", 0) == 0);
}
