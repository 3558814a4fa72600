#include <doctest.h>

#include <cmath>
#include <random>

#include "evmap/errors.hpp"
#include "evmap/opinion.hpp"

using namespace evmap;

namespace {

// Evidence-space oracle written out by hand, independent of the library.
Opinion oracle_fuse(const Opinion& x, const Opinion& y, double W = 2.0) {
  const double r = W * x.b / x.u + W * y.b / y.u;
  const double s = W * x.d / x.u + W * y.d / y.u;
  const double k = W + r + s;
  return {r / k, s / k, W / k, x.a};
}

Opinion random_opinion(std::mt19937_64& rng, double a = 0.5) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // uniform on the simplex, kept away from u = 0
  double e1 = -std::log(U(rng) + 1e-300), e2 = -std::log(U(rng) + 1e-300), e3 = -std::log(U(rng) + 1e-300);
  const double s = e1 + e2 + e3;
  Opinion op{e1 / s, e2 / s, e3 / s, a};
  if (op.u < 1e-3) op = {op.b * (1 - 1e-3), op.d * (1 - 1e-3), op.u * (1 - 1e-3) + 1e-3, a};
  return op;
}

void check_close(const Opinion& x, const Opinion& y, double tol = 1e-9) {
  CHECK(std::abs(x.b - y.b) <= tol);
  CHECK(std::abs(x.d - y.d) <= tol);
  CHECK(std::abs(x.u - y.u) <= tol);
  CHECK(x.a == y.a);
}

}  // namespace

TEST_CASE("projected probability") {
  CHECK(projected_probability(Opinion{0, 0, 1, 0.5}) == 0.5);
  CHECK(projected_probability(Opinion{0.9, 0.1, 0, 0.5}) == doctest::Approx(0.9));
  CHECK(projected_probability(Opinion{0.5, 0.3, 0.2, 0.5}) == doctest::Approx(0.6));
}

TEST_CASE("vacuous opinion") {
  const Opinion v = vacuous(0.5);
  CHECK(v.b == 0);
  CHECK(v.d == 0);
  CHECK(v.u == 1);
  CHECK(v.a == 0.5);
  CHECK(vacuous(0.0).a == 0.0);
  CHECK(projected_probability(vacuous(0.7)) == doctest::Approx(0.7));
}

TEST_CASE("evidence mapping") {
  Evidence e = to_evidence(Opinion{0.5, 0, 0.5, 0.5});
  CHECK(e.r == doctest::Approx(2));
  CHECK(e.s == 0);
  e = to_evidence(vacuous(0.5));
  CHECK(e.r == 0);
  CHECK(e.s == 0);
  e = to_evidence(Opinion{0.8, 0, 0.2, 0.5});
  CHECK(e.r == doctest::Approx(8));

  check_close(from_evidence(Evidence{0, 0}, 0.5), vacuous(0.5));
  check_close(from_evidence(Evidence{4, 0}, 0.5), Opinion{2.0 / 3, 0, 1.0 / 3, 0.5});
  check_close(from_evidence(Evidence{8, 8}, 0.5), Opinion{4.0 / 9, 4.0 / 9, 1.0 / 9, 0.5});

  SUBCASE("dogmatic opinions") {
    CHECK_THROWS_AS(to_evidence(Opinion{1, 0, 0, 0.5}, 2.0, false), DogmaticOpinion);
    const Evidence clamped = to_evidence(Opinion{1, 0, 0, 0.5});
    CHECK(std::isfinite(clamped.r));
    CHECK(clamped.r == doctest::Approx(2.0 * (1 - 1e-6) / 1e-6));
  }
}

TEST_CASE("cumulative fusion examples") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Opinion op = random_opinion(rng);
    check_close(cumulative_fuse(vacuous(0.5), op), op);
  }
  check_close(cumulative_fuse(Opinion{0.5, 0, 0.5, 0.5}, Opinion{0.5, 0, 0.5, 0.5}), Opinion{2.0 / 3, 0, 1.0 / 3, 0.5});
  const Opinion c = cumulative_fuse(Opinion{0.8, 0, 0.2, 0.5}, Opinion{0, 0.8, 0.2, 0.5});
  check_close(c, Opinion{4.0 / 9, 4.0 / 9, 1.0 / 9, 0.5});
  CHECK(projected_probability(c) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cumulative_fuse(vacuous(0.5), vacuous(0.6)), BaseRateMismatch);
}

TEST_CASE("fusion properties over random pairs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const Opinion x = random_opinion(rng), y = random_opinion(rng), z = random_opinion(rng);
    const Opinion xy = cumulative_fuse(x, y);
    check_close(xy, oracle_fuse(x, y));
    CHECK(std::abs(xy.b + xy.d + xy.u - 1.0) <= 1e-9);
    check_close(xy, cumulative_fuse(y, x));
    check_close(cumulative_fuse(xy, z), cumulative_fuse(x, cumulative_fuse(y, z)));
    CHECK(xy.u < std::min(x.u, y.u));
    check_close(from_evidence(to_evidence(x), 0.5), x);

    // P of the fused opinion sits between the base rate and the evidence mean.
    const Evidence ex = to_evidence(x), ey = to_evidence(y);
    const double r = ex.r + ey.r, s = ex.s + ey.s;
    const double mean = r + s > 0 ? r / (r + s) : 0.5;
    const double p = projected_probability(xy);
    CHECK(p >= std::min(0.5, mean) - 1e-12);
    CHECK(p <= std::max(0.5, mean) + 1e-12);
  }
}

TEST_CASE("generic scalar") {
  const BinomialOpinion<float> x{0.5f, 0.f, 0.5f, 0.5f};
  const auto f = cumulative_fuse(x, x);
  CHECK(f.b == doctest::Approx(2.0 / 3).epsilon(1e-6));
  CHECK(is_valid(f, 1e-6f));
}
