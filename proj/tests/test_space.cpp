#include <doctest.h>

#include <cmath>

#include "gnm/kernels.hpp"
#include "gnm/rng.hpp"
#include "gnm/space.hpp"

#include "support.hpp"

using namespace gnm;

TEST_CASE("primal norm basics") {
  auto id = Metric::identity(2);
  CHECK(id.primal_norm(Vec{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(id.primal_norm(Vec{0.0, 0.0}) == 0.0);

  auto diag = Metric::diagonal({4.0, 9.0});
  CHECK(diag.primal_norm(Vec{1.0, 1.0}) ==
        doctest::Approx(std::sqrt(13.0)).epsilon(1e-12));
  CHECK_THROWS_AS(diag.primal_norm(Vec{1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("dual norm basics") {
  auto id = Metric::identity(2);
  CHECK(id.dual_norm(Vec{3.0, 4.0}) == doctest::Approx(5.0));

  auto diag = Metric::diagonal({4.0, 1.0});
  CHECK(diag.dual_norm(Vec{2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(diag.dual_norm(Vec{0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(diag.dual_norm(Vec{1.0}), std::invalid_argument);
}

TEST_CASE("dense metric validation") {
  CHECK_THROWS_AS(Metric::dense(2, {1.0, 0.5, 0.4, 1.0}),
                  std::invalid_argument);  // not symmetric
  CHECK_THROWS_AS(Metric::dense(2, {1.0, 2.0, 2.0, 1.0}),
                  std::invalid_argument);  // indefinite
  auto m = Metric::dense(2, {2.0, 0.5, 0.5, 1.0});
  CHECK(m.kind() == Metric::Kind::Dense);
}

TEST_CASE("metric identities on random vectors") {
  Rng rng(42);
  const int n = 11;
  Vec d(n);
  for (auto& v : d) v = 0.2 + std::fabs(rng.normal());

  // A dense SPD matrix: diagonally dominant symmetric.
  Vec dense(n * n, 0.0);
  for (int i = 0; i < n; ++i) dense[i * n + i] = 1.0 + d[i];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.05 * rng.normal();
      dense[i * n + j] = v;
      dense[j * n + i] = v;
    }

  for (const Metric& m : {Metric::identity(n), Metric::diagonal(d),
                          Metric::dense(n, dense)}) {
    for (int rep = 0; rep < 50; ++rep) {
      Vec x = test::random_vec(rng, n);
      Vec s = test::random_vec(rng, n);

      // Cauchy-Schwarz with the dual pairing.
      double lhs = std::fabs(pairing(s, x));
      double rhs = m.dual_norm(s) * m.primal_norm(x);
      CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);

      // Raising then measuring in the dual recovers the primal norm.
      Vec bx;
      m.raise(x, 1.0, bx);
      CHECK(test::rel_diff(m.dual_norm(bx), m.primal_norm(x)) <= 1e-12);

      // lower(raise(x)) is the identity.
      Vec back;
      m.lower(bx, back);
      CHECK(test::max_rel_gap(back, x) <= 1e-12);

      // add_lowered matches lower + axpy.
      Vec y1 = x, y2 = x, low;
      m.add_lowered(0.7, s, y1);
      m.lower(s, low);
      kern::axpy(0.7, low.data(), y2.data(), n);
      CHECK(test::max_rel_gap(y1, y2) <= 1e-13);

      // dual_inner(s, s) = dual_norm(s)^2.
      CHECK(test::rel_diff(m.dual_inner(s, s),
                           m.dual_norm(s) * m.dual_norm(s)) <= 1e-12);
    }
  }
}

TEST_CASE("identity metric is self-dual exactly") {
  Rng rng(3);
  auto id = Metric::identity(8);
  for (int rep = 0; rep < 20; ++rep) {
    Vec x = test::random_vec(rng, 8);
    CHECK(id.primal_norm(x) == id.dual_norm(x));
  }
}
