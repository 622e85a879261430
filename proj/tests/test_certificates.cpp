#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gnm/certificates.hpp"
#include "gnm/engines.hpp"
#include "gnm/generators.hpp"
#include "gnm/rng.hpp"

#include "support.hpp"

using namespace gnm;
using namespace gnm::engines;
namespace an = gnm::analysis;

namespace {

RunOptions vec_opts() {
  RunOptions o;
  o.keep_vectors = true;
  return o;
}

schedules::Schedule random_custom(Rng& rng, int T, double L) {
  std::vector<double> a(T - 1), b(T - 1);
  for (auto& v : a) v = std::exp(0.7 * rng.normal());
  for (auto& v : b) v = std::exp(0.7 * rng.normal());
  return schedules::custom_schedule(T, a, b, 0.5 + rng.uniform(), L);
}

}  // namespace

TEST_CASE("aggregator identity on randomized templates") {
  Rng rng(314);
  int trials = 0;
  while (trials < 100) {
    int T = 2 + static_cast<int>(rng.below(15));
    int n = 3 + static_cast<int>(rng.below(8));
    auto sched = random_custom(rng, T, 1.0);
    RunTrace tr;
    if (trials % 2 == 0) {
      auto inst = make_quadratic(n, 0.1, 1.0, 4000 + trials);
      sched.L_ref = inst.L;
      auto p = inst.make_problem();
      tr = run_template(*p, sched, inst.start, vec_opts());
      double res =
          an::aggregator_identity_residual(tr, sched, p->metric());
      CHECK(res <= 1e-10);
    } else {
      auto inst = make_lasso(n + 2, n, 2.0, 4000 + trials);
      sched.L_ref = inst.L;
      auto p = inst.make_problem();
      tr = run_template(*p, sched, inst.start, vec_opts());
      double res =
          an::aggregator_identity_residual(tr, sched, p->metric());
      CHECK(res <= 1e-10);
    }
    ++trials;
  }
}

TEST_CASE("aggregator identity edge cases") {
  // All mappings vanish at the minimizer: both sides are zero.
  auto inst = make_quadratic(6, 0.3, 1.0, 5);
  auto p = inst.make_problem();
  Rng rng(6);
  auto sched = random_custom(rng, 5, inst.L);
  RunTrace tr = run_template(*p, sched, inst.x_star, vec_opts());
  CHECK(an::aggregator_identity_residual(tr, sched, p->metric()) <= 1e-12);

  // T = 2 collapses the cross-term sum to a single pairing.
  auto sched2 = random_custom(rng, 2, inst.L);
  RunTrace tr2 = run_template(*p, sched2, inst.start, vec_opts());
  CHECK(an::aggregator_identity_residual(tr2, sched2, p->metric()) <= 1e-12);

  CHECK_THROWS_AS(
      an::aggregator_identity_residual(tr2, sched, p->metric()),
      std::invalid_argument);
}

TEST_CASE("midway and final certificates pass on clean runs") {
  {
    auto inst = make_quadratic(50, 0.05, 1.0, 41);
    auto p = inst.make_problem();
    const int T = 32;
    auto sched = schedules::ogmg_schedule(T, inst.L);
    RunTrace tr = run_ogmg(*p, inst.start, inst.L, T, RunOptions{});
    auto rep = an::midway_certificates(tr, sched);
    CHECK(rep.all_pass());
    CHECK(rep.checks.size() == 2 * (T - 1));
    auto fin = an::final_certificate(tr, sched);
    CHECK(fin.all_pass());
  }
  {
    auto inst = make_lasso(30, 25, 4.0, 42);
    auto p = inst.make_problem();
    const int T = 24;
    auto sched = schedules::ocgmg_schedule(T, inst.L);
    RunTrace tr = run_ocgmg(*p, inst.start, inst.L, T, RunOptions{});
    REQUIRE_FALSE(tr.linesearch_failure);
    CHECK(an::midway_certificates(tr, sched).all_pass());
    auto fin = an::final_certificate(tr, sched);
    CHECK(fin.all_pass());
  }
  {
    // Composite run started at rest: every slack is exactly zero or the
    // trivial bound.
    auto inst = make_quadratic(8, 0.5, 1.0, 43);
    auto p = inst.make_problem();
    auto sched = schedules::ocgmg_schedule(8, inst.L);
    RunTrace tr = run_ocgmg(*p, inst.x_star, inst.L, 8, RunOptions{});
    CHECK(an::midway_certificates(tr, sched).all_pass());
  }
}

TEST_CASE("final certificate anchors") {
  auto sched = schedules::ocgmg_schedule(2, 1.0);
  double factor = 2.0 * sched.A[0] / sched.A_last;
  CHECK(factor == doctest::Approx(1.2679491924).epsilon(1e-9));
  CHECK(factor <= 56.67 / 36.0);
  CHECK(56.67 / 36.0 == doctest::Approx(1.5742).epsilon(1e-4));
}

TEST_CASE("certificates catch corrupted traces") {
  auto inst = make_quadratic(20, 0.1, 1.0, 44);
  auto p = inst.make_problem();
  const int T = 16;
  auto sched = schedules::ogmg_schedule(T, inst.L);
  RunTrace tr = run_ogmg(*p, inst.start, inst.L, T, RunOptions{});

  // Round-trip through CSV keeps every check green.
  std::stringstream ss;
  tr.write_csv(ss);
  RunTrace back = RunTrace::read_csv(ss);
  CHECK(an::midway_certificates(back, sched).all_pass());
  CHECK(an::final_certificate(back, sched).all_pass());

  // Lowering one objective value (the initial one) must be detected.
  RunTrace bad = back;
  bad.rows[0].F_x -= 0.5 * (back.rows[0].F_x - back.rows.back().F_x);
  auto rep = an::midway_certificates(bad, sched);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.failures() > 0);
}

TEST_CASE("psd certificate matrix") {
  for (int T : {2, 3, 4, 8, 16, 64, 256}) {
    auto sched = schedules::ocgmg_schedule(T, 1.0);
    auto cm = an::psd_certificate(sched, 1.0);
    double scale = std::max(1.0, sched.A[T] / 2.0);
    CHECK(cm.max_abs <= 1e-10 * scale);
    CHECK(cm.psd);
    REQUIRE(cm.guarantee_factor.has_value());
    CHECK(test::rel_diff(*cm.guarantee_factor,
                         2.0 * sched.A[0] / sched.A_last) <= 1e-9);
  }

  // A 10% bump of any single step weight breaks the cancellation.
  for (int which : {1, 3, 6}) {
    int T = 8;
    auto sched = schedules::ocgmg_schedule(T, 1.0);
    std::vector<double> a(sched.a.begin() + 1, sched.a.begin() + T);
    std::vector<double> b(sched.b.begin() + 1, sched.b.begin() + T);
    b[which - 1] *= 1.1;
    auto perturbed = schedules::custom_schedule(T, a, b, sched.A[0], 1.0);
    // Keep the composite tail so C_TT and the final column stay defined.
    perturbed.family = schedules::Family::OcgmG;
    perturbed.a[T] = sched.a[T];
    perturbed.A[T] = sched.A[T];
    perturbed.B[T] = 0.0;
    auto cm = an::psd_certificate(perturbed, 1.0);
    CHECK(cm.max_abs > 1e-6);
  }

  // Diagonal nonnegative C is PSD by inspection.
  std::vector<double> diag = {0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  CHECK(an::min_eigenvalue_sym(diag, 3) == doctest::Approx(0.0));
  std::vector<double> diag2 = {0.5, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 1.0};
  CHECK(an::min_eigenvalue_sym(diag2, 3) == doctest::Approx(0.25));

  // Doctored tail: the guarantee denominator goes nonpositive and no
  // factor is derivable.
  schedules::Schedule bad = schedules::ocgmg_schedule(2, 1.0);
  bad.B[2] = -2.0;
  auto cm = an::psd_certificate(bad, 1.0);
  CHECK_FALSE(cm.guarantee_factor.has_value());
}

TEST_CASE("gram matrix of a run is positive semidefinite") {
  auto inst = make_quadratic(12, 0.2, 1.0, 45);
  auto p = inst.make_problem();
  RunTrace tr = run_ogmg(*p, inst.start, inst.L, 10, vec_opts());
  auto Q = an::gram_matrix(tr, p->metric());
  double scale = 0.0;
  for (double v : Q) scale = std::max(scale, std::fabs(v));
  CHECK(an::min_eigenvalue_sym(std::move(Q), 10) >= -1e-10 * scale);
}

TEST_CASE("restart efficiency function") {
  CHECK(an::eta(0.0981709) == doctest::Approx(0.9444).epsilon(2e-4));
  CHECK(an::eta(std::exp(-2.0)) == doctest::Approx(0.9273).epsilon(2e-4));
  CHECK(an::eta(0.4999999) <= 1e-5);
  CHECK_THROWS_AS(an::eta(0.0), std::invalid_argument);
  CHECK_THROWS_AS(an::eta(0.5), std::invalid_argument);
  CHECK_THROWS_AS(an::eta(-0.1), std::invalid_argument);

  auto mx = an::maximize_eta();
  CHECK(std::fabs(mx.sigma_star - 0.0981709) <= 2e-6);
  CHECK(std::fabs(mx.eta_star - 0.9444) <= 1e-4);
}

TEST_CASE("scalar rate functions") {
  CHECK(an::q_func(2.0) == doctest::Approx(0.5));
  CHECK(an::r_func(2.0, 2.0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(an::rbar_func(5.0, 2.0) == doctest::Approx(0.1).epsilon(1e-12));

  const double xs[] = {1.01, 1.1, 2.0, 3.0, 5.0, 10.0, 100.0};
  const double ks[] = {2.0, 3.0, 5.0, 10.0, 100.0};
  for (double x : xs) {
    CHECK(an::q_func(x) > 0.0);
    CHECK(test::rel_diff(an::r_func(x, 2.0), 1.0 / (4.0 * x * (x - 1.0))) <=
          1e-12);
    CHECK(std::fabs(an::r_func(x, 1e6) - an::r_func(x, 2.0)) <= 1e-4);
    for (double k : ks)
      CHECK(an::r_func(x, k) >= an::r_func(x, 2.0) * (1.0 - 1e-12));
  }
  for (std::size_t i = 0; i + 1 < 7; ++i)
    CHECK(an::q_func(xs[i + 1]) > an::q_func(xs[i]));
  // rbar increases in x on [3, inf) for the admitted kappa range.
  const double xr[] = {3.0, 5.0, 10.0, 100.0};
  for (double k : ks)
    for (int i = 0; i + 1 < 4; ++i)
      CHECK(an::rbar_func(xr[i + 1], k) > an::rbar_func(xr[i], k));

  CHECK_THROWS_AS(an::q_func(1.0), std::invalid_argument);
  CHECK_THROWS_AS(an::r_func(2.0, 1.5), std::invalid_argument);
}

TEST_CASE("averaged rate floor thresholds") {
  for (int T : {5, 9, 33, 129}) {
    auto R = an::averaged_rate_floor(T);
    for (int k = 2; k <= T - 1; ++k) {
      if (k <= T - 3) CHECK(R[k] > 0.05);
      else if (k == T - 2) CHECK(R[k] > 0.048);
      else CHECK(R[k] > 0.03);
    }
  }
  // The tail values approach their limiting constants from above at rate
  // O(1/T).
  auto R = an::averaged_rate_floor(10000);
  CHECK(R[9999] == doctest::Approx(0.03076).epsilon(2e-3));
  CHECK(R[9998] == doctest::Approx(0.04869).epsilon(2e-3));
  CHECK(R[9997] == doctest::Approx(0.06055).epsilon(2e-3));
  CHECK(R[9999] > 0.03076);
}

TEST_CASE("meta bound evaluations") {
  CHECK(an::meta_bound(10, 0, 2.0, 3.0, false) ==
        doctest::Approx(10.65 * 16.0 * 2.0 / 100.0 * 3.0));
  CHECK(an::meta_bound(10, 0, 2.0, 3.0, true) ==
        doctest::Approx(10.65 * 9.0 * 2.0 / 100.0 * 3.0));
  CHECK(an::meta_bound(10, 2, 1.0, 0.0, false) == 0.0);
  CHECK(an::meta_cycle_bound(4, 2.0, 3.0) ==
        doctest::Approx(113.34 * 4.0 / 256.0 * 9.0));
  CHECK_THROWS_AS(an::meta_bound(0, 0, 1.0, 1.0, false),
                  std::invalid_argument);
}
