#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "pouw/error.hpp"
#include "pouw/stats.hpp"

using namespace pouw;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Malformed;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("gini") {
    CHECK(gini(std::vector<double>{3, 3, 3, 3}) == doctest::Approx(0.0));
    for (std::size_t n : {2u, 5u, 10u}) {
      std::vector<double> v(n, 0.0);
      v[0] = 7;
      CHECK(gini(v) == doctest::Approx(static_cast<double>(n - 1) / static_cast<double>(n)));
    }
    // {1..5}: sum of |xi - xj| over ordered pairs is 40; 40 / (2 * 25 * 3) = 4/15.
    CHECK(gini(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(4.0 / 15.0));
    CHECK(gini_exact(std::vector<std::uint64_t>{1, 2, 3, 4, 5}) == Rational(4, 15));
    CHECK(gini_exact(std::vector<std::uint64_t>{5, 4, 3, 2, 1}) == Rational(4, 15));
    CHECK(gini_exact(std::vector<std::uint64_t>{0, 0, 9}) == Rational(2, 3));

    CHECK(code_of([] { gini(std::vector<double>{}); }) == Errc::Empty);
    CHECK(code_of([] { gini(std::vector<double>{0, 0}); }) == Errc::AllZero);
    CHECK(code_of([] { gini(std::vector<double>{1, -1}); }) == Errc::DomainError);
    CHECK(code_of([] { gini_exact(std::vector<std::uint64_t>{}); }) == Errc::Empty);
  }

  TEST_CASE("gini is scale invariant and bounded") {
    const std::vector<double> v{1, 4, 0, 9, 2, 2};
    std::vector<double> scaled;
    for (double x : v) scaled.push_back(x * 13.5);
    CHECK(gini(scaled) == doctest::Approx(gini(v)));
    CHECK(gini(v) >= 0);
    CHECK(gini(v) < 1);
  }

  TEST_CASE("overlap Monte Carlo") {
    // Two 1-subsets of {0, 1} meet half the time.
    CHECK(overlap_montecarlo(2, 1, 100000, 3) == doctest::Approx(0.5).epsilon(0.02));
    // Two 2-subsets of a 4-set: only complementary pairs miss, 1/6 of them.
    CHECK(std::abs(overlap_montecarlo(4, 2, 100000, 4) - 5.0 / 6.0) < 0.01);
    CHECK(code_of([] { overlap_montecarlo(3, 2, 10, 1); }) == Errc::DomainError);
    CHECK(code_of([] { overlap_montecarlo(4, 0, 10, 1); }) == Errc::DomainError);
    CHECK(code_of([] { overlap_montecarlo(4, 2, 0, 1); }) == Errc::DomainError);
  }

  TEST_CASE("overlap kernel matches its serial reference") {
    for (std::uint64_t trials : {1u, 999u, 70001u}) {
      for (std::uint64_t seed : {1u, 2u}) {
        CHECK(overlap_montecarlo(100, 10, trials, seed) == overlap_montecarlo_serial(100, 10, trials, seed));
      }
    }
    CHECK(overlap_montecarlo(50, 5, 10000, 9) == overlap_montecarlo(50, 5, 10000, 9));
    CHECK(overlap_montecarlo(50, 5, 10000, 9) != overlap_montecarlo(50, 5, 10000, 10));
  }

  TEST_CASE("derived seeds differ per index") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 5) == derive_seed(5, 5));
  }

  TEST_CASE("least squares") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const LinearFit fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));

    // y = {1, 3, 2}: slope 0.5, intercept 1.5, SSres = 1.5, SStot = 2.
    const LinearFit noisy = least_squares(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 2});
    CHECK(noisy.slope == doctest::Approx(0.5));
    CHECK(noisy.intercept == doctest::Approx(1.5));
    CHECK(noisy.r_squared == doctest::Approx(0.25));

    CHECK(code_of([] { least_squares(std::vector<double>{1, 1}, std::vector<double>{1, 2}); }) == Errc::DomainError);
  }
}
