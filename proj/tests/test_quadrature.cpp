#include <cmath>
#include <numbers>

#include "doctest.h"
#include "xiaudit/errors.hpp"
#include "xiaudit/fit.hpp"
#include "xiaudit/parallel.hpp"
#include "xiaudit/quadrature.hpp"

using namespace xiaudit;
using std::numbers::pi;

TEST_CASE("finite quadrature on smooth and peaked integrands") {
  CHECK(std::abs(integrate_finite([](double x) { return std::sin(x); }, 0.0, pi).value - 2.0) < 1e-14);
  const auto peak = integrate_finite([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
  CHECK(std::abs(peak.value / (2.0 / 1e-2 * std::atan(1.0 / 1e-2)) - 1.0) < 1e-12);
  const auto r = integrate_finite([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("finite quadrature reports a non-finite integrand") {
  CHECK_THROWS_AS(integrate_finite([](double x) { return 1.0 / x; }, 0.0, 1.0), NonConvergenceError);
}

TEST_CASE("exp-sinh quadrature") {
  const auto g = integrate_semiinfinite([](double x) { return std::exp(-x * x); }, 1e-12);
  CHECK(std::abs(g.value - std::sqrt(pi) / 2.0) < 1e-12);
  const auto singular = integrate_semiinfinite([](double x) { return std::exp(-x) / std::sqrt(x); }, 1e-12);
  CHECK(std::abs(singular.value - std::sqrt(pi)) < 1e-11);
  const auto slow = integrate_semiinfinite([](double x) { return 1.0 / (1.0 + x * x); }, 1e-12);
  CHECK(std::abs(slow.value - pi / 2.0) < 1e-11);
}

TEST_CASE("exp-sinh quadrature flags a divergent integral") {
  CHECK_THROWS_AS(integrate_semiinfinite([](double x) { return 1.0 / (1.0 + x); }, 1e-10),
                  DivergenceError);
}

TEST_CASE("tightening the tolerance agrees with the looser result") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const auto loose = integrate_finite(f, 0.0, 5.0, {.rel_tol = 1e-8});
  const auto tight = integrate_finite(f, 0.0, 5.0, {.rel_tol = 1e-14});
  CHECK(std::abs(loose.value - tight.value) <= 1e-8 * std::abs(tight.value) + loose.err_estimate);
}

TEST_CASE("doubling the starting pieces stays within twice the error estimate") {
  auto f = [](double x) { return std::log(1.0 + x) * std::cos(7.0 * x); };
  const auto one = integrate_finite(f, 0.0, 4.0, {.rel_tol = 1e-9, .initial_pieces = 4});
  const auto two = integrate_finite(f, 0.0, 4.0, {.rel_tol = 1e-9, .initial_pieces = 8});
  CHECK(std::abs(one.value - two.value) < 2.0 * std::max(one.err_estimate, two.err_estimate));
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n - 1 exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 51u}) {
    CAPTURE(n);
    const auto rule = gauss_legendre(n, 0.0, 2.0);
    REQUIRE(rule.nodes.size() == n);
    for (std::size_t i = 1; i < n; ++i) CHECK(rule.nodes[i - 1] < rule.nodes[i]);
    const int degree = static_cast<int>(2 * n - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
    const double exact = std::pow(2.0, degree + 1) / (degree + 1);
    CHECK(std::abs(sum / exact - 1.0) < 1e-13);
  }
}

TEST_CASE("line fit") {
  const double xs[] = {0.0, 1.0, 2.0, 3.0};
  const double ys[] = {1.0, 3.0, 5.0, 7.0};
  const auto fit = fit_line(xs, ys);
  CHECK(std::abs(fit.intercept - 1.0) < 1e-15);
  CHECK(std::abs(fit.slope - 2.0) < 1e-15);
  CHECK(fit.max_residual < 1e-14);
  const double same[] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_line(same, std::span<const double>(ys, 3)), SingularFitError);
  CHECK_THROWS_AS(fit_line(std::span<const double>(xs, 1), std::span<const double>(ys, 1)),
                  SingularFitError);
}

TEST_CASE("parallel_map is independent of the thread count") {
  auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)) * 1e-3; };
  const auto serial = parallel_map<double>(1000, 1, f);
  for (unsigned t : {2u, 3u, 8u}) CHECK(parallel_map<double>(1000, t, f) == serial);
  CHECK_THROWS_AS(parallel_map<int>(10, 4,
                                    [](std::size_t i) -> int {
                                      if (i == 7) throw DomainError("seven");
                                      return 0;
                                    }),
                  DomainError);
}
