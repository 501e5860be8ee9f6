#include <cmath>
#include <numbers>

#include "doctest.h"
#include "xiaudit/carlson.hpp"
#include "xiaudit/errors.hpp"

using namespace xiaudit;
using std::numbers::pi;

TEST_CASE("type recovery on exponentials") {
  for (double c : {0.5, 1.0, 2.0, 3.0}) {
    CAPTURE(c);
    const auto g = estimate_type([c](Complex z) { return std::exp(c * z); }, Axis::real, kGrowthRadius);
    CHECK(std::abs(g.slope - c) < 1e-6);
  }
  const auto sine = estimate_growth([](Complex z) { return std::sin(pi * z); }, kGrowthRadius);
  CHECK(std::abs(sine.beta - pi) < 1e-3);
}

TEST_CASE("sin(pi z) never meets the type condition") {
  auto f = [](Complex z) { return std::sin(pi * z); };
  for (double margin : {0.5, 0.05, 1e-3, 1e-6, 1e-12}) {
    CAPTURE(margin);
    const auto v = carlson_verdict(f, 10, kGrowthRadius, margin);
    CHECK(v.integer_vanishing);
    CHECK_FALSE(v.beta_below_pi);
    CHECK(v.conclusion == CarlsonConclusion::conditions_not_met);
  }
  CHECK_THROWS_AS(carlson_verdict(f, 10, kGrowthRadius, 0.0), DomainError);
}

TEST_CASE("the zero function implies identically zero") {
  const auto v = carlson_verdict([](Complex) { return Complex(0.0, 0.0); }, 10, kGrowthRadius);
  CHECK(v.growth.real_axis.all_zero);
  CHECK(v.conclusion == CarlsonConclusion::identically_zero_implied);
  CHECK(to_string(v.conclusion) == "IDENTICALLY_ZERO_IMPLIED");
}

TEST_CASE("no integers to check is inconclusive") {
  const auto v = carlson_verdict([](Complex) { return Complex(0.0, 0.0); }, 0, kGrowthRadius);
  CHECK(v.conclusion == CarlsonConclusion::inconclusive);
}

TEST_CASE("integer vanishing reports the worst integer") {
  const auto iv = check_integer_vanishing([](Complex z) { return z - 1.0; }, 50, 1e-9);
  CHECK_FALSE(iv.vanishes);
  CHECK(iv.max_abs == 49.0);
  CHECK(iv.argmax == 50);
  REQUIRE(iv.values.size() == 50);
  CHECK(iv.values[0] == 0.0);
}

TEST_CASE("Jost exponential fit") {
  const std::vector<double> grid = {0.5, 1.0, 2.0, 4.0, 8.0};
  const auto fit = audit_jost_exponential(grid);
  CHECK(fit.max_residual < 1e-12);
  const std::vector<double> degenerate = {0.0};
  CHECK_THROWS_AS(audit_jost_exponential(degenerate), SingularFitError);
}

TEST_CASE("exact exponential target fits to roundoff") {
  auto target = [](double u) { return 0.5 * std::exp(0.3 * u); };
  const auto fit = audit_xi_exponential(target, 10.0, 51);
  CHECK(std::abs(fit.C - 0.5) < 1e-12);
  CHECK(std::abs(fit.A - 0.3) < 1e-12);
  CHECK(fit.max_residual < 1e-12);
}

TEST_CASE("xi exponential fit is deterministic and its rms residual is grid independent") {
  const auto a = audit_xi_exponential(10.0, 51);
  const auto b = audit_xi_exponential(10.0, 51);
  CHECK(a.C == b.C);
  CHECK(a.A == b.A);
  CHECK(a.rms_residual == b.rms_residual);
  CHECK(a.rms_residual > 0.0);
  const auto doubled = audit_xi_exponential(10.0, 102);
  CHECK(std::abs(doubled.rms_residual - a.rms_residual) < 1e-8);
  CHECK(to_report(a).verdict == Verdict::not_applicable);
}

TEST_CASE("difference audit on xi") {
  const auto d = audit_difference(10, 10.0);
  CHECK(d.residuals.size() == 10);
  const auto report = to_report(d);
  CHECK(report.name == "carlson_difference");
  CHECK(report.verdict != Verdict::fail);
}

TEST_CASE("difference against an exact exponential vanishes") {
  const double c = 0.5, a = 0.3;
  auto target = [&](Complex u) { return c * std::exp(a * u); };
  const auto fit = audit_xi_exponential([&](double u) { return target(u).real(); }, 10.0, 51);
  const auto d = audit_difference(target, fit, 10);
  REQUIRE(d.residuals.size() == 10);
  for (double r : d.residuals) CHECK(r < 1e-10);
  CHECK(d.verdict.integer_vanishing);
}

TEST_CASE("difference audit with no integers is inconclusive") {
  const auto d = audit_difference(0, 10.0);
  CHECK(d.residuals.empty());
  CHECK(d.verdict.conclusion == CarlsonConclusion::inconclusive);
  CHECK(to_report(d).verdict == Verdict::inconclusive);
}

TEST_CASE("difference audit is deterministic") {
  const auto a = audit_difference(10, 10.0);
  const auto b = audit_difference(10, 10.0);
  CHECK(a.residuals == b.residuals);
}

TEST_CASE("constant target fits with zero rate") {
  const auto fit = audit_xi_exponential([](double) { return 2.0; }, 10.0, 51);
  CHECK(std::abs(fit.A) < 1e-14);
  CHECK(std::abs(fit.C - 2.0) < 1e-14);
}

TEST_CASE("self checks all pass") {
  for (const auto& r : carlson_self_checks()) {
    CAPTURE(r.name);
    CHECK(r.verdict == Verdict::pass);
  }
}
