#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "xiaudit/coupling.hpp"
#include "xiaudit/errors.hpp"
#include "xiaudit/zeros.hpp"

using namespace xiaudit;
using std::numbers::pi;

TEST_CASE("lambda and s are inverse to each other") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-1e4, 1e4), im(-1e4, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const Complex lambda(re(rng), im(rng));
    const auto [s1, s2] = s_from_lambda(lambda);
    CHECK(std::abs(lambda_from_s(s1) - lambda) <= 1e-12 * std::abs(lambda));
    CHECK(std::abs(lambda_from_s(s2) - lambda) <= 1e-12 * std::abs(lambda));
    CHECK(std::abs(s1 + s2 - 1.0) < 1e-9 * (1.0 + std::abs(s1)));
  }
}

TEST_CASE("critical-line points give real lambda below -1/4") {
  const Complex s(0.5, 14.134725141734694);
  const Complex lambda = lambda_from_s(s);
  CHECK(lambda.imag() == 0.0);
  CHECK(lambda.real() < -0.25);
  const BesselOrder nu = nu_from_lambda(lambda.real());
  CHECK(nu.is_imaginary());
  CHECK(std::abs(nu.magnitude - s.imag()) < 1e-12 * s.imag());
  CHECK_FALSE(nu_from_lambda(0.75).is_imaginary());
}

TEST_CASE("norm integral at order one half") {
  const auto q = norm_integral_quadrature(BesselOrder::real(0.5));
  CHECK(std::abs(q.value - pi / 4.0) < 1e-8);
}

TEST_CASE("norm integral ratio is the same constant for every order") {
  std::vector<BesselOrder> orders;
  for (int k = 1; k <= 9; ++k) orders.push_back(BesselOrder::real(0.1 * k));
  for (double mu : {0.5, 1.0, 2.0}) orders.push_back(BesselOrder::imaginary(mu));
  const auto audit = audit_norm_identity(orders);
  CHECK(audit.relative_spread < 1e-6);
  CHECK(std::abs(audit.common_ratio - 4.0) < 1e-6);
  CHECK(audit.verdict == Verdict::consistent_up_to_constant);
  for (const auto& e : audit.entries) CHECK(e.ok());
  const auto report = to_report(audit);
  CHECK(report.params.count("coefficient_claimed") == 1);
  CHECK(report.params.count("coefficient_standard") == 1);
  CHECK(std::get<double>(report.params.at("implied_coefficient")) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("standard closed form matches the quadrature") {
  for (const auto& order : {BesselOrder::real(0.3), BesselOrder::imaginary(1.5)}) {
    CAPTURE(order.label());
    const auto q = norm_integral_quadrature(order);
    CHECK(std::abs(q.value / norm_integral_standard(order) - 1.0) < 1e-7);
  }
}

TEST_CASE("norm integral edge cases") {
  CHECK_THROWS_AS(norm_integral_quadrature(BesselOrder::real(1.0)), DivergenceError);
  CHECK_THROWS_AS(norm_integral_quadrature(BesselOrder::real(1.5)), DivergenceError);
  CHECK_THROWS_AS(norm_integral_claimed(BesselOrder::real(2.0)), PoleError);
  CHECK(norm_integral_claimed(BesselOrder::real(0.0)) == 0.125);
}

TEST_CASE("spectrum of the first ten zeros") {
  const auto zeros = first_zeros(10, 1e-10);
  const auto records = coupling_spectrum(zeros);
  REQUIRE(records.size() == 10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double g = zeros[i].gamma;
    CHECK(r.lambda_is_real());
    CHECK(r.lambda.real() < -0.25);
    CHECK(std::abs(r.lambda.real() + (g * g + 0.25)) <= 1e-12 * (g * g + 0.25));
    CHECK(r.nu.is_imaginary());
    REQUIRE(r.norm.has_value());
    CHECK(std::isfinite(r.norm->value));
  }
  CHECK(spectrum_report(records).verdict == Verdict::pass);
}
