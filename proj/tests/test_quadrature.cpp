#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gaussvar/quadrature.hpp"

using namespace gaussvar;

TEST_CASE("polynomials are exact at the Kronrod order")
{
	const auto r = quad::integrate([](double x) { return std::pow(x, 20) - 3.0 * x * x; }, -1.0, 2.0);
	CHECK(r.value == doctest::Approx((std::pow(2.0, 21) + 1.0) / 21.0 - 9.0).epsilon(1e-14));
	CHECK(r.evaluations >= 15);
}

TEST_CASE("endpoint log singularity")
{
	const auto r = quad::integrate([](double x) { return x > 0.0 ? std::log(x) : 0.0; }, 0.0, 1.0);
	CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-12));
	CHECK(std::abs(r.value + 1.0) <= r.error + 1e-15);
}

TEST_CASE("semi-infinite ranges")
{
	const auto e = quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0);
	CHECK(e.value == doctest::Approx(1.0).epsilon(1e-13));
	const auto a = quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0);
	CHECK(a.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
	// a decay length far from one needs the matching scale
	const double L = 1e6;
	const auto s = quad::integrate_to_infinity([&](double x) { return std::exp(-x / L) / L; }, 0.0, {}, L);
	CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
	CHECK_THROWS_AS(quad::integrate_to_infinity([](double) { return 1.0; }, 0.0, {}, 0.0), std::invalid_argument);
}

TEST_CASE("agrees with an independent tanh-sinh integrator")
{
	boost::math::quadrature::tanh_sinh<double> ts;
	auto f = [](double x) { return std::log(x) * std::log(x) * std::cos(3.0 * x) / std::sqrt(x); };
	const double ref = ts.integrate(f, 0.0, 2.0);
	const auto r = quad::integrate([&](double x) { return x > 0.0 ? f(x) : 0.0; }, 0.0, 2.0);
	CHECK(r.value == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("error estimates bound the true error")
{
	struct Case {
		double (*f)(double);
		double a, b, exact;
	};
	const Case cases[] = {
	    {[](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 2.0},
	    {[](double x) { return 1.0 / (1e-2 + x * x); }, -1.0, 1.0, 20.0 * std::atan(10.0)},
	    {[](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
	};
	for (const auto& c : cases) {
		const auto r = quad::integrate(c.f, c.a, c.b);
		CHECK(std::abs(r.value - c.exact) <= std::max(r.error, 1e-15));
		CHECK(r.error <= 1e-12 * std::abs(c.exact) + 1e-15);
	}
}

TEST_CASE("unreachable tolerance raises with the best estimate")
{
	quad::Options opt;
	opt.max_intervals = 3;
	opt.rel_tol = 1e-14;
	try {
		quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, opt);
		FAIL("expected QuadratureError");
	} catch (const quad::QuadratureError& e) {
		CHECK(e.achieved().evaluations > 0);
		CHECK(e.achieved().error > 0.0);
		CHECK(std::isfinite(e.achieved().value));
	}
}

TEST_CASE("empty interval")
{
	const auto r = quad::integrate([](double) { return 1.0; }, 2.0, 2.0);
	CHECK(r.value == 0.0);
	CHECK(r.error == 0.0);
}
