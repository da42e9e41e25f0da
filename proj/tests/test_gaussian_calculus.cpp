#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gaussvar/gaussian_calculus.hpp"

using namespace gaussvar;

namespace {

using Exponent = FieldPolynomial::Exponent;

FieldPolynomial monomial(int dim, std::initializer_list<int> powers, double c = 1.0)
{
	Exponent e{};
	int i = 0;
	for (int p : powers)
		e[i++] = static_cast<std::uint8_t>(p);
	FieldPolynomial m(dim);
	m.add_term(e, c);
	return m;
}

Eigen::MatrixXd spd3()
{
	Eigen::MatrixXd c(3, 3);
	c << 1.0, 0.3, -0.2, 0.3, 0.8, 0.1, -0.2, 0.1, 0.5;
	return c;
}

/**
 * Rank-1 lattice rule for E[q(x)], x = mean + L z, z standard normal, on the
 * cube |z_k| <= 9 where the weighted integrand is periodic to double precision.
 */
template <class F>
double lattice_expectation(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, F q)
{
	constexpr long n = 100003;
	constexpr long gen = 1021;
	constexpr double half = 9.0;
	const Eigen::MatrixXd L = cov.llt().matrixL();
	const long g[3] = {1, gen, (gen * gen) % n};
	double s = 0.0;
	for (long i = 0; i < n; ++i) {
		Eigen::Vector3d z;
		double w = 1.0;
		for (int k = 0; k < 3; ++k) {
			z[k] = -half + 2.0 * half * static_cast<double>((i * g[k]) % n) / n;
			w *= std::exp(-0.5 * z[k] * z[k]) / std::sqrt(2.0 * std::numbers::pi) * 2.0 * half;
		}
		s += w * q(Eigen::Vector3d(mean + L * z));
	}
	return s / n;
}

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

} // namespace

TEST_CASE("first and second moments")
{
	Eigen::VectorXd m(3);
	m << 0.3, -0.5, 0.8;
	const GaussianMeasure mu(m, spd3());
	for (int i = 0; i < 3; ++i) {
		CHECK(moment(mu, FieldPolynomial::variable(3, i)) == doctest::Approx(m[i]).epsilon(1e-15));
		for (int j = 0; j < 3; ++j) {
			const auto p = FieldPolynomial::variable(3, i) * FieldPolynomial::variable(3, j);
			CHECK(moment(mu, p) == doctest::Approx(spd3()(i, j) + m[i] * m[j]).epsilon(1e-15));
		}
	}
	CHECK(moment(mu, FieldPolynomial::constant(3, 2.5)) == 2.5);
}

TEST_CASE("degree-6 moments agree with a lattice quadrature oracle")
{
	Eigen::VectorXd m(3);
	m << 0.3, -0.5, 0.8;
	const GaussianMeasure mu(m, spd3());
	const auto p = monomial(3, {2, 3, 1});
	const double oracle = lattice_expectation(m, spd3(), [](const Eigen::Vector3d& x) {
		return x[0] * x[0] * x[1] * x[1] * x[1] * x[2];
	});
	CHECK(std::abs(moment(mu, p) / oracle - 1.0) <= 1e-4);

	const auto q = monomial(3, {0, 0, 6}) + monomial(3, {4, 0, 2}, -0.5);
	const double oracle_q = lattice_expectation(m, spd3(), [](const Eigen::Vector3d& x) {
		return std::pow(x[2], 6) - 0.5 * std::pow(x[0], 4) * x[2] * x[2];
	});
	CHECK(std::abs(moment(mu, q) / oracle_q - 1.0) <= 1e-4);
}

TEST_CASE("moment is linear and rejects over-degree input")
{
	std::mt19937_64 rng(41);
	for (int t = 0; t < 50; ++t) {
		const auto mu = random_measure(rng, 3, 1.0);
		const auto a = random_field_polynomial(rng, 3, 6, 5);
		const auto b = random_field_polynomial(rng, 3, 6, 5);
		const double lhs = moment(mu, a * 2.0 - b);
		const double rhs = 2.0 * moment(mu, a) - moment(mu, b);
		CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, moment_magnitude(mu, a * 2.0 + b)));
	}
	CHECK_THROWS_AS(monomial(2, {6, 5}), std::invalid_argument);
	const GaussianMeasure mu2(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
	CHECK_THROWS_AS(moment(mu2, monomial(3, {1, 0, 0})), std::invalid_argument);
}

TEST_CASE("measure validation")
{
	Eigen::MatrixXd asym(2, 2);
	asym << 1.0, 0.1, 0.2, 1.0;
	CHECK_THROWS_AS(GaussianMeasure(Eigen::VectorXd::Zero(2), asym), std::invalid_argument);
	Eigen::MatrixXd indef(2, 2);
	indef << 1.0, 2.0, 2.0, 1.0;
	CHECK_THROWS_AS(GaussianMeasure(Eigen::VectorXd::Zero(2), indef), std::invalid_argument);
	CHECK_THROWS_AS(GaussianMeasure(Eigen::VectorXd::Zero(7), Eigen::MatrixXd::Identity(7, 7)), std::invalid_argument);
	CHECK_THROWS_AS(GaussianMeasure(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("low-order Wick powers")
{
	std::mt19937_64 rng(42);
	const auto mu = random_measure(rng, 4, 1.5);
	const Eigen::VectorXd f = random_vector(rng, 4);
	const auto x = FieldPolynomial::linear(f, -mu.mean_of(f));
	CHECK(max_coeff_difference(wick_power(mu, f, 0), FieldPolynomial::constant(4, 1.0)) == 0.0);
	CHECK(max_coeff_difference(wick_power(mu, f, 1), x) <= 1e-15);
	const auto two = x * x - FieldPolynomial::constant(4, mu.pairing(f, f));
	CHECK(max_coeff_difference(wick_power(mu, f, 2), two) <= 1e-14 * std::max(1.0, two.max_abs_coeff()));
	for (int n = 1; n <= 10; ++n) {
		const auto w = wick_power(mu, f, n);
		CHECK(std::abs(moment(mu, w)) <= 1e-10 * std::max(1.0, moment_magnitude(mu, w)));
	}
	CHECK_THROWS_AS(wick_power(mu, f, 11), std::invalid_argument);
	CHECK_THROWS_AS(wick_power(mu, f, -1), std::invalid_argument);
}

TEST_CASE("Wick powers are orthogonal across dimensions")
{
	std::mt19937_64 rng(43);
	for (int dim = 1; dim <= kMaxFieldDim; ++dim) {
		for (int t = 0; t < 5; ++t) {
			const auto mu = random_measure(rng, dim, 1.0);
			const Eigen::VectorXd f = random_vector(rng, dim), g = random_vector(rng, dim);
			const auto r = check_orthogonality(mu, f, g, 5);
			CHECK(r.pass);
			CHECK(r.max_offdiag <= 1e-10);
			CHECK(r.max_diag_defect <= 1e-10);
			const double c = mu.pairing(f, g);
			for (int n = 0; n <= 5; ++n)
				CHECK(r.matrix[n][n] == doctest::Approx(fact(n) * std::pow(c, n)).epsilon(1e-9).scale(1.0));
		}
	}
}

TEST_CASE("orthogonality report edge cases")
{
	std::mt19937_64 rng(44);
	const auto mu = random_measure(rng, 3, 1.0);
	const Eigen::VectorXd f = random_vector(rng, 3);
	const auto r2 = check_orthogonality(mu, f, f, 2);
	const double c = mu.pairing(f, f);
	CHECK(r2.matrix[2][2] == doctest::Approx(2.0 * c * c).epsilon(1e-12));
	const auto r0 = check_orthogonality(mu, f, f, 0);
	REQUIRE(r0.matrix.size() == 1);
	CHECK(r0.matrix[0][0] == 1.0);
	CHECK_THROWS_AS(check_orthogonality(mu, f, f, 6), std::invalid_argument);
}

TEST_CASE("first integration by parts")
{
	std::mt19937_64 rng(45);
	const auto mu = random_measure(rng, 3, 2.0);
	const Eigen::VectorXd f = random_vector(rng, 3), g = random_vector(rng, 3);
	const auto one = ibp_first(mu, f, FieldPolynomial::constant(3, 1.0));
	CHECK(std::abs(one.lhs) <= 1e-14);
	CHECK(one.rhs == 0.0);
	const auto lin = ibp_first(mu, f, FieldPolynomial::linear(g));
	CHECK(lin.lhs == doctest::Approx(mu.pairing(f, g)).epsilon(1e-12));
	CHECK(lin.rhs == doctest::Approx(mu.pairing(f, g)).epsilon(1e-14));

	for (int t = 0; t < 200; ++t) {
		const int dim = 1 + t % kMaxFieldDim;
		const auto m = random_measure(rng, dim, 1.5);
		const auto r = ibp_first(m, random_vector(rng, dim), random_field_polynomial(rng, dim, 6, 6));
		CHECK(r.pass);
		CHECK(r.defect <= 1e-10 * r.scale);
	}
}

TEST_CASE("second integration by parts")
{
	std::mt19937_64 rng(46);
	const auto mu = random_measure(rng, 3, 2.0);
	const Eigen::VectorXd f = random_vector(rng, 3), g = random_vector(rng, 3);
	const auto R = random_field_polynomial(rng, 3, 5, 6);
	const auto a = ibp_second(mu, f, 1, R);
	const auto b = ibp_first(mu, f, R);
	CHECK(a.lhs == doctest::Approx(b.lhs).epsilon(1e-14));
	CHECK(a.rhs == doctest::Approx(b.rhs).epsilon(1e-14));

	// <:phi(f)^2: phi(g)^2> = 2 C(f,g)^2 whatever the mean
	const auto pg = FieldPolynomial::linear(g);
	const auto sq = ibp_second(mu, f, 2, pg * pg);
	const double c = mu.pairing(f, g);
	CHECK(sq.lhs == doctest::Approx(2.0 * c * c).epsilon(1e-10).scale(sq.scale));
	CHECK(sq.rhs == doctest::Approx(2.0 * c * c).epsilon(1e-10).scale(sq.scale));
	CHECK(sq.pass);

	for (int t = 0; t < 200; ++t) {
		const int dim = 1 + t % kMaxFieldDim;
		const int n = 1 + t % 4;
		const auto m = random_measure(rng, dim, 1.5);
		const auto r = ibp_second(m, random_vector(rng, dim), n, random_field_polynomial(rng, dim, 6 - n, 5));
		CHECK(r.pass);
		CHECK(r.recursion_defect <= 1e-12);
	}
	CHECK_THROWS_AS(ibp_second(mu, f, 0, R), std::invalid_argument);
}

TEST_CASE("Wick powers commute with derivatives")
{
	std::mt19937_64 rng(47);
	const auto mu = random_measure(rng, 4, 1.0);
	const Eigen::VectorXd f = random_vector(rng, 4);
	for (int j = 0; j < 4; ++j) {
		const auto zero = wick_derivative_commute(mu, f, 0, j);
		CHECK(zero.exact);
		CHECK(max_coeff_difference(wick_power(mu, f, 1).derivative(j), FieldPolynomial::constant(4, f[j])) == 0.0);
		CHECK(wick_derivative_commute(mu, f, 1, j).exact);
		const auto three = wick_derivative_commute(mu, f, 3, j);
		CHECK(three.max_defect <= 1e-13 * std::max(1.0, wick_power(mu, f, 3).max_abs_coeff()));
	}
	for (int n = 0; n <= 10; ++n) {
		const auto r = wick_derivative_commute(mu, f, n, n % 4);
		CHECK(r.max_defect <= 1e-12 * std::max(1.0, wick_power(mu, f, n).max_abs_coeff()));
	}
	CHECK_THROWS_AS(wick_derivative_commute(mu, f, 2, 4), std::invalid_argument);
}

TEST_CASE("generating function series through degree 8")
{
	std::mt19937_64 rng(48);
	for (int dim = 1; dim <= kMaxFieldDim; ++dim) {
		const auto mu = random_measure(rng, dim, 1.0);
		CHECK(generating_function_defect(mu, random_vector(rng, dim), 8) <= 1e-12);
	}
}

TEST_CASE("a Gaussian mixture breaks orthogonality")
{
	Eigen::VectorXd f(1);
	f << 1.0;
	GaussianMixture mix;
	mix.weights = {0.5, 0.5};
	Eigen::VectorXd a(1), b(1);
	a << -1.5;
	b << 1.5;
	mix.components = {GaussianMeasure(a, Eigen::MatrixXd::Constant(1, 1, 0.5)),
	                  GaussianMeasure(b, Eigen::MatrixXd::Constant(1, 1, 0.5))};
	const auto mom = mix.projected_moments(f, 8);
	CHECK(mom[0] == doctest::Approx(1.0));
	CHECK(mom[2] == doctest::Approx(0.5 + 2.25));
	const auto g = orthogonality_from_moments(mom, 4);
	double worst = 0.0;
	for (int n = 0; n <= 4; ++n)
		for (int m = 0; m <= 4; ++m)
			if (n != m)
				worst = std::max(worst, std::abs(g[n][m]));
	CHECK(worst > 1e-2);

	// the same construction on pure Gaussian moments is orthogonal
	const std::vector<double> gauss{1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0};
	const auto h = orthogonality_from_moments(gauss, 4);
	for (int n = 0; n <= 4; ++n)
		for (int m = 0; m <= 4; ++m)
			CHECK(h[n][m] == doctest::Approx(n == m ? fact(n) : 0.0).scale(1.0).epsilon(1e-12));
	const auto w2 = wick_power_from_moments(gauss, 2);
	CHECK(w2[0] == doctest::Approx(-1.0));
	CHECK(w2[1] == doctest::Approx(0.0).scale(1.0));
	CHECK(w2[2] == doctest::Approx(1.0));
	CHECK_THROWS_AS(orthogonality_from_moments(gauss, 5), std::invalid_argument);
}
