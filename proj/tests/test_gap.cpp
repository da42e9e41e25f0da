#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gaussvar/gap.hpp"

using namespace gaussvar;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double bisect(F f, double lo, double hi)
{
	double flo = f(lo);
	for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
		const double mid = 0.5 * (lo + hi);
		const double fm = f(mid);
		if ((fm < 0) == (flo < 0)) {
			lo = mid;
			flo = fm;
		} else {
			hi = mid;
		}
	}
	return 0.5 * (lo + hi);
}

// r2(0, m^2) = 2 sigma + (3 lambda/pi) ln(m0^2/m^2) - m^2, decreasing in s = ln m^2
double symmetric_oracle(const ModelParams& p)
{
	auto g = [&](double s) { return 2 * p.sigma + 3 * p.lambda / kPi * (std::log(p.m0_sq) - s) - std::exp(s); };
	double lo = -1.0, hi = 1.0;
	while (g(lo) < 0)
		lo -= 10.0;
	while (g(hi) > 0)
		hi += 10.0;
	return std::exp(bisect(g, lo, hi));
}

// broken roots in s = ln m^2 of m^2/(8 lambda) + (3/(4 pi)) ln(m0^2/m^2) + sigma/(2 lambda) = 0
std::vector<double> broken_oracle(const ModelParams& p)
{
	auto h = [&](double s) {
		return std::exp(s) / (8 * p.lambda) + 3.0 / (4 * kPi) * (std::log(p.m0_sq) - s) + p.sigma / (2 * p.lambda);
	};
	// convex in s with its minimum at e^s = 6 lambda / pi
	const double smin = std::log(6 * p.lambda / kPi);
	std::vector<double> roots;
	if (h(smin) > 0)
		return roots;
	double lo = smin - 1.0;
	while (h(lo) < 0)
		lo -= 10.0;
	double hi = smin + 1.0;
	while (h(hi) < 0)
		hi += 1.0;
	roots.push_back(std::exp(bisect(h, lo, smin)));
	roots.push_back(std::exp(bisect(h, smin, hi)));
	return roots;
}

bool contains(const std::vector<GapSolution>& sols, double xi, double m_sq, double tol)
{
	return std::any_of(sols.begin(), sols.end(), [&](const GapSolution& s) {
		return std::abs(s.xi - xi) <= tol * std::max(1.0, std::abs(xi)) && std::abs(std::log(s.m_sq / m_sq)) <= tol;
	});
}

} // namespace

TEST_CASE("residual examples")
{
	for (double lambda : {0.05, 1.0, 30.0})
		for (double sigma : {0.3, 2.0}) {
			const auto r = gap_residual(ModelParams{lambda, sigma, 2 * sigma}, 0.0, 2 * sigma);
			CHECK(std::abs(r.r1) <= 1e-12);
			CHECK(std::abs(r.r2) <= 1e-12 * std::max(1.0, sigma));
		}
	for (double lambda : {0.05, 1.0, 30.0})
		for (double sigma : {-0.3, -2.0}) {
			const ModelParams p{lambda, sigma, -4 * sigma};
			const auto r = gap_residual(p, std::sqrt(-sigma / (2 * lambda)), -4 * sigma);
			CHECK(r.norm() <= 1e-10 * p.scale());
		}
	std::mt19937_64 rng(41);
	std::uniform_real_distribution<double> u(-2.0, 2.0);
	for (int t = 0; t < 50; ++t) {
		const ModelParams p{std::exp(u(rng)), u(rng), std::exp(u(rng))};
		CHECK(gap_residual(p, 0.0, std::exp(u(rng))).r1 == 0.0);
	}
	CHECK_THROWS_AS(gap_residual(ModelParams{1, 1, 1}, 0.0, 0.0), std::domain_error);
}

TEST_CASE("residual closed form for the quartic model")
{
	std::mt19937_64 rng(42);
	std::uniform_real_distribution<double> u(-2.0, 2.0);
	for (int t = 0; t < 100; ++t) {
		const ModelParams p{std::exp(u(rng)), u(rng), std::exp(u(rng))};
		const double xi = u(rng), m_sq = std::exp(u(rng));
		const double L = std::log(p.m0_sq / m_sq);
		const auto r = gap_residual(p, xi, m_sq);
		const double r1 = xi * (4 * p.lambda * xi * xi + 2 * p.sigma + 3 * p.lambda / kPi * L);
		const double r2 = 12 * p.lambda * xi * xi + 2 * p.sigma + 3 * p.lambda / kPi * L - m_sq;
		CHECK(r.r1 == doctest::Approx(r1).epsilon(1e-13).scale(p.scale()));
		CHECK(r.r2 == doctest::Approx(r2).epsilon(1e-13).scale(p.scale()));
		// xi -> -xi flips r1 and leaves r2
		const auto f = gap_residual(p, -xi, m_sq);
		CHECK(f.r1 == -r.r1);
		CHECK(f.r2 == r.r2);
	}
}

TEST_CASE("parameter validation")
{
	CHECK_THROWS_AS(solve_symmetric(ModelParams{0.0, 1.0, 1.0}), std::invalid_argument);
	CHECK_THROWS_AS(solve_symmetric(ModelParams{1.0, 1.0, -1.0}), std::invalid_argument);
	CHECK_THROWS_AS(solve_broken(ModelParams{-1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("symmetric solution examples")
{
	const auto s = solve_symmetric(ModelParams{0.1, 1.0, 2.0});
	CHECK(s.xi == 0.0);
	CHECK(s.m_sq == doctest::Approx(2.0).epsilon(1e-14));
	CHECK(s.branch == Branch::symmetric);
	CHECK(s.residual_norm <= 1e-10);

	// free-theory limit
	CHECK(solve_symmetric(ModelParams{1e-9, 1.0, 2.0}).m_sq == doctest::Approx(2.0).epsilon(1e-8));

	const ModelParams p{1.0, 0.3, 1.0};
	CHECK(solve_symmetric(p).m_sq == doctest::Approx(symmetric_oracle(p)).epsilon(1e-9));
}

TEST_CASE("symmetric solution matches the bisection oracle across parameters")
{
	std::mt19937_64 rng(43);
	std::uniform_real_distribution<double> u(-3.0, 3.0);
	for (int t = 0; t < 200; ++t) {
		const ModelParams p{std::exp(u(rng)), u(rng), std::exp(u(rng))};
		const auto s = solve_symmetric(p);
		CHECK(s.m_sq > 0.0);
		CHECK(s.m_sq == doctest::Approx(symmetric_oracle(p)).epsilon(1e-9));
		CHECK(gap_residual(p, 0.0, s.m_sq).norm() <= 1e-10 * p.scale());
	}
}

TEST_CASE("broken solution examples")
{
	{
		const ModelParams p{0.1, -1.0, 4.0};
		const auto b = solve_broken(p);
		CHECK(contains(b, std::sqrt(5.0), 4.0, 1e-12));
		CHECK(contains(b, -std::sqrt(5.0), 4.0, 1e-12));
	}
	{
		// below the critical coupling the Lambert argument is under -1/e
		const ModelParams p{1.0, 1.0, 1.0};
		CHECK(broken_log_argument(p) > -1.0);
		CHECK(solve_broken(p).empty());
	}
	{
		const ModelParams p{10.0, 1.0, 1.0};
		const auto b = solve_broken(p);
		REQUIRE(b.size() == 4);
		int w0 = 0, wm1 = 0;
		for (const auto& s : b) {
			CHECK(gap_residual(p, s.xi, s.m_sq).norm() <= 1e-10 * p.scale());
			w0 += s.lambert == LambertBranch::principal;
			wm1 += s.lambert == LambertBranch::minus_one;
		}
		CHECK(w0 == 2);
		CHECK(wm1 == 2);
	}
}

TEST_CASE("broken solutions match the one-dimensional oracle")
{
	std::mt19937_64 rng(44);
	std::uniform_real_distribution<double> u(-3.0, 3.0);
	int compared = 0;
	for (int t = 0; t < 300; ++t) {
		const ModelParams p{std::exp(u(rng)), u(rng), std::exp(u(rng))};
		const auto b = solve_broken(p);
		const auto o = broken_oracle(p);
		if (o.empty()) {
			CHECK(b.empty());
			continue;
		}
		for (double m_sq : o) {
			const double xi = std::sqrt(m_sq / (8 * p.lambda));
			CHECK(contains(b, xi, m_sq, 1e-8));
			CHECK(contains(b, -xi, m_sq, 1e-8));
			++compared;
		}
	}
	CHECK(compared > 50);
}

TEST_CASE("broken-solution invariants")
{
	std::mt19937_64 rng(45);
	std::uniform_real_distribution<double> u(-3.0, 3.0);
	for (int t = 0; t < 300; ++t) {
		const ModelParams p{std::exp(u(rng)), u(rng), std::exp(u(rng))};
		const auto b = solve_broken(p);
		CHECK(b.size() % 2 == 0);
		for (const auto& s : b) {
			CHECK(s.m_sq > 0.0);
			CHECK(s.residual_norm <= 1e-10 * p.scale());
			CHECK(std::abs(s.m_sq - 8 * p.lambda * s.xi * s.xi) <= 1e-10 * s.m_sq);
			const double rhs = p.m0_sq * std::exp(2 * kPi / (3 * p.lambda) * (2 * p.lambda * s.xi * s.xi + p.sigma));
			CHECK(std::abs(s.m_sq - rhs) <= 1e-10 * s.m_sq);
			CHECK(contains(b, -s.xi, s.m_sq, 1e-14));
		}
	}
}

TEST_CASE("mean-field limit is an exact solution with t = z")
{
	for (double lambda : {1e-3, 0.01, 0.1, 1.0, 10.0})
		for (double sigma : {-0.2, -1.0, -5.0}) {
			const ModelParams p{lambda, sigma, -4 * sigma};
			const auto b = solve_broken(p);
			CHECK(contains(b, std::sqrt(-sigma / (2 * lambda)), -4 * sigma, 1e-10));
			const auto m = std::find_if(b.begin(), b.end(), [](const GapSolution& s) { return s.branch == Branch::mean_field; });
			REQUIRE(m != b.end());
			CHECK(m->xi * m->xi == doctest::Approx(-sigma / (2 * lambda)).epsilon(1e-12));
		}
}

TEST_CASE("stability labels")
{
	{
		const ModelParams p{0.1, -1.0, 4.0};
		const auto all = solve_all(p);
		const auto sym = solve_symmetric(p);
		for (const auto& s : all)
			if (s.branch == Branch::mean_field)
				CHECK(s.stability == Stability::stable);
		// the symmetric point is a shallow local minimum lying above the broken phase, so it is not selected
		CHECK(classify_stability(p, sym).hessian.xx == doctest::Approx(sym.m_sq).epsilon(1e-6));
		CHECK(sym.energy > all.front().energy);
		CHECK(all.front().branch != Branch::symmetric);
	}
	{
		const ModelParams p{0.1, 1.0, 2.0};
		CHECK(solve_symmetric(p).stability == Stability::stable);
	}
	{
		// broken pair above the critical coupling: the W_{-1} roots are minima, the W_0 roots saddles
		const ModelParams p{10.0, 1.0, 1.0};
		for (const auto& s : solve_broken(p)) {
			if (s.lambert == LambertBranch::minus_one)
				CHECK(s.stability == Stability::stable);
			else
				CHECK(s.stability == Stability::saddle);
		}
	}
}

TEST_CASE("solutions are sorted by energy")
{
	const auto all = solve_all(ModelParams{10.0, 1.0, 1.0});
	REQUIRE(all.size() == 5);
	for (std::size_t i = 1; i < all.size(); ++i)
		CHECK(all[i - 1].energy <= all[i].energy);
}

TEST_CASE("generic solver reproduces the closed forms")
{
	for (const ModelParams p : {ModelParams{0.1, -1.0, 4.0}, ModelParams{10.0, 1.0, 1.0}, ModelParams{0.1, 1.0, 2.0},
	                            ModelParams{2.0, -0.5, 0.7}}) {
		const auto closed = solve_all(p);
		const auto g = solve_generic(p.potential(), p.m0_sq);
		CHECK(g.solutions.size() == closed.size());
		for (const auto& s : closed) {
			const bool found = std::any_of(g.solutions.begin(), g.solutions.end(), [&](const GapSolution& x) {
				return std::abs(x.xi - s.xi) <= 1e-9 * std::max(1.0, std::abs(s.xi)) &&
				       std::abs(x.m_sq - s.m_sq) <= 1e-9 * std::max(1.0, s.m_sq);
			});
			CHECK(found);
		}
		for (const auto& s : g.solutions)
			CHECK(s.residual_norm <= 1e-10 * p.scale());
	}
}

TEST_CASE("generic solver on the free theory")
{
	const auto g = solve_generic(Polynomial{0.0, 0.0, 0.65}, 1.3);
	REQUIRE(g.solutions.size() == 1);
	CHECK(std::abs(g.solutions[0].xi) <= 1e-12);
	CHECK(g.solutions[0].m_sq == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("generic solver: a small sextic term moves the solutions continuously")
{
	const ModelParams p{0.1, -1.0, 4.0};
	const auto base = solve_generic(p.potential(), p.m0_sq);
	for (double c : {1e-6, 1e-5, 1e-4}) {
		Polynomial v = p.potential() + Polynomial::monomial(6, c);
		const auto moved = solve_generic(v, p.m0_sq);
		CHECK(moved.solutions.size() == base.solutions.size());
		for (const auto& s : base.solutions) {
			double best = INFINITY;
			for (const auto& m : moved.solutions)
				best = std::min(best, std::abs(m.xi - s.xi));
			CHECK(best <= 1e3 * c);
		}
	}
}

TEST_CASE("generic solver rejects potentials unbounded below")
{
	CHECK_THROWS_AS(solve_generic(Polynomial{0.0, 0.0, 1.0, 0.0, -1.0}, 1.0), std::invalid_argument);
	CHECK_THROWS_AS(solve_generic(Polynomial{0.0, 0.0, 0.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("phase scan locates the critical coupling")
{
	const ModelParams base{1.0, 1.0, 1.0};
	const auto scan = phase_scan(base, {ScanParameter::lambda, 0.5, 10.0, 40});
	REQUIRE(scan.branch_points.size() == 1);
	// (pi m0^2/(6 lambda)) exp(2 pi sigma/(3 lambda)) = 1/e
	auto cond = [&](double l) {
		return std::log(kPi * base.m0_sq / (6 * l)) + 2 * kPi * base.sigma / (3 * l) + 1.0;
	};
	const double oracle = bisect(cond, 0.5, 10.0);
	CHECK(scan.branch_points[0].parameter == doctest::Approx(oracle).epsilon(1e-10));
	CHECK(scan.branch_points[0].broken_above);
	for (const auto& row : scan.rows) {
		const bool has_broken = std::any_of(row.solutions.begin(), row.solutions.end(),
		                                    [](const GapSolution& s) { return s.branch != Branch::symmetric; });
		CHECK(has_broken == (row.parameter >= scan.branch_points[0].parameter));
	}
}

TEST_CASE("phase scan edge cases")
{
	const auto one = phase_scan(ModelParams{1.0, 1.0, 1.0}, {ScanParameter::lambda, 2.0, 2.0, 1});
	CHECK(one.rows.size() == 1);
	CHECK(one.branch_points.empty());

	// sigma < 0 with m0^2 = -4 sigma: broken solutions at every coupling
	const auto neg = phase_scan(ModelParams{1.0, -1.0, 4.0}, {ScanParameter::lambda, 0.01, 100.0, 30});
	CHECK(neg.branch_points.empty());
	for (const auto& row : neg.rows)
		CHECK(row.broken_log_argument <= -1.0);

	CHECK_THROWS_AS(phase_scan(ModelParams{}, {ScanParameter::lambda, 1.0, 2.0, 0}), std::invalid_argument);
}

TEST_CASE("sigma scan: the symmetric branch persists and the broken branch switches at the computed boundary")
{
	const ModelParams base{0.5, 0.0, 1.0};
	const auto scan = phase_scan(base, {ScanParameter::sigma, -1.0, 1.0, 41});
	for (const auto& row : scan.rows) {
		const auto n_sym = std::count_if(row.solutions.begin(), row.solutions.end(),
		                                 [](const GapSolution& s) { return s.branch == Branch::symmetric; });
		CHECK(n_sym == 1);
	}
	REQUIRE(scan.branch_points.size() == 1);
	const double sc = scan.branch_points[0].parameter;
	ModelParams below = base, above = base;
	below.sigma = sc - 1e-6;
	above.sigma = sc + 1e-6;
	CHECK_FALSE(solve_broken(below).empty());
	CHECK(solve_broken(above).empty());
	CHECK_FALSE(scan.branch_points[0].broken_above);
}

TEST_CASE("scan parameter names")
{
	CHECK(scan_parameter_from_string("lambda") == ScanParameter::lambda);
	CHECK(scan_parameter_from_string("m0sq") == ScanParameter::m0_sq);
	CHECK(std::string(to_string(ScanParameter::sigma)) == "sigma");
	CHECK_THROWS_AS(scan_parameter_from_string("mu"), std::invalid_argument);
}

TEST_CASE("strong coupling: mass grows faster than the coupling")
{
	const ModelParams base{1.0, 1.0, 1.0};
	double prev_ratio = 0.0, prev_xi = 0.0, first_ratio = 0.0;
	bool seen = false;
	for (double lambda = 1.0; lambda <= 1e6; lambda *= 1.5) {
		ModelParams p = base;
		p.lambda = lambda;
		const auto b = solve_broken(p);
		const auto it = std::find_if(b.begin(), b.end(), [](const GapSolution& s) {
			return s.lambert == LambertBranch::minus_one && s.xi > 0.0;
		});
		if (it == b.end())
			continue;
		if (seen) {
			CHECK(it->m_sq / lambda > prev_ratio);
			CHECK(it->xi > prev_xi);
		} else {
			first_ratio = it->m_sq / lambda;
		}
		seen = true;
		prev_ratio = it->m_sq / lambda;
		prev_xi = it->xi;
	}
	CHECK(seen);
	// m^2 / lambda = 8 xi^2 grows like (6/pi) ln lambda
	CHECK(prev_ratio > 3.0 * first_ratio);
}

TEST_CASE("symmetric masses near the double-precision floor")
{
	// m^2 ~ 1e-308 while m0^2 / m^2 overflows
	const ModelParams p{0.294655, -100.608, 4.0 * 100.608};
	const auto s = solve_symmetric(p);
	CHECK(s.m_sq > 0.0);
	CHECK(s.m_sq < 1e-300);
	CHECK(std::isfinite(s.energy));
	CHECK(s.residual_norm <= 1e-10 * p.scale());
	const auto all = solve_all(p);
	CHECK(all.size() >= 3);
	for (const auto& a : all)
		CHECK(std::isfinite(a.energy));
}
