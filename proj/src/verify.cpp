#include "gaussvar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gaussvar/corrections.hpp"
#include "gaussvar/energy.hpp"
#include "gaussvar/gap.hpp"
#include "gaussvar/gaussian_calculus.hpp"
#include "gaussvar/special_functions.hpp"

namespace gaussvar {

namespace {

/** Independent stream per suite. */
std::mt19937_64 suite_rng(std::uint64_t seed, std::uint64_t salt)
{
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
	                  static_cast<std::uint32_t>(salt)};
	return std::mt19937_64(seq);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
	std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
	return std::exp(u(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
	std::uniform_real_distribution<double> u(lo, hi);
	return u(rng);
}

} // namespace

const std::vector<std::string>& suite_names()
{
	static const std::vector<std::string> names{"gradient", "appendix", "special", "integrals"};
	return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed)
{
	if (name == "gradient")
		return verify_gradient(seed);
	if (name == "appendix")
		return verify_appendix(seed);
	if (name == "special")
		return verify_special(seed);
	if (name == "integrals")
		return verify_integrals(seed);
	throw std::invalid_argument("unknown suite '" + name + "'");
}

SuiteReport verify_gradient(std::uint64_t seed)
{
	auto rng = suite_rng(seed, 1);
	constexpr int kTrials = 100;
	int passed = 0;
	double worst_xi = 0.0, worst_y = 0.0;
	nlohmann::json failures = nlohmann::json::array();
	for (int t = 0; t < kTrials; ++t) {
		const ModelParams p{log_uniform(rng, 0.05, 5.0), uniform(rng, -2.0, 2.0), log_uniform(rng, 0.2, 5.0)};
		const double xi = uniform(rng, -3.0, 3.0);
		const double m_sq = p.m0_sq * log_uniform(rng, 0.05, 20.0);
		const auto r = gradient_equivalence_check(p.potential(), p.m0_sq, xi, m_sq);
		worst_xi = std::max(worst_xi, r.defect_xi / r.scale);
		worst_y = std::max(worst_y, r.defect_y / r.scale);
		if (r.pass)
			++passed;
		else
			failures.push_back({{"lambda", p.lambda}, {"sigma", p.sigma}, {"m0_sq", p.m0_sq}, {"xi", xi}, {"m_sq", m_sq},
			                    {"defect_xi", r.defect_xi}, {"defect_y", r.defect_y}, {"scale", r.scale}});
	}

	// stationarity at closed-form solutions
	double worst_stationary = 0.0;
	for (const ModelParams p : {ModelParams{0.1, -1.0, 4.0}, ModelParams{0.1, 1.0, 2.0}, ModelParams{10.0, 1.0, 1.0}}) {
		for (const auto& s : solve_all(p)) {
			const auto g = energy_gradient(p.potential(), p.m0_sq, s.xi, s.m_sq);
			worst_stationary = std::max({worst_stationary, std::abs(g.d_xi) / p.scale(), std::abs(g.d_y) / p.scale()});
		}
	}

	SuiteReport rep;
	rep.name = "gradient";
	rep.pass = passed == kTrials && worst_stationary <= 1e-9;
	rep.details = {{"trials", kTrials},
	               {"passed", passed},
	               {"tolerance", 1e-6},
	               {"max_relative_defect_xi", worst_xi},
	               {"max_relative_defect_y", worst_y},
	               {"max_gradient_at_solutions", worst_stationary},
	               {"failures", failures}};
	return rep;
}

SuiteReport verify_appendix(std::uint64_t seed)
{
	auto rng = suite_rng(seed, 2);
	constexpr double kTol = 1e-10;
	bool pass = true;

	nlohmann::json ortho = nlohmann::json::array();
	for (int dim = 2; dim <= kMaxFieldDim; ++dim) {
		const auto mu = random_measure(rng, dim, 1.0);
		const auto f = random_vector(rng, dim);
		const auto g = random_vector(rng, dim);
		const auto r = check_orthogonality(mu, f, g, 5, kTol);
		pass = pass && r.pass;
		ortho.push_back({{"dim", dim},
		                 {"max_offdiag", r.max_offdiag},
		                 {"max_diag_defect", r.max_diag_defect},
		                 {"pass", r.pass}});
	}

	constexpr int kIbpTrials = 200;
	int ibp_passed = 0;
	double worst_ibp = 0.0, worst_recursion = 0.0;
	for (int t = 0; t < kIbpTrials; ++t) {
		const int dim = 2 + t % 3;
		const auto mu = random_measure(rng, dim, 1.0);
		const auto f = random_vector(rng, dim);
		const auto R = random_field_polynomial(rng, dim, 6, 5);
		IbpReport r;
		if (t % 2 == 0) {
			r = ibp_first(mu, f, R, kTol);
		} else {
			const int n = 1 + (t / 2) % 4;
			r = ibp_second(mu, f, n, R, kTol);
			worst_recursion = std::max(worst_recursion, r.recursion_defect);
		}
		worst_ibp = std::max(worst_ibp, r.defect / r.scale);
		if (r.pass)
			++ibp_passed;
	}
	pass = pass && ibp_passed == kIbpTrials;

	double worst_commute = 0.0;
	for (int n = 0; n <= 6; ++n) {
		const auto mu = random_measure(rng, 3, 1.0);
		const auto f = random_vector(rng, 3);
		for (int j = 0; j < 3; ++j)
			worst_commute = std::max(worst_commute, wick_derivative_commute(mu, f, n, j).max_defect);
	}
	pass = pass && worst_commute <= kTol;

	const auto mu = random_measure(rng, 3, 1.0);
	const double gen_defect = generating_function_defect(mu, random_vector(rng, 3), 8);
	pass = pass && gen_defect <= kTol;

	// a two-component mixture is not Gaussian, so its Wick powers are not orthogonal
	GaussianMixture mix;
	mix.weights = {0.5, 0.5};
	Eigen::VectorXd m1(2), m2(2);
	m1 << 1.0, -0.5;
	m2 << -1.0, 0.5;
	mix.components = {GaussianMeasure(m1, Eigen::Matrix2d::Identity()), GaussianMeasure(m2, 0.5 * Eigen::Matrix2d::Identity())};
	Eigen::VectorXd f(2);
	f << 1.0, 0.3;
	const auto gram = orthogonality_from_moments(mix.projected_moments(f, 10), 5);
	double mixture_offdiag = 0.0;
	for (int n = 0; n <= 5; ++n)
		for (int m = 0; m <= 5; ++m)
			if (n != m)
				mixture_offdiag = std::max(mixture_offdiag, std::abs(gram[n][m]));
	const bool mixture_violates = mixture_offdiag > 1e-3;
	pass = pass && mixture_violates;

	SuiteReport rep;
	rep.name = "appendix";
	rep.pass = pass;
	rep.details = {{"tolerance", kTol},
	               {"orthogonality", ortho},
	               {"ibp", {{"trials", kIbpTrials}, {"passed", ibp_passed}, {"max_relative_defect", worst_ibp}}},
	               {"wick_recursion_max_defect", worst_recursion},
	               {"derivative_commute_max_defect", worst_commute},
	               {"generating_function_defect", gen_defect},
	               {"mixture_counterexample", {{"max_offdiag", mixture_offdiag}, {"violates_orthogonality", mixture_violates}}}};
	return rep;
}

SuiteReport verify_special(std::uint64_t seed)
{
	(void)seed; // deterministic sweep
	constexpr int kPoints = 10000;
	auto defect = [](double z, double w) { return std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z)); };

	double worst_w0 = 0.0, worst_wm1 = 0.0;
	for (int i = 0; i < kPoints; ++i) {
		const double s = static_cast<double>(i) / (kPoints - 1);
		// principal: half positive over [1e-300, 1e300], half negative over [-1/e, -1/e * 1e-300]
		const double z0 = i % 2 == 0 ? std::pow(10.0, -300.0 + 600.0 * s) : kLambertBranchPoint * std::pow(10.0, -300.0 * s);
		worst_w0 = std::max(worst_w0, defect(z0, lambert_w(z0, LambertBranch::principal)));
		const double z1 = kLambertBranchPoint * std::pow(10.0, -300.0 * s);
		worst_wm1 = std::max(worst_wm1, defect(z1, lambert_w(z1, LambertBranch::minus_one)));
	}

	double worst_seam = 0.0;
	nlohmann::json seam = nlohmann::json::array();
	for (double x : {1.9, 1.95, 2.0, 2.05, 2.1}) {
		double k0, k1, k0s, k1s;
		detail::bessel_k_series(x, k0, k1);
		detail::bessel_k_scaled_cf(x, k0s, k1s);
		const double e = std::exp(-x);
		const double d = std::max(std::abs(k0 - k0s * e) / (k0s * e), std::abs(k1 - k1s * e) / (k1s * e));
		worst_seam = std::max(worst_seam, d);
		seam.push_back({{"x", x}, {"relative_difference", d}});
	}

	SuiteReport rep;
	rep.name = "special";
	rep.pass = worst_w0 <= 1e-13 && worst_wm1 <= 1e-13 && worst_seam <= 1e-12;
	rep.details = {{"lambert_points_per_branch", kPoints},
	               {"lambert_max_defect_principal", worst_w0},
	               {"lambert_max_defect_minus_one", worst_wm1},
	               {"lambert_tolerance", 1e-13},
	               {"bessel_seam", seam},
	               {"bessel_seam_max_difference", worst_seam},
	               {"bessel_tolerance", 1e-12}};
	return rep;
}

SuiteReport verify_integrals(std::uint64_t seed)
{
	auto rng = suite_rng(seed, 4);
	const auto& c = correction_integrals();

	const double m_sq = 4.0;
	const double i3_scaling = std::abs(integral_I3_momentum(m_sq).value * m_sq - c.I3.value) / c.I3.value;
	const double iss_scaling = std::abs(integral_Iss_momentum(m_sq).value * m_sq * m_sq - c.Iss.value) / c.Iss.value;

	double split_spread = 0.0;
	for (double delta : {0.05, 0.2, 0.5})
		split_spread = std::max(split_spread, std::abs(integral_I3_position(delta).value - c.I3.value) / c.I3.value);

	double worst_bubble = 0.0;
	for (int i = 0; i < 8; ++i) {
		const double p = log_uniform(rng, 1e-3, 1e3);
		const double q = bubble(p).value;
		worst_bubble = std::max(worst_bubble, std::abs(q - bubble_closed_form(p)) / bubble_closed_form(p));
	}

	SuiteReport rep;
	rep.name = "integrals";
	rep.pass = c.I3_route_diff <= 1e-7 && c.Iss_route_diff <= 1e-7 && i3_scaling <= 1e-8 && iss_scaling <= 1e-8 &&
	           split_spread <= 1e-10 && worst_bubble <= 1e-10;
	rep.details = {{"I3", {{"position", c.I3.value}, {"momentum", c.I3_alt.value}, {"relative_difference", c.I3_route_diff}}},
	               {"Iss", {{"momentum", c.Iss.value}, {"position", c.Iss_alt.value}, {"relative_difference", c.Iss_route_diff}}},
	               {"route_tolerance", 1e-7},
	               {"scaling_m_sq", m_sq},
	               {"I3_scaling_defect", i3_scaling},
	               {"Iss_scaling_defect", iss_scaling},
	               {"scaling_tolerance", 1e-8},
	               {"series_split_spread", split_spread},
	               {"bubble_closed_form_max_difference", worst_bubble}};
	return rep;
}

} // namespace gaussvar
