#include "gaussvar/corrections.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gaussvar/special_functions.hpp"

namespace gaussvar {

namespace {

constexpr double kPi = std::numbers::pi;

quad::Options tight()
{
	quad::Options o;
	o.abs_tol = 1e-16;
	o.rel_tol = 1e-12;
	o.max_intervals = 4000;
	return o;
}

Estimate add(const quad::Result& a, const quad::Result& b) { return {a.value + b.value, a.error + b.error}; }

double k0_or_zero(double x) { return x > 700.0 ? 0.0 : bessel_k0(x); }
double k1_or_zero(double x) { return x > 700.0 ? 0.0 : bessel_k1(x); }

/** K0(r) = sum_k r^{2k} (alpha_k + beta_k ln r), truncated after `terms` powers of r^2. */
constexpr int kSeriesTerms = 10;
using LogSeries = std::array<std::array<double, 4>, kSeriesTerms>; // [power of r^2][power of ln r]

LogSeries k0_log_series()
{
	LogSeries s{};
	double c = 1.0; // (1/4)^k / (k!)^2
	double h = 0.0; // harmonic number H_k
	for (int k = 0; k < kSeriesTerms; ++k) {
		if (k > 0) {
			c /= 4.0 * k * k;
			h += 1.0 / k;
		}
		s[k][0] = c * (std::numbers::ln2 - std::numbers::egamma + h);
		s[k][1] = -c;
	}
	return s;
}

LogSeries multiply(const LogSeries& a, const LogSeries& b)
{
	LogSeries r{};
	for (int i = 0; i < kSeriesTerms; ++i)
		for (int j = 0; i + j < kSeriesTerms; ++j)
			for (int p = 0; p < 4; ++p)
				for (int q = 0; p + q < 4; ++q)
					r[i + j][p + q] += a[i][p] * b[j][q];
	return r;
}

/** int_0^delta r^p ln(r)^j dr */
double log_power_integral(int p, int j, double delta)
{
	const double lead = std::pow(delta, p + 1) * std::pow(std::log(delta), j) / (p + 1);
	return j == 0 ? lead : lead - j / double(p + 1) * log_power_integral(p, j - 1, delta);
}

} // namespace

CovarianceKernel::CovarianceKernel(double m_sq_) : m_sq(m_sq_)
{
	if (!(m_sq > 0.0) || !std::isfinite(m_sq))
		throw std::invalid_argument("covariance kernel needs m_sq > 0");
}

double CovarianceKernel::mass() const { return std::sqrt(m_sq); }

double covariance(const CovarianceKernel& kernel, double r)
{
	if (!(r > 0.0))
		throw std::domain_error("covariance is singular at r = 0");
	return k0_or_zero(kernel.mass() * r) / (2.0 * kPi);
}

Estimate bubble(double p, double m_sq)
{
	if (!(m_sq > 0.0))
		throw std::invalid_argument("bubble needs m_sq > 0");
	p = std::abs(p);
	const double p2 = p * p;
	// the integrand is O(1/p^3) near the peak; carry it scaled by p^2 + m^2 to stay clear of denormals
	const double scale = p2 + m_sq;
	if (!std::isfinite(scale))
		throw std::domain_error("bubble momentum too large for double precision");
	// q - p is passed separately so it keeps full precision near the peak
	auto f_split = [&](double q, double q_minus_p) {
		const double q2 = q * q;
		// a^2 - 4 p^2 q^2 written without cancellation
		const double d = q_minus_p * (q + p);
		const double root = std::hypot(d, std::sqrt(2.0 * m_sq * (q2 + p2) + m_sq * m_sq));
		return q / (q2 + m_sq) * (scale / root);
	};
	auto f = [&](double q) { return f_split(q, q - p); };
	// for p >> m the integrand has a peak of width m at q = p and varies on
	// every scale between m and p; logarithmic pieces resolve both ends
	const double m = std::sqrt(m_sq);
	quad::Options opt = tight();
	opt.abs_tol = 0.0; // positive integrand: a purely relative target
	quad::Result head{};
	auto accumulate = [&](const quad::Result& r) {
		head.value += r.value;
		head.error += r.error;
	};
	auto log_piece = [&](double origin, double sign, double from, double to) {
		// q = origin + sign e^s over e^s in [from, to]
		auto g = [&](double s) {
			const double e = std::exp(s);
			const double q = origin + sign * e;
			return e * f_split(q, origin == p ? sign * e : q - p);
		};
		accumulate(quad::integrate(g, std::log(from), std::log(to), opt));
	};
	double far;
	if (p > 4.0 * m) {
		accumulate(quad::integrate(f, 0.0, m, opt));
		log_piece(0.0, 1.0, m, 0.5 * p);
		log_piece(p, -1.0, m, 0.5 * p);
		accumulate(quad::integrate([&](double d) { return f_split(p + d, d); }, -m, m, opt));
		log_piece(p, 1.0, m, p + m);
		far = 2.0 * p + m;
	} else {
		const double hi = std::max(p, m) + m;
		accumulate(quad::integrate(f, 0.0, hi, opt));
		far = 2.0 * hi;
		accumulate(quad::integrate(f, hi, far, opt));
	}
	const auto tail = quad::integrate_to_infinity(f, far, opt, far);
	const Estimate e = add(head, tail);
	const double norm = 2.0 * kPi * scale;
	return {e.value / norm, e.error / norm};
}

double bubble_closed_form(double p, double m_sq)
{
	if (!(m_sq > 0.0))
		throw std::invalid_argument("bubble needs m_sq > 0");
	p = std::abs(p);
	const double s = std::sqrt(p * p + 4.0 * m_sq);
	if (p < 1e-4 * s) {
		// 2 atanh(p/s) / (p s) by its Taylor series
		const double x2 = (p / s) * (p / s);
		return (1.0 + x2 / 3.0 + x2 * x2 / 5.0 + x2 * x2 * x2 / 7.0) / (kPi * s * s);
	}
	// 2 atanh(p/s) = ln((s + p)/(s - p)) with s - p = 4 m^2 / (s + p)
	const double sp = s + p;
	return (2.0 * std::log(sp) - std::log(4.0 * m_sq)) / (2.0 * kPi * p * s);
}

Estimate integral_I3_position(double delta)
{
	if (!(delta > 0.0 && delta <= 1.0))
		throw std::invalid_argument("series split must lie in (0, 1]");
	const LogSeries k0 = k0_log_series();
	const LogSeries cube = multiply(multiply(k0, k0), k0);
	double near = 0.0;
	for (int k = 0; k < kSeriesTerms; ++k)
		for (int j = 0; j < 4; ++j)
			if (cube[k][j] != 0.0)
				near += cube[k][j] * log_power_integral(2 * k + 1, j, delta);
	// first neglected power is r^{2 kSeriesTerms + 1} ln^3 r
	const double series_error = std::pow(delta * delta / 4.0, kSeriesTerms) * std::pow(std::abs(std::log(delta)) + 1.0, 3);

	auto f = [](double r) {
		const double k = k0_or_zero(r);
		return k * k * k * r;
	};
	const auto far = quad::integrate_to_infinity(f, delta, tight());
	const double norm = 1.0 / (4.0 * kPi * kPi);
	return {(near + far.value) * norm, (series_error + far.error) * norm};
}

Estimate integral_I3_momentum(double m_sq)
{
	double inner_error = 0.0;
	auto f = [&](double p) {
		const Estimate b = bubble(p, m_sq);
		inner_error = std::max(inner_error, b.error / std::max(b.value, 1e-300));
		return p * b.value / (p * p + m_sq);
	};
	const double m = std::sqrt(m_sq);
	const Estimate e = add(quad::integrate(f, 0.0, m, tight()), quad::integrate_to_infinity(f, m, tight(), m));
	const double v = e.value / (2.0 * kPi);
	return {v, e.error / (2.0 * kPi) + inner_error * std::abs(v)};
}

Estimate integral_Iss_position()
{
	auto f = [](double r) {
		const double k0 = k0_or_zero(r);
		return r * r * k0 * k0 * k1_or_zero(r);
	};
	const Estimate e = add(quad::integrate(f, 0.0, 1.0, tight()), quad::integrate_to_infinity(f, 1.0, tight()));
	const double norm = 1.0 / (8.0 * kPi * kPi);
	return {e.value * norm, e.error * norm};
}

Estimate integral_Iss_momentum(double m_sq)
{
	double inner_error = 0.0;
	auto f = [&](double k) {
		const Estimate b = bubble(k, m_sq);
		inner_error = std::max(inner_error, b.error / std::max(b.value, 1e-300));
		const double c = 1.0 / (k * k + m_sq);
		return k * c * c * b.value;
	};
	const double m = std::sqrt(m_sq);
	const Estimate e = add(quad::integrate(f, 0.0, m, tight()), quad::integrate_to_infinity(f, m, tight(), m));
	const double v = e.value / (2.0 * kPi);
	return {v, e.error / (2.0 * kPi) + inner_error * std::abs(v)};
}

Estimate twopoint_kernel(double r)
{
	if (r < 0.0)
		throw std::domain_error("separation must be non-negative");
	if (r == 0.0)
		return integral_Iss_momentum(1.0);
	return r > kTwopointRouteSwitch ? twopoint_kernel_position(r) : twopoint_kernel_momentum(r);
}

Estimate twopoint_kernel_position(double r)
{
	if (!(r > 0.0))
		throw std::domain_error("separation must be positive");
	quad::Options opt = tight();
	opt.abs_tol = 0.0;
	opt.rel_tol = 1e-11;
	// (C*C)(d) = d K1(d) / (4 pi), finite at d = 0
	auto cc = [](double d) { return d < 1e-300 ? 1.0 / (4.0 * kPi) : d * k1_or_zero(d) / (4.0 * kPi); };
	double inner_error = 0.0;
	auto shell = [&](double rho) {
		if (rho == 0.0)
			return 0.0;
		const double g = k0_or_zero(rho) / (2.0 * kPi);
		if (g == 0.0)
			return 0.0;
		auto ang = [&](double th) {
			// |x - y|^2 = (r - rho)^2 + 4 r rho sin^2(th/2), free of cancellation
			const double h = std::sin(0.5 * th);
			return cc(std::sqrt((r - rho) * (r - rho) + 4.0 * r * rho * h * h));
		};
		const auto a = quad::integrate(ang, 0.0, kPi, opt);
		inner_error = std::max(inner_error, a.error / a.value);
		return 2.0 * rho * g * g * a.value;
	};
	quad::Options outer = opt;
	outer.rel_tol = 1e-10;
	Estimate total{};
	// breaks at the log singularity scale and at the kink rho = r
	const std::array<double, 4> breaks{0.0, std::min(1.0, r), std::max(1.0, r), std::max(1.0, r) + 1.0};
	for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
		if (breaks[i + 1] <= breaks[i])
			continue;
		const auto piece = quad::integrate(shell, breaks[i], breaks[i + 1], outer);
		total.value += piece.value;
		total.error += piece.error;
	}
	const auto tail = quad::integrate_to_infinity(shell, breaks.back(), outer);
	total.value += tail.value;
	total.error += tail.error;
	return {total.value, total.error + inner_error * total.value};
}

Estimate twopoint_kernel_momentum(double r)
{
	if (!(r > 0.0))
		throw std::domain_error("separation must be positive");
	double inner_error = 0.0;
	auto f = [&](double k) {
		const Estimate b = bubble(k, 1.0);
		inner_error = std::max(inner_error, b.error / std::max(b.value, 1e-300));
		const double c = 1.0 / (k * k + 1.0);
		return k * std::cyl_bessel_j(0.0, k * r) * c * c * b.value;
	};
	// integrate the oscillatory part panel by panel, then the monotone-envelope tail
	const double panel = kPi / r;
	const double cutoff = std::max(20.0, 8.0 * panel);
	quad::Options opt = tight();
	opt.rel_tol = 1e-11;
	Estimate total{};
	for (double a = 0.0; a < cutoff; a += panel) {
		const auto piece = quad::integrate(f, a, std::min(a + panel, cutoff), opt);
		total.value += piece.value;
		total.error += piece.error;
	}
	const auto tail = quad::integrate_to_infinity(f, cutoff, opt);
	total.value += tail.value;
	total.error += tail.error;
	const double v = total.value / (2.0 * kPi);
	return {v, total.error / (2.0 * kPi) + inner_error * std::abs(v)};
}

const CorrectionIntegrals& correction_integrals()
{
	static const CorrectionIntegrals cached = [] {
		CorrectionIntegrals c;
		c.I3 = integral_I3_position();
		c.I3_alt = integral_I3_momentum();
		c.Iss = integral_Iss_momentum();
		c.Iss_alt = integral_Iss_position();
		c.I3_route_diff = std::abs(c.I3.value - c.I3_alt.value) / std::abs(c.I3.value);
		c.Iss_route_diff = std::abs(c.Iss.value - c.Iss_alt.value) / std::abs(c.Iss.value);
		c.a1 = 1.5 * (c.I3.value - 4.5 * c.Iss.value);
		c.a1_error = 1.5 * (std::max(c.I3.error, std::abs(c.I3.value - c.I3_alt.value)) +
		                    4.5 * std::max(c.Iss.error, std::abs(c.Iss.value - c.Iss_alt.value)));
		return c;
	}();
	return cached;
}

MeanExpansion mean_expansion(double xi, const ExpansionOptions& opt)
{
	if (!(std::abs(xi) >= opt.xi_guard))
		throw std::domain_error("|xi| = " + std::to_string(std::abs(xi)) + " is below the asymptotic guard " +
		                        std::to_string(opt.xi_guard));
	MeanExpansion m;
	m.correction = correction_integrals().a1 / (xi * xi * xi);
	m.value = xi + m.correction;
	return m;
}

TwoPointExpansion twopoint_expansion(double r, double xi, double m_sq, const ExpansionOptions& opt)
{
	if (!(r > 0.0))
		throw std::domain_error("separation must be positive");
	if (xi == 0.0 || !(std::abs(xi) >= opt.xi_guard))
		throw std::domain_error("|xi| = " + std::to_string(std::abs(xi)) + " is below the asymptotic guard " +
		                        std::to_string(opt.xi_guard));
	const CovarianceKernel kernel(m_sq);
	const Estimate q = twopoint_kernel(kernel.mass() * r);
	TwoPointExpansion t;
	t.leading = covariance(kernel, r);
	t.correction = 4.5 / (xi * xi) * q.value;
	t.correction_error = 4.5 / (xi * xi) * q.error;
	t.value = t.leading + t.correction;
	return t;
}

RescaledCouplings rescale_to_unit_mass(const GapSolution& sol, const ModelParams& params)
{
	params.validate();
	if (sol.xi == 0.0)
		throw std::invalid_argument("rescaled cubic coupling is undefined for xi = 0");
	const double broken_mass = 8.0 * params.lambda * sol.xi * sol.xi;
	if (std::abs(sol.m_sq - broken_mass) > 1e-9 * std::max(sol.m_sq, broken_mass))
		throw std::invalid_argument("solution does not satisfy m^2 = 8 lambda xi^2");
	RescaledCouplings c;
	c.xi = sol.xi;
	c.m_sq = sol.m_sq;
	c.quartic = params.lambda / sol.m_sq;
	c.cubic = 4.0 * params.lambda * sol.xi / sol.m_sq;
	return c;
}

ReferenceComparison compare_to_reference(std::string name, double computed, double reference, double tol)
{
	ReferenceComparison c;
	c.name = std::move(name);
	c.computed = computed;
	c.reference = reference;
	c.relative_difference = std::abs(computed - reference) / std::abs(reference);
	c.match = c.relative_difference <= tol;
	return c;
}

CorrectionReport correction_report(const std::vector<double>& r_grid)
{
	CorrectionReport rep;
	rep.integrals = correction_integrals();
	for (double r : r_grid) {
		const Estimate q = twopoint_kernel(r);
		rep.twopoint_kernel.push_back({r, q.value, q.error});
	}
	rep.kernel_at_origin = rep.integrals.Iss.value;
	rep.kernel_integral = bubble(0.0).value;
	rep.routes_agree = rep.integrals.I3_route_diff <= 1e-7 && rep.integrals.Iss_route_diff <= 1e-7;
	rep.comparisons.push_back(compare_to_reference("a1", rep.integrals.a1, 0.021));
	rep.comparisons.push_back(compare_to_reference("twopoint_coincident", 4.5 * rep.kernel_at_origin, 5.6e-4));
	rep.comparisons.push_back(compare_to_reference("twopoint_zero_momentum", 4.5 * rep.kernel_integral, 5.6e-4));
	return rep;
}

void to_json(nlohmann::json& j, const Estimate& e) { j = {{"value", e.value}, {"error", e.error}}; }

void to_json(nlohmann::json& j, const CorrectionIntegrals& c)
{
	j = {{"units", "dimensionless, unit mass"},
	     {"I3", {{"position", c.I3}, {"momentum", c.I3_alt}, {"route_difference", c.I3_route_diff}}},
	     {"Iss", {{"momentum", c.Iss}, {"position", c.Iss_alt}, {"route_difference", c.Iss_route_diff}}},
	     {"a1", {{"value", c.a1}, {"error", c.a1_error}}}};
}

void to_json(nlohmann::json& j, const ReferenceComparison& c)
{
	j = {{"name", c.name},
	     {"computed", c.computed},
	     {"reference", c.reference},
	     {"relative_difference", c.relative_difference},
	     {"verdict", c.match ? "confirmed" : "discrepancy"}};
}

void to_json(nlohmann::json& j, const CorrectionReport& r)
{
	nlohmann::json kernel = nlohmann::json::array();
	for (const auto& s : r.twopoint_kernel)
		kernel.push_back({{"r", s.r}, {"Q", s.value}, {"error", s.error}});
	j = {{"integrals", r.integrals},
	     {"twopoint_kernel", {{"r_units", "1/m"}, {"value_units", "dimensionless"}, {"samples", kernel}}},
	     {"kernel_at_origin", r.kernel_at_origin},
	     {"kernel_integral", {{"value", r.kernel_integral}, {"units", "1/m^2"}}},
	     {"mean_expansion", {{"form", "xi + a1/xi^3"}, {"neglected", "o(1/xi^4)"}}},
	     {"twopoint_expansion", {{"form", "C_m(r) + 9/(2 xi^2) Q(m r)"}, {"neglected", "o(1/xi^3)"}}},
	     {"routes_agree", r.routes_agree},
	     {"comparisons", r.comparisons}};
}

} // namespace gaussvar
