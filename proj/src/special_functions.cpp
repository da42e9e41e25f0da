#include "gaussvar/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gaussvar {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// -1/e split into a double and its rounding remainder
constexpr double kBranchHi = kLambertBranchPoint;
constexpr double kBranchLo = 1.2428753672788363168e-17;

/** e z + 1, accurate near the branch point. */
double branch_distance(double z)
{
	return std::numbers::e * ((z - kBranchHi) + kBranchLo);
}

/** W around the branch point in powers of p = +-sqrt(2(ez+1)). */
double branch_series(double p)
{
	constexpr double c[] = {-1.0,
	                        1.0,
	                        -1.0 / 3.0,
	                        11.0 / 72.0,
	                        -43.0 / 540.0,
	                        769.0 / 17280.0,
	                        -221.0 / 8505.0,
	                        680863.0 / 43545600.0,
	                        -1963.0 / 204120.0,
	                        226287557.0 / 37623398400.0};
	double r = 0.0;
	for (int k = 9; k >= 0; --k)
		r = r * p + c[k];
	return r;
}

/** Halley on w e^w - z. */
double halley(double w, double z)
{
	for (int it = 0; it < kMaxIterations; ++it) {
		const double ew = std::exp(w);
		const double f = w * ew - z;
		// near the branch point the derivative vanishes and steps stall at roundoff size
		if (std::abs(f) <= 2.0 * kEps * std::abs(z))
			return w;
		const double wp1 = w + 1.0;
		const double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
		w -= dw;
		if (std::abs(dw) <= 4.0 * kEps * (1.0 + std::abs(w)))
			return w;
	}
	throw ConvergenceError("Lambert W: Halley iteration did not converge");
}

/**
 * Halley on w + ln|w| - log_abs_z, the logarithmic form of w e^w = z.
 * Valid away from w = -1.
 */
double halley_log(double w, double log_abs_z)
{
	for (int it = 0; it < kMaxIterations; ++it) {
		const double g = w + std::log(std::abs(w)) - log_abs_z;
		const double g1 = 1.0 + 1.0 / w;
		const double g2 = -1.0 / (w * w);
		const double dw = g / (g1 - 0.5 * g * g2 / g1);
		w -= dw;
		if (std::abs(dw) <= 4.0 * kEps * (1.0 + std::abs(w)))
			return w;
	}
	throw ConvergenceError("Lambert W: logarithmic iteration did not converge");
}

/**
 * One Newton step on the logarithmic form in extended precision. For large |w|
 * an ulp of w exceeds the residual target, so the final rounding must be right.
 */
double polish_log(double w, long double log_abs_z)
{
	const long double wl = w;
	const long double g = wl + std::log(std::abs(wl)) - log_abs_z;
	return static_cast<double>(wl - g / (1.0L + 1.0L / wl));
}

/** Leading terms of W at large |ln|z||, for either branch. */
double log_asymptotic(double l1)
{
	const double l2 = std::log(std::abs(l1));
	return l1 - l2 + l2 / l1;
}

void check_bessel_arg(double x)
{
	if (!(x > 0.0))
		throw std::domain_error("modified Bessel K requires x > 0");
}

} // namespace

const char* to_string(LambertBranch b) { return b == LambertBranch::principal ? "principal" : "minus_one"; }

double lambert_w(double z, LambertBranch branch)
{
	if (std::isnan(z) || z < kLambertBranchPoint)
		throw LambertDomainError("Lambert W argument below the branch point -1/e", kLambertBranchPoint);
	if (z == kLambertBranchPoint)
		return -1.0;

	if (branch == LambertBranch::principal) {
		if (z == 0.0)
			return 0.0;
		if (std::isinf(z))
			return z;
		const double d = branch_distance(z);
		if (d < 0.5) {
			const double p = std::sqrt(2.0 * d);
			const double w = branch_series(p);
			return p < 1e-3 ? w : halley(w, z);
		}
		if (z > std::numbers::e)
			return polish_log(halley_log(log_asymptotic(std::log(z)), std::log(z)), std::log(static_cast<long double>(z)));
		// Winitzki's approximation for moderate z
		const double l = std::log1p(z);
		return halley(l * (1.0 - std::log1p(l) / (2.0 + l)), z);
	}

	if (!(z < 0.0))
		throw LambertDomainError("Lambert W_{-1} requires -1/e <= z < 0", kLambertBranchPoint);
	const double d = branch_distance(z);
	if (d < 0.5) {
		const double p = -std::sqrt(2.0 * d);
		const double w = branch_series(p);
		return p > -1e-3 ? w : halley(w, z);
	}
	const double lz = std::log(-z);
	return polish_log(halley_log(log_asymptotic(lz), lz), std::log(-static_cast<long double>(z)));
}

double lambert_w0_exp(double log_z)
{
	if (std::isnan(log_z))
		throw LambertDomainError("Lambert W argument is NaN", kLambertBranchPoint);
	if (log_z <= 1.0)
		return lambert_w(std::exp(log_z), LambertBranch::principal);
	return polish_log(halley_log(log_asymptotic(log_z), log_z), log_z);
}

double lambert_w_negexp(double log_mz, LambertBranch branch)
{
	if (std::isnan(log_mz) || log_mz > -1.0)
		throw LambertDomainError("Lambert W argument below the branch point -1/e", kLambertBranchPoint);
	if (log_mz > -700.0)
		return lambert_w(-std::exp(log_mz), branch);
	if (branch == LambertBranch::principal) {
		const double z = -std::exp(log_mz);
		return z - z * z;
	}
	return polish_log(halley_log(log_asymptotic(log_mz), log_mz), log_mz);
}

namespace detail {

void bessel_k_series(double x, double& k0, double& k1)
{
	constexpr double gamma = std::numbers::egamma;
	const double y = 0.25 * x * x;
	const double lx = std::log(0.5 * x);

	// k-th terms: t = y^k / (k!)^2, u = y^k / (k! (k+1)!)
	double t = 1.0, u = 1.0;
	double harmonic = 0.0; // H_k
	double i0 = 0.0, i1_sum = 0.0, k0_sum = 0.0, k1_sum = 0.0;
	for (int k = 0; k < 60; ++k) {
		if (k > 0) {
			t *= y / (static_cast<double>(k) * k);
			u *= y / (static_cast<double>(k) * (k + 1));
			harmonic += 1.0 / k;
		}
		const double h_next = harmonic + 1.0 / (k + 1);
		i0 += t;
		i1_sum += u;
		k0_sum += t * harmonic;
		k1_sum += u * (2.0 * (-gamma) + harmonic + h_next);
		if (t < kEps * 1e-3 * i0 && u < kEps * 1e-3 * i1_sum)
			break;
	}
	const double i1 = 0.5 * x * i1_sum;
	k0 = -(lx + gamma) * i0 + k0_sum;
	k1 = 1.0 / x + lx * i1 - 0.25 * x * k1_sum;
}

void bessel_k_scaled_cf(double x, double& k0s, double& k1s)
{
	// Steed's algorithm for the second continued fraction, order zero
	double b = 2.0 * (1.0 + x);
	double d = 1.0 / b;
	double h = d, delh = d;
	double q1 = 0.0, q2 = 1.0;
	const double a1 = 0.25;
	double q = a1, c = a1;
	double a = -a1;
	double s = 1.0 + q * delh;
	int i = 1;
	for (; i < 10000; ++i) {
		a -= 2 * i;
		c = -a * c / (i + 1.0);
		const double qnew = (q1 - b * q2) / a;
		q1 = q2;
		q2 = qnew;
		q += c * qnew;
		b += 2.0;
		d = 1.0 / (b + a * d);
		delh = (b * d - 1.0) * delh;
		h += delh;
		const double dels = q * delh;
		s += dels;
		if (std::abs(dels / s) < kEps)
			break;
	}
	if (i == 10000)
		throw ConvergenceError("Bessel K continued fraction did not converge");
	h *= a1;
	k0s = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
	k1s = k0s * (x + 0.5 - h) / x;
}

} // namespace detail

double bessel_k0(double x)
{
	check_bessel_arg(x);
	if (x <= detail::kBesselSeam) {
		double k0, k1;
		detail::bessel_k_series(x, k0, k1);
		return k0;
	}
	return bessel_k0_scaled(x) * std::exp(-x);
}

double bessel_k1(double x)
{
	check_bessel_arg(x);
	if (x <= detail::kBesselSeam) {
		double k0, k1;
		detail::bessel_k_series(x, k0, k1);
		return k1;
	}
	return bessel_k1_scaled(x) * std::exp(-x);
}

double bessel_k0_scaled(double x)
{
	check_bessel_arg(x);
	double k0, k1;
	if (x <= detail::kBesselSeam) {
		detail::bessel_k_series(x, k0, k1);
		return k0 * std::exp(x);
	}
	detail::bessel_k_scaled_cf(x, k0, k1);
	return k0;
}

double bessel_k1_scaled(double x)
{
	check_bessel_arg(x);
	double k0, k1;
	if (x <= detail::kBesselSeam) {
		detail::bessel_k_series(x, k0, k1);
		return k1 * std::exp(x);
	}
	detail::bessel_k_scaled_cf(x, k0, k1);
	return k1;
}

} // namespace gaussvar
