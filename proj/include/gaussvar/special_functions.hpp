#pragma once

#include <stdexcept>
#include <string>

namespace gaussvar {

enum class LambertBranch { principal, minus_one };

const char* to_string(LambertBranch b);

/** Argument outside the real domain of a Lambert W branch. */
class LambertDomainError : public std::domain_error {
public:
	LambertDomainError(const std::string& what, double branch_point)
	    : std::domain_error(what), branch_point_(branch_point)
	{
	}
	/** Always -1/e. */
	double branch_point() const { return branch_point_; }

private:
	double branch_point_;
};

/** An iterative special-function evaluation failed to converge. */
class ConvergenceError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/** -1/e */
inline constexpr double kLambertBranchPoint = -0.36787944117144232159552377016146;

/**
 * Real Lambert W: the solution w of w e^w = z on the requested branch.
 * principal: z >= -1/e, w >= -1.  minus_one: -1/e <= z < 0, w <= -1.
 */
double lambert_w(double z, LambertBranch branch);

/** W0(e^log_z), usable when e^log_z overflows or underflows. */
double lambert_w0_exp(double log_z);

/**
 * W_b(-e^log_mz) for log_mz <= -1, usable when e^log_mz underflows.
 * On the principal branch the result may underflow to -0.
 */
double lambert_w_negexp(double log_mz, LambertBranch branch);

/** Modified Bessel functions of the second kind, x > 0. */
double bessel_k0(double x);
double bessel_k1(double x);
/** e^x K0(x) and e^x K1(x). */
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

namespace detail {
/** Small-argument power series for (K0, K1); accurate for 0 < x <= 2. */
void bessel_k_series(double x, double& k0, double& k1);
/** Continued-fraction evaluation of (e^x K0, e^x K1); accurate for x >= 1. */
void bessel_k_scaled_cf(double x, double& k0s, double& k1s);
/** Crossover between the two routes. */
inline constexpr double kBesselSeam = 2.0;
} // namespace detail

} // namespace gaussvar
