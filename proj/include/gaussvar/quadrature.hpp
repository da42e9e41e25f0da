#pragma once

/**
 * @file quadrature.hpp
 * @brief Globally adaptive 7/15-point Gauss-Kronrod integration.
 */

#include <functional>
#include <stdexcept>
#include <string>

namespace gaussvar::quad {

struct Result {
	double value = 0.0;
	double error = 0.0; ///< estimated absolute error
	int evaluations = 0;
};

struct Options {
	double abs_tol = 1e-15;
	double rel_tol = 1e-12;
	int max_intervals = 2000;
};

/** Raised when the requested tolerance is not met; carries the best estimate. */
class QuadratureError : public std::runtime_error {
public:
	QuadratureError(const std::string& what, Result achieved)
	    : std::runtime_error(what), achieved_(achieved)
	{
	}
	const Result& achieved() const { return achieved_; }

private:
	Result achieved_;
};

using Integrand = std::function<double(double)>;

/** Integral over the finite interval [a, b]. */
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

/** Integral over [a, inf) via x = a + scale t / (1 - t); `scale` should match the decay length. */
Result integrate_to_infinity(const Integrand& f, double a, const Options& opt = {}, double scale = 1.0);

} // namespace gaussvar::quad
