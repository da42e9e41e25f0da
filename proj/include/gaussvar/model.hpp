#pragma once

#include <optional>
#include <string>

#include "gaussvar/polynomial.hpp"
#include "gaussvar/special_functions.hpp"

namespace gaussvar {

/** lambda phi^4 + sigma phi^2, normal ordered with respect to the free vacuum of mass m0. */
struct ModelParams {
	double lambda = 1.0;
	double sigma = 0.0;
	double m0_sq = 1.0;

	/** Throws std::invalid_argument unless lambda > 0 and m0_sq > 0. */
	void validate() const;
	Polynomial potential() const { return quartic_potential(lambda, sigma); }
	/** Residual scale max(1, |sigma|, lambda, m0^2). */
	double scale() const;
};

enum class Branch { symmetric, broken_w0, broken_wm1, mean_field, generic };
enum class Stability { stable, unstable, saddle, marginal };

const char* to_string(Branch b);
const char* to_string(Stability s);

/** A stationary point of the Gaussian vacuum energy. */
struct GapSolution {
	double xi = 0.0;
	double m_sq = 1.0;
	Branch branch = Branch::generic;
	Stability stability = Stability::marginal;
	double energy = 0.0;
	double residual_norm = 0.0;
	/** Lambert branch that produced a closed-form broken solution. */
	std::optional<LambertBranch> lambert;
};

} // namespace gaussvar
