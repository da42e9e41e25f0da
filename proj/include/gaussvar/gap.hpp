#pragma once

/**
 * @file gap.hpp
 * @brief Gaussian self-consistency (gap) equations and their solutions.
 *
 * For a potential V and reference mass m0 the gap equations are
 *
 *     r1 = V_Y'(xi) = 0,    r2 = V_Y''(xi) - m^2 = 0,
 *
 * with V_Y = exp(Y d^2/dx^2) V and Y = ln(m0^2/m^2) / (8 pi). They are the
 * stationarity conditions of the vacuum energy in (xi, Y). For the quartic
 * model the solutions are given in closed form by Lambert W.
 */

#include <string>
#include <vector>

#include "gaussvar/energy.hpp"
#include "gaussvar/model.hpp"
#include "gaussvar/polynomial.hpp"

namespace gaussvar {

struct GapResidual {
	double r1 = 0.0;
	double r2 = 0.0;
	double norm() const;
};

GapResidual gap_residual(const Polynomial& v, double m0_sq, double xi, double m_sq);
GapResidual gap_residual(const ModelParams& params, double xi, double m_sq);

/** The xi = 0 solution, m^2 = (3 lambda/pi) W0((m0^2 pi/3 lambda) exp(2 pi sigma/3 lambda)). */
GapSolution solve_symmetric(const ModelParams& params);

/**
 * log|z| of the broken-phase Lambert argument z = -(pi m0^2/6 lambda) exp(2 pi sigma/3 lambda).
 * Real broken solutions exist iff this is <= -1.
 */
double broken_log_argument(const ModelParams& params);

/**
 * All real xi != 0 solutions, both signs of xi, from W0 and W_{-1} of the
 * broken-phase argument. Empty when the argument is below -1/e. Sorted by
 * energy, then by xi.
 */
std::vector<GapSolution> solve_broken(const ModelParams& params);

/** solve_symmetric and solve_broken merged and sorted by energy. */
std::vector<GapSolution> solve_all(const ModelParams& params);

struct GenericSolveOptions {
	int xi_seeds = 41;
	int mass_seeds = 31;
	/** Seed rectangle half-width in xi; 0 picks it from the potential. */
	double xi_range = 0.0;
	double log_mass_below = 45.0; ///< seeds reach ln m0^2 - this
	double log_mass_above = 15.0; ///< seeds reach ln m0^2 + this
	int max_iterations = 200;
	double dedup_tol = 1e-8;
};

struct GenericSolveResult {
	std::vector<GapSolution> solutions;
	int seeds = 0;
	int converged = 0;
	std::string diagnostic;
};

/**
 * Damped Newton on the gap residual in (xi, ln m^2) from a seed grid.
 * Requires an even-degree potential with positive leading coefficient.
 */
GenericSolveResult solve_generic(const Polynomial& v, double m0_sq, const GenericSolveOptions& opt = {});

/** Stability from the curvature of the vacuum energy in (xi, Y). */
StabilityReport classify_stability(const Polynomial& v, double m0_sq, const GapSolution& sol);
StabilityReport classify_stability(const ModelParams& params, const GapSolution& sol);

enum class ScanParameter { lambda, sigma, m0_sq };

const char* to_string(ScanParameter p);
ScanParameter scan_parameter_from_string(const std::string& s);

struct ScanSpec {
	ScanParameter parameter = ScanParameter::lambda;
	double lo = 0.0;
	double hi = 1.0;
	int steps = 11;
};

struct ScanRow {
	double parameter = 0.0;
	double broken_log_argument = 0.0;
	std::vector<GapSolution> solutions;
};

/** A parameter value at which the broken-phase Lambert argument crosses -1/e. */
struct BranchPoint {
	double parameter = 0.0;
	std::size_t lower_index = 0; ///< the crossing lies between rows lower_index and lower_index + 1
	bool broken_above = false;   ///< broken solutions exist above the crossing
};

struct PhaseScan {
	ModelParams base;
	ScanSpec spec;
	std::vector<ScanRow> rows;
	std::vector<BranchPoint> branch_points;
};

/** Solutions on a monotone grid plus bisection-refined (1e-10 relative) branch points. */
PhaseScan phase_scan(const ModelParams& base, const ScanSpec& spec);

} // namespace gaussvar
