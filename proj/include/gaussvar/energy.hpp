#pragma once

/**
 * @file energy.hpp
 * @brief Gaussian vacuum-energy density and its stationarity structure.
 *
 * With Y = ln(m0^2/m^2) / (8 pi),
 *
 *     eps(xi, m) = [exp(Y d^2/dx^2) V](xi) + (m^2 - m0^2) / (8 pi).
 *
 * The gradient of eps in (xi, Y) is (V_Y'(xi), V_Y''(xi) - m^2), which is the
 * gap residual; the Hessian is available in closed form as well.
 */

#include <string>
#include <vector>

#include "gaussvar/model.hpp"
#include "gaussvar/polynomial.hpp"

namespace gaussvar {

struct EnergyPoint {
	double xi = 0.0;
	double m_sq = 1.0;
	double epsilon = 0.0;
};

double vacuum_energy(const Polynomial& v, double m0_sq, double xi, double m_sq);
/** Same energy parameterised by the smearing Y instead of m^2. */
double vacuum_energy_at_y(const Polynomial& v, double m0_sq, double xi, double Y);

/** Per-area trace (1/4pi)(m^2 - m0^2 - m^2 ln(m^2/m0^2)); never positive. */
double trace_term(double m_sq, double m0_sq);

/** The subtracted potential V(x) - (m^2/2)(x - xi)^2. */
Polynomial subtracted_potential(const Polynomial& v, double xi, double m_sq);

struct EnergyGradient {
	double d_xi = 0.0;
	double d_y = 0.0;
};

/** Analytic (d eps/d xi, d eps/d Y). */
EnergyGradient energy_gradient(const Polynomial& v, double m0_sq, double xi, double m_sq);

struct EnergyHessian {
	double xx = 0.0, xy = 0.0, yy = 0.0;
};

/** Analytic Hessian of eps in (xi, Y). */
EnergyHessian energy_hessian(const Polynomial& v, double m0_sq, double xi, double m_sq);
/** Central-difference Hessian of eps in (xi, Y) with step h. */
EnergyHessian energy_hessian_fd(const Polynomial& v, double m0_sq, double xi, double m_sq, double h = 1e-4);

struct StabilityReport {
	Stability label = Stability::marginal;
	EnergyHessian hessian;
	double eig_min = 0.0, eig_max = 0.0;
	double det = 0.0;
	std::string diagnostic;
};

/** Eigenvalue signs of a 2x2 Hessian; |det| < 1e-12 * max(1, |H|^2) is marginal. */
StabilityReport stability_from_hessian(const EnergyHessian& h);

/** Both sides of each stationarity identity and their defects. */
struct EquivalenceReport {
	double xi = 0.0, m_sq = 0.0, Y = 0.0;
	double deps_dxi = 0.0; ///< finite-difference d eps / d xi
	double t1 = 0.0;       ///< T1 of the subtracted potential
	double deps_dy = 0.0;  ///< finite-difference d eps / d Y
	double t2 = 0.0;       ///< T2 of the subtracted potential
	double defect_xi = 0.0, defect_y = 0.0;
	double scale = 1.0;
	double ratio_y = 0.0; ///< deps_dy / t2, 2 away from stationary points
	bool pass = false;
};

/**
 * Finite-difference check (one Richardson level, step 1e-5 max(1, |coord|))
 * of d eps/d xi = T1 and d eps/d Y = 2 T2 to `rel_tol * scale`.
 */
EquivalenceReport gradient_equivalence_check(const Polynomial& v, double m0_sq, double xi, double m_sq,
                                             double rel_tol = 1e-6);

/** Rectangle in (xi, ln(m^2/m0^2)) for brute-force minimisation. */
struct GridSpec {
	double xi_lo = -5.0, xi_hi = 5.0;
	double log_ratio_lo = -6.0, log_ratio_hi = 6.0;
	int xi_points = 201, mass_points = 201;

	/** xi in +-5 xi_guess, where xi_guess is the largest classical minimiser (at least 1). */
	static GridSpec defaults_for(const Polynomial& v);
};

struct EnergyMinimum {
	GapSolution solution;
	bool on_boundary = false;
	std::string diagnostic;
	int grid_candidates = 0;
};

/**
 * Grid argmin of eps, refined by coordinate descent and Newton. Every discrete
 * local minimum on the grid is refined and the lowest result is returned.
 */
EnergyMinimum minimize_energy(const Polynomial& v, double m0_sq, const GridSpec& grid);

/** eps on the grid, row-major in xi. */
std::vector<EnergyPoint> energy_surface(const Polynomial& v, double m0_sq, const GridSpec& grid);

} // namespace gaussvar
