#pragma once

/**
 * @file corrections.hpp
 * @brief Free two-dimensional covariance, the covariance integrals entering the
 *        large-xi expansions of the one- and two-point functions, and the
 *        unit-mass rescaling of the broken-phase interaction.
 *
 * Units: the field is dimensionless in two dimensions; lengths scale as 1/m.
 * All integrals are quoted for unit mass unless a mass argument is given.
 */

#include <string>
#include <vector>

#include <json.hpp>

#include "gaussvar/model.hpp"
#include "gaussvar/quadrature.hpp"

namespace gaussvar {

/** C_m = (-Laplacian + m^2)^{-1} on R^2. */
struct CovarianceKernel {
	double m_sq = 1.0;

	explicit CovarianceKernel(double m_sq);
	double mass() const;
};

/** (1/2 pi) K0(m r); throws std::domain_error for r <= 0. */
double covariance(const CovarianceKernel& kernel, double r);

/** A value with its estimated absolute error. */
struct Estimate {
	double value = 0.0;
	double error = 0.0;
};

/**
 * Equal-mass bubble B(p) = int d^2q/(2 pi)^2 1/((q^2+m^2)((p-q)^2+m^2)),
 * by radial quadrature after the exact angular integral.
 */
Estimate bubble(double p, double m_sq = 1.0);
/** Closed form (1/(2 pi p s)) ln((s+p)/(s-p)), s = sqrt(p^2 + 4 m^2). */
double bubble_closed_form(double p, double m_sq = 1.0);

/** int C_1(x)^3 d^2x in position space: series on [0, delta], adaptive on [delta, inf). */
Estimate integral_I3_position(double delta = 0.1);
/** int d^2p/(2 pi)^2 C_m(p) B(p); equals I3 / m^2. */
Estimate integral_I3_momentum(double m_sq = 1.0);

/** int C_1(x) C_1(y) C_1(x-y)^2 d^2x d^2y via (C*C)(r) = r K1(r)/(4 pi). */
Estimate integral_Iss_position();
/** int d^2k/(2 pi)^2 C_m(k)^2 B(k); equals Iss / m^4. */
Estimate integral_Iss_momentum(double m_sq = 1.0);

/** Q(r) = int d^2k/(2 pi)^2 e^{ik.x} C_1(k)^2 B(k) at unit mass; Q(0) = Iss. */
Estimate twopoint_kernel(double r);
/** Q by its Fourier-Bessel integral; loses relative accuracy once Q(r) << Q(0). */
Estimate twopoint_kernel_momentum(double r);
/** Q as the convolution of C_1^2 with (C*C)(r) = r K1(r)/(4 pi); positive integrand. */
Estimate twopoint_kernel_position(double r);
/** Separation beyond which `twopoint_kernel` uses the position route. */
inline constexpr double kTwopointRouteSwitch = 6.0;

/** Dual-route integrals shared by the expansions. */
struct CorrectionIntegrals {
	Estimate I3;               ///< shipped: position route
	Estimate I3_alt;           ///< momentum route
	Estimate Iss;              ///< shipped: momentum route
	Estimate Iss_alt;          ///< position route
	double I3_route_diff = 0.0;  ///< relative
	double Iss_route_diff = 0.0; ///< relative
	/** (3/2)(I3 - (9/2) Iss) */
	double a1 = 0.0;
	double a1_error = 0.0;
};

/** Computed once and cached; thread-safe. */
const CorrectionIntegrals& correction_integrals();

struct ExpansionOptions {
	/** Smallest |xi| treated as asymptotic. */
	double xi_guard = 1.0;
};

struct MeanExpansion {
	double value = 0.0;      ///< xi + a1 / xi^3
	double correction = 0.0; ///< a1 / xi^3
	std::string neglected = "o(1/xi^4)";
};

/** <phi> = xi + a1/xi^3; throws std::domain_error for |xi| below the guard. */
MeanExpansion mean_expansion(double xi, const ExpansionOptions& opt = {});

struct TwoPointExpansion {
	double value = 0.0;       ///< C_m(r) + (9/(2 xi^2)) Q(m r)
	double leading = 0.0;     ///< C_m(r)
	double correction = 0.0;
	double correction_error = 0.0;
	std::string neglected = "o(1/xi^3)";
};

/** Connected two-point function at separation r in the original units of mass m. */
TwoPointExpansion twopoint_expansion(double r, double xi, double m_sq, const ExpansionOptions& opt = {});

/** Couplings of the interaction after rescaling the mass to one. */
struct RescaledCouplings {
	double quartic = 0.0; ///< lambda / m^2, equals 1/(8 xi^2)
	double cubic = 0.0;   ///< 4 lambda xi / m^2, equals 1/(2 xi)
	double xi = 0.0;
	double m_sq = 0.0;
};

/** Throws std::invalid_argument for xi = 0 or a solution off m^2 = 8 lambda xi^2. */
RescaledCouplings rescale_to_unit_mass(const GapSolution& sol, const ModelParams& params);

struct ReferenceComparison {
	std::string name;
	double computed = 0.0;
	double reference = 0.0;
	double relative_difference = 0.0;
	bool match = false; ///< within 15%
};

ReferenceComparison compare_to_reference(std::string name, double computed, double reference, double tol = 0.15);

struct KernelSample {
	double r = 0.0;
	double value = 0.0;
	double error = 0.0;
};

struct CorrectionReport {
	CorrectionIntegrals integrals;
	std::vector<KernelSample> twopoint_kernel;
	double kernel_at_origin = 0.0;   ///< Q(0) = Iss
	double kernel_integral = 0.0;    ///< int Q d^2r = B(0)
	std::vector<ReferenceComparison> comparisons;
	bool routes_agree = false;       ///< both integrals within 1e-7
};

/** Full report; `r_grid` samples Q in units of 1/m. */
CorrectionReport correction_report(const std::vector<double>& r_grid);

void to_json(nlohmann::json& j, const Estimate& e);
void to_json(nlohmann::json& j, const CorrectionIntegrals& c);
void to_json(nlohmann::json& j, const ReferenceComparison& c);
void to_json(nlohmann::json& j, const CorrectionReport& r);

} // namespace gaussvar
