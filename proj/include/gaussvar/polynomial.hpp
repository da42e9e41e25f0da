#pragma once

/**
 * @file polynomial.hpp
 * @brief Dense real polynomials for potentials V(phi) and the change of Wick
 *        ordering between Gaussian measures of different mass and mean.
 *
 * A change of ordering from the free vacuum of mass m0 to the Gaussian of
 * mass m and mean xi acts on a potential as the heat operator
 * exp(Y d^2/dx^2) followed by a Taylor expansion around xi, with
 * Y = ln(m0^2/m^2) / (8 pi).
 */

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <json.hpp>

namespace gaussvar {

/** Upper bound on the degree of any potential handled by the library. */
inline constexpr std::size_t kMaxDegree = 16;

class Polynomial {
public:
	/** The zero polynomial. */
	Polynomial();
	Polynomial(std::initializer_list<double> coeffs);
	/** coeffs[k] multiplies x^k. Trailing zeros are trimmed. */
	explicit Polynomial(std::vector<double> coeffs);

	static Polynomial monomial(std::size_t k, double c = 1.0);

	std::size_t degree() const { return coeffs_.size() - 1; }
	std::span<const double> coeffs() const { return coeffs_; }
	double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

	double operator()(double x) const;
	Polynomial derivative(std::size_t order = 1) const;
	/** Value of the order-th derivative at x without building it. */
	double derivative_at(double x, std::size_t order) const;

	bool is_even() const;
	/** Largest absolute coefficient. */
	double max_abs_coeff() const;

	Polynomial operator+(const Polynomial& o) const;
	Polynomial operator-(const Polynomial& o) const;
	Polynomial operator*(double s) const;

	bool operator==(const Polynomial& o) const = default;

private:
	void normalize();
	std::vector<double> coeffs_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/**
 * Change of Wick ordering: smearing parameter Y (half the variance shift)
 * and field mean xi.
 */
struct OrderingShift {
	double Y = 0.0;
	double xi = 0.0;

	/** Y = ln(m0^2/m^2) / (8 pi). */
	static OrderingShift from_masses(double m0_sq, double m_sq, double xi);
	/** Variance shift between the two orderings, equal to 2Y. */
	double variance_shift() const { return 2.0 * Y; }
	OrderingShift inverse() const { return {-Y, -xi}; }
};

/** exp(Y d^2/dx^2) p, a finite sum since p is a polynomial. */
Polynomial smear(const Polynomial& p, double Y);

/**
 * Coefficient of :phi^k: after reordering :p(phi): from the reference
 * vacuum to the Gaussian described by `shift`. Zero for k > deg p.
 */
double t_coefficient(const Polynomial& p, const OrderingShift& shift, std::size_t k);

/** The polynomial whose k-th coefficient is t_coefficient(p, shift, k). */
Polynomial reorder(const Polynomial& p, const OrderingShift& shift);

/** The lambda phi^4 + sigma phi^2 potential. */
Polynomial quartic_potential(double lambda, double sigma);

void to_json(nlohmann::json& j, const Polynomial& p);
void from_json(const nlohmann::json& j, Polynomial& p);

} // namespace gaussvar
