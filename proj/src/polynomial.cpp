#include "gaussvar/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gaussvar {

namespace {

/** n! / (n - k)! */
double falling_factorial(std::size_t n, std::size_t k)
{
	double r = 1.0;
	for (std::size_t i = 0; i < k; ++i)
		r *= static_cast<double>(n - i);
	return r;
}

double binomial(std::size_t n, std::size_t k)
{
	return falling_factorial(n, k) / falling_factorial(k, k);
}

/** Coefficients of q(x + a) given those of q(x). */
std::vector<double> taylor_shift(std::vector<double> c, double a)
{
	const std::size_t n = c.size();
	for (std::size_t i = 0; i + 1 < n; ++i)
		for (std::size_t j = n - 1; j-- > i;)
			c[j] += a * c[j + 1];
	return c;
}

} // namespace

Polynomial::Polynomial() : coeffs_{0.0} {}

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { normalize(); }

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

Polynomial Polynomial::monomial(std::size_t k, double c)
{
	std::vector<double> v(k + 1, 0.0);
	v[k] = c;
	return Polynomial(std::move(v));
}

void Polynomial::normalize()
{
	for (double c : coeffs_)
		if (!std::isfinite(c))
			throw std::invalid_argument("polynomial coefficient is not finite");
	while (coeffs_.size() > 1 && coeffs_.back() == 0.0)
		coeffs_.pop_back();
	if (coeffs_.empty())
		coeffs_.push_back(0.0);
	if (degree() > kMaxDegree)
		throw std::invalid_argument("polynomial degree " + std::to_string(degree()) +
		                            " exceeds the cap of " + std::to_string(kMaxDegree));
}

double Polynomial::operator()(double x) const
{
	double r = 0.0;
	for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
		r = r * x + *it;
	return r;
}

Polynomial Polynomial::derivative(std::size_t order) const
{
	if (order > degree())
		return {};
	std::vector<double> d(coeffs_.size() - order);
	for (std::size_t n = 0; n < d.size(); ++n)
		d[n] = coeffs_[n + order] * falling_factorial(n + order, order);
	return Polynomial(std::move(d));
}

double Polynomial::derivative_at(double x, std::size_t order) const
{
	if (order > degree())
		return 0.0;
	double r = 0.0;
	for (std::size_t n = degree() + 1; n-- > order;)
		r = r * x + coeffs_[n] * falling_factorial(n, order);
	return r;
}

bool Polynomial::is_even() const
{
	for (std::size_t k = 1; k < coeffs_.size(); k += 2)
		if (coeffs_[k] != 0.0)
			return false;
	return true;
}

double Polynomial::max_abs_coeff() const
{
	double m = 0.0;
	for (double c : coeffs_)
		m = std::max(m, std::abs(c));
	return m;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
	std::vector<double> r(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
	for (std::size_t k = 0; k < r.size(); ++k)
		r[k] = (*this)[k] + o[k];
	return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(double s) const
{
	std::vector<double> r = coeffs_;
	for (double& c : r)
		c *= s;
	return Polynomial(std::move(r));
}

OrderingShift OrderingShift::from_masses(double m0_sq, double m_sq, double xi)
{
	if (!(m0_sq > 0.0) || !(m_sq > 0.0))
		throw std::domain_error("ordering masses must be positive");
	return {(std::log(m0_sq) - std::log(m_sq)) / (8.0 * std::numbers::pi), xi};
}

Polynomial smear(const Polynomial& p, double Y)
{
	const std::size_t d = p.degree();
	std::vector<double> q(d + 1, 0.0);
	for (std::size_t n = 0; n <= d; ++n) {
		// sum_j Y^j / j! * c_{n+2j} (n+2j)! / n!
		double term_scale = 1.0; // Y^j / j!
		double acc = 0.0;
		for (std::size_t j = 0; n + 2 * j <= d; ++j) {
			if (j > 0)
				term_scale *= Y / static_cast<double>(j);
			acc += term_scale * p[n + 2 * j] * falling_factorial(n + 2 * j, 2 * j);
		}
		q[n] = acc;
	}
	return Polynomial(std::move(q));
}

double t_coefficient(const Polynomial& p, const OrderingShift& shift, std::size_t k)
{
	if (k > p.degree())
		return 0.0;
	const Polynomial s = smear(p, shift.Y);
	double r = 0.0;
	for (std::size_t n = s.degree() + 1; n-- > k;)
		r = r * shift.xi + s[n] * binomial(n, k);
	return r;
}

Polynomial reorder(const Polynomial& p, const OrderingShift& shift)
{
	const Polynomial s = smear(p, shift.Y);
	return Polynomial(taylor_shift({s.coeffs().begin(), s.coeffs().end()}, shift.xi));
}

Polynomial quartic_potential(double lambda, double sigma) { return Polynomial{0.0, 0.0, sigma, 0.0, lambda}; }

void to_json(nlohmann::json& j, const Polynomial& p) { j = std::vector<double>(p.coeffs().begin(), p.coeffs().end()); }

void from_json(const nlohmann::json& j, Polynomial& p)
{
	if (!j.is_array())
		throw std::invalid_argument("polynomial JSON must be an array of coefficients");
	p = Polynomial(j.get<std::vector<double>>());
}

} // namespace gaussvar
