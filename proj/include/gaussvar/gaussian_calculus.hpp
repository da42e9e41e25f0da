#pragma once

/**
 * @file gaussian_calculus.hpp
 * @brief Finite-dimensional Gaussian calculus: exact moments, Wick powers of
 *        smeared fields phi(f) = sum_i f_i phi_i, orthogonality, and the two
 *        integration-by-parts identities, all with a nonzero mean.
 */

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gaussvar {

inline constexpr int kMaxFieldDim = 6;
inline constexpr int kMaxFieldDegree = 10;

/** Gaussian measure with mean vector and symmetric positive-definite covariance. */
class GaussianMeasure {
public:
	GaussianMeasure(Eigen::VectorXd mean, Eigen::MatrixXd cov);

	int dim() const { return static_cast<int>(mean_.size()); }
	const Eigen::VectorXd& mean() const { return mean_; }
	const Eigen::MatrixXd& cov() const { return cov_; }
	/** C(f, g) = f^T C g */
	double pairing(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const { return f.dot(cov_ * g); }
	/** (mean, f) */
	double mean_of(const Eigen::VectorXd& f) const { return mean_.dot(f); }

private:
	Eigen::VectorXd mean_;
	Eigen::MatrixXd cov_;
};

/** Multivariate polynomial in phi_0 .. phi_{n-1}, total degree <= 10. */
class FieldPolynomial {
public:
	using Exponent = std::array<std::uint8_t, kMaxFieldDim>;

	explicit FieldPolynomial(int dim);
	static FieldPolynomial constant(int dim, double c);
	static FieldPolynomial variable(int dim, int i);
	/** sum_i f_i phi_i + c */
	static FieldPolynomial linear(const Eigen::VectorXd& f, double c = 0.0);

	int dim() const { return dim_; }
	int degree() const;
	const std::map<Exponent, double>& terms() const { return terms_; }
	double coefficient(const Exponent& e) const;
	void add_term(const Exponent& e, double c);

	FieldPolynomial derivative(int j) const;
	double max_abs_coeff() const;

	FieldPolynomial operator+(const FieldPolynomial& o) const;
	FieldPolynomial operator-(const FieldPolynomial& o) const;
	FieldPolynomial operator*(const FieldPolynomial& o) const;
	FieldPolynomial operator*(double s) const;

private:
	int dim_;
	std::map<Exponent, double> terms_;
};

/** Largest coefficient-wise |a - b|. */
double max_coeff_difference(const FieldPolynomial& a, const FieldPolynomial& b);

/** Exact Gaussian expectation by mean shift and Isserlis pairing. */
double moment(const GaussianMeasure& mu, const FieldPolynomial& p);

/**
 * Sum of the absolute values of every pairing term contributing to moment();
 * the natural roundoff scale for identities between moments.
 */
double moment_magnitude(const GaussianMeasure& mu, const FieldPolynomial& p);

/** :phi(f)^n:, generated by exp(l (phi(f) - (mean, f)) - l^2 C(f, f) / 2). */
FieldPolynomial wick_power(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n);

struct OrthogonalityReport {
	int nmax = 0;
	std::vector<std::vector<double>> matrix; ///< <:phi(f)^n: :phi(g)^m:>
	double max_offdiag = 0.0;                ///< relative to each entry's scale
	double max_diag_defect = 0.0;            ///< vs n! C(f, g)^n, relative
	bool pass = false;
};

OrthogonalityReport check_orthogonality(const GaussianMeasure& mu, const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                                        int nmax, double tol = 1e-10);

struct IbpReport {
	double lhs = 0.0;
	double rhs = 0.0;
	double defect = 0.0;
	double scale = 1.0;
	/** ibp_second only: coefficient defect of the Wick recursion identity. */
	double recursion_defect = 0.0;
	bool pass = false;
};

/** <:phi(f): R> against sum_ij f_i C_ij <dR/dphi_j>. */
IbpReport ibp_first(const GaussianMeasure& mu, const Eigen::VectorXd& f, const FieldPolynomial& R,
                    double tol = 1e-10);

/**
 * <:phi(f)^n: R> against sum_ij f_i C_ij <:phi(f)^{n-1}: dR/dphi_j>, together with
 * :phi(f)^n: = :phi(f): :phi(f)^{n-1}: - (n-1) C(f, f) :phi(f)^{n-2}:.
 */
IbpReport ibp_second(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n, const FieldPolynomial& R,
                     double tol = 1e-10);

struct CommuteReport {
	double max_defect = 0.0;
	bool exact = false;
};

/** d/dphi_j :phi(f)^n: against n f_j :phi(f)^{n-1}:. */
CommuteReport wick_derivative_commute(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n, int j);

/**
 * Largest relative defect between <phi(f)^k>/k! and the Taylor coefficients
 * of exp(a^2 C(f, f)/2 + a (mean, f)), k <= kmax.
 */
double generating_function_defect(const GaussianMeasure& mu, const Eigen::VectorXd& f, int kmax);

/** Finite mixture of Gaussian measures; the non-Gaussian counterexample. */
struct GaussianMixture {
	std::vector<double> weights;
	std::vector<GaussianMeasure> components;

	/** <phi(f)^k> for k = 0 .. kmax */
	std::vector<double> projected_moments(const Eigen::VectorXd& f, int kmax) const;
};

/**
 * Wick powers of a scalar variable with the given raw moments, defined by
 * :e^{a x}: = e^{a x} / <e^{a x}>. Returns coefficients in powers of x.
 */
std::vector<double> wick_power_from_moments(const std::vector<double>& moments, int n);

/** <:x^n: :x^m:> for n, m <= nmax under the measure with the given raw moments. */
std::vector<std::vector<double>> orthogonality_from_moments(const std::vector<double>& moments, int nmax);

/** Random SPD covariance (well conditioned) and mean of the given scale. */
GaussianMeasure random_measure(std::mt19937_64& rng, int dim, double mean_scale);
/** Random polynomial with `terms` monomials of total degree <= max_degree. */
FieldPolynomial random_field_polynomial(std::mt19937_64& rng, int dim, int max_degree, int terms);
Eigen::VectorXd random_vector(std::mt19937_64& rng, int dim);

} // namespace gaussvar
