#include "gaussvar/gaussian_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaussvar {

namespace {

using Exponent = FieldPolynomial::Exponent;

int total_degree(const Exponent& e)
{
	int d = 0;
	for (auto k : e)
		d += k;
	return d;
}

double factorial(int n)
{
	double r = 1.0;
	for (int i = 2; i <= n; ++i)
		r *= i;
	return r;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/** Gaussian moments with memoised Isserlis recursion on centred exponents. */
class MomentEngine {
public:
	MomentEngine(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) : mean_(mean), cov_(cov) {}

	/** <prod_i phi_i^{a_i}> */
	double monomial(const Exponent& a)
	{
		const int n = static_cast<int>(mean_.size());
		// expand prod (mean_i + eta_i)^{a_i}, enumerating b <= a
		Exponent b{};
		double total = 0.0;
		while (true) {
			double w = 1.0;
			for (int i = 0; i < n; ++i)
				w *= binomial(a[i], b[i]) * std::pow(mean_[i], a[i] - b[i]);
			if (w != 0.0)
				total += w * centred(b);
			int i = 0;
			for (; i < n; ++i) {
				if (b[i] < a[i]) {
					++b[i];
					break;
				}
				b[i] = 0;
			}
			if (i == n)
				break;
		}
		return total;
	}

	/** <eta^b> for the centred Gaussian: pair the first factor with every other one. */
	double centred(const Exponent& b)
	{
		const int d = total_degree(b);
		if (d == 0)
			return 1.0;
		if (d % 2 == 1)
			return 0.0;
		if (auto it = memo_.find(b); it != memo_.end())
			return it->second;
		const int n = static_cast<int>(mean_.size());
		int first = 0;
		while (b[first] == 0)
			++first;
		Exponent rest = b;
		--rest[first];
		double r = 0.0;
		for (int j = 0; j < n; ++j) {
			if (rest[j] == 0 || cov_(first, j) == 0.0)
				continue;
			Exponent sub = rest;
			--sub[j];
			r += cov_(first, j) * rest[j] * centred(sub);
		}
		memo_.emplace(b, r);
		return r;
	}

	double expectation(const FieldPolynomial& p, bool absolute)
	{
		if (p.degree() > kMaxFieldDegree)
			throw std::invalid_argument("moment: polynomial degree " + std::to_string(p.degree()) +
			                            " exceeds the cap of " + std::to_string(kMaxFieldDegree));
		double r = 0.0;
		for (const auto& [e, c] : p.terms())
			r += (absolute ? std::abs(c) : c) * monomial(e);
		return r;
	}

private:
	Eigen::VectorXd mean_;
	Eigen::MatrixXd cov_;
	std::map<Exponent, double> memo_;
};

std::vector<double> one_dim_gaussian_moments(double mean, double var, int kmax)
{
	std::vector<double> m(kmax + 1, 0.0);
	m[0] = 1.0;
	if (kmax >= 1)
		m[1] = mean;
	for (int k = 2; k <= kmax; ++k)
		m[k] = mean * m[k - 1] + (k - 1) * var * m[k - 2];
	return m;
}

} // namespace

GaussianMeasure::GaussianMeasure(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov))
{
	const auto n = mean_.size();
	if (n < 1 || n > kMaxFieldDim)
		throw std::invalid_argument("Gaussian measure dimension must be between 1 and 6");
	if (cov_.rows() != n || cov_.cols() != n)
		throw std::invalid_argument("covariance shape does not match the mean");
	const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
	if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
		throw std::invalid_argument("covariance is not symmetric");
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_, Eigen::EigenvaluesOnly);
	if (!(eig.eigenvalues().minCoeff() > 0.0))
		throw std::invalid_argument("covariance is not positive definite");
}

FieldPolynomial::FieldPolynomial(int dim) : dim_(dim)
{
	if (dim < 1 || dim > kMaxFieldDim)
		throw std::invalid_argument("field polynomial dimension must be between 1 and 6");
}

FieldPolynomial FieldPolynomial::constant(int dim, double c)
{
	FieldPolynomial p(dim);
	p.add_term(Exponent{}, c);
	return p;
}

FieldPolynomial FieldPolynomial::variable(int dim, int i)
{
	FieldPolynomial p(dim);
	Exponent e{};
	e.at(i) = 1;
	p.add_term(e, 1.0);
	return p;
}

FieldPolynomial FieldPolynomial::linear(const Eigen::VectorXd& f, double c)
{
	FieldPolynomial p = constant(static_cast<int>(f.size()), c);
	for (int i = 0; i < f.size(); ++i)
		p = p + variable(static_cast<int>(f.size()), i) * f[i];
	return p;
}

int FieldPolynomial::degree() const
{
	int d = 0;
	for (const auto& [e, c] : terms_)
		d = std::max(d, total_degree(e));
	return d;
}

double FieldPolynomial::coefficient(const Exponent& e) const
{
	auto it = terms_.find(e);
	return it == terms_.end() ? 0.0 : it->second;
}

void FieldPolynomial::add_term(const Exponent& e, double c)
{
	if (c == 0.0)
		return;
	for (int i = dim_; i < kMaxFieldDim; ++i)
		if (e[i] != 0)
			throw std::invalid_argument("exponent refers to a variable outside the field dimension");
	if (total_degree(e) > kMaxFieldDegree)
		throw std::invalid_argument("field polynomial degree exceeds the cap of 10");
	const double v = (terms_[e] += c);
	if (v == 0.0)
		terms_.erase(e);
}

FieldPolynomial FieldPolynomial::derivative(int j) const
{
	FieldPolynomial r(dim_);
	for (const auto& [e, c] : terms_) {
		if (e[j] == 0)
			continue;
		Exponent d = e;
		--d[j];
		r.add_term(d, c * e[j]);
	}
	return r;
}

double FieldPolynomial::max_abs_coeff() const
{
	double m = 0.0;
	for (const auto& [e, c] : terms_)
		m = std::max(m, std::abs(c));
	return m;
}

FieldPolynomial FieldPolynomial::operator+(const FieldPolynomial& o) const
{
	if (o.dim_ != dim_)
		throw std::invalid_argument("field polynomial dimensions differ");
	FieldPolynomial r = *this;
	for (const auto& [e, c] : o.terms_)
		r.add_term(e, c);
	return r;
}

FieldPolynomial FieldPolynomial::operator-(const FieldPolynomial& o) const { return *this + o * -1.0; }

FieldPolynomial FieldPolynomial::operator*(const FieldPolynomial& o) const
{
	if (o.dim_ != dim_)
		throw std::invalid_argument("field polynomial dimensions differ");
	FieldPolynomial r(dim_);
	for (const auto& [ea, ca] : terms_)
		for (const auto& [eb, cb] : o.terms_) {
			Exponent e{};
			for (int i = 0; i < kMaxFieldDim; ++i)
				e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
			r.add_term(e, ca * cb);
		}
	return r;
}

FieldPolynomial FieldPolynomial::operator*(double s) const
{
	FieldPolynomial r(dim_);
	for (const auto& [e, c] : terms_)
		r.add_term(e, c * s);
	return r;
}

double max_coeff_difference(const FieldPolynomial& a, const FieldPolynomial& b)
{
	double m = 0.0;
	for (const auto& [e, c] : a.terms())
		m = std::max(m, std::abs(c - b.coefficient(e)));
	for (const auto& [e, c] : b.terms())
		m = std::max(m, std::abs(c - a.coefficient(e)));
	return m;
}

double moment(const GaussianMeasure& mu, const FieldPolynomial& p)
{
	if (p.dim() != mu.dim())
		throw std::invalid_argument("polynomial and measure dimensions differ");
	MomentEngine engine(mu.mean(), mu.cov());
	return engine.expectation(p, false);
}

double moment_magnitude(const GaussianMeasure& mu, const FieldPolynomial& p)
{
	if (p.dim() != mu.dim())
		throw std::invalid_argument("polynomial and measure dimensions differ");
	MomentEngine engine(mu.mean().cwiseAbs(), mu.cov().cwiseAbs());
	return engine.expectation(p, true);
}

FieldPolynomial wick_power(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n)
{
	if (n < 0 || n > kMaxFieldDegree)
		throw std::invalid_argument("Wick power order must be between 0 and 10");
	if (f.size() != mu.dim())
		throw std::invalid_argument("test vector and measure dimensions differ");
	const int dim = mu.dim();
	const double c = mu.pairing(f, f);
	const FieldPolynomial x = FieldPolynomial::linear(f, -mu.mean_of(f));

	std::vector<FieldPolynomial> powers{FieldPolynomial::constant(dim, 1.0)};
	for (int k = 1; k <= n; ++k)
		powers.push_back(powers.back() * x);

	// sum_k n! / (k! (n-2k)!) (-c/2)^k x^{n-2k}
	FieldPolynomial r(dim);
	for (int k = 0; 2 * k <= n; ++k)
		r = r + powers[n - 2 * k] * (factorial(n) / (factorial(k) * factorial(n - 2 * k)) * std::pow(-0.5 * c, k));
	return r;
}

OrthogonalityReport check_orthogonality(const GaussianMeasure& mu, const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                                        int nmax, double tol)
{
	if (nmax < 0 || nmax > 5)
		throw std::invalid_argument("orthogonality check supports nmax <= 5");
	OrthogonalityReport r;
	r.nmax = nmax;
	std::vector<FieldPolynomial> wf, wg;
	for (int n = 0; n <= nmax; ++n) {
		wf.push_back(wick_power(mu, f, n));
		wg.push_back(wick_power(mu, g, n));
	}
	const double cfg = mu.pairing(f, g);
	r.matrix.assign(nmax + 1, std::vector<double>(nmax + 1, 0.0));
	for (int n = 0; n <= nmax; ++n)
		for (int m = 0; m <= nmax; ++m) {
			const FieldPolynomial prod = wf[n] * wg[m];
			const double value = moment(mu, prod);
			const double scale = std::max(1.0, moment_magnitude(mu, prod));
			r.matrix[n][m] = value;
			if (n == m)
				r.max_diag_defect = std::max(r.max_diag_defect, std::abs(value - factorial(n) * std::pow(cfg, n)) / scale);
			else
				r.max_offdiag = std::max(r.max_offdiag, std::abs(value) / scale);
		}
	r.pass = r.max_offdiag <= tol && r.max_diag_defect <= tol;
	return r;
}

IbpReport ibp_first(const GaussianMeasure& mu, const Eigen::VectorXd& f, const FieldPolynomial& R, double tol)
{
	IbpReport r;
	const FieldPolynomial lhs_poly = wick_power(mu, f, 1) * R;
	r.lhs = moment(mu, lhs_poly);
	r.scale = moment_magnitude(mu, lhs_poly);
	const Eigen::VectorXd cf = mu.cov() * f;
	double rhs_scale = 0.0;
	for (int j = 0; j < mu.dim(); ++j) {
		const FieldPolynomial dR = R.derivative(j);
		r.rhs += cf[j] * moment(mu, dR);
		rhs_scale += std::abs(cf[j]) * moment_magnitude(mu, dR);
	}
	r.scale = std::max({1.0, r.scale, rhs_scale});
	r.defect = std::abs(r.lhs - r.rhs);
	r.pass = r.defect <= tol * r.scale;
	return r;
}

IbpReport ibp_second(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n, const FieldPolynomial& R, double tol)
{
	if (n < 1)
		throw std::invalid_argument("ibp_second requires n >= 1");
	IbpReport r;
	const FieldPolynomial wn = wick_power(mu, f, n);
	const FieldPolynomial wn1 = wick_power(mu, f, n - 1);

	FieldPolynomial recursion = wick_power(mu, f, 1) * wn1;
	if (n >= 2)
		recursion = recursion - wick_power(mu, f, n - 2) * ((n - 1) * mu.pairing(f, f));
	r.recursion_defect = max_coeff_difference(wn, recursion) / std::max(1.0, wn.max_abs_coeff());

	const FieldPolynomial lhs_poly = wn * R;
	r.lhs = moment(mu, lhs_poly);
	double lhs_scale = moment_magnitude(mu, lhs_poly);
	const Eigen::VectorXd cf = mu.cov() * f;
	double rhs_scale = 0.0;
	for (int j = 0; j < mu.dim(); ++j) {
		const FieldPolynomial term = wn1 * R.derivative(j);
		r.rhs += cf[j] * moment(mu, term);
		rhs_scale += std::abs(cf[j]) * moment_magnitude(mu, term);
	}
	r.scale = std::max({1.0, lhs_scale, rhs_scale});
	r.defect = std::abs(r.lhs - r.rhs);
	r.pass = r.defect <= tol * r.scale && r.recursion_defect <= tol;
	return r;
}

CommuteReport wick_derivative_commute(const GaussianMeasure& mu, const Eigen::VectorXd& f, int n, int j)
{
	if (j < 0 || j >= mu.dim())
		throw std::invalid_argument("derivative index out of range");
	const FieldPolynomial lhs = wick_power(mu, f, n).derivative(j);
	const FieldPolynomial rhs = n == 0 ? FieldPolynomial(mu.dim()) : wick_power(mu, f, n - 1) * (n * f[j]);
	CommuteReport r;
	r.max_defect = max_coeff_difference(lhs, rhs);
	r.exact = r.max_defect == 0.0;
	return r;
}

double generating_function_defect(const GaussianMeasure& mu, const Eigen::VectorXd& f, int kmax)
{
	const double c = mu.pairing(f, f);
	const double b = mu.mean_of(f);
	const FieldPolynomial x = FieldPolynomial::linear(f);
	FieldPolynomial xk = FieldPolynomial::constant(mu.dim(), 1.0);
	double worst = 0.0;
	for (int k = 0; k <= kmax; ++k) {
		if (k > 0)
			xk = xk * x;
		double series = 0.0;
		for (int j = 0; 2 * j <= k; ++j)
			series += std::pow(0.5 * c, j) / factorial(j) * std::pow(b, k - 2 * j) / factorial(k - 2 * j);
		const double m = moment(mu, xk) / factorial(k);
		const double scale = std::max(1.0, moment_magnitude(mu, xk) / factorial(k));
		worst = std::max(worst, std::abs(m - series) / scale);
	}
	return worst;
}

std::vector<double> GaussianMixture::projected_moments(const Eigen::VectorXd& f, int kmax) const
{
	if (weights.size() != components.size() || weights.empty())
		throw std::invalid_argument("mixture weights and components differ in number");
	std::vector<double> m(kmax + 1, 0.0);
	double wsum = 0.0;
	for (std::size_t c = 0; c < components.size(); ++c) {
		const auto& g = components[c];
		const auto mc = one_dim_gaussian_moments(g.mean_of(f), g.pairing(f, f), kmax);
		for (int k = 0; k <= kmax; ++k)
			m[k] += weights[c] * mc[k];
		wsum += weights[c];
	}
	for (double& v : m)
		v /= wsum;
	return m;
}

std::vector<double> wick_power_from_moments(const std::vector<double>& moments, int n)
{
	if (static_cast<int>(moments.size()) <= n)
		throw std::invalid_argument("need raw moments up to order n");
	// rho_k: Taylor coefficients of 1 / <e^{a x}>
	std::vector<double> rho(n + 1, 0.0);
	rho[0] = 1.0 / moments[0];
	for (int k = 1; k <= n; ++k) {
		double s = 0.0;
		for (int i = 1; i <= k; ++i)
			s += moments[i] / factorial(i) * rho[k - i];
		rho[k] = -s / moments[0];
	}
	std::vector<double> c(n + 1, 0.0);
	for (int k = 0; k <= n; ++k)
		c[n - k] = binomial(n, k) * factorial(k) * rho[k];
	return c;
}

std::vector<std::vector<double>> orthogonality_from_moments(const std::vector<double>& moments, int nmax)
{
	if (static_cast<int>(moments.size()) <= 2 * nmax)
		throw std::invalid_argument("need raw moments up to order 2 nmax");
	std::vector<std::vector<double>> w;
	for (int n = 0; n <= nmax; ++n)
		w.push_back(wick_power_from_moments(moments, n));
	std::vector<std::vector<double>> g(nmax + 1, std::vector<double>(nmax + 1, 0.0));
	for (int n = 0; n <= nmax; ++n)
		for (int m = 0; m <= nmax; ++m)
			for (int a = 0; a <= n; ++a)
				for (int b = 0; b <= m; ++b)
					g[n][m] += w[n][a] * w[m][b] * moments[a + b];
	return g;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int dim)
{
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	Eigen::VectorXd v(dim);
	for (int i = 0; i < dim; ++i)
		v[i] = u(rng);
	return v;
}

GaussianMeasure random_measure(std::mt19937_64& rng, int dim, double mean_scale)
{
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	Eigen::MatrixXd a(dim, dim);
	for (int i = 0; i < dim; ++i)
		for (int j = 0; j < dim; ++j)
			a(i, j) = u(rng);
	Eigen::MatrixXd cov = a * a.transpose() / dim + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
	cov = 0.5 * (cov + cov.transpose());
	Eigen::VectorXd mean(dim);
	for (int i = 0; i < dim; ++i)
		mean[i] = mean_scale * u(rng);
	return GaussianMeasure(mean, cov);
}

FieldPolynomial random_field_polynomial(std::mt19937_64& rng, int dim, int max_degree, int terms)
{
	std::uniform_real_distribution<double> coeff(-1.0, 1.0);
	std::uniform_int_distribution<int> deg(0, max_degree);
	std::uniform_int_distribution<int> var(0, dim - 1);
	FieldPolynomial p(dim);
	for (int t = 0; t < terms; ++t) {
		Exponent e{};
		const int d = deg(rng);
		for (int k = 0; k < d; ++k)
			++e[var(rng)];
		p.add_term(e, coeff(rng));
	}
	return p;
}

} // namespace gaussvar
