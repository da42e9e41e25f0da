#include "gaussvar/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaussvar {

namespace {

constexpr double kEightPi = 8.0 * std::numbers::pi;

void check_masses(double m0_sq, double m_sq)
{
	if (!(m_sq > 0.0) || !(m0_sq > 0.0))
		throw std::domain_error("vacuum energy requires positive masses");
}

double y_of(double m0_sq, double m_sq) { return (std::log(m0_sq) - std::log(m_sq)) / kEightPi; }

/** Local minima of v on the real line, located from sign changes of v'. */
std::vector<double> classical_minima(const Polynomial& v)
{
	const Polynomial dv = v.derivative();
	std::vector<double> out;
	if (dv.degree() == 0)
		return out;
	const double lead = dv[dv.degree()];
	double bound = 0.0;
	for (std::size_t k = 0; k < dv.degree(); ++k)
		bound = std::max(bound, std::abs(dv[k] / lead));
	bound += 1.0;
	constexpr int n = 4000;
	double x_prev = -bound, f_prev = dv(x_prev);
	for (int i = 1; i <= n; ++i) {
		const double x = -bound + 2.0 * bound * i / n;
		const double f = dv(x);
		if (f_prev < 0.0 && f >= 0.0) {
			double a = x_prev, b = x;
			for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
				const double m = 0.5 * (a + b);
				(dv(m) < 0.0 ? a : b) = m;
			}
			out.push_back(0.5 * (a + b));
		}
		x_prev = x;
		f_prev = f;
	}
	return out;
}

template <class F>
double golden_section(F&& f, double a, double b)
{
	const double g = 0.5 * (std::sqrt(5.0) - 1.0);
	double c = b - g * (b - a), d = a + g * (b - a);
	double fc = f(c), fd = f(d);
	for (int it = 0; it < 80; ++it) {
		if (fc < fd) {
			b = d;
			d = c;
			fd = fc;
			c = b - g * (b - a);
			fc = f(c);
		} else {
			a = c;
			c = d;
			fc = fd;
			d = a + g * (b - a);
			fd = f(d);
		}
	}
	return 0.5 * (a + b);
}

} // namespace

double vacuum_energy_at_y(const Polynomial& v, double m0_sq, double xi, double Y)
{
	if (!(m0_sq > 0.0))
		throw std::domain_error("vacuum energy requires positive masses");
	// (m^2 - m0^2) / 8pi with m^2 = m0^2 exp(-8 pi Y)
	return smear(v, Y)(xi) + m0_sq * std::expm1(-kEightPi * Y) / kEightPi;
}

double vacuum_energy(const Polynomial& v, double m0_sq, double xi, double m_sq)
{
	check_masses(m0_sq, m_sq);
	return smear(v, y_of(m0_sq, m_sq))(xi) + (m_sq - m0_sq) / kEightPi;
}

double trace_term(double m_sq, double m0_sq)
{
	check_masses(m0_sq, m_sq);
	// m^2 - m0^2 is exact for close masses; log1p keeps ln(m^2/m0^2) accurate there
	const double d = m_sq - m0_sq;
	return (d - m_sq * std::log1p(d / m0_sq)) / (4.0 * std::numbers::pi);
}

Polynomial subtracted_potential(const Polynomial& v, double xi, double m_sq)
{
	// (m^2/2)(x - xi)^2
	return v - Polynomial{0.5 * m_sq * xi * xi, -m_sq * xi, 0.5 * m_sq};
}

EnergyGradient energy_gradient(const Polynomial& v, double m0_sq, double xi, double m_sq)
{
	check_masses(m0_sq, m_sq);
	const Polynomial vy = smear(v, y_of(m0_sq, m_sq));
	return {vy.derivative_at(xi, 1), vy.derivative_at(xi, 2) - m_sq};
}

EnergyHessian energy_hessian(const Polynomial& v, double m0_sq, double xi, double m_sq)
{
	check_masses(m0_sq, m_sq);
	const Polynomial vy = smear(v, y_of(m0_sq, m_sq));
	return {vy.derivative_at(xi, 2), vy.derivative_at(xi, 3), vy.derivative_at(xi, 4) + kEightPi * m_sq};
}

EnergyHessian energy_hessian_fd(const Polynomial& v, double m0_sq, double xi, double m_sq, double h)
{
	check_masses(m0_sq, m_sq);
	const double y = y_of(m0_sq, m_sq);
	auto e = [&](double x, double yy) { return vacuum_energy_at_y(v, m0_sq, x, yy); };
	const double hx = h * std::max(1.0, std::abs(xi));
	const double hy = h * std::max(1.0, std::abs(y));
	const double e0 = e(xi, y);
	EnergyHessian r;
	r.xx = (e(xi + hx, y) - 2.0 * e0 + e(xi - hx, y)) / (hx * hx);
	r.yy = (e(xi, y + hy) - 2.0 * e0 + e(xi, y - hy)) / (hy * hy);
	r.xy = (e(xi + hx, y + hy) - e(xi + hx, y - hy) - e(xi - hx, y + hy) + e(xi - hx, y - hy)) / (4.0 * hx * hy);
	return r;
}

StabilityReport stability_from_hessian(const EnergyHessian& h)
{
	StabilityReport r;
	r.hessian = h;
	const double mean = 0.5 * (h.xx + h.yy);
	const double half_gap = std::hypot(0.5 * (h.xx - h.yy), h.xy);
	r.eig_min = mean - half_gap;
	r.eig_max = mean + half_gap;
	r.det = h.xx * h.yy - h.xy * h.xy;
	const double norm_sq = h.xx * h.xx + 2.0 * h.xy * h.xy + h.yy * h.yy;
	if (std::abs(r.det) < 1e-12 * std::max(1.0, norm_sq)) {
		r.label = Stability::marginal;
		r.diagnostic = "degenerate Hessian: |det| below 1e-12 of its scale, curvature sign unresolved";
		return r;
	}
	if (r.det > 0.0)
		r.label = mean > 0.0 ? Stability::stable : Stability::unstable;
	else
		r.label = Stability::saddle;
	return r;
}

EquivalenceReport gradient_equivalence_check(const Polynomial& v, double m0_sq, double xi, double m_sq,
                                             double rel_tol)
{
	check_masses(m0_sq, m_sq);
	EquivalenceReport r;
	r.xi = xi;
	r.m_sq = m_sq;
	r.Y = y_of(m0_sq, m_sq);

	auto richardson = [](auto&& f, double x0, double h) {
		auto central = [&](double s) { return (f(x0 + s) - f(x0 - s)) / (2.0 * s); };
		return (4.0 * central(0.5 * h) - central(h)) / 3.0;
	};
	const double hx = 1e-5 * std::max(1.0, std::abs(xi));
	const double hy = 1e-5 * std::max(1.0, std::abs(r.Y));
	r.deps_dxi = richardson([&](double x) { return vacuum_energy_at_y(v, m0_sq, x, r.Y); }, xi, hx);
	r.deps_dy = richardson([&](double y) { return vacuum_energy_at_y(v, m0_sq, xi, y); }, r.Y, hy);

	const Polynomial vt = subtracted_potential(v, xi, m_sq);
	const OrderingShift shift{r.Y, xi};
	r.t1 = t_coefficient(vt, shift, 1);
	r.t2 = t_coefficient(vt, shift, 2);

	r.defect_xi = std::abs(r.deps_dxi - r.t1);
	r.defect_y = std::abs(r.deps_dy - 2.0 * r.t2);
	r.ratio_y = r.t2 != 0.0 ? r.deps_dy / r.t2 : 0.0;
	const double eps = vacuum_energy_at_y(v, m0_sq, xi, r.Y);
	r.scale = std::max({1.0, std::abs(eps), std::abs(r.t1), std::abs(2.0 * r.t2), m_sq, m0_sq});
	r.pass = r.defect_xi <= rel_tol * r.scale && r.defect_y <= rel_tol * r.scale;
	return r;
}

GridSpec GridSpec::defaults_for(const Polynomial& v)
{
	double guess = 1.0;
	for (double x : classical_minima(v))
		guess = std::max(guess, std::abs(x));
	GridSpec g;
	g.xi_lo = -5.0 * guess;
	g.xi_hi = 5.0 * guess;
	return g;
}

std::vector<EnergyPoint> energy_surface(const Polynomial& v, double m0_sq, const GridSpec& grid)
{
	if (grid.xi_points < 1 || grid.mass_points < 1)
		throw std::invalid_argument("energy grid needs at least one point per axis");
	std::vector<EnergyPoint> out;
	out.reserve(static_cast<std::size_t>(grid.xi_points) * grid.mass_points);
	auto axis = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
	std::vector<Polynomial> smeared;
	std::vector<double> us;
	for (int j = 0; j < grid.mass_points; ++j) {
		us.push_back(axis(grid.log_ratio_lo, grid.log_ratio_hi, grid.mass_points, j));
		smeared.push_back(smear(v, -us.back() / kEightPi));
	}
	for (int i = 0; i < grid.xi_points; ++i) {
		const double xi = axis(grid.xi_lo, grid.xi_hi, grid.xi_points, i);
		for (int j = 0; j < grid.mass_points; ++j)
			out.push_back({xi, m0_sq * std::exp(us[j]), smeared[j](xi) + m0_sq * std::expm1(us[j]) / kEightPi});
	}
	return out;
}

EnergyMinimum minimize_energy(const Polynomial& v, double m0_sq, const GridSpec& grid)
{
	if (!(m0_sq > 0.0))
		throw std::domain_error("minimize_energy requires m0^2 > 0");
	if (grid.xi_points < 3 || grid.mass_points < 3)
		throw std::invalid_argument("minimize_energy needs at least 3 points per axis");
	const int nx = grid.xi_points, nu = grid.mass_points;
	const double dxi = (grid.xi_hi - grid.xi_lo) / (nx - 1);
	const double du = (grid.log_ratio_hi - grid.log_ratio_lo) / (nu - 1);

	// eps as a function of (xi, u), u = ln(m^2/m0^2) = -8 pi Y
	auto eps_u = [&](double xi, double u) { return vacuum_energy_at_y(v, m0_sq, xi, -u / kEightPi); };

	std::vector<double> table(static_cast<std::size_t>(nx) * nu);
	for (int j = 0; j < nu; ++j) {
		const double u = grid.log_ratio_lo + du * j;
		const Polynomial vy = smear(v, -u / kEightPi);
		const double trace = m0_sq * std::expm1(u) / kEightPi;
		for (int i = 0; i < nx; ++i)
			table[static_cast<std::size_t>(i) * nu + j] = vy(grid.xi_lo + dxi * i) + trace;
	}
	auto at = [&](int i, int j) { return table[static_cast<std::size_t>(i) * nu + j]; };

	struct Candidate {
		int i, j;
		double value;
	};
	std::vector<Candidate> candidates;
	for (int i = 0; i < nx; ++i)
		for (int j = 0; j < nu; ++j) {
			const double e = at(i, j);
			bool is_min = true;
			for (int di = -1; di <= 1 && is_min; ++di)
				for (int dj = -1; dj <= 1; ++dj) {
					const int ii = i + di, jj = j + dj;
					if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= nx || jj >= nu)
						continue;
					if (at(ii, jj) < e) {
						is_min = false;
						break;
					}
				}
			if (is_min)
				candidates.push_back({i, j, e});
		}
	std::sort(candidates.begin(), candidates.end(),
	          [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
	if (candidates.size() > 8)
		candidates.resize(8);

	EnergyMinimum best;
	best.grid_candidates = static_cast<int>(candidates.size());
	bool have_best = false;
	for (const Candidate& c : candidates) {
		double xi = grid.xi_lo + dxi * c.i;
		double u = grid.log_ratio_lo + du * c.j;
		for (int sweep = 0; sweep < 3; ++sweep) {
			xi = golden_section([&](double x) { return eps_u(x, u); }, xi - dxi, xi + dxi);
			u = golden_section([&](double w) { return eps_u(xi, w); }, u - du, u + du);
		}
		// Newton on the analytic gradient in (xi, Y)
		double y = -u / kEightPi;
		auto grad_at = [&](double x, double yy) {
			return energy_gradient(v, m0_sq, x, m0_sq * std::exp(-kEightPi * yy));
		};
		EnergyGradient g = grad_at(xi, y);
		for (int it = 0; it < 100; ++it) {
			const EnergyHessian h = energy_hessian(v, m0_sq, xi, m0_sq * std::exp(-kEightPi * y));
			const double det = h.xx * h.yy - h.xy * h.xy;
			if (!(det > 0.0) || !(h.xx > 0.0))
				break;
			const double sx = -(h.yy * g.d_xi - h.xy * g.d_y) / det;
			const double sy = -(h.xx * g.d_y - h.xy * g.d_xi) / det;
			const double gnorm = std::hypot(g.d_xi, g.d_y);
			double t = 1.0;
			bool moved = false;
			for (int k = 0; k < 40; ++k, t *= 0.5) {
				const EnergyGradient gn = grad_at(xi + t * sx, y + t * sy);
				if (std::hypot(gn.d_xi, gn.d_y) < gnorm) {
					xi += t * sx;
					y += t * sy;
					g = gn;
					moved = true;
					break;
				}
			}
			if (!moved || (std::abs(t * sx) <= 1e-15 * (1.0 + std::abs(xi)) &&
			               std::abs(t * sy) <= 1e-15 * (1.0 + std::abs(y))))
				break;
		}
		u = -kEightPi * y;

		GapSolution s;
		s.xi = xi;
		s.m_sq = m0_sq * std::exp(u);
		s.branch = Branch::generic;
		s.energy = eps_u(xi, u);
		s.residual_norm = std::hypot(g.d_xi, g.d_y);
		s.stability = stability_from_hessian(energy_hessian(v, m0_sq, xi, s.m_sq)).label;
		if (!have_best || s.energy < best.solution.energy) {
			have_best = true;
			best.solution = s;
			const bool edge = c.i == 0 || c.j == 0 || c.i == nx - 1 || c.j == nu - 1;
			const bool outside = xi < grid.xi_lo || xi > grid.xi_hi || u < grid.log_ratio_lo || u > grid.log_ratio_hi;
			best.on_boundary = edge || outside;
		}
	}
	if (v.is_even() && best.solution.xi < 0.0)
		best.solution.xi = -best.solution.xi;
	if (best.on_boundary)
		best.diagnostic = "boundary: the minimum lies on the edge of the search grid; enlarge the grid";
	return best;
}

} // namespace gaussvar
