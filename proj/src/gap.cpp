#include "gaussvar/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaussvar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEightPi = 8.0 * kPi;

void sort_by_energy(std::vector<GapSolution>& s)
{
	std::sort(s.begin(), s.end(), [](const GapSolution& a, const GapSolution& b) {
		if (a.energy != b.energy)
			return a.energy < b.energy;
		return a.xi < b.xi;
	});
}

void finish(const ModelParams& p, GapSolution& s)
{
	const Polynomial v = p.potential();
	s.energy = vacuum_energy(v, p.m0_sq, s.xi, s.m_sq);
	s.residual_norm = gap_residual(v, p.m0_sq, s.xi, s.m_sq).norm();
	s.stability = classify_stability(v, p.m0_sq, s).label;
}

ModelParams with_parameter(ModelParams p, ScanParameter which, double value)
{
	switch (which) {
	case ScanParameter::lambda:
		p.lambda = value;
		break;
	case ScanParameter::sigma:
		p.sigma = value;
		break;
	case ScanParameter::m0_sq:
		p.m0_sq = value;
		break;
	}
	return p;
}

} // namespace

void ModelParams::validate() const
{
	if (!(lambda > 0.0) || !std::isfinite(lambda))
		throw std::invalid_argument("lambda must be positive");
	if (!(m0_sq > 0.0) || !std::isfinite(m0_sq))
		throw std::invalid_argument("m0^2 must be positive");
	if (!std::isfinite(sigma))
		throw std::invalid_argument("sigma must be finite");
}

double ModelParams::scale() const { return std::max({1.0, std::abs(sigma), lambda, m0_sq}); }

const char* to_string(Branch b)
{
	switch (b) {
	case Branch::symmetric:
		return "symmetric";
	case Branch::broken_w0:
		return "broken_w0";
	case Branch::broken_wm1:
		return "broken_wm1";
	case Branch::mean_field:
		return "mean_field";
	case Branch::generic:
		return "generic";
	}
	return "?";
}

const char* to_string(Stability s)
{
	switch (s) {
	case Stability::stable:
		return "stable";
	case Stability::unstable:
		return "unstable";
	case Stability::saddle:
		return "saddle";
	case Stability::marginal:
		return "marginal";
	}
	return "?";
}

double GapResidual::norm() const { return std::hypot(r1, r2); }

GapResidual gap_residual(const Polynomial& v, double m0_sq, double xi, double m_sq)
{
	if (!(m_sq > 0.0))
		throw std::domain_error("gap residual requires m^2 > 0");
	const Polynomial vy = smear(v, OrderingShift::from_masses(m0_sq, m_sq, xi).Y);
	return {vy.derivative_at(xi, 1), vy.derivative_at(xi, 2) - m_sq};
}

GapResidual gap_residual(const ModelParams& params, double xi, double m_sq)
{
	return gap_residual(params.potential(), params.m0_sq, xi, m_sq);
}

GapSolution solve_symmetric(const ModelParams& params)
{
	params.validate();
	const double c = 3.0 * params.lambda / kPi;
	const double log_arg = std::log(params.m0_sq / c) + 2.0 * kPi * params.sigma / (3.0 * params.lambda);
	GapSolution s;
	s.xi = 0.0;
	s.m_sq = c * lambert_w0_exp(log_arg);
	if (!(s.m_sq > 0.0) || !std::isfinite(s.m_sq))
		throw std::range_error("symmetric-phase mass is not representable in double precision");
	s.branch = Branch::symmetric;
	finish(params, s);
	return s;
}

double broken_log_argument(const ModelParams& params)
{
	return std::log(kPi * params.m0_sq / (6.0 * params.lambda)) + 2.0 * kPi * params.sigma / (3.0 * params.lambda);
}

std::vector<GapSolution> solve_broken(const ModelParams& params)
{
	params.validate();
	std::vector<GapSolution> out;
	const double log_arg = broken_log_argument(params);
	if (!(log_arg <= -1.0))
		return out;

	struct Root {
		double t;
		LambertBranch branch;
		bool mean_field;
	};
	std::vector<Root> roots;
	if (params.sigma < 0.0 && params.m0_sq == -4.0 * params.sigma) {
		// m0 is the classical mass: the argument is z e^z and t = z solves it exactly
		const double z = 2.0 * kPi * params.sigma / (3.0 * params.lambda);
		const LambertBranch mf = z <= -1.0 ? LambertBranch::minus_one : LambertBranch::principal;
		const LambertBranch other = mf == LambertBranch::principal ? LambertBranch::minus_one : LambertBranch::principal;
		roots.push_back({z, mf, true});
		roots.push_back({lambert_w_negexp(log_arg, other), other, false});
	} else {
		roots.push_back({lambert_w_negexp(log_arg, LambertBranch::principal), LambertBranch::principal, false});
		roots.push_back({lambert_w_negexp(log_arg, LambertBranch::minus_one), LambertBranch::minus_one, false});
	}
	// at the branch point both branches coincide
	if (std::abs(roots[0].t - roots[1].t) <= 1e-12 * std::abs(roots[0].t))
		roots.pop_back();

	for (const Root& r : roots) {
		const double xi_sq = -3.0 * r.t / (4.0 * kPi);
		const double m_sq = 8.0 * params.lambda * xi_sq;
		if (!(xi_sq > 0.0) || !(m_sq > 0.0) || !std::isfinite(m_sq))
			continue; // underflow: indistinguishable from the symmetric solution
		for (double sign : {1.0, -1.0}) {
			GapSolution s;
			s.xi = sign * std::sqrt(xi_sq);
			s.m_sq = m_sq;
			s.lambert = r.branch;
			s.branch = r.mean_field                            ? Branch::mean_field
			           : r.branch == LambertBranch::principal ? Branch::broken_w0
			                                                  : Branch::broken_wm1;
			finish(params, s);
			out.push_back(s);
		}
	}
	sort_by_energy(out);
	return out;
}

std::vector<GapSolution> solve_all(const ModelParams& params)
{
	std::vector<GapSolution> out = solve_broken(params);
	try {
		out.push_back(solve_symmetric(params));
	} catch (const std::range_error&) {
		// symmetric mass underflows; nothing representable to report
	}
	sort_by_energy(out);
	return out;
}

GenericSolveResult solve_generic(const Polynomial& v, double m0_sq, const GenericSolveOptions& opt)
{
	if (v.degree() < 2 || v.degree() % 2 != 0 || !(v[v.degree()] > 0.0))
		throw std::invalid_argument("solve_generic needs an even-degree potential with positive leading coefficient");
	if (!(m0_sq > 0.0))
		throw std::invalid_argument("m0^2 must be positive");

	const double scale = std::max({1.0, v.max_abs_coeff(), m0_sq});
	const double tol = 1e-10 * scale;
	double range = opt.xi_range;
	if (!(range > 0.0))
		range = 3.0 * GridSpec::defaults_for(v).xi_hi / 5.0;

	std::vector<double> xi_seeds{0.0};
	for (int k = -12; k <= -1; ++k) {
		xi_seeds.push_back(std::pow(10.0, k));
		xi_seeds.push_back(-std::pow(10.0, k));
	}
	const int half = std::max(1, opt.xi_seeds / 2);
	for (int i = 1; i <= half; ++i) {
		xi_seeds.push_back(range * i / half);
		xi_seeds.push_back(-range * i / half);
	}
	const double u0 = std::log(m0_sq);
	std::vector<double> u_seeds;
	const int nu = std::max(2, opt.mass_seeds);
	for (int j = 0; j < nu; ++j)
		u_seeds.push_back(u0 - opt.log_mass_below + (opt.log_mass_below + opt.log_mass_above) * j / (nu - 1));

	auto residual = [&](double xi, double u, Polynomial& vy) {
		vy = smear(v, (u0 - u) / kEightPi);
		return GapResidual{vy.derivative_at(xi, 1), vy.derivative_at(xi, 2) - std::exp(u)};
	};

	// Newton step in (xi, u = ln m^2); false when the Jacobian is singular
	auto newton_step = [&](double xi, double u, const Polynomial& vy, const GapResidual& r, double& sx, double& su) {
		const double d2 = vy.derivative_at(xi, 2), d3 = vy.derivative_at(xi, 3), d4 = vy.derivative_at(xi, 4);
		const double j11 = d2, j12 = -d3 / kEightPi;
		const double j21 = d3, j22 = -d4 / kEightPi - std::exp(u);
		const double det = j11 * j22 - j12 * j21;
		if (det == 0.0 || !std::isfinite(det))
			return false;
		sx = -(j22 * r.r1 - j12 * r.r2) / det;
		su = -(j11 * r.r2 - j21 * r.r1) / det;
		return std::isfinite(sx) && std::isfinite(su);
	};

	GenericSolveResult result;
	// how far roundoff in the residual can move a root: |J^-1| times the residual floor
	const double floor = 16.0 * std::numeric_limits<double>::epsilon() * scale;
	auto uncertainty = [&](double xi, double u, const Polynomial& vy, double& e_xi, double& e_u) {
		const double d2 = vy.derivative_at(xi, 2), d3 = vy.derivative_at(xi, 3), d4 = vy.derivative_at(xi, 4);
		const double j11 = d2, j12 = -d3 / kEightPi;
		const double j21 = d3, j22 = -d4 / kEightPi - std::exp(u);
		const double det = std::abs(j11 * j22 - j12 * j21);
		e_xi = (std::abs(j22) + std::abs(j12)) / det * floor;
		e_u = (std::abs(j11) + std::abs(j21)) / det * floor;
	};

	struct Found {
		double xi, u, norm, e_xi, e_u;
	};
	std::vector<Found> found;
	for (double xi0 : xi_seeds)
		for (double u_start : u_seeds) {
			++result.seeds;
			double xi = xi0, u = u_start;
			Polynomial vy;
			GapResidual r = residual(xi, u, vy);
			double norm = r.norm();
			for (int it = 0; it < opt.max_iterations && norm > 1e-3 * tol; ++it) {
				double sx, su;
				if (!newton_step(xi, u, vy, r, sx, su))
					break;
				double t = 1.0;
				bool moved = false;
				for (int k = 0; k < 40; ++k, t *= 0.5) {
					const double u_try = u + t * su;
					if (std::abs(u_try - u0) > 1500.0)
						continue;
					Polynomial vy_try;
					const GapResidual rt = residual(xi + t * sx, u_try, vy_try);
					if (rt.norm() < norm) {
						xi += t * sx;
						u = u_try;
						r = rt;
						vy = vy_try;
						norm = rt.norm();
						moved = true;
						break;
					}
				}
				if (!moved || std::abs(xi) > 1e3 * range)
					break;
			}
			if (!(norm <= tol) || !std::isfinite(u))
				continue;
			// a small residual is not enough in flat valleys: the next Newton step must be small too
			double sx, su;
			if (!newton_step(xi, u, vy, r, sx, su) || std::abs(sx) > 1e-6 * std::max(1.0, std::abs(xi)) ||
			    std::abs(su) > 1e-6 * std::max(1.0, std::abs(u)))
				continue;
			++result.converged;
			bool dup = false;
			double e_xi, e_u;
			uncertainty(xi, u, vy, e_xi, e_u);
			for (Found& f : found) {
				const double s = opt.dedup_tol * std::max({1.0, std::abs(f.xi), std::abs(f.u)});
				if (std::abs(f.xi - xi) <= s + f.e_xi + e_xi && std::abs(f.u - u) <= s + f.e_u + e_u) {
					if (norm < f.norm)
						f = {xi, u, norm, e_xi, e_u};
					dup = true;
					break;
				}
			}
			if (!dup)
				found.push_back({xi, u, norm, e_xi, e_u});
		}

	// for even potentials, a root within its own roundoff of xi = 0 is the symmetric one
	if (v.is_even())
		for (Found& f : found) {
			if (f.xi == 0.0 || std::abs(f.xi) > f.e_xi)
				continue;
			double u = f.u;
			Polynomial vy;
			for (int it = 0; it < 20; ++it) {
				vy = smear(v, (u0 - u) / kEightPi);
				const double r2 = vy.derivative_at(0.0, 2) - std::exp(u);
				const double d = -vy.derivative_at(0.0, 4) / kEightPi - std::exp(u);
				if (d == 0.0)
					break;
				u -= r2 / d;
			}
			const double norm = residual(0.0, u, vy).norm();
			if (norm <= tol)
				f = {0.0, u, norm, 0.0, f.e_u};
		}

	for (const Found& f : found) {
		GapSolution s;
		s.xi = f.xi;
		s.m_sq = std::exp(f.u);
		if (!(s.m_sq > 0.0))
			continue;
		s.branch = Branch::generic;
		s.energy = vacuum_energy(v, m0_sq, s.xi, s.m_sq);
		s.residual_norm = gap_residual(v, m0_sq, s.xi, s.m_sq).norm();
		s.stability = classify_stability(v, m0_sq, s).label;
		result.solutions.push_back(s);
	}
	sort_by_energy(result.solutions);
	if (result.solutions.empty())
		result.diagnostic = "no seed converged to a gap solution (" + std::to_string(result.seeds) + " seeds tried)";
	return result;
}

StabilityReport classify_stability(const Polynomial& v, double m0_sq, const GapSolution& sol)
{
	return stability_from_hessian(energy_hessian(v, m0_sq, sol.xi, sol.m_sq));
}

StabilityReport classify_stability(const ModelParams& params, const GapSolution& sol)
{
	return classify_stability(params.potential(), params.m0_sq, sol);
}

const char* to_string(ScanParameter p)
{
	switch (p) {
	case ScanParameter::lambda:
		return "lambda";
	case ScanParameter::sigma:
		return "sigma";
	case ScanParameter::m0_sq:
		return "m0sq";
	}
	return "?";
}

ScanParameter scan_parameter_from_string(const std::string& s)
{
	if (s == "lambda")
		return ScanParameter::lambda;
	if (s == "sigma")
		return ScanParameter::sigma;
	if (s == "m0sq" || s == "m0_sq")
		return ScanParameter::m0_sq;
	throw std::invalid_argument("unknown scan parameter '" + s + "' (expected lambda, sigma or m0sq)");
}

PhaseScan phase_scan(const ModelParams& base, const ScanSpec& spec)
{
	if (spec.steps < 1)
		throw std::invalid_argument("phase scan needs at least one grid point");
	if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi))
		throw std::invalid_argument("phase scan range must be finite");
	PhaseScan scan;
	scan.base = base;
	scan.spec = spec;
	for (int i = 0; i < spec.steps; ++i) {
		const double p = spec.steps == 1 ? spec.lo : spec.lo + (spec.hi - spec.lo) * i / (spec.steps - 1);
		const ModelParams mp = with_parameter(base, spec.parameter, p);
		mp.validate();
		scan.rows.push_back({p, broken_log_argument(mp), solve_all(mp)});
	}

	// broken solutions exist iff broken_log_argument <= -1
	auto excess = [&](double p) { return broken_log_argument(with_parameter(base, spec.parameter, p)) + 1.0; };
	for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
		const bool lo_exists = scan.rows[i].broken_log_argument + 1.0 <= 0.0;
		const bool hi_exists = scan.rows[i + 1].broken_log_argument + 1.0 <= 0.0;
		if (lo_exists == hi_exists)
			continue;
		double a = scan.rows[i].parameter, b = scan.rows[i + 1].parameter;
		for (int it = 0; it < 300; ++it) {
			const double mid = 0.5 * (a + b);
			if (mid == a || mid == b || std::abs(b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b)))
				break;
			((excess(mid) <= 0.0) == lo_exists ? a : b) = mid;
		}
		scan.branch_points.push_back({0.5 * (a + b), i, hi_exists});
	}
	return scan;
}

} // namespace gaussvar
