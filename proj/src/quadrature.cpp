#include "gaussvar/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace gaussvar::quad {

namespace {

// Kronrod abscissae on [0, 1); odd indices are the Gauss-7 nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
	double a, b, value, error;
	bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const Integrand& f, double a, double b)
{
	const double c = 0.5 * (a + b);
	const double h = 0.5 * (b - a);
	std::array<double, 15> fv;
	fv[7] = f(c);
	for (int j = 0; j < 7; ++j) {
		const double dx = h * kXk[j];
		fv[j] = f(c - dx);
		fv[14 - j] = f(c + dx);
	}
	double rk = fv[7] * kWk[7];
	double rg = fv[7] * kWg[3];
	double rabs = std::abs(rk);
	for (int j = 0; j < 7; ++j) {
		rk += kWk[j] * (fv[j] + fv[14 - j]);
		rabs += kWk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
		if (j % 2 == 1)
			rg += kWg[j / 2] * (fv[j] + fv[14 - j]);
	}
	// QUADPACK error estimate: Gauss/Kronrod difference sharpened against the integrand's variation
	const double mean = 0.5 * rk;
	double rasc = kWk[7] * std::abs(fv[7] - mean);
	for (int j = 0; j < 7; ++j)
		rasc += kWk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
	const double ah = std::abs(h);
	rasc *= ah;
	rabs *= ah;
	double err = std::abs((rk - rg) * h);
	if (rasc != 0.0 && err != 0.0)
		err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
	if (rabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
		err = std::max(50.0 * std::numeric_limits<double>::epsilon() * rabs, err);
	return {a, b, rk * h, err};
}

} // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opt)
{
	if (a == b)
		return {};
	std::priority_queue<Segment> heap;
	heap.push(kronrod(f, a, b));
	double total = heap.top().value;
	double error = heap.top().error;
	int intervals = 1;
	auto done = [&] { return error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
	while (!done()) {
		if (intervals >= opt.max_intervals)
			throw QuadratureError("adaptive quadrature did not reach the requested tolerance",
			                      {total, error, 15 * (2 * intervals - 1)});
		Segment worst = heap.top();
		heap.pop();
		const double mid = 0.5 * (worst.a + worst.b);
		if (!(mid > worst.a && mid < worst.b)) {
			// interval cannot be split further in floating point
			throw QuadratureError("adaptive quadrature hit the floating-point resolution limit",
			                      {total, error, 15 * (2 * intervals - 1)});
		}
		Segment left = kronrod(f, worst.a, mid);
		Segment right = kronrod(f, mid, worst.b);
		total += left.value + right.value - worst.value;
		error += left.error + right.error - worst.error;
		heap.push(left);
		heap.push(right);
		++intervals;
	}
	// resum to shed accumulated cancellation in the running totals
	double sum = 0.0, err = 0.0;
	while (!heap.empty()) {
		sum += heap.top().value;
		err += heap.top().error;
		heap.pop();
	}
	return {sum, err, 15 * (2 * intervals - 1)};
}

Result integrate_to_infinity(const Integrand& f, double a, const Options& opt, double scale)
{
	if (!(scale > 0.0))
		throw std::invalid_argument("integrate_to_infinity needs a positive length scale");
	auto g = [&](double t) {
		const double s = 1.0 - t;
		const double x = a + scale * t / s;
		const double v = f(x);
		return v == 0.0 ? 0.0 : scale * v / (s * s);
	};
	return integrate(g, 0.0, 1.0, opt);
}

} // namespace gaussvar::quad
