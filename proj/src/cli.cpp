#include "gaussvar/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gaussvar/corrections.hpp"
#include "gaussvar/verify.hpp"

namespace gaussvar::cli {

namespace {

const nlohmann::json& solution_units()
{
	static const nlohmann::json u = {{"xi", "dimensionless"},
	                                 {"m_sq", "mass^2"},
	                                 {"energy", "mass^2"},
	                                 {"residual_norm", "mass^2"},
	                                 {"lambda", "mass^2"},
	                                 {"sigma", "mass^2"},
	                                 {"m0_sq", "mass^2"}};
	return u;
}

std::string num(double x)
{
	char buf[32];
	auto r = std::to_chars(buf, buf + sizeof buf, x);
	return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& s, char sep)
{
	std::vector<std::string> parts;
	std::string cur;
	std::istringstream in(s);
	while (std::getline(in, cur, sep))
		parts.push_back(cur);
	if (!s.empty() && s.back() == sep)
		parts.emplace_back();
	return parts;
}

std::string trim(const std::string& s)
{
	const auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos)
		return "";
	const auto e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what)
{
	double v = 0.0;
	const std::string t = trim(s);
	auto r = std::from_chars(t.data(), t.data() + t.size(), v);
	if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v))
		throw UsageError("invalid number for " + what + ": '" + s + "'");
	return v;
}

int to_int(const std::string& s, const std::string& what)
{
	int v = 0;
	const std::string t = trim(s);
	auto r = std::from_chars(t.data(), t.data() + t.size(), v);
	if (r.ec != std::errc() || r.ptr != t.data() + t.size())
		throw UsageError("invalid integer for " + what + ": '" + s + "'");
	return v;
}

nlohmann::json model_json(const RunConfig& cfg)
{
	nlohmann::json m = nlohmann::json::object();
	if (cfg.potential)
		m["potential"] = *cfg.potential;
	if (cfg.lambda)
		m["lambda"] = *cfg.lambda;
	if (cfg.sigma)
		m["sigma"] = *cfg.sigma;
	if (cfg.m0_sq)
		m["m0_sq"] = *cfg.m0_sq;
	return m;
}

nlohmann::json solutions_json(const std::vector<GapSolution>& sols)
{
	nlohmann::json a = nlohmann::json::array();
	for (const auto& s : sols)
		a.push_back(solution_json(s));
	return a;
}

/** Lowest-energy stable solution. */
const GapSolution* selected_phase(const std::vector<GapSolution>& sols)
{
	const GapSolution* best = nullptr;
	for (const auto& s : sols)
		if (s.stability == Stability::stable && (!best || s.energy < best->energy))
			best = &s;
	return best;
}

double require_m0_sq(const RunConfig& cfg)
{
	if (!cfg.m0_sq)
		throw UsageError("missing --m0sq");
	if (!(*cfg.m0_sq > 0.0))
		throw UsageError("--m0sq must be positive");
	return *cfg.m0_sq;
}

nlohmann::json header(const char* command, const RunConfig& cfg)
{
	return {{"command", command}, {"seed", cfg.seed}, {"model", model_json(cfg)}, {"units", solution_units()}};
}

} // namespace

ModelParams RunConfig::model() const
{
	if (!lambda)
		throw UsageError("missing --lambda");
	if (!sigma)
		throw UsageError("missing --sigma");
	if (!m0_sq)
		throw UsageError("missing --m0sq");
	ModelParams p{*lambda, *sigma, *m0_sq};
	try {
		p.validate();
	} catch (const std::invalid_argument& e) {
		throw UsageError(e.what());
	}
	return p;
}

nlohmann::json solution_json(const GapSolution& s)
{
	nlohmann::json j = {{"xi", s.xi},
	                    {"m_sq", s.m_sq},
	                    {"branch", to_string(s.branch)},
	                    {"stability", to_string(s.stability)},
	                    {"energy", s.energy},
	                    {"residual_norm", s.residual_norm}};
	j["lambert_branch"] = s.lambert ? nlohmann::json(to_string(*s.lambert)) : nlohmann::json(nullptr);
	return j;
}

CommandOutput cmd_gap_solve(const RunConfig& cfg)
{
	CommandOutput out;
	out.json = header("gap-solve", cfg);

	Polynomial v;
	double m0_sq = 0.0;
	std::vector<GapSolution> closed;
	if (cfg.potential) {
		v = *cfg.potential;
		m0_sq = require_m0_sq(cfg);
	} else {
		const ModelParams p = cfg.model();
		v = p.potential();
		m0_sq = p.m0_sq;
		closed = solve_all(p);
	}

	GenericSolveResult generic;
	try {
		generic = solve_generic(v, m0_sq);
	} catch (const std::invalid_argument& e) {
		throw UsageError(e.what());
	}

	// closed forms are reported when available; the generic solver cross-checks them
	const std::vector<GapSolution>& sols = cfg.potential ? generic.solutions : closed;
	out.json["solutions"] = solutions_json(sols);

	nlohmann::json cross = {{"seeds", generic.seeds},
	                        {"converged", generic.converged},
	                        {"diagnostic", generic.diagnostic},
	                        {"solutions", solutions_json(generic.solutions)}};
	if (!cfg.potential) {
		// roots are compared in (xi, ln m^2); near-degenerate roots are only resolved to ~1e-8
		const GenericSolveOptions defaults;
		const double u_lo = std::log(m0_sq) - defaults.log_mass_below;
		double worst = 0.0;
		int unmatched = 0, outside = 0;
		for (const auto& s : closed) {
			if (std::log(s.m_sq) < u_lo) {
				++outside;
				continue;
			}
			double best = INFINITY;
			for (const auto& g : generic.solutions)
				best = std::min(best, std::max(std::abs(s.xi - g.xi) / std::max(1.0, std::abs(s.xi)),
				                               std::abs(std::log(s.m_sq) - std::log(g.m_sq))));
			if (best > 1e-6)
				++unmatched;
			else
				worst = std::max(worst, best);
		}
		cross["match_tolerance"] = 1e-6;
		cross["max_deviation_matched"] = worst;
		cross["unmatched_closed_form"] = unmatched;
		cross["closed_form_below_seed_range"] = outside;
	}
	out.json["generic_cross_check"] = cross;

	const GapSolution* sel = selected_phase(sols);
	out.json["selected_phase"] = sel ? solution_json(*sel) : nlohmann::json(nullptr);

	std::ostringstream csv;
	csv << "branch,xi,m_sq,energy,stability,residual_norm\n";
	for (const auto& s : sols)
		csv << to_string(s.branch) << ',' << num(s.xi) << ',' << num(s.m_sq) << ',' << num(s.energy) << ','
		    << to_string(s.stability) << ',' << num(s.residual_norm) << '\n';
	out.csv = csv.str();
	return out;
}

CommandOutput cmd_phase_scan(const RunConfig& cfg)
{
	if (cfg.potential)
		throw UsageError("phase-scan works on --lambda/--sigma/--m0sq models only");
	if (!cfg.scan)
		throw UsageError("phase-scan needs --scan param:lo:hi:steps");
	const ScanSpec spec = *cfg.scan;
	RunConfig base_cfg = cfg;
	// the scanned parameter needs no base value
	std::optional<double>& slot = spec.parameter == ScanParameter::lambda  ? base_cfg.lambda
	                              : spec.parameter == ScanParameter::sigma ? base_cfg.sigma
	                                                                       : base_cfg.m0_sq;
	if (!slot)
		slot = spec.lo;
	const ModelParams base = base_cfg.model();

	PhaseScan scan;
	try {
		scan = phase_scan(base, spec);
	} catch (const std::invalid_argument& e) {
		throw UsageError(e.what());
	}

	CommandOutput out;
	out.json = header("phase-scan", cfg);
	out.json["scan"] = {{"parameter", to_string(spec.parameter)}, {"lo", spec.lo}, {"hi", spec.hi}, {"steps", spec.steps}};
	nlohmann::json rows = nlohmann::json::array();
	std::ostringstream csv;
	csv << "parameter,branch,xi,m_sq,energy,stability\n";
	for (const auto& r : scan.rows) {
		rows.push_back({{"parameter", r.parameter},
		                {"broken_log_argument", r.broken_log_argument},
		                {"solutions", solutions_json(r.solutions)}});
		for (const auto& s : r.solutions)
			csv << num(r.parameter) << ',' << to_string(s.branch) << ',' << num(s.xi) << ',' << num(s.m_sq) << ','
			    << num(s.energy) << ',' << to_string(s.stability) << '\n';
	}
	out.json["rows"] = rows;
	nlohmann::json bps = nlohmann::json::array();
	for (const auto& b : scan.branch_points)
		bps.push_back({{"parameter", b.parameter},
		               {"between", {scan.rows[b.lower_index].parameter, scan.rows[b.lower_index + 1].parameter}},
		               {"broken_above", b.broken_above}});
	out.json["branch_points"] = bps;
	out.csv = csv.str();
	return out;
}

CommandOutput cmd_energy_surface(const RunConfig& cfg)
{
	Polynomial v;
	double m0_sq = 0.0;
	if (cfg.potential) {
		v = *cfg.potential;
		m0_sq = require_m0_sq(cfg);
	} else {
		const ModelParams p = cfg.model();
		v = p.potential();
		m0_sq = p.m0_sq;
	}
	const GridSpec grid = cfg.grid ? *cfg.grid : GridSpec::defaults_for(v);
	if (grid.xi_points < 2 || grid.mass_points < 2 || !(grid.xi_hi > grid.xi_lo) || !(grid.log_ratio_hi > grid.log_ratio_lo))
		throw UsageError("energy grid needs increasing bounds and at least 2 points per axis");

	const auto points = energy_surface(v, m0_sq, grid);
	const EnergyMinimum min = minimize_energy(v, m0_sq, grid);

	CommandOutput out;
	out.json = header("energy-surface", cfg);
	out.json["units"]["epsilon"] = "mass^2";
	out.json["grid"] = {{"xi", {grid.xi_lo, grid.xi_hi, grid.xi_points}},
	                    {"log_mass_ratio", {grid.log_ratio_lo, grid.log_ratio_hi, grid.mass_points}}};
	out.json["minimum"] = solution_json(min.solution);
	out.json["minimum_on_boundary"] = min.on_boundary;
	out.json["diagnostic"] = min.diagnostic;
	nlohmann::json pts = nlohmann::json::array();
	std::ostringstream csv;
	csv << "xi,m_sq,epsilon\n";
	for (const auto& p : points) {
		pts.push_back({p.xi, p.m_sq, p.epsilon});
		csv << num(p.xi) << ',' << num(p.m_sq) << ',' << num(p.epsilon) << '\n';
	}
	out.json["columns"] = {"xi", "m_sq", "epsilon"};
	out.json["points"] = pts;
	out.csv = csv.str();
	return out;
}

CommandOutput cmd_corrections(const RunConfig& cfg)
{
	for (double r : cfg.r_grid)
		if (!(r >= 0.0))
			throw UsageError("--r-grid entries must be non-negative");
	const CorrectionReport rep = correction_report(cfg.r_grid);

	CommandOutput out;
	out.json = header("corrections", cfg);
	out.json["units"] = {{"integrals", "dimensionless at unit mass"},
	                     {"r", "1/m (rescaled) or length (original)"},
	                     {"couplings", "dimensionless (rescaled)"},
	                     {"twopoint", "dimensionless"}};
	out.json["report"] = rep;

	if (cfg.has_model()) {
		const ModelParams p = cfg.model();
		const auto broken = solve_broken(p);
		const GapSolution* pick = nullptr;
		for (const auto& s : broken)
			if (s.xi > 0.0 && s.stability == Stability::stable && (!pick || s.energy < pick->energy))
				pick = &s;
		nlohmann::json model;
		if (!pick) {
			model["diagnostic"] = "no stable broken-phase solution; expansions in 1/xi do not apply";
		} else {
			const RescaledCouplings c = rescale_to_unit_mass(*pick, p);
			model["solution"] = solution_json(*pick);
			model["rescaled_couplings"] = {{"quartic", c.quartic}, {"cubic", c.cubic}};
			const ExpansionOptions opt{cfg.xi_guard};
			if (std::abs(pick->xi) < opt.xi_guard) {
				model["diagnostic"] = "|xi| below the asymptotic guard; expansions not evaluated";
			} else {
				const MeanExpansion me = mean_expansion(pick->xi, opt);
				model["mean_expansion"] = {{"value", me.value}, {"correction", me.correction}, {"neglected", me.neglected}};
				nlohmann::json tp = nlohmann::json::array();
				const double m = std::sqrt(pick->m_sq);
				for (const auto& s : rep.twopoint_kernel) {
					if (s.r == 0.0)
						continue;
					const double r_orig = s.r / m;
					const double corr = 4.5 / (pick->xi * pick->xi) * s.value;
					tp.push_back({{"r_rescaled", s.r},
					              {"r_original", r_orig},
					              {"leading", covariance(CovarianceKernel(pick->m_sq), r_orig)},
					              {"correction", corr},
					              {"neglected", "o(1/xi^3)"}});
				}
				model["twopoint_expansion"] = tp;
			}
		}
		out.json["model_expansions"] = model;
	}

	std::ostringstream csv;
	csv << "r,Q,error\n";
	for (const auto& s : rep.twopoint_kernel)
		csv << num(s.r) << ',' << num(s.value) << ',' << num(s.error) << '\n';
	out.csv = csv.str();
	if (!rep.routes_agree)
		out.exit_code = kExitVerificationFailure;
	return out;
}

CommandOutput cmd_verify(const RunConfig& cfg)
{
	std::vector<std::string> names;
	if (cfg.suite.empty() || cfg.suite == "all")
		names = suite_names();
	else if (std::find(suite_names().begin(), suite_names().end(), cfg.suite) != suite_names().end())
		names = {cfg.suite};
	else
		throw UsageError("unknown suite '" + cfg.suite + "'");

	CommandOutput out;
	out.json = {{"command", "verify"}, {"seed", cfg.seed}};
	nlohmann::json suites = nlohmann::json::array();
	bool all = true;
	std::ostringstream csv;
	csv << "suite,pass\n";
	for (const auto& n : names) {
		const SuiteReport r = run_suite(n, cfg.seed);
		all = all && r.pass;
		suites.push_back({{"name", r.name}, {"pass", r.pass}, {"seed", cfg.seed}, {"details", r.details}});
		csv << r.name << ',' << (r.pass ? "true" : "false") << '\n';
	}
	out.json["suites"] = suites;
	out.json["pass"] = all;
	out.csv = csv.str();
	out.exit_code = all ? kExitOk : kExitVerificationFailure;
	return out;
}

CommandOutput dispatch(const RunConfig& cfg)
{
	switch (cfg.command) {
	case Command::gap_solve:
		return cmd_gap_solve(cfg);
	case Command::phase_scan:
		return cmd_phase_scan(cfg);
	case Command::energy_surface:
		return cmd_energy_surface(cfg);
	case Command::corrections:
		return cmd_corrections(cfg);
	case Command::verify:
		return cmd_verify(cfg);
	}
	throw UsageError("unknown command");
}

ScanSpec parse_scan(const std::string& s)
{
	const auto parts = split(s, ':');
	if (parts.size() != 4)
		throw UsageError("--scan expects param:lo:hi:steps, got '" + s + "'");
	ScanSpec spec;
	try {
		spec.parameter = scan_parameter_from_string(trim(parts[0]));
	} catch (const std::invalid_argument& e) {
		throw UsageError(e.what());
	}
	spec.lo = to_double(parts[1], "--scan lo");
	spec.hi = to_double(parts[2], "--scan hi");
	spec.steps = to_int(parts[3], "--scan steps");
	if (spec.steps < 1)
		throw UsageError("--scan steps must be at least 1");
	if (spec.steps > 1 && !(spec.hi > spec.lo))
		throw UsageError("--scan range must be increasing");
	return spec;
}

GridSpec parse_grid(const std::string& s)
{
	const auto parts = split(s, ':');
	if (parts.size() != 6)
		throw UsageError("--grid expects xi_lo:xi_hi:log_lo:log_hi:nx:ny, got '" + s + "'");
	GridSpec g;
	g.xi_lo = to_double(parts[0], "--grid xi_lo");
	g.xi_hi = to_double(parts[1], "--grid xi_hi");
	g.log_ratio_lo = to_double(parts[2], "--grid log_lo");
	g.log_ratio_hi = to_double(parts[3], "--grid log_hi");
	g.xi_points = to_int(parts[4], "--grid nx");
	g.mass_points = to_int(parts[5], "--grid ny");
	return g;
}

Polynomial parse_potential(const std::string& s)
{
	const std::string t = trim(s);
	std::string text = t;
	if (t.empty() || t.front() != '[') {
		std::ifstream in(t);
		if (!in)
			throw UsageError("--potential is neither a JSON array nor a readable file: '" + s + "'");
		std::ostringstream buf;
		buf << in.rdbuf();
		text = buf.str();
	}
	try {
		return nlohmann::json::parse(text).get<Polynomial>();
	} catch (const std::exception& e) {
		throw UsageError(std::string("invalid --potential: ") + e.what());
	}
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw UsageError("cannot read config file '" + path + "'");
	std::map<std::string, std::string> kv;
	std::string line;
	int lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		if (const auto hash = line.find('#'); hash != std::string::npos)
			line.erase(hash);
		line = trim(line);
		if (line.empty())
			continue;
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
		kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
	}
	return kv;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Gaussian variational solver for polynomial scalar field theories in two dimensions", "gaussvar"};
	app.require_subcommand(1);

	// every value is captured as text first so config-file entries can fill the gaps
	const std::vector<std::string> keys{"lambda", "sigma", "m0sq", "potential", "scan",  "grid",  "r-grid",
	                                    "xi-guard", "out", "format", "seed", "suite", "config"};
	std::map<std::string, std::string> raw;
	std::map<std::string, CLI::Option*> opts;
	auto add = [&](const std::string& key, const std::string& help) {
		opts[key] = app.add_option("--" + key, raw[key], help);
	};
	add("lambda", "quartic coupling (mass^2, > 0)");
	add("sigma", "quadratic coupling (mass^2)");
	add("m0sq", "reference ordering mass squared (> 0)");
	add("potential", "polynomial as a JSON array of coefficients, constant term first, or a file holding one");
	add("scan", "phase-scan range param:lo:hi:steps with param in {lambda, sigma, m0sq}");
	add("grid", "energy grid xi_lo:xi_hi:log_lo:log_hi:nx:ny in (xi, ln(m^2/m0^2))");
	add("r-grid", "comma-separated separations (units of 1/m) for the two-point kernel");
	add("xi-guard", "smallest |xi| treated as asymptotic (default 1)");
	add("out", "write the report here instead of stdout");
	add("format", "json or csv (default json)");
	add("seed", "64-bit seed for randomized checks (default 42)");
	add("suite", "verify: gradient, appendix, special, integrals or all");
	add("config", "flat key = value file; flags override its entries");

	Command command = Command::gap_solve;
	const std::vector<std::pair<const char*, Command>> commands{{"gap-solve", Command::gap_solve},
	                                                            {"phase-scan", Command::phase_scan},
	                                                            {"energy-surface", Command::energy_surface},
	                                                            {"corrections", Command::corrections},
	                                                            {"verify", Command::verify}};
	const char* descriptions[] = {"solve the gap equations", "scan one parameter and locate branch points",
	                              "tabulate the vacuum energy on a grid", "covariance integrals and 1/xi expansions",
	                              "run the self-verification suites"};
	for (std::size_t i = 0; i < commands.size(); ++i) {
		auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
		sub->fallthrough();
		const Command c = commands[i].second;
		sub->callback([&command, c] { command = c; });
	}

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? kExitOk : kExitUsage;
	}

	RunConfig cfg;
	cfg.command = command;
	try {
		if (opts["config"]->count() > 0)
			for (const auto& [k, v] : read_config_file(raw["config"])) {
				if (std::find(keys.begin(), keys.end(), k) == keys.end() || k == "config")
					throw UsageError("unknown config key '" + k + "'");
				if (opts[k]->count() == 0)
					raw[k] = v;
			}
		auto given = [&](const std::string& k) { return !raw[k].empty(); };
		if (given("lambda"))
			cfg.lambda = to_double(raw["lambda"], "--lambda");
		if (given("sigma"))
			cfg.sigma = to_double(raw["sigma"], "--sigma");
		if (given("m0sq"))
			cfg.m0_sq = to_double(raw["m0sq"], "--m0sq");
		if (given("potential"))
			cfg.potential = parse_potential(raw["potential"]);
		if (given("scan"))
			cfg.scan = parse_scan(raw["scan"]);
		if (given("grid"))
			cfg.grid = parse_grid(raw["grid"]);
		if (given("r-grid")) {
			cfg.r_grid.clear();
			for (const auto& p : split(raw["r-grid"], ','))
				cfg.r_grid.push_back(to_double(p, "--r-grid"));
		}
		if (given("xi-guard"))
			cfg.xi_guard = to_double(raw["xi-guard"], "--xi-guard");
		cfg.out = raw["out"];
		if (given("format")) {
			if (raw["format"] == "json")
				cfg.format = Format::json;
			else if (raw["format"] == "csv")
				cfg.format = Format::csv;
			else
				throw UsageError("--format must be json or csv");
		}
		if (given("seed")) {
			const std::string t = trim(raw["seed"]);
			auto r = std::from_chars(t.data(), t.data() + t.size(), cfg.seed);
			if (r.ec != std::errc() || r.ptr != t.data() + t.size())
				throw UsageError("invalid --seed '" + raw["seed"] + "'");
		}
		cfg.suite = raw["suite"];

		const CommandOutput result = dispatch(cfg);
		const std::string text = cfg.format == Format::json ? result.json.dump(2) + "\n" : result.csv;
		if (cfg.out.empty()) {
			out << text;
		} else {
			std::ofstream f(cfg.out, std::ios::binary);
			if (!f)
				throw UsageError("cannot write '" + cfg.out + "'");
			f << text;
		}
		if (result.exit_code == kExitVerificationFailure)
			err << "verification failed\n";
		return result.exit_code;
	} catch (const std::invalid_argument& e) {
		// UsageError and library input validation alike
		err << "error: " << e.what() << "\nRun with --help for more information.\n";
		return kExitUsage;
	} catch (const std::exception& e) {
		err << "error: " << e.what() << "\n";
		return kExitVerificationFailure;
	}
}

} // namespace gaussvar::cli
