#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end. Every command renders its report as JSON or
 *        CSV; `run` is the whole program minus process plumbing, so it can be
 *        driven from tests.
 */

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussvar/energy.hpp"
#include "gaussvar/gap.hpp"
#include "gaussvar/model.hpp"
#include "gaussvar/polynomial.hpp"

namespace gaussvar::cli {

enum class Command { gap_solve, phase_scan, energy_surface, corrections, verify };
enum class Format { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitUsage = 2;

/** Usage problem detected after parsing (bad value, missing parameter). */
class UsageError : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

struct RunConfig {
	Command command = Command::gap_solve;
	std::optional<double> lambda, sigma, m0_sq;
	std::optional<Polynomial> potential;
	std::optional<ScanSpec> scan;
	std::optional<GridSpec> grid;
	std::vector<double> r_grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
	double xi_guard = 1.0;
	std::string out;
	Format format = Format::json;
	std::uint64_t seed = 42;
	std::string suite; ///< empty runs every suite

	/** lambda, sigma and m0_sq; throws UsageError if any is missing or invalid. */
	ModelParams model() const;
	bool has_model() const { return lambda && sigma && m0_sq; }
};

struct CommandOutput {
	nlohmann::json json;
	std::string csv;
	int exit_code = kExitOk;
};

CommandOutput cmd_gap_solve(const RunConfig& cfg);
CommandOutput cmd_phase_scan(const RunConfig& cfg);
CommandOutput cmd_energy_surface(const RunConfig& cfg);
CommandOutput cmd_corrections(const RunConfig& cfg);
CommandOutput cmd_verify(const RunConfig& cfg);

CommandOutput dispatch(const RunConfig& cfg);

/** `param:lo:hi:steps` */
ScanSpec parse_scan(const std::string& s);
/** `xi_lo:xi_hi:log_lo:log_hi:nx:ny` */
GridSpec parse_grid(const std::string& s);
/** Inline JSON array, or a path to a file holding one. */
Polynomial parse_potential(const std::string& s);

/**
 * Flat `key = value` file: one entry per line, `#` starts a comment, keys are
 * the long flag names without dashes.
 */
std::map<std::string, std::string> read_config_file(const std::string& path);

/** Full program: parse, dispatch, write the report. Returns the exit code. */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

nlohmann::json solution_json(const GapSolution& s);

} // namespace gaussvar::cli
