#pragma once

/**
 * @file verify.hpp
 * @brief Self-verification suites run by the `verify` command.
 *
 * Each suite draws its random trials from a generator seeded by the run seed,
 * so identical seeds give identical reports.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gaussvar {

struct SuiteReport {
	std::string name;
	bool pass = false;
	nlohmann::json details;
};

/** gradient, appendix, special, integrals */
const std::vector<std::string>& suite_names();

/** Throws std::invalid_argument for an unknown name. */
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

SuiteReport verify_gradient(std::uint64_t seed);
SuiteReport verify_appendix(std::uint64_t seed);
SuiteReport verify_special(std::uint64_t seed);
SuiteReport verify_integrals(std::uint64_t seed);

} // namespace gaussvar
