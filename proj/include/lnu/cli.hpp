#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "lnu/config.hpp"
#include "lnu/verification.hpp"

namespace lnu::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2 };

int cmd_train(const ExperimentConfig& config, std::ostream& out);
int cmd_boundary(const ExperimentConfig& config, std::ostream& out);
int cmd_truth_table(double beta, std::ostream& out);
int cmd_gradcheck(std::span<const GradCheckCase> cases, std::size_t points, std::uint64_t seed,
                  std::ostream& out);
int cmd_logic_checks(std::uint64_t seed, std::ostream& out);

/// Parses arguments, dispatches to a subcommand and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lnu::cli
