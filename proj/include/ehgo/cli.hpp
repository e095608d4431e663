#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ehgo {

/// Exit codes shared by the subcommands.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int config_error = 2;
inline constexpr int diverged = 3;
inline constexpr int slope_out_of_band = 4;
}  // namespace exit_code

struct CliInvocation {
  std::string command;
  std::string config = "paper_landing";  // bundled name or file path
  std::filesystem::path output_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons{0.04, 0.02, 0.01, 0.005};
  bool inject_r3_fault = false;
};

int cmd_simulate(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_verify(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep_epsilon(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_certify(const CliInvocation& inv, std::ostream& out, std::ostream& err);
/// Re-renders the SVG figures from an existing log.csv in the output dir.
int cmd_plot(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ehgo
