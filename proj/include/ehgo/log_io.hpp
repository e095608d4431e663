#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehgo/sim.hpp"

namespace ehgo {

/// Column names of log.csv, in order:
///   t,
///   12 true states (p1, p2, theta1, theta2),
///   6 vehicle states (xc1, xc2),
///   30 estimates chi_hat as seen by the controller,
///   n rotor commands omega_des,
///   5 per-step diagnostics (saturated entries, allocation clamp,
///     angle margin, degenerate hold, thrust reversal),
///   30 true extended states chi,
///   u_f, tau (3), theta_r (3), thetar_dot_bar (3), sigma_rho (3), sigma_xi (3),
///   9 measurements (p1, theta1, xc1),
///   n rotor rates omega,
///   descent_offset, descent_phase.
std::vector<std::string> log_columns(int n_rotors);

/// One row per record, every value printed with 17 significant digits.
void write_log_csv(std::ostream& out, const SimLog& log);
std::string log_csv(const SimLog& log);

/// Inverse of write_log_csv. Throws ParseError on malformed input.
SimLog read_log_csv(std::istream& in);

std::string format_metrics(const Metrics& m);

/// Writes `content` to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest-round-trip-safe formatting (17 significant digits).
std::string format_double(double v);

}  // namespace ehgo
