#include "ehgo/log_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ehgo/errors.hpp"

namespace ehgo {

namespace {

const char* const kAxes[3] = {"x", "y", "z"};
const char* const kAngles[3] = {"phi", "theta", "psi"};
const char* const kSlots[10] = {"rho1", "rho2", "sigma_rho", "xi1", "xi2",
                                "varsigma_xi", "xc1", "xc2", "xc3", "sigma_xc"};

void add3(std::vector<std::string>& cols, const std::string& name, const char* const* axes) {
  for (int i = 0; i < 3; ++i) cols.push_back(name + "_" + axes[i]);
}

void put3(std::vector<double>& row, const Vec3& v) {
  for (int i = 0; i < 3; ++i) row.push_back(v[i]);
}

// Sequential reader over one parsed row.
struct Cursor {
  const std::vector<double>& v;
  std::size_t i = 0;
  double next() { return v[i++]; }
  Vec3 vec3() {
    Vec3 out(v[i], v[i + 1], v[i + 2]);
    i += 3;
    return out;
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> log_columns(int n) {
  std::vector<std::string> c{"t"};
  add3(c, "p1", kAxes);
  add3(c, "p2", kAxes);
  add3(c, "theta1", kAngles);
  add3(c, "theta2", kAngles);
  add3(c, "xc1", kAxes);
  add3(c, "xc2", kAxes);
  for (const char* s : kSlots) add3(c, std::string(s) + "_hat", kAxes);
  for (int i = 0; i < n; ++i) c.push_back("omega_des_" + std::to_string(i));
  for (const char* d : {"saturated_entries", "allocation_clamped", "angle_margin_violation",
                        "degenerate_hold", "thrust_reversal"}) {
    c.push_back(d);
  }
  for (const char* s : kSlots) add3(c, std::string(s) + "_true", kAxes);
  c.push_back("u_f");
  add3(c, "tau", kAxes);
  add3(c, "theta_r", kAngles);
  add3(c, "thetar_dot_bar", kAngles);
  add3(c, "sigma_rho", kAxes);
  add3(c, "sigma_xi", kAxes);
  add3(c, "p1_meas", kAxes);
  add3(c, "theta1_meas", kAngles);
  add3(c, "xc1_meas", kAxes);
  for (int i = 0; i < n; ++i) c.push_back("omega_" + std::to_string(i));
  c.push_back("descent_offset");
  c.push_back("descent_phase");
  return c;
}

void write_log_csv(std::ostream& out, const SimLog& log) {
  const auto cols = log_columns(log.n_rotors);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::vector<double> row;
  row.reserve(cols.size());
  for (const SimRecord& r : log.records) {
    row.clear();
    row.push_back(r.t);
    for (int i = 0; i < 12; ++i) row.push_back(r.state.to_vector()[i]);
    put3(row, r.vehicle.xc1);
    put3(row, r.vehicle.xc2);
    for (int i = 0; i < kExtendedStates; ++i) row.push_back(r.chi_hat[i]);
    for (Eigen::Index i = 0; i < r.omega_des.size(); ++i) row.push_back(r.omega_des[i]);
    const StepDiagnostics& d = r.diagnostics;
    row.push_back(d.saturated_entries);
    row.push_back(d.allocation_clamped);
    row.push_back(d.angle_margin_violation);
    row.push_back(d.degenerate_hold);
    row.push_back(d.thrust_reversal);
    for (int i = 0; i < kExtendedStates; ++i) row.push_back(r.chi[i]);
    row.push_back(r.u_f);
    put3(row, r.tau);
    put3(row, r.theta_r);
    put3(row, r.thetar_dot_bar);
    put3(row, r.sigma_rho);
    put3(row, r.sigma_xi);
    put3(row, r.meas.p1_meas);
    put3(row, r.meas.theta1_meas);
    put3(row, r.meas.xc1_meas);
    for (Eigen::Index i = 0; i < r.omega.size(); ++i) row.push_back(r.omega[i]);
    row.push_back(r.descent_offset);
    row.push_back(r.descent_phase);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

std::string log_csv(const SimLog& log) {
  std::ostringstream os;
  write_log_csv(os, log);
  return os.str();
}

SimLog read_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int n = 0;
  for (const auto& h : header) n += h.rfind("omega_des_", 0) == 0 ? 1 : 0;
  if (header != log_columns(n)) throw ParseError(1, "unexpected column layout");

  SimLog log;
  log.n_rotors = n;
  int line_no = 1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.clear();
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError(line_no, "expected a number at column " +
                                                  std::to_string(values.size() + 1));
      values.push_back(v);
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0' || *end == '\r') {
        break;
      } else {
        throw ParseError(line_no, "unexpected character '" + std::string(1, *end) + "'");
      }
    }
    if (values.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " columns, got " +
                                    std::to_string(values.size()));
    }
    Cursor c{values};
    SimRecord r;
    r.t = c.next();
    r.state.p1 = c.vec3();
    r.state.p2 = c.vec3();
    r.state.theta1 = c.vec3();
    r.state.theta2 = c.vec3();
    r.vehicle.xc1 = c.vec3();
    r.vehicle.xc2 = c.vec3();
    for (int i = 0; i < kExtendedStates; ++i) r.chi_hat[i] = c.next();
    r.omega_des.resize(n);
    for (int i = 0; i < n; ++i) r.omega_des[i] = c.next();
    r.diagnostics.saturated_entries = static_cast<int>(c.next());
    r.diagnostics.allocation_clamped = c.next() != 0.0;
    r.diagnostics.angle_margin_violation = c.next() != 0.0;
    r.diagnostics.degenerate_hold = c.next() != 0.0;
    r.diagnostics.thrust_reversal = c.next() != 0.0;
    for (int i = 0; i < kExtendedStates; ++i) r.chi[i] = c.next();
    r.u_f = c.next();
    r.tau = c.vec3();
    r.theta_r = c.vec3();
    r.thetar_dot_bar = c.vec3();
    r.sigma_rho = c.vec3();
    r.sigma_xi = c.vec3();
    r.meas.p1_meas = c.vec3();
    r.meas.theta1_meas = c.vec3();
    r.meas.xc1_meas = c.vec3();
    r.meas.t = r.t;
    r.omega.resize(n);
    for (int i = 0; i < n; ++i) r.omega[i] = c.next();
    r.descent_offset = c.next();
    r.descent_phase = static_cast<int>(c.next());
    log.records.push_back(std::move(r));
  }
  if (log.records.size() >= 2) log.step = log.records[1].t - log.records[0].t;
  return log;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace ehgo
