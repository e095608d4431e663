#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehgo/log_io.hpp"
#include "ehgo/sim.hpp"

namespace ehgo {

std::size_t steady_start(std::size_t n) {
  const std::size_t tail = std::max<std::size_t>(1, n / 4);
  return n - std::min(n, tail);
}

Metrics compute_metrics(const SimLog& log) {
  Metrics m;
  const auto& rec = log.records;
  m.records = static_cast<long>(rec.size());
  m.touchdown_time = m.touchdown_horizontal = m.touchdown_vertical =
      std::numeric_limits<double>::quiet_NaN();
  if (rec.empty()) return m;

  const std::size_t start = steady_start(rec.size());
  const double count = static_cast<double>(rec.size() - start);
  double rho_sq = 0.0, xi_sq = 0.0, total_sq = 0.0;
  std::array<double, 3> block_sq{};
  std::array<double, 10> slot_sq{};
  for (std::size_t k = start; k < rec.size(); ++k) {
    const SimRecord& r = rec[k];
    const ExtendedVector e = r.chi - r.chi_hat;
    const double rho = r.chi.segment<3>(slot::rho1).norm();
    const double xi = r.chi.segment<3>(slot::xi1).norm();
    rho_sq += rho * rho;
    xi_sq += xi * xi;
    m.rho1_max = std::max(m.rho1_max, rho);
    m.xi1_max = std::max(m.xi1_max, xi);
    block_sq[0] += e.segment<9>(0).squaredNorm();
    block_sq[1] += e.segment<9>(9).squaredNorm();
    block_sq[2] += e.segment<12>(18).squaredNorm();
    total_sq += e.squaredNorm();
    for (int s = 0; s < 10; ++s) slot_sq[static_cast<std::size_t>(s)] += e.segment<3>(3 * s).squaredNorm();
  }
  m.rho1_rms = std::sqrt(rho_sq / count);
  m.xi1_rms = std::sqrt(xi_sq / count);
  for (std::size_t b = 0; b < 3; ++b) m.estimation_rms[b] = std::sqrt(block_sq[b] / count);
  for (std::size_t s = 0; s < 10; ++s) m.estimation_rms_slot[s] = std::sqrt(slot_sq[s] / count);
  m.estimation_rms_total = std::sqrt(total_sq / count);

  for (const SimRecord& r : rec) {
    const ExtendedVector e = (r.chi - r.chi_hat).cwiseAbs();
    const ExtendedVector a = r.chi_hat.cwiseAbs();
    m.peak_estimate[0] = std::max(m.peak_estimate[0], a.segment<9>(0).maxCoeff());
    m.peak_estimate[1] = std::max(m.peak_estimate[1], a.segment<9>(9).maxCoeff());
    m.peak_estimate[2] = std::max(m.peak_estimate[2], a.segment<12>(18).maxCoeff());
    m.peak_error[0] = std::max(m.peak_error[0], e.segment<9>(0).maxCoeff());
    m.peak_error[1] = std::max(m.peak_error[1], e.segment<9>(9).maxCoeff());
    m.peak_error[2] = std::max(m.peak_error[2], e.segment<12>(18).maxCoeff());
    m.saturated_entries += r.diagnostics.saturated_entries;
    m.allocation_clamps += r.diagnostics.allocation_clamped ? 1 : 0;
    m.angle_margin_hits += r.diagnostics.angle_margin_violation ? 1 : 0;
    m.degenerate_holds += r.diagnostics.degenerate_hold ? 1 : 0;
    m.thrust_reversals += r.diagnostics.thrust_reversal ? 1 : 0;
  }

  for (const SimRecord& r : rec) {
    if (r.descent_phase == 2) {
      const Vec3 gap = r.state.p1 - r.vehicle.xc1;
      m.touchdown_time = r.t;
      m.touchdown_horizontal = gap.head<2>().norm();
      m.touchdown_vertical = gap.z() - r.descent_offset;
      break;
    }
  }
  return m;
}

std::string format_metrics(const Metrics& m) {
  std::ostringstream os;
  auto line = [&os](const char* key, double v) { os << key << " = " << format_double(v) << '\n'; };
  auto count = [&os](const char* key, long v) { os << key << " = " << v << '\n'; };
  count("records", m.records);
  line("rho1_rms", m.rho1_rms);
  line("rho1_max", m.rho1_max);
  line("xi1_rms", m.xi1_rms);
  line("xi1_max", m.xi1_max);
  line("estimation_rms_translational", m.estimation_rms[0]);
  line("estimation_rms_rotational", m.estimation_rms[1]);
  line("estimation_rms_vehicle", m.estimation_rms[2]);
  line("estimation_rms_total", m.estimation_rms_total);
  line("touchdown_time", m.touchdown_time);
  line("touchdown_horizontal", m.touchdown_horizontal);
  line("touchdown_vertical", m.touchdown_vertical);
  line("peak_estimate_translational", m.peak_estimate[0]);
  line("peak_estimate_rotational", m.peak_estimate[1]);
  line("peak_estimate_vehicle", m.peak_estimate[2]);
  line("peak_error_translational", m.peak_error[0]);
  line("peak_error_rotational", m.peak_error[1]);
  line("peak_error_vehicle", m.peak_error[2]);
  count("saturated_entries", m.saturated_entries);
  count("allocation_clamps", m.allocation_clamps);
  count("angle_margin_hits", m.angle_margin_hits);
  count("degenerate_holds", m.degenerate_holds);
  count("thrust_reversals", m.thrust_reversals);
  return os.str();
}

}  // namespace ehgo
