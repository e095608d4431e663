#include "ehgo/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ehgo/analysis.hpp"
#include "ehgo/config.hpp"
#include "ehgo/errors.hpp"
#include "ehgo/log_io.hpp"
#include "ehgo/sim.hpp"
#include "ehgo/svg.hpp"
#include "ehgo/verify.hpp"

namespace ehgo {

namespace {

ScenarioConfig configure(const CliInvocation& inv) {
  std::vector<std::string> overrides = inv.overrides;
  if (inv.seed) overrides.push_back("sim.seed=" + std::to_string(*inv.seed));
  return load_config(inv.config, overrides);
}

void prepare_output(const std::filesystem::path& dir) { std::filesystem::create_directories(dir); }

std::string columns_help() {
  std::ostringstream os;
  os << "log.csv columns (n = rotor count):\n"
        "  t; p1 xyz; p2 xyz; theta1 phi,theta,psi; theta2; xc1 xyz; xc2 xyz;\n"
        "  30 estimates <slot>_hat_xyz for slots rho1 rho2 sigma_rho xi1 xi2 varsigma_xi\n"
        "    xc1 xc2 xc3 sigma_xc; omega_des_0..n-1;\n"
        "  saturated_entries allocation_clamped angle_margin_violation degenerate_hold\n"
        "    thrust_reversal;\n"
        "  30 true extended states <slot>_true_xyz; u_f; tau xyz; theta_r; thetar_dot_bar;\n"
        "  sigma_rho xyz; sigma_xi xyz; p1_meas xyz; theta1_meas; xc1_meas xyz;\n"
        "  omega_0..n-1; descent_offset; descent_phase\n";
  return os.str();
}

}  // namespace

int cmd_simulate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = configure(inv);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  SimLog log;
  try {
    log = run_scenario(cfg);
  } catch (const Diverged& e) {
    err << e.what() << '\n';
    return exit_code::diverged;
  }
  prepare_output(inv.output_dir);
  const Metrics m = compute_metrics(log);
  write_file_atomic(inv.output_dir / "log.csv", log_csv(log));
  write_file_atomic(inv.output_dir / "metrics.txt", format_metrics(m));
  write_file_atomic(inv.output_dir / "trajectory.svg", trajectory_svg(log));
  write_file_atomic(inv.output_dir / "errors.svg", errors_svg(log));
  out << format_metrics(m);
  return exit_code::ok;
}

int cmd_verify(const CliInvocation& inv, std::ostream& out, std::ostream&) {
  VerifyOptions opt;
  opt.inject_r3_sign_fault = inv.inject_r3_fault;
  const auto results = run_verification(opt);
  out << format_report(results);
  for (const auto& r : results) {
    if (!r.passed) return exit_code::check_failed;
  }
  return exit_code::ok;
}

int cmd_sweep_epsilon(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = configure(inv);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  SweepResult sweep;
  try {
    sweep = epsilon_sweep(cfg, inv.epsilons);
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code::slope_out_of_band;
  }
  prepare_output(inv.output_dir);
  std::ostringstream csv;
  csv << "epsilon,diverged,steady_error,translational,rotational,vehicle\n";
  for (const SweepPoint& p : sweep.points) {
    csv << format_double(p.epsilon) << ',' << (p.diverged ? 1 : 0) << ','
        << format_double(p.steady_error) << ',' << format_double(p.block_error[0]) << ','
        << format_double(p.block_error[1]) << ',' << format_double(p.block_error[2]) << '\n';
  }
  write_file_atomic(inv.output_dir / "sweep.csv", csv.str());
  write_file_atomic(inv.output_dir / "sweep.svg", sweep_svg(sweep));
  out << csv.str() << "slope = " << format_double(sweep.slope) << '\n';
  const bool in_band = sweep.slope >= 0.8 && sweep.slope <= 1.2;
  out << (in_band ? "slope within [0.8, 1.2]\n" : "slope outside [0.8, 1.2]\n");
  return in_band ? exit_code::ok : exit_code::slope_out_of_band;
}

int cmd_certify(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = configure(inv);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  cfg.mode = ControlMode::state_feedback;
  cfg.noise = NoiseStd{0.0, 0.0, 0.0};
  SimLog log;
  try {
    log = run_scenario(cfg);
  } catch (const Diverged& e) {
    err << e.what() << '\n';
    return exit_code::diverged;
  }
  double u_max = 0.0;
  for (const SimRecord& r : log.records) u_max = std::max(u_max, r.u_f);
  const double delta = cfg.controller.delta;
  const double L_e = estimate_lipschitz_e_theta(cfg.params, u_max, delta);
  const DomainConstants dc = domain_constants(cfg.controller.gains, delta, L_e);
  const CascadeWeight w = cascade_weight(1.0, 2.0 * dc.p_rho.lambda_max, L_e, 1.0);
  const CertificateReport rep = certify_log(log, dc, w.b);

  out << "L_e = " << format_double(L_e) << '\n'
      << "c_xi = " << format_double(dc.c_xi) << '\n'
      << "rho_max = " << format_double(dc.rho_max) << '\n'
      << "c_rho = " << format_double(dc.c_rho) << '\n'
      << "lyapunov_residual_xi = " << format_double(dc.p_xi.residual_norm) << '\n'
      << "lyapunov_residual_rho = " << format_double(dc.p_rho.residual_norm) << '\n'
      << "cascade_b = " << format_double(w.b) << '\n'
      << "cascade_q_lambda_min = " << format_double(w.lambda_min) << '\n'
      << "first_entry_index = " << rep.first_entry << '\n'
      << "invariance_violations = " << rep.invariance_violations.size() << '\n'
      << "decrease_fraction = " << format_double(rep.decrease_fraction) << '\n'
      << "decay_rate = " << format_double(rep.decay_rate) << '\n';
  const bool ok = rep.invariance_violations.empty() && rep.decrease_fraction >= 0.99 &&
                  rep.decay_rate > 0 && w.lambda_min > 0;
  return ok ? exit_code::ok : exit_code::check_failed;
}

int cmd_plot(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const auto path = inv.output_dir / "log.csv";
  std::ifstream f(path);
  if (!f) {
    err << "cannot read " << path.string() << '\n';
    return exit_code::config_error;
  }
  SimLog log;
  try {
    log = read_log_csv(f);
  } catch (const ParseError& e) {
    err << path.string() << ": " << e.what() << '\n';
    return exit_code::config_error;
  }
  write_file_atomic(inv.output_dir / "trajectory.svg", trajectory_svg(log));
  write_file_atomic(inv.output_dir / "errors.svg", errors_svg(log));
  out << "wrote trajectory.svg and errors.svg\n";
  return exit_code::ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Output-feedback multirotor landing simulator"};
  app.require_subcommand(1);
  app.footer(columns_help());

  CliInvocation inv;
  auto common = [&inv](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", inv.config, "bundled config name or INI file path")
          ->capture_default_str();
      sub->add_option("--set", inv.overrides, "override section.key=value (repeatable)");
      sub->add_option("--seed", inv.seed, "noise seed");
    }
    sub->add_option("--out", inv.output_dir, "output directory")->capture_default_str();
  };
  CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write log, metrics, plots");
  common(sim, true);
  CLI::App* verify = app.add_subcommand("verify", "run the property battery");
  verify->add_flag("--inject-r3-fault", inv.inject_r3_fault)->group("");
  CLI::App* sweep = app.add_subcommand("sweep-epsilon", "steady estimation error versus epsilon");
  common(sweep, true);
  sweep->add_option("--epsilons", inv.epsilons, "epsilon values")->delimiter(',');
  CLI::App* certify = app.add_subcommand("certify", "Lyapunov certificates on a state-feedback run");
  common(certify, true);
  CLI::App* plot = app.add_subcommand("plot", "re-render SVG figures from <out>/log.csv");
  common(plot, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_code::config_error;
  }

  try {
    if (sim->parsed()) return cmd_simulate(inv, out, err);
    if (verify->parsed()) return cmd_verify(inv, out, err);
    if (sweep->parsed()) return cmd_sweep_epsilon(inv, out, err);
    if (certify->parsed()) return cmd_certify(inv, out, err);
    if (plot->parsed()) return cmd_plot(inv, out, err);
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << '\n';
    return exit_code::config_error;
  }
  return exit_code::config_error;
}

}  // namespace ehgo
