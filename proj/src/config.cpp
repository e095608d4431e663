#include "ehgo/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ehgo/errors.hpp"

namespace ehgo {

namespace {

constexpr std::string_view kPaperLanding = R"(# Landing on a ground vehicle driving a figure-8.
[sim]
mode = output_feedback
duration = 40
step = 0.001
seed = 7
initial_position = 1, 1, -4
disturbance_rho = cos(t), sin(t), cos(t)
disturbance_xi = sin(t), cos(t), sin(t)

[observer]
epsilon = 0.02

[profile]
kind = figure8
amplitude_x = 3
amplitude_y = 1.5
angular_rate = 0.3
center = 5, 0, -0.5
descent_start = 15
descent_duration = 10

[noise]
position = 0.005
orientation = 0.002
vehicle_position = 0.01
)";

constexpr std::string_view kHoverSmoke = R"(# Hover above a parked vehicle; nothing should move.
[sim]
mode = output_feedback
duration = 5
step = 0.001
seed = 1
initial_position = 0, 0, -2
disturbance_rho = 0, 0, 0
disturbance_xi = 0, 0, 0

[observer]
epsilon = 0.01

[profile]
kind = stationary
vehicle_position = 0, 0, 0
vehicle_velocity = 0, 0, 0
descent_start = 1000

[noise]
position = 0
orientation = 0
vehicle_position = 0
)";

constexpr std::string_view kSweepDefault = R"(# Figure-8 tracking at constant altitude for the epsilon sweep.
[sim]
mode = output_feedback
duration = 20
step = 0.001
seed = 3
initial_position = 5, 0, -2
disturbance_rho = cos(t), sin(t), cos(t)
disturbance_xi = sin(t), cos(t), sin(t)

[observer]
epsilon = 0.01

[profile]
kind = figure8
center = 5, 0, -0.5
descent_start = 1000

[noise]
position = 0
orientation = 0
vehicle_position = 0
)";

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const Entry& e, const std::string& key) {
  const std::string& s = e.value;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(e.line, key + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::vector<double> to_list(const Entry& e, const std::string& key, std::size_t n) {
  const auto parts = split(e.value, ',');
  if (parts.size() != n) {
    throw ParseError(e.line, key + ": expected " + std::to_string(n) + " comma-separated values");
  }
  std::vector<double> v;
  for (const auto& p : parts) v.push_back(to_double(Entry{p, e.line}, key));
  return v;
}

Vec3 to_vec3(const Entry& e, const std::string& key) {
  const auto v = to_list(e, key, 3);
  return {v[0], v[1], v[2]};
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ParseError(e.line, key + ": expected true or false, got '" + e.value + "'");
}

VectorSignal to_signal(const Entry& e, const std::string& key) {
  const auto parts = split(e.value, ',');
  if (parts.size() != 3) throw ParseError(e.line, key + ": expected three expressions");
  try {
    return VectorSignal(Signal::parse(parts[0]), Signal::parse(parts[1]), Signal::parse(parts[2]));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(e.line, key + ": " + ex.what());
  }
}

template <std::size_t N>
std::array<double, N> to_array(const Entry& e, const std::string& key) {
  const auto v = to_list(e, key, N);
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = v[i];
  return a;
}

using Setter = std::function<void(ScenarioConfig&, const Entry&, const std::string&)>;

// Vehicle state keys are applied after the profile so the figure-8 defaults
// can depend on the profile.
struct Pending {
  std::optional<Entry> vehicle_position, vehicle_velocity;
};

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& key, auto member) {
      t[key] = [member](ScenarioConfig& c, const Entry& e, const std::string& k) {
        member(c) = to_double(e, k);
      };
    };
    num("vehicle.mass", [](ScenarioConfig& c) -> double& { return c.params.mass; });
    t["vehicle.inertia"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.params.inertia = to_vec3(e, k).asDiagonal();
    };
    num("vehicle.thrust_coefficient",
        [](ScenarioConfig& c) -> double& { return c.params.thrust_coefficient; });
    num("vehicle.tau_m", [](ScenarioConfig& c) -> double& { return c.params.tau_m; });
    t["vehicle.n_rotors"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      const double v = to_double(e, k);
      if (v != static_cast<int>(v)) throw ParseError(e.line, k + ": expected an integer");
      c.params.n_rotors = static_cast<int>(v);
    };
    num("vehicle.arm_length", [](ScenarioConfig& c) -> double& { return c.params.arm_length; });
    num("vehicle.torque_ratio", [](ScenarioConfig& c) -> double& { return c.params.torque_ratio; });

    num("gains.beta1", [](ScenarioConfig& c) -> double& { return c.controller.gains.beta1; });
    num("gains.beta2", [](ScenarioConfig& c) -> double& { return c.controller.gains.beta2; });
    num("gains.gamma1", [](ScenarioConfig& c) -> double& { return c.controller.gains.gamma1; });
    num("gains.gamma2", [](ScenarioConfig& c) -> double& { return c.controller.gains.gamma2; });
    num("gains.delta", [](ScenarioConfig& c) -> double& { return c.controller.delta; });
    t["gains.use_reference_jerk"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.controller.use_reference_jerk = to_bool(e, k);
    };
    t["gains.limit_tilt"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.controller.limit_tilt = to_bool(e, k);
    };
    num("gains.max_tilt", [](ScenarioConfig& c) -> double& { return c.controller.max_tilt; });

    num("observer.epsilon", [](ScenarioConfig& c) -> double& { return c.observer.epsilon; });
    t["observer.alpha_rho"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.observer.alpha_rho = to_array<3>(e, k);
    };
    t["observer.alpha_xi"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.observer.alpha_xi = to_array<3>(e, k);
    };
    t["observer.alpha_xc"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.observer.alpha_xc = to_array<4>(e, k);
    };
    t["observer.init"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      if (e.value == "measured") {
        c.observer.init_from_measurements = true;
      } else if (e.value == "zero") {
        c.observer.init_from_measurements = false;
      } else {
        throw ParseError(e.line, k + ": expected 'measured' or 'zero'");
      }
    };
    t["observer.enabled"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.observer.enabled = to_bool(e, k);
    };
    num("observer.saturation_scale", [](ScenarioConfig& c) -> double& { return c.saturation.scale; });
    num("observer.saturation_floor", [](ScenarioConfig& c) -> double& { return c.saturation.floor; });

    t["profile.kind"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      if (e.value == "figure8") {
        c.profile.kind = TrajectoryKind::figure8;
      } else if (e.value == "constant_velocity") {
        c.profile.kind = TrajectoryKind::constant_velocity;
      } else if (e.value == "stationary") {
        c.profile.kind = TrajectoryKind::stationary;
      } else {
        throw ParseError(e.line, k + ": expected figure8, constant_velocity or stationary");
      }
    };
    num("profile.amplitude_x", [](ScenarioConfig& c) -> double& { return c.profile.amplitude_x; });
    num("profile.amplitude_y", [](ScenarioConfig& c) -> double& { return c.profile.amplitude_y; });
    num("profile.angular_rate", [](ScenarioConfig& c) -> double& { return c.profile.angular_rate; });
    t["profile.center"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.profile.center = to_vec3(e, k);
    };
    num("profile.pull_gain", [](ScenarioConfig& c) -> double& { return c.profile.pull_gain; });
    num("profile.descent_start",
        [](ScenarioConfig& c) -> double& { return c.profile.descent.start_time; });
    num("profile.descent_duration",
        [](ScenarioConfig& c) -> double& { return c.profile.descent.duration; });
    num("profile.final_clearance",
        [](ScenarioConfig& c) -> double& { return c.profile.descent.final_clearance; });

    num("sim.duration", [](ScenarioConfig& c) -> double& { return c.duration; });
    num("sim.step", [](ScenarioConfig& c) -> double& { return c.step; });
    t["sim.seed"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      char* end = nullptr;
      errno = 0;
      const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
      if (e.value.empty() || e.value[0] == '-' || end != e.value.c_str() + e.value.size() ||
          errno == ERANGE) {
        throw ParseError(e.line, k + ": expected a non-negative 64-bit integer");
      }
      c.seed = v;
    };
    t["sim.mode"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      if (e.value == "output_feedback") {
        c.mode = ControlMode::output_feedback;
      } else if (e.value == "state_feedback") {
        c.mode = ControlMode::state_feedback;
      } else {
        throw ParseError(e.line, k + ": expected output_feedback or state_feedback");
      }
    };
    t["sim.initial_position"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.initial_state.p1 = to_vec3(e, k);
    };
    t["sim.initial_velocity"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.initial_state.p2 = to_vec3(e, k);
    };
    t["sim.initial_attitude"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.initial_state.theta1 = to_vec3(e, k);
    };
    t["sim.initial_rates"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.initial_state.theta2 = to_vec3(e, k);
    };
    num("sim.divergence_limit", [](ScenarioConfig& c) -> double& { return c.divergence_limit; });
    t["sim.disturbance_rho"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.disturbance.sigma_rho = to_signal(e, k);
    };
    t["sim.disturbance_xi"] = [](ScenarioConfig& c, const Entry& e, const std::string& k) {
      c.disturbance.sigma_xi = to_signal(e, k);
    };

    num("noise.position", [](ScenarioConfig& c) -> double& { return c.noise.position; });
    num("noise.orientation", [](ScenarioConfig& c) -> double& { return c.noise.orientation; });
    num("noise.vehicle_position",
        [](ScenarioConfig& c) -> double& { return c.noise.vehicle_position; });
    // Applied separately, see Pending.
    t["profile.vehicle_position"] = nullptr;
    t["profile.vehicle_velocity"] = nullptr;
    return t;
  }();
  return table;
}

const char* const kSections[] = {"vehicle", "gains", "observer", "profile", "sim", "noise"};

}  // namespace

std::vector<std::string> bundled_config_names() { return {"paper_landing", "hover_smoke", "sweep_default"}; }

std::optional<std::string> bundled_config(std::string_view name) {
  if (name == "paper_landing") return std::string(kPaperLanding);
  if (name == "hover_smoke") return std::string(kHoverSmoke);
  if (name == "sweep_default") return std::string(kSweepDefault);
  return std::nullopt;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ScenarioConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  // Ordered by first appearance so later assignments win deterministically.
  std::vector<std::pair<std::string, Entry>> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const char* s : kSections) known = known || section == s;
      if (!known) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!setters().count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
    entries.emplace_back(key, Entry{trim(line.substr(eq + 1)), line_no});
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ParseError(0, "override '" + o + "' is not key=value");
    const std::string key = trim(o.substr(0, eq));
    if (!setters().count(key)) throw ParseError(0, "unknown override key '" + key + "'");
    entries.emplace_back(key, Entry{trim(o.substr(eq + 1)), 0});
  }

  ScenarioConfig cfg;
  Pending pending;
  for (const auto& [key, entry] : entries) {
    if (key == "profile.vehicle_position") {
      pending.vehicle_position = entry;
    } else if (key == "profile.vehicle_velocity") {
      pending.vehicle_velocity = entry;
    } else {
      setters().at(key)(cfg, entry, key);
    }
  }

  // Vehicle initial state: on the curve for figure8, at rest otherwise.
  if (cfg.profile.kind == TrajectoryKind::figure8) {
    const auto c = figure8_curve(0.0, cfg.profile);
    cfg.initial_vehicle.xc1 = c[0];
    cfg.initial_vehicle.xc2 = c[1];
  } else {
    cfg.initial_vehicle.xc1 = cfg.profile.center;
    cfg.initial_vehicle.xc2 = Vec3::Zero();
  }
  if (pending.vehicle_position) {
    cfg.initial_vehicle.xc1 = to_vec3(*pending.vehicle_position, "profile.vehicle_position");
  }
  if (pending.vehicle_velocity) {
    cfg.initial_vehicle.xc2 = to_vec3(*pending.vehicle_velocity, "profile.vehicle_velocity");
  }
  if (cfg.profile.kind == TrajectoryKind::stationary && !cfg.initial_vehicle.xc2.isZero()) {
    throw ValidationError("profile.vehicle_velocity", "zero for a stationary vehicle");
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& source, const std::vector<std::string>& overrides) {
  if (auto text = bundled_config(source)) return parse_config(*text, overrides);
  std::ifstream f(source);
  if (!f) throw Error("cannot read config '" + source + "' (not a file or bundled name)");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace ehgo
