#include "platoon/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

// --- values -----------------------------------------------------------------

struct Node {
  bool is_list = false;
  std::string text;
  std::vector<Node> items;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

  Node parse() {
    Node n = value();
    skip_ws();
    if (pos_ != s_.size()) parse_fail(line_, "trailing characters in value");
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  Node value() {
    skip_ws();
    if (pos_ >= s_.size()) parse_fail(line_, "missing value");
    if (s_[pos_] == '[') {
      ++pos_;
      Node list;
      list.is_list = true;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return list;
      }
      while (true) {
        list.items.push_back(value());
        skip_ws();
        if (pos_ >= s_.size()) parse_fail(line_, "unterminated list");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          return list;
        }
        parse_fail(line_, "expected ',' or ']' in list");
      }
    }
    const std::size_t begin = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '[') ++pos_;
    Node scalar;
    scalar.text = std::string(trim(s_.substr(begin, pos_ - begin)));
    if (scalar.text.empty()) parse_fail(line_, "empty value");
    return scalar;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

struct Entry {
  Node value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::ValidationError, key + ": " + what);
}

double to_double(const Node& n, const std::string& key) {
  if (n.is_list) invalid(key, "expected a number, got a list");
  double out = 0.0;
  const char* b = n.text.data();
  const char* e = b + n.text.size();
  const auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(out)) {
    invalid(key, "'" + n.text + "' is not a finite number");
  }
  return out;
}

long to_integer(const Node& n, const std::string& key) {
  const double d = to_double(n, key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) invalid(key, "expected an integer");
  return static_cast<long>(d);
}

bool to_bool(const Node& n, const std::string& key) {
  if (!n.is_list) {
    if (n.text == "true" || n.text == "1") return true;
    if (n.text == "false" || n.text == "0") return false;
  }
  invalid(key, "expected true or false");
}

std::string to_word(const Node& n, const std::string& key) {
  if (n.is_list) invalid(key, "expected a name, got a list");
  return n.text;
}

std::vector<double> to_list(const Node& n, const std::string& key) {
  if (!n.is_list) return {to_double(n, key)};
  std::vector<double> out;
  for (const Node& item : n.items) out.push_back(to_double(item, key));
  return out;
}

std::vector<std::vector<double>> to_matrix(const Node& n, const std::string& key) {
  if (!n.is_list) invalid(key, "expected a list of rows");
  std::vector<std::vector<double>> out;
  for (const Node& row : n.items) {
    if (!row.is_list) invalid(key, "expected a list of rows");
    out.push_back(to_list(row, key));
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"preset"}},
      {"topology", {"preset", "n", "adjacency", "pinning"}},
      {"vehicle",
       {"m", "tau", "a_f", "rho", "c_d", "c_r", "x_init", "position_offset", "v_init", "a_init"}},
      {"spacing", {"delta_d", "vehicle_length"}},
      {"leader", {"profile", "breakpoints", "x0"}},
      {"disturbance",
       {"v_kind", "v_amplitude", "v_omega", "v_phase", "v_phase_step", "a_kind", "a_amplitude",
        "a_omega", "a_phase", "a_phase_step", "delta_v", "delta_a", "delta_v_bar",
        "delta_a_bar"}},
      {"controller",
       {"k1", "k2", "k3", "eps1", "eps2", "kappa1", "kappa2", "sgn_deadzone", "adaptive_enabled",
        "delta_star_prior"}},
      {"sim", {"dt", "horizon", "log_stride", "seed"}},
  };
  return keys;
}

std::map<std::string, Section> tokenize(std::string_view text) {
  std::map<std::string, Section> sections;
  sections[""];
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') parse_fail(line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().contains(current) || current.empty()) {
        invalid("[" + current + "]", "unknown section (line " + std::to_string(line_no) + ")");
      }
      sections[current];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) parse_fail(line_no, "missing key");
    const std::string qualified = current.empty() ? key : "[" + current + "] " + key;
    if (!known_keys().at(current).contains(key)) {
      invalid(qualified, "unknown key (line " + std::to_string(line_no) + ")");
    }
    Section& section = sections[current];
    if (section.contains(key)) parse_fail(line_no, "duplicate key '" + key + "'");
    section[key] = {ValueParser(line.substr(eq + 1), line_no).parse(), line_no};
  }
  return sections;
}

// Applies `fn(node, qualified_key)` when the key is present.
template <class Fn>
void with(std::map<std::string, Section>& doc, const std::string& section, const std::string& key,
          Fn&& fn) {
  auto& s = doc[section];
  if (auto it = s.find(key); it != s.end()) {
    const std::string qualified = section.empty() ? key : "[" + section + "] " + key;
    fn(it->second.value, qualified);
  }
}

void read_channel(std::map<std::string, Section>& doc, const std::string& prefix,
                  SignalChannel& c) {
  with(doc, "disturbance", prefix + "kind", [&](const Node& n, const std::string& k) {
    const auto kind = parse_signal_kind(to_word(n, k));
    if (!kind) invalid(k, "expected zero, constant or sinusoid");
    c.kind = *kind;
  });
  with(doc, "disturbance", prefix + "amplitude",
       [&](const Node& n, const std::string& k) { c.amplitude = to_double(n, k); });
  with(doc, "disturbance", prefix + "omega", [&](const Node& n, const std::string& k) {
    c.omega = to_double(n, k);
    if (c.omega < 0.0) invalid(k, "must be >= 0");
  });
  with(doc, "disturbance", prefix + "phase",
       [&](const Node& n, const std::string& k) { c.phase = to_double(n, k); });
  with(doc, "disturbance", prefix + "phase_step",
       [&](const Node& n, const std::string& k) { c.phase_step = to_double(n, k); });
}

void require_positive(double x, const std::string& key) {
  if (!(x > 0.0)) invalid(key, "must be > 0");
}

void check_length(const std::vector<double>& v, int n, bool allow_broadcast,
                  const std::string& key) {
  const auto size = static_cast<int>(v.size());
  if (size == n || (allow_broadcast && size == 1)) return;
  invalid(key, "has " + std::to_string(size) + " entries, expected " +
                   (allow_broadcast ? "1 or " : "") + std::to_string(n));
}

void validate_config(const ScenarioConfig& c) {
  if (c.preset != "paper-iv") invalid("preset", "unknown preset '" + c.preset + "'");
  const TopologySpec& t = c.topology;
  int n = t.n;
  if (!t.adjacency.empty()) {
    n = static_cast<int>(t.adjacency.size());
    for (const auto& row : t.adjacency) {
      if (static_cast<int>(row.size()) != n) invalid("[topology] adjacency", "must be square");
    }
    if (static_cast<int>(t.pinning.size()) != n) {
      invalid("[topology] pinning", "must have one entry per follower");
    }
  } else {
    if (!parse_topology_preset(t.preset)) {
      invalid("[topology] preset", "unknown preset '" + t.preset + "'");
    }
    if (t.n < 1) invalid("[topology] n", "must be >= 1");
    if (!t.pinning.empty()) invalid("[topology] pinning", "only valid with explicit adjacency");
  }

  const VehicleParams& v = c.vehicle;
  require_positive(v.m, "[vehicle] m");
  require_positive(v.tau, "[vehicle] tau");
  require_positive(v.a_f, "[vehicle] a_f");
  require_positive(v.rho, "[vehicle] rho");
  require_positive(v.c_d, "[vehicle] c_d");
  require_positive(v.c_r, "[vehicle] c_r");
  if (!c.initial.x_init.empty()) check_length(c.initial.x_init, n, false, "[vehicle] x_init");
  check_length(c.initial.position_offset, n, true, "[vehicle] position_offset");
  check_length(c.initial.v_init, n, true, "[vehicle] v_init");
  check_length(c.initial.a_init, n, true, "[vehicle] a_init");

  require_positive(c.delta_d, "[spacing] delta_d");
  require_positive(c.vehicle_length, "[spacing] vehicle_length");

  if (c.leader.profile == "breakpoints") {
    if (c.leader.breakpoints.size() < 2) {
      invalid("[leader] breakpoints", "needs at least two (t, v) pairs");
    }
  } else if (c.leader.profile != "paper-iv") {
    invalid("[leader] profile", "expected paper-iv or breakpoints");
  } else if (!c.leader.breakpoints.empty()) {
    invalid("[leader] breakpoints", "only valid with profile = breakpoints");
  }

  const ControllerSpec& k = c.controller;
  check_length(k.k1, n, true, "[controller] k1");
  check_length(k.k2, n, true, "[controller] k2");
  check_length(k.k3, n, true, "[controller] k3");
  const auto gain = [n](const std::vector<double>& g, int i) {
    return g.size() == 1 ? g[0] : g[static_cast<std::size_t>(i)];
  };
  for (int i = 0; i < n; ++i) {
    require_positive(gain(k.k1, i), "[controller] k1");
    require_positive(gain(k.k2, i), "[controller] k2");
    require_positive(gain(k.k3, i), "[controller] k3");
    if (!(gain(k.k2, i) > gain(k.k1, i))) {
      invalid("[controller] k2", "must exceed k1 for every vehicle (k2 <= k1 at vehicle " +
                                     std::to_string(i + 1) + ")");
    }
  }
  require_positive(k.eps1, "[controller] eps1");
  require_positive(k.eps2, "[controller] eps2");
  require_positive(k.kappa1, "[controller] kappa1");
  require_positive(k.kappa2, "[controller] kappa2");
  if (k.sgn_deadzone < 0.0) invalid("[controller] sgn_deadzone", "must be >= 0");
  if (k.delta_star_prior < 0.0) invalid("[controller] delta_star_prior", "must be >= 0");

  require_positive(c.sim.dt, "[sim] dt");
  if (!(c.sim.horizon >= c.sim.dt)) invalid("[sim] horizon", "must be >= dt");
  if (c.sim.log_stride < 1) invalid("[sim] log_stride", "must be >= 1");
}

Vec broadcast(const std::vector<double>& v, int n) {
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = v.size() == 1 ? v[0] : v[static_cast<std::size_t>(i)];
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::vector<double> tile(const std::vector<double>& v, int n) {
  if (v.size() == 1) return v;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i) % v.size()];
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text) {
  auto doc = tokenize(text);
  ScenarioConfig c;

  with(doc, "", "preset", [&](const Node& n, const std::string& k) { c.preset = to_word(n, k); });
  if (c.preset != "paper-iv") invalid("preset", "unknown preset '" + c.preset + "'");

  with(doc, "topology", "preset",
       [&](const Node& n, const std::string& k) { c.topology.preset = to_word(n, k); });
  with(doc, "topology", "n", [&](const Node& n, const std::string& k) {
    c.topology.n = static_cast<int>(to_integer(n, k));
  });
  with(doc, "topology", "adjacency",
       [&](const Node& n, const std::string& k) { c.topology.adjacency = to_matrix(n, k); });
  with(doc, "topology", "pinning",
       [&](const Node& n, const std::string& k) { c.topology.pinning = to_list(n, k); });

  const std::pair<const char*, double VehicleParams::*> vehicle_keys[] = {
      {"m", &VehicleParams::m},     {"tau", &VehicleParams::tau}, {"a_f", &VehicleParams::a_f},
      {"rho", &VehicleParams::rho}, {"c_d", &VehicleParams::c_d}, {"c_r", &VehicleParams::c_r}};
  for (const auto& [key, member] : vehicle_keys) {
    with(doc, "vehicle", key,
         [&](const Node& n, const std::string& k) { c.vehicle.*member = to_double(n, k); });
  }
  with(doc, "vehicle", "x_init",
       [&](const Node& n, const std::string& k) { c.initial.x_init = to_list(n, k); });
  with(doc, "vehicle", "position_offset",
       [&](const Node& n, const std::string& k) { c.initial.position_offset = to_list(n, k); });
  with(doc, "vehicle", "v_init",
       [&](const Node& n, const std::string& k) { c.initial.v_init = to_list(n, k); });
  with(doc, "vehicle", "a_init",
       [&](const Node& n, const std::string& k) { c.initial.a_init = to_list(n, k); });

  with(doc, "spacing", "delta_d", [&](const Node& n, const std::string& k) { c.delta_d = to_double(n, k); });
  with(doc, "spacing", "vehicle_length",
       [&](const Node& n, const std::string& k) { c.vehicle_length = to_double(n, k); });

  with(doc, "leader", "profile",
       [&](const Node& n, const std::string& k) { c.leader.profile = to_word(n, k); });
  with(doc, "leader", "x0", [&](const Node& n, const std::string& k) { c.leader.x0 = to_double(n, k); });
  with(doc, "leader", "breakpoints", [&](const Node& n, const std::string& k) {
    for (const auto& row : to_matrix(n, k)) {
      if (row.size() != 2) invalid(k, "each breakpoint is a [t, v] pair");
      c.leader.breakpoints.emplace_back(row[0], row[1]);
    }
  });

  read_channel(doc, "v_", c.disturbance.velocity);
  read_channel(doc, "a_", c.disturbance.accel);
  {
    LumpedBounds b;
    int present = 0;
    const std::pair<const char*, double LumpedBounds::*> bound_keys[] = {
        {"delta_v", &LumpedBounds::delta_v},
        {"delta_a", &LumpedBounds::delta_a},
        {"delta_v_bar", &LumpedBounds::delta_v_bar},
        {"delta_a_bar", &LumpedBounds::delta_a_bar}};
    for (const auto& [key, member] : bound_keys) {
      with(doc, "disturbance", key, [&](const Node& n, const std::string& k) {
        b.*member = to_double(n, k);
        if (b.*member < 0.0) invalid(k, "must be >= 0");
        ++present;
      });
    }
    if (present == 4) {
      c.disturbance.declared = b;
    } else if (present != 0) {
      invalid("[disturbance] delta_v", "declare all four lumped bounds or none");
    }
  }

  with(doc, "controller", "k1", [&](const Node& n, const std::string& k) { c.controller.k1 = to_list(n, k); });
  with(doc, "controller", "k2", [&](const Node& n, const std::string& k) { c.controller.k2 = to_list(n, k); });
  with(doc, "controller", "k3", [&](const Node& n, const std::string& k) { c.controller.k3 = to_list(n, k); });
  const std::pair<const char*, double ControllerSpec::*> controller_keys[] = {
      {"eps1", &ControllerSpec::eps1},
      {"eps2", &ControllerSpec::eps2},
      {"kappa1", &ControllerSpec::kappa1},
      {"kappa2", &ControllerSpec::kappa2},
      {"sgn_deadzone", &ControllerSpec::sgn_deadzone},
      {"delta_star_prior", &ControllerSpec::delta_star_prior}};
  for (const auto& [key, member] : controller_keys) {
    with(doc, "controller", key,
         [&](const Node& n, const std::string& k) { c.controller.*member = to_double(n, k); });
  }
  with(doc, "controller", "adaptive_enabled", [&](const Node& n, const std::string& k) {
    c.controller.adaptive_enabled = to_bool(n, k);
  });

  with(doc, "sim", "dt", [&](const Node& n, const std::string& k) { c.sim.dt = to_double(n, k); });
  with(doc, "sim", "horizon", [&](const Node& n, const std::string& k) { c.sim.horizon = to_double(n, k); });
  with(doc, "sim", "log_stride", [&](const Node& n, const std::string& k) {
    c.sim.log_stride = static_cast<int>(to_integer(n, k));
  });
  with(doc, "sim", "seed", [&](const Node& n, const std::string& k) {
    const long seed = to_integer(n, k);
    if (seed < 0) invalid(k, "must be >= 0");
    c.sim.seed = static_cast<std::uint64_t>(seed);
  });

  validate_config(c);
  build_scenario(c);  // surfaces cross-field problems now rather than at run time
  return c;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string emit_scenario(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "preset = " << c.preset << "\n\n[topology]\n";
  if (c.topology.adjacency.empty()) {
    out << "preset = " << c.topology.preset << "\nn = " << c.topology.n << "\n";
  } else {
    out << "adjacency = [";
    for (std::size_t i = 0; i < c.topology.adjacency.size(); ++i) {
      out << (i > 0 ? ", " : "") << list_text(c.topology.adjacency[i]);
    }
    out << "]\npinning = " << list_text(c.topology.pinning) << "\n";
  }

  const VehicleParams& v = c.vehicle;
  out << "\n[vehicle]\nm = " << format_double(v.m) << "\ntau = " << format_double(v.tau)
      << "\na_f = " << format_double(v.a_f) << "\nrho = " << format_double(v.rho)
      << "\nc_d = " << format_double(v.c_d) << "\nc_r = " << format_double(v.c_r) << "\n";
  out << "x_init = " << list_text(c.initial.x_init) << "\nposition_offset = " << list_text(c.initial.position_offset)
      << "\nv_init = " << list_text(c.initial.v_init)
      << "\na_init = " << list_text(c.initial.a_init) << "\n";

  out << "\n[spacing]\ndelta_d = " << format_double(c.delta_d)
      << "\nvehicle_length = " << format_double(c.vehicle_length) << "\n";

  out << "\n[leader]\nprofile = " << c.leader.profile << "\nx0 = " << format_double(c.leader.x0)
      << "\n";
  if (!c.leader.breakpoints.empty()) {
    out << "breakpoints = [";
    for (std::size_t i = 0; i < c.leader.breakpoints.size(); ++i) {
      out << (i > 0 ? ", " : "") << "[" << format_double(c.leader.breakpoints[i].first) << ", "
          << format_double(c.leader.breakpoints[i].second) << "]";
    }
    out << "]\n";
  }

  out << "\n[disturbance]\n";
  for (const auto& [prefix, ch] :
       {std::pair{"v_", &c.disturbance.velocity}, std::pair{"a_", &c.disturbance.accel}}) {
    out << prefix << "kind = " << to_string(ch->kind) << "\n"
        << prefix << "amplitude = " << format_double(ch->amplitude) << "\n"
        << prefix << "omega = " << format_double(ch->omega) << "\n"
        << prefix << "phase = " << format_double(ch->phase) << "\n"
        << prefix << "phase_step = " << format_double(ch->phase_step) << "\n";
  }
  if (c.disturbance.declared) {
    const LumpedBounds& b = *c.disturbance.declared;
    out << "delta_v = " << format_double(b.delta_v) << "\ndelta_a = " << format_double(b.delta_a)
        << "\ndelta_v_bar = " << format_double(b.delta_v_bar)
        << "\ndelta_a_bar = " << format_double(b.delta_a_bar) << "\n";
  }

  const ControllerSpec& k = c.controller;
  out << "\n[controller]\nk1 = " << list_text(k.k1) << "\nk2 = " << list_text(k.k2)
      << "\nk3 = " << list_text(k.k3) << "\neps1 = " << format_double(k.eps1)
      << "\neps2 = " << format_double(k.eps2) << "\nkappa1 = " << format_double(k.kappa1)
      << "\nkappa2 = " << format_double(k.kappa2)
      << "\nsgn_deadzone = " << format_double(k.sgn_deadzone)
      << "\nadaptive_enabled = " << (k.adaptive_enabled ? "true" : "false")
      << "\ndelta_star_prior = " << format_double(k.delta_star_prior) << "\n";

  out << "\n[sim]\ndt = " << format_double(c.sim.dt) << "\nhorizon = " << format_double(c.sim.horizon)
      << "\nlog_stride = " << c.sim.log_stride << "\nseed = " << c.sim.seed << "\n";
  return out.str();
}

Scenario build_scenario(const ScenarioConfig& c) {
  validate_config(c);
  try {
    Topology topo = c.topology.adjacency.empty()
                        ? Topology::preset(*parse_topology_preset(c.topology.preset), c.topology.n)
                        : [&] {
                            const auto n = static_cast<Eigen::Index>(c.topology.adjacency.size());
                            Mat a(n, n);
                            for (Eigen::Index i = 0; i < n; ++i) {
                              for (Eigen::Index j = 0; j < n; ++j) {
                                a(i, j) = c.topology.adjacency[static_cast<std::size_t>(i)]
                                                              [static_cast<std::size_t>(j)];
                              }
                            }
                            return Topology(a, broadcast(c.topology.pinning, static_cast<int>(n)));
                          }();
    const int n = topo.n();
    SpacingPolicy spacing(c.delta_d, c.vehicle_length);
    LeaderProfile leader = c.leader.profile == "paper-iv" ? LeaderProfile::reference_preset()
                                                          : LeaderProfile(c.leader.breakpoints);

    PlatoonState initial;
    if (c.initial.x_init.empty()) {
      initial.x = Vec::Constant(n, c.leader.x0) - spacing.offsets(n) +
                  broadcast(c.initial.position_offset, n);
    } else {
      initial.x = broadcast(c.initial.x_init, n);
    }
    initial.v = broadcast(c.initial.v_init, n);
    initial.a = broadcast(c.initial.a_init, n);

    ControllerConfig controller;
    controller.k1 = broadcast(c.controller.k1, n);
    controller.k2 = broadcast(c.controller.k2, n);
    controller.k3 = broadcast(c.controller.k3, n);
    controller.eps1 = c.controller.eps1;
    controller.eps2 = c.controller.eps2;
    controller.kappa1 = c.controller.kappa1;
    controller.kappa2 = c.controller.kappa2;
    controller.sgn_deadzone = c.controller.sgn_deadzone;
    controller.adaptive_enabled = c.controller.adaptive_enabled;

    SimConfig sim{c.sim.dt, c.sim.horizon, c.sim.log_stride, c.sim.seed};

    Scenario sc{std::move(topo),
                c.vehicle,
                spacing,
                std::move(leader),
                c.leader.x0,
                std::move(initial),
                DisturbanceModel(n, c.disturbance.velocity, c.disturbance.accel,
                                 c.disturbance.declared),
                std::move(controller),
                sim,
                c.controller.delta_star_prior};
    sc.validate();
    return sc;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    throw Error(ErrorKind::ValidationError, std::string("scenario: ") + e.what());
  }
}

ScenarioConfig resize_scenario(const ScenarioConfig& config, int n) {
  if (!config.topology.adjacency.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "resizing needs a topology preset, not explicit rows");
  }
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "platoon size must be >= 1");
  ScenarioConfig c = config;
  const int base_n = config.topology.n;
  c.topology.n = n;
  if (!config.initial.x_init.empty()) {
    // Per-vehicle position error relative to the formation slot.
    const double pitch = config.delta_d + config.vehicle_length;
    std::vector<double> offsets(static_cast<std::size_t>(base_n));
    for (int i = 0; i < base_n; ++i) {
      offsets[static_cast<std::size_t>(i)] =
          config.initial.x_init[static_cast<std::size_t>(i)] - (config.leader.x0 - (i + 1) * pitch);
    }
    c.initial.x_init.clear();
    c.initial.position_offset = tile(offsets, n);
  } else {
    c.initial.position_offset = tile(config.initial.position_offset, n);
  }
  c.initial.v_init = tile(config.initial.v_init, n);
  c.initial.a_init = tile(config.initial.a_init, n);
  c.controller.k1 = tile(config.controller.k1, n);
  c.controller.k2 = tile(config.controller.k2, n);
  c.controller.k3 = tile(config.controller.k3, n);
  // Declared lumped bounds are N-specific; fall back to aggregation.
  c.disturbance.declared.reset();
  return c;
}

ScenarioTemplate sweep_template(const ScenarioConfig& config) {
  return [config](int n) { return build_scenario(resize_scenario(config, n)); };
}

}  // namespace platoon
