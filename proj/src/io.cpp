#include "swinglab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "swinglab/errors.hpp"

namespace swinglab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(std::string_view text, std::size_t line, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ParseError("expected true or false for " + key + ", got '" + std::string(text) + "'", line, key);
}

std::string_view topology_name(PostFaultTopology t) {
  return t == PostFaultTopology::TripCircuit ? "trip_circuit" : "restore_full";
}

struct ScenarioKey {
  std::string key;
  std::function<std::string(const Scenario&)> get;
  std::function<void(Scenario&, std::string_view, std::size_t)> set;
};

ScenarioKey number(std::string key, double Scenario::*outer) {
  return {key, [outer](const Scenario& s) { return format_double(s.*outer); },
          [outer, key](Scenario& s, std::string_view v, std::size_t line) {
            try {
              s.*outer = parse_double(v);
            } catch (const ParseError& e) {
              throw ParseError(e.what() + (" in " + key), line, key);
            }
          }};
}

template <typename Part>
ScenarioKey number(std::string key, Part Scenario::*part, double Part::*field) {
  return {key, [part, field](const Scenario& s) { return format_double(s.*part.*field); },
          [part, field, key](Scenario& s, std::string_view v, std::size_t line) {
            try {
              s.*part.*field = parse_double(v);
            } catch (const ParseError& e) {
              throw ParseError(e.what() + (" in " + key), line, key);
            }
          }};
}

ScenarioKey complex_part(std::string key, Admittance RawNetworkParams::*field, bool imag) {
  return {key,
          [field, imag](const Scenario& s) {
            const Complex z = s.network.*field;
            return format_double(imag ? z.imag() : z.real());
          },
          [field, imag, key](Scenario& s, std::string_view v, std::size_t line) {
            double x;
            try {
              x = parse_double(v);
            } catch (const ParseError& e) {
              throw ParseError(e.what() + (" in " + key), line, key);
            }
            Complex& z = s.network.*field;
            z = imag ? Complex(z.real(), x) : Complex(x, z.imag());
          }};
}

ScenarioKey source_part(std::string key, bool imag) {
  return {key,
          [imag](const Scenario& s) {
            return format_double(imag ? s.network.u_g.im() : s.network.u_g.re());
          },
          [imag, key](Scenario& s, std::string_view v, std::size_t line) {
            double x;
            try {
              x = parse_double(v);
            } catch (const ParseError& e) {
              throw ParseError(e.what() + (" in " + key), line, key);
            }
            const Phasor u = s.network.u_g;
            s.network.u_g = imag ? Phasor(u.re(), x) : Phasor(x, u.im());
          }};
}

const std::vector<ScenarioKey>& scenario_keys() {
  static const std::vector<ScenarioKey> keys = [] {
    std::vector<ScenarioKey> k;
    k.push_back({"name", [](const Scenario& s) { return s.name; },
                 [](Scenario& s, std::string_view v, std::size_t) { s.name = std::string(v); }});
    k.push_back(complex_part("network.y_s_re_pu", &RawNetworkParams::y_s, false));
    k.push_back(complex_part("network.y_s_im_pu", &RawNetworkParams::y_s, true));
    k.push_back(complex_part("network.y_g_re_pu", &RawNetworkParams::y_g, false));
    k.push_back(complex_part("network.y_g_im_pu", &RawNetworkParams::y_g, true));
    k.push_back(complex_part("network.y_w_re_pu", &RawNetworkParams::y_w, false));
    k.push_back(complex_part("network.y_w_im_pu", &RawNetworkParams::y_w, true));
    k.push_back(source_part("network.u_g_re_pu", false));
    k.push_back(source_part("network.u_g_im_pu", true));
    k.push_back(number("network.f_g_hz", &Scenario::network, &RawNetworkParams::f_g_hz));
    k.push_back(number("network.s_base_mva", &Scenario::network, &RawNetworkParams::s_base_mva));
    k.push_back(number("network.z_base_ohm", &Scenario::network, &RawNetworkParams::z_base_ohm));
    k.push_back(number("sg.t_j_s", &Scenario::sg, &SgConfig::t_j_s));
    k.push_back(number("sg.d_pu", &Scenario::sg, &SgConfig::d_pu));
    k.push_back(number("sg.x_d_prime_pu", &Scenario::sg, &SgConfig::x_d_prime_pu));
    k.push_back(number("sg.dispatch_mw", &Scenario::sg, &SgConfig::dispatch_mw));
    k.push_back(number("ibr.dispatch_mw", &Scenario::ibr, &IbrConfig::dispatch_mw));
    k.push_back(number("ibr.sigma_pu", &Scenario::ibr, &IbrConfig::sigma_pu));
    k.push_back(number("ibr.recovery_rate_pu_per_s", &Scenario::ibr, &IbrConfig::recovery_rate_pu_per_s));
    k.push_back(number("ibr.k_q_pu_per_pu", &Scenario::ibr, &IbrConfig::k_q));
    k.push_back(number("ibr.u_enter_pu", &Scenario::ibr, &IbrConfig::u_enter_pu));
    k.push_back(number("ibr.u_exit_pu", &Scenario::ibr, &IbrConfig::u_exit_pu));
    k.push_back(number("ibr.i_max_pu", &Scenario::ibr, &IbrConfig::i_max_pu));
    k.push_back({"fault.enabled", [](const Scenario& s) { return std::string(s.fault.enabled ? "true" : "false"); },
                 [](Scenario& s, std::string_view v, std::size_t line) {
                   s.fault.enabled = parse_bool(v, line, "fault.enabled");
                 }});
    k.push_back(number("fault.r_f_ohm", &Scenario::fault, &FaultSpec::r_f_ohm));
    k.push_back(number("fault.lambda", &Scenario::fault, &FaultSpec::lambda));
    k.push_back(number("fault.t_on_s", &Scenario::fault, &FaultSpec::t_on_s));
    k.push_back(number("fault.t_clear_s", &Scenario::fault, &FaultSpec::t_clear_s));
    k.push_back({"fault.post_fault_topology",
                 [](const Scenario& s) { return std::string(topology_name(s.fault.post_fault_topology)); },
                 [](Scenario& s, std::string_view v, std::size_t line) {
                   if (v == "restore_full") {
                     s.fault.post_fault_topology = PostFaultTopology::RestoreFull;
                   } else if (v == "trip_circuit") {
                     s.fault.post_fault_topology = PostFaultTopology::TripCircuit;
                   } else {
                     throw ParseError("expected restore_full or trip_circuit, got '" + std::string(v) + "'",
                                      line, "fault.post_fault_topology");
                   }
                 }});
    k.push_back(number("sim.t_end_s", &Scenario::t_end_s));
    k.push_back(number("sim.dt_s", &Scenario::dt_s));
    return k;
  }();
  return keys;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_scenario(const Scenario& scenario) {
  std::ostringstream os;
  os << "# swinglab scenario\n";
  for (const ScenarioKey& k : scenario_keys()) os << k.key << " = " << k.get(scenario) << '\n';
  return os.str();
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto& keys = scenario_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const ScenarioKey& k) { return k.key == key; });
    if (it == keys.end()) throw ParseError("unknown key '" + key + "'", line_no, key);
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ParseError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")",
                       line_no, key);
    }
    seen.emplace(key, line_no);
    it->set(s, value, line_no);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scenario file '" + path.string() + "'");
  out << format_scenario(scenario);
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "t_s",     "delta_rad", "domega_pu",    "p_e_pu",         "p_sg_pu", "p_w_pu",
      "i_d_pu",  "i_q_pu",    "u_pcc_mag_pu", "u_pcc_ang_rad", "mode",    "v_pu"};
  return cols;
}

void write_trace_csv(std::ostream& out, std::span<const TraceSample> samples) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const TraceSample& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.delta) << ',' << format_double(s.d_omega) << ','
        << format_double(s.p_e) << ',' << format_double(s.p_sg) << ',' << format_double(s.p_w) << ','
        << format_double(s.i_d) << ',' << format_double(s.i_q) << ',' << format_double(s.u_pcc_mag) << ','
        << format_double(s.u_pcc_ang) << ',' << to_string(s.mode) << ',' << format_double(s.v) << '\n';
  }
}

std::vector<TraceSample> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace is empty, expected a header row", 1);
  const std::vector<std::string_view> header = split_csv(line);
  std::vector<std::size_t> index;
  for (const std::string& col : trace_columns()) {
    const auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw ParseError("missing column '" + col + "'", 1, col);
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<TraceSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    const auto num = [&](std::size_t c) {
      try {
        return parse_double(cells[index[c]]);
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " in column '" + trace_columns()[c] + "'", line_no,
                         trace_columns()[c]);
      }
    };
    TraceSample s;
    s.t = num(0);
    s.delta = num(1);
    s.d_omega = num(2);
    s.p_e = num(3);
    s.p_sg = num(4);
    s.p_w = num(5);
    s.i_d = num(6);
    s.i_q = num(7);
    s.u_pcc_mag = num(8);
    s.u_pcc_ang = num(9);
    try {
      s.mode = parse_ibr_mode(cells[index[10]]);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " in column 'mode'", line_no, "mode");
    }
    s.v = num(11);
    if (!out.empty() && !(s.t > out.back().t)) {
      throw ParseError("column 't_s' must be strictly increasing", line_no, "t_s");
    }
    out.push_back(s);
  }
  return out;
}

void write_phase_csv(std::ostream& out, std::span<const TraceSample> samples) {
  out << "t_s,delta_rad,domega_pu,mode\n";
  for (const TraceSample& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.delta) << ',' << format_double(s.d_omega) << ','
        << to_string(s.mode) << '\n';
  }
}

void write_map_csv(std::ostream& out, const StabilityMap& map) {
  for (const AxisRange& a : map.axes) out << to_string(a.axis) << ',';
  out << "outcome,swing_index,classification,max_v_pu\n";
  for (const MapCell& c : map.cells) {
    for (double x : c.coords) out << format_double(x) << ',';
    out << to_string(c.outcome) << ',' << (c.swing_index ? std::to_string(*c.swing_index) : "") << ','
        << to_string(c.classification) << ',' << format_double(c.max_v) << '\n';
  }
}

}  // namespace swinglab
