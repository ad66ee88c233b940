#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>

#include "swinglab/errors.hpp"
#include "swinglab/io.hpp"
#include "swinglab/scenario_lab.hpp"
#include "swinglab/simulator.hpp"

using namespace swinglab;

TEST_CASE("number formatting round-trips every double") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 20000; ++k) {
    const double x = std::bit_cast<double>(rng());
    if (!std::isfinite(x)) continue;
    CHECK(std::bit_cast<std::uint64_t>(parse_double(format_double(x))) == std::bit_cast<std::uint64_t>(x));
  }
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(parse_double(format_double(inf)) == inf);
  CHECK(parse_double(" 0.25 ") == 0.25);
  CHECK_THROWS_AS(parse_double("0.25x"), ParseError);
  CHECK_THROWS_AS(parse_double(""), ParseError);
}

TEST_CASE("random scenarios round-trip through the file format") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    Scenario s = builtin_case(all_cases()[k % 14]);
    s.name = "random_" + std::to_string(k);
    s.network.y_s = {u(rng) * 0.1, -1.0 - 3.0 * u(rng)};
    s.network.u_g = Phasor::from_polar(1.0, u(rng));
    s.network.z_base_ohm = 10.0 + 100.0 * u(rng);
    s.sg.d_pu = 20.0 * u(rng);
    s.ibr.sigma_pu = 1.2 * u(rng);
    s.ibr.recovery_rate_pu_per_s = k % 3 ? 0.1 + u(rng) : std::numeric_limits<double>::infinity();
    s.fault.lambda = u(rng);
    s.fault.enabled = k % 5 != 0;
    s.fault.post_fault_topology = k % 2 ? PostFaultTopology::TripCircuit : PostFaultTopology::RestoreFull;
    s.dt_s = 1e-3 * (0.5 + u(rng));
    CHECK(parse_scenario(format_scenario(s)) == s);
  }
}

TEST_CASE("scenario parse errors") {
  SUBCASE("unknown key names the key and line") {
    try {
      parse_scenario("name = x\nfault.r_f_ohms = 5\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.field() == "fault.r_f_ohms");
    }
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_AS(parse_scenario("sg.d_pu = 1\nsg.d_pu = 2\n"), ParseError);
  }
  SUBCASE("bad value") {
    CHECK_THROWS_AS(parse_scenario("sg.d_pu = ten\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario("fault.enabled = maybe\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario("fault.post_fault_topology = reclose\n"), ParseError);
  }
  SUBCASE("missing equals") {
    CHECK_THROWS_AS(parse_scenario("sg.d_pu 2\n"), ParseError);
  }
  SUBCASE("comments, blanks and defaults") {
    const Scenario s = parse_scenario("# a comment\n\nsg.d_pu = 3  # inline\n");
    CHECK(s.sg.d_pu == 3.0);
    CHECK(s.ibr.dispatch_mw == Scenario{}.ibr.dispatch_mw);
  }
  SUBCASE("missing file names the path") {
    try {
      load_scenario("/nonexistent/dir/scenario.txt");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/dir/scenario.txt") != std::string::npos);
    }
  }
}

TEST_CASE("trace csv header and exact round trip") {
  const std::vector<std::string> expected = {"t_s",      "delta_rad", "domega_pu",     "p_e_pu",
                                             "p_sg_pu",  "p_w_pu",    "i_d_pu",        "i_q_pu",
                                             "u_pcc_mag_pu", "u_pcc_ang_rad", "mode", "v_pu"};
  CHECK(trace_columns() == expected);

  const Trace t = run_simulation(builtin_case({7, 1}));
  std::stringstream ss;
  write_trace_csv(ss, t.samples);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t_s,delta_rad,domega_pu,p_e_pu,p_sg_pu,p_w_pu,i_d_pu,i_q_pu,u_pcc_mag_pu,u_pcc_ang_rad,mode,v_pu");
  ss.seekg(0);
  const auto back = read_trace_csv(ss);
  CHECK(back == t.samples);
}

TEST_CASE("trace csv errors") {
  SUBCASE("missing column") {
    std::istringstream in("t_s,delta_rad,domega_pu,p_e_pu,p_sg_pu,p_w_pu,i_d_pu,i_q_pu,u_pcc_mag_pu,mode,v_pu\n");
    try {
      read_trace_csv(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("u_pcc_ang_rad") != std::string::npos);
    }
  }
  SUBCASE("non-increasing time") {
    std::stringstream ss;
    TraceSample a;
    a.t = 0.1;
    TraceSample b = a;
    write_trace_csv(ss, std::vector<TraceSample>{a, b});
    CHECK_THROWS_AS(read_trace_csv(ss), ParseError);
  }
  SUBCASE("bad mode") {
    std::stringstream ss;
    write_trace_csv(ss, std::vector<TraceSample>{TraceSample{}});
    std::string text = ss.str();
    text.replace(text.find("Normal"), 6, "Parked");
    std::istringstream in(text);
    CHECK_THROWS_AS(read_trace_csv(in), ParseError);
  }
}
