#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qmcomb/io.hpp"

using namespace qmcomb;
using io::json;

TEST_CASE("circuit json: example file parses") {
  const auto j = json::parse(R"({ "unit": "Delta",
    "elements": [
      { "type": "block", "center": 0.0, "delta": 1.0, "k": 3.47, "g": 0.29 },
      { "type": "comb", "detunings": [-1.5, -0.5, 0.5, 1.5], "k": 4.26 } ] })");
  const auto c = io::circuit_from_json(j);
  REQUIRE(c.elements.size() == 2);
  CHECK(std::get<Block<double>>(c.elements[0]) == Block<double>{0, 1, 3.47, 0.29});
  CHECK(std::get<Comb<double>>(c.elements[1]) == Comb<double>{{-1.5, -0.5, 0.5, 1.5}, 4.26});
}

TEST_CASE("circuit json: random circuits round trip exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    Circuit<double> c;
    const int n = 1 + int(u(rng) * 4);
    for (int e = 0; e < n; ++e) {
      if (u(rng) < 0.6) {
        c.elements.emplace_back(Block<double>{10 * u(rng) - 5, 0.1 + 2 * u(rng), 10 * u(rng), 5 * u(rng)});
      } else {
        Comb<double> cb{{}, 10 * u(rng)};
        double d = -5 * u(rng);
        for (int r = 0; r < 1 + int(u(rng) * 5); ++r) cb.detunings.push_back(d += 0.01 + u(rng));
        c.elements.emplace_back(cb);
      }
    }
    const std::string text = io::dump(io::circuit_to_json(c));
    CHECK(io::circuit_from_json(json::parse(text)) == c);
  }
}

TEST_CASE("circuit json: schema errors") {
  auto bad = [](const char* s) { return io::circuit_from_json(json::parse(s)); };
  CHECK_THROWS_AS(bad(R"({"unit": "GHz", "elements": [{"type": "block", "k": 1}]})"), InputError);
  CHECK_THROWS_AS(bad(R"({"elements": []})"), InputError);
  CHECK_THROWS_AS(bad(R"({"elements": [{"type": "ring", "k": 1}]})"), InputError);
  CHECK_THROWS_AS(bad(R"({"elements": [{"type": "block"}]})"), InputError);
  CHECK_THROWS_AS(bad(R"({"elements": [{"type": "block", "k": -1}]})"), InputError);
  CHECK_THROWS_AS(bad(R"({"elements": [{"type": "comb", "k": 1, "detunings": [1, 0]}]})"), InputError);
  CHECK_THROWS_AS(bad(R"([1, 2])"), InputError);
}

TEST_CASE("search config json") {
  const auto s = io::search_config_from_json(
      json::parse(R"({ "bounds": {"k": [0.01, 10], "g": [0, 5]}, "starts": 25, "tol": 1e-4, "budget": 100000 })"));
  CHECK(s.k_bounds == std::pair{0.01, 10.0});
  CHECK(s.g_bounds == std::pair{0.0, 5.0});
  CHECK(s.starts == 25);
  CHECK(s.tol == 1e-4);
  CHECK(s.budget == 100000);
  CHECK_THROWS_AS(io::search_config_from_json(json::parse(R"({"bounds": {"k": [1]}})")), InputError);
  CHECK_THROWS_AS(io::search_config_from_json(json::parse(R"({"starts": "many"})")), InputError);
}

TEST_CASE("number formatting: 12 significant digits, period separator") {
  CHECK(io::format_number(3.141592653589793) == "3.14159265359");
  CHECK(io::format_number(-0.0) == "0");
  CHECK(io::format_number(1e-20) == "1e-20");
  CHECK(io::format_number(2.5) == "2.5");
}

TEST_CASE("response csv layout") {
  const Circuit<double> c{Block<double>{0, 1, 3.47, 0.29}};
  const auto r = spectral_response(c, FrequencyGrid<double>::symmetric_around_zero(1, 5));
  const auto p = delay_profile(r);
  std::istringstream in(io::response_csv(r, p));
  std::string line;
  std::getline(in, line);
  CHECK(line == "nu,re_S,im_S,phase_unwrapped,T,T_rel");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
  }
  CHECK(rows == 5);

  const Circuit<double> off{Block<double>{0, 1, 0, 0}};
  const auto r0 = spectral_response(off, FrequencyGrid<double>::symmetric_around_zero(1, 3));
  const auto csv = io::response_csv(r0, delay_profile(r0));
  CHECK(csv.find("0,1,0,0,0,\n") != std::string::npos);
}

TEST_CASE("waveform csv layout") {
  Waveform w{0.0, 0.5, Eigen::VectorXcd(2)};
  w.samples << std::complex<double>(1, -2), std::complex<double>(0.25, 0);
  CHECK(io::waveform_csv(w) == "t,re_a,im_a\n0,1,-2\n0.5,0.25,0\n");
}

TEST_CASE("atomic write replaces the target") {
  const auto dir = std::filesystem::temp_directory_path() / "qmcomb_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "out.json";
  io::write_atomic(path, "first\n");
  io::write_atomic(path, "second\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing file is an input error") {
  CHECK_THROWS_AS(io::read_circuit("/nonexistent/circuit.json"), InputError);
}
