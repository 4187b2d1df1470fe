#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "support/approx.hpp"
#include "support/subprocess.hpp"
#include "syncstab/config_io.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/textio.hpp"

using namespace syncstab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SYNCSTAB_CLI_BIN;
const fs::path kExamples = SYNCSTAB_EXAMPLES_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_out") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string low_voltage_config() {
  return (kExamples / "low_voltage.json").string();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config ingestion") {
  SUBCASE("bundled configs parse and validate") {
    const auto a = load_config(kExamples / "low_voltage.json");
    CHECK(a.params.Rs == doctest::Approx(0.075));
    CHECK(a.params.Ls == doctest::Approx(0.00227));  // "2.27 mH"
    CHECK(a.params.K == doctest::Approx(5000.0));    // "5 kA"
    CHECK(a.params.Tm == doctest::Approx(31.69));    // "31.69 Nm"
    const auto b = load_config(kExamples / "high_voltage.json");
    CHECK(b.params.Tm == doctest::Approx(1830.0));   // "1.83 kNm"
  }
  SUBCASE("quantity suffixes") {
    CHECK(parse_quantity("9 kW") == doctest::Approx(9000.0));
    CHECK(parse_quantity("15 kVAr") == doctest::Approx(15000.0));
    CHECK(parse_quantity("2.27mH") == doctest::Approx(0.00227));
    CHECK(parse_quantity("14.3 kAH") == doctest::Approx(14300.0));
    CHECK(parse_quantity("-3.83 MW") == doctest::Approx(-3.83e6));
    CHECK(parse_quantity("42") == doctest::Approx(42.0));
    CHECK_THROWS_AS(parse_quantity("5 bogus"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("pear"), ConfigError);
  }
  SUBCASE("missing and unknown keys rejected") {
    CHECK_THROWS_AS(parse_config_text(R"({"Rs": 1.0})"), ConfigError);
    auto text = read_text_file(kExamples / "low_voltage.json");
    text.insert(text.rfind('}'), ", \"bogus\": 1");
    CHECK_THROWS_AS(parse_config_text(text), ConfigError);
  }
  SUBCASE("invariant violations rejected") {
    auto cfg = json::parse(read_text_file(kExamples / "low_voltage.json"));
    cfg["umin"] = 7.0;  // above umax
    CHECK_THROWS_AS(parse_config_text(cfg.dump()), ConfigError);
  }
  SUBCASE("hash depends on values, not formatting") {
    const auto a = load_config(kExamples / "low_voltage.json");
    auto reformatted = json::parse(read_text_file(kExamples / "low_voltage.json"));
    const auto b = parse_config_text(reformatted.dump());  // minified
    CHECK(param_hash(a) == param_hash(b));
    auto c = b;
    c.params.Qset = 1.0;
    CHECK(param_hash(a) != param_hash(c));
  }
}

TEST_CASE("equilibria subcommand output") {
  const auto dir = fresh_dir("equilibria");
  const auto res = test::run_cli(
      {kCli, "equilibria", "--config", low_voltage_config(), "--out",
       dir.string()},
      dir);
  REQUIRE(res.exit_code == 0);

  const auto doc = json::parse(read_text_file(dir / "equilibria.json"));
  CHECK(doc["kind"] == "four_points");
  CHECK(doc["points"].size() == 4);
  CHECK(doc["phi_deg"].get<double>() == test::near(83.99, 0.01));
  CHECK(doc["P_r"].get<double>() / 1e3 == test::near(9.00, 0.01));
  CHECK(doc["P_l"].get<double>() / 1e3 ==
        test::near(-93.64, 0.01));
  bool saw_right = false;
  for (const auto& pt : doc["points"]) {
    if (pt["branch"] == "right") {
      saw_right = true;
      CHECK(pt["stability"] == "stable");
      CHECK(pt["i_f"].get<double>() == test::near(0.54, 0.01));
      CHECK(pt["eigenvalues"].size() == 5);
    }
    if (pt["branch"] == "left") {
      CHECK(pt["stability"] == "unstable");
    }
  }
  CHECK(saw_right);

  const auto manifest = json::parse(read_text_file(dir / "manifest.json"));
  CHECK(manifest["subcommand"] == "equilibria");
  CHECK(manifest["param_hash"] == doc["param_hash"]);
  CHECK(manifest["outputs"][0] == "equilibria.json");
}

TEST_CASE("geometry subcommand output") {
  const auto dir = fresh_dir("geometry");
  const auto res = test::run_cli(
      {kCli, "geometry", "--config", low_voltage_config(), "--out",
       dir.string()},
      dir);
  REQUIRE(res.exit_code == 0);
  const auto doc = json::parse(read_text_file(dir / "geometry.json"));
  CHECK(doc["C"]["P"].get<double>() / 1e3 ==
        test::near(-42.32, 0.01));
  CHECK(doc["r"].get<double>() / 1e3 == test::near(51.32, 0.01));
  CHECK(doc["orientation"] == "M_right_of_C");
  CHECK(doc["If_plus_interval"].size() == 2);

  // CSV: header comment, column header, 512 samples x 2 branches
  const auto csv = read_text_file(dir / "geometry_samples.csv");
  CHECK(csv.rfind("# param_hash=", 0) == 0);
  CHECK(csv.find("i_f,branch,P,Q,delta_deg\n") != std::string::npos);
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 2 + 1024);
}

TEST_CASE("three reference torques give three distinct circles") {
  // the published interval endpoints for the second and third setpoints
  const struct {
    double tm;
    double lo, hi;
  } cases[] = {{261.64, 2.10, 5.56}, {614.60, 3.78, 7.24}};
  for (const auto& c : cases) {
    auto cfg = json::parse(read_text_file(kExamples / "low_voltage.json"));
    cfg["Tm"] = c.tm;
    const auto dir = fresh_dir("geometry_tm");
    const auto cfg_path = dir / "config.json";
    write_text_file(cfg_path, cfg.dump());
    const auto res = test::run_cli({kCli, "geometry", "--config",
                                    cfg_path.string(), "--out", dir.string()},
                                   dir);
    REQUIRE(res.exit_code == 0);
    const auto doc = json::parse(read_text_file(dir / "geometry.json"));
    CHECK(doc["if_minus"].get<double>() == test::near(c.lo, 0.01));
    CHECK(doc["if_plus"].get<double>() == test::near(c.hi, 0.01));
  }
}

TEST_CASE("geometry handles the zero-torque half-open interval") {
  const auto dir = fresh_dir("geometry_tm0");
  auto cfg = json::parse(read_text_file(kExamples / "low_voltage.json"));
  cfg["Tm"] = 0.0;
  const auto cfg_path = dir / "config.json";
  write_text_file(cfg_path, cfg.dump());
  const auto res = test::run_cli(
      {kCli, "geometry", "--config", cfg_path.string(), "--out", dir.string()},
      dir);
  REQUIRE(res.exit_code == 0);
  const auto doc = json::parse(read_text_file(dir / "geometry.json"));
  // the circle passes through the origin: r = |C|
  CHECK(doc["r"].get<double>() ==
        doctest::Approx(-doc["C"]["P"].get<double>()).epsilon(1e-9));
  CHECK(doc["if_minus"].get<double>() == 0.0);
  // samples exist and stay strictly inside the half-open interval
  const auto csv = read_text_file(dir / "geometry_samples.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 1024);
}

TEST_CASE("constant-field-current map order flag") {
  const auto dir = fresh_dir("map_order4");
  const auto res = test::run_cli(
      {kCli, "stability-map", "--config", low_voltage_config(), "--out",
       dir.string(), "--ktilde", "14.3kAH", "--grid", "9x9", "--order", "4"},
      dir);
  REQUIRE(res.exit_code == 0);
  REQUIRE(fs::exists(dir / "stability_map_order4_ktilde14300.csv"));
  const auto csv =
      read_text_file(dir / "stability_map_order4_ktilde14300.csv");
  CHECK(csv.find("# order=4") != std::string::npos);
  CHECK(csv.find(",stable,") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across repeated runs") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  for (const auto& dir : {dir1, dir2}) {
    const auto res = test::run_cli(
        {kCli, "equilibria", "--config", low_voltage_config(), "--out",
         dir.string()},
        dir);
    REQUIRE(res.exit_code == 0);
  }
  CHECK(read_text_file(dir1 / "equilibria.json") ==
        read_text_file(dir2 / "equilibria.json"));

  // a small sweep is deterministic too, including with threads
  const auto dir3 = fresh_dir("det3");
  const auto dir4 = fresh_dir("det4");
  for (const auto& [dir, threads] :
       {std::pair{dir3, "1"}, std::pair{dir4, "4"}}) {
    const auto res = test::run_cli(
        {kCli, "stability-map", "--config", low_voltage_config(), "--out",
         dir.string(), "--ktilde", "14.3kAH", "--grid", "21x21", "--threads",
         threads},
        dir);
    REQUIRE(res.exit_code == 0);
  }
  CHECK(read_text_file(dir3 / "stability_map_order5_ktilde14300.csv") ==
        read_text_file(dir4 / "stability_map_order5_ktilde14300.csv"));
}

TEST_CASE("stability-map emits one file per gain with the declared schema") {
  const auto dir = fresh_dir("map");
  const auto res = test::run_cli(
      {kCli, "stability-map", "--config", low_voltage_config(), "--out",
       dir.string(), "--ktilde", "2.5kAH,14.3kAH", "--grid", "15x15"},
      dir);
  REQUIRE(res.exit_code == 0);
  for (const char* name : {"stability_map_order5_ktilde2500.csv",
                           "stability_map_order5_ktilde14300.csv"}) {
    REQUIRE(fs::exists(dir / name));
    const auto csv = read_text_file(dir / name);
    CHECK(csv.find("P_set,Q_set,verdict,max_real,i_f_e,delta_e_deg,in_sector,"
                   "g_prime_sign\n") != std::string::npos);
    CHECK(csv.find(",stable,") != std::string::npos);
  }
  const auto manifest = json::parse(read_text_file(dir / "manifest.json"));
  CHECK(manifest["outputs"].size() == 2);
}

TEST_CASE("stability-map tags infeasible cells on a detuned config") {
  // A nominal-grid config never produces infeasible setpoints (the derived
  // torque puts the setpoint on the circle); detune the voltage droop.
  const auto dir = fresh_dir("map_detuned");
  auto cfg = json::parse(read_text_file(kExamples / "low_voltage.json"));
  cfg["Dq"] = 300.0;
  cfg["vset"] = 650.538303;
  const auto cfg_path = dir / "detuned.json";
  write_text_file(cfg_path, cfg.dump());
  const auto res = test::run_cli(
      {kCli, "stability-map", "--config", cfg_path.string(), "--out",
       dir.string(), "--ktilde", "14.3kAH", "--grid", "15x15"},
      dir);
  REQUIRE(res.exit_code == 0);
  const auto csv =
      read_text_file(dir / "stability_map_order5_ktilde14300.csv");
  CHECK(csv.find("no-equilibrium") != std::string::npos);
  CHECK(csv.find(",stable,") != std::string::npos);
}

TEST_CASE("simulate subcommand writes trajectory and events") {
  const auto dir = fresh_dir("simulate");
  const auto res = test::run_cli(
      {kCli, "simulate", "--config", low_voltage_config(), "--out",
       dir.string(), "--tend", "1.0", "--stride", "100"},
      dir);
  REQUIRE(res.exit_code == 0);
  const auto csv = read_text_file(dir / "trajectory.csv");
  CHECK(csv.find("t,i_d,i_q,w,delta,i_f,P,Q\n") != std::string::npos);
  const auto ev = json::parse(read_text_file(dir / "sim_events.json"));
  CHECK(ev["blowup_time"].is_null());
  CHECK(ev["events"].is_array());
}

TEST_CASE("exit codes") {
  SUBCASE("missing config file -> 4") {
    const auto dir = fresh_dir("exit4");
    const auto res = test::run_cli(
        {kCli, "equilibria", "--config", "/nonexistent.json", "--out",
         dir.string()},
        dir);
    CHECK(res.exit_code == 4);
  }
  SUBCASE("bad config content -> 4") {
    const auto dir = fresh_dir("exit4b");
    const auto cfg_path = dir / "bad.json";
    write_text_file(cfg_path, "{\"Rs\": 1.0}");
    const auto res = test::run_cli({kCli, "equilibria", "--config",
                                    cfg_path.string(), "--out", dir.string()},
                                   dir);
    CHECK(res.exit_code == 4);
  }
  SUBCASE("infeasible reactive setpoint -> 2 and names the inequality") {
    const auto dir = fresh_dir("exit2");
    auto cfg = json::parse(read_text_file(kExamples / "low_voltage.json"));
    cfg["Qset"] = 1e9;  // far beyond the circle radius
    const auto cfg_path = dir / "infeasible.json";
    write_text_file(cfg_path, cfg.dump());
    const auto res = test::run_cli({kCli, "equilibria", "--config",
                                    cfg_path.string(), "--out", dir.string()},
                                   dir);
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("no equilibrium") != std::string::npos);
    CHECK(res.output.find("4 R^2 Qtilde^2") != std::string::npos);
  }
  SUBCASE("unknown flag -> 4") {
    const auto dir = fresh_dir("exit4c");
    const auto res = test::run_cli(
        {kCli, "equilibria", "--config", low_voltage_config(), "--frobnicate"},
        dir);
    CHECK(res.exit_code == 4);
  }
}

TEST_SUITE_END();
