#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string tmp = (fs::temp_directory_path() / "qthermo_cli_out.txt").string();
  const std::string cmd = std::string(QTHERMO_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(raw);
  std::ifstream is(tmp);
  std::stringstream ss;
  ss << is.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "qthermo_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream os(p);
  os << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kPumpConfig = R"({
  "command": "pump",
  "field_map": {"kind": "planar-xz"},
  "baths": [
    {"label": "l", "axis": [0,0,1], "strength": 0.02, "temperature_energy": 1.0},
    {"label": "r", "axis": [1,0,0], "strength": 0.02, "temperature_energy": 1.0}
  ],
  "protocol": {"kind": "ellipse", "center": [1.0, 1.0], "radii": [0.5, 0.35],
               "duration_time": 80.0, "closed": true},
  "seed": 7,
  "tolerances": {"rel": 1e-6}
})";

}  // namespace

TEST_CASE("pump scenario produces the expected artifacts and is reproducible") {
  const auto cfg = write_config("pump.json", kPumpConfig);
  const fs::path out1 = fs::temp_directory_path() / "qthermo_cli_test" / "out1";
  const fs::path out2 = fs::temp_directory_path() / "qthermo_cli_test" / "out2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  const auto r1 = run_cli("run " + cfg.string() + " --out-dir " + out1.string());
  CHECK(r1.code == 0);
  REQUIRE(fs::exists(out1 / "pump.csv"));
  REQUIRE(fs::exists(out1 / "run_manifest.json"));
  const std::string csv = slurp(out1 / "pump.csv");
  CHECK(csv.find("Q_pump") != std::string::npos);
  CHECK(csv.find("stokes_residual") != std::string::npos);

  const auto r2 = run_cli("run " + cfg.string() + " --out-dir " + out2.string());
  CHECK(r2.code == 0);
  // byte-identical data files across identical config + seed
  CHECK(slurp(out1 / "pump.csv") == slurp(out2 / "pump.csv"));
}

TEST_CASE("chern sweep reproduces the case table") {
  const auto cfg = write_config("chern.json", R"({
    "command": "chern",
    "field_map": {"kind": "synthetic-lattice", "B0": 1.0, "delta": 0.5},
    "chern": {"resolution": 80, "deltas": [-0.5, 0.0, 0.5]},
    "seed": 1
  })");
  const fs::path out = fs::temp_directory_path() / "qthermo_cli_test" / "chern_out";
  fs::remove_all(out);
  const auto r = run_cli("run " + cfg.string() + " --out-dir " + out.string());
  CHECK(r.code == 0);
  const std::string csv = slurp(out / "chern.csv");
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  double deltas[3], C[3];
  int flag[3];
  for (int i = 0; i < 3; ++i) {
    std::getline(ss, line);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::stringstream ls(line);
    int excl;
    ls >> deltas[i] >> C[i] >> flag[i] >> excl;
  }
  CHECK(deltas[0] == doctest::Approx(-0.5));
  CHECK(C[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(flag[0] == 0);
  CHECK(C[1] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(flag[1] == 1);
  CHECK(C[2] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("malformed config exits 2 without artifacts") {
  const auto cfg = write_config("bad.json", R"({"command": "pump", "field_map": {"kind": "nope"}})");
  const fs::path out = fs::temp_directory_path() / "qthermo_cli_test" / "bad_out";
  fs::remove_all(out);
  const auto r = run_cli("run " + cfg.string() + " --out-dir " + out.string());
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("validate: clean pass, typo suggestion, positivity violation") {
  const auto good = write_config("good.json", kPumpConfig);
  CHECK(run_cli("validate " + good.string()).code == 0);

  const auto typo = write_config("typo.json", R"({
    "command": "transport",
    "field_map": {"kind": "planar-xz"},
    "baths": [{"label": "l", "axis": [0,0,1], "strength": 0.02, "temprature": 1.0}]
  })");
  const auto rt = run_cli("validate " + typo.string());
  CHECK(rt.code == 2);
  CHECK(rt.output.find("temprature") != std::string::npos);
  CHECK(rt.output.find("temperature_energy") != std::string::npos);

  const auto neg = write_config("neg.json", R"({
    "command": "transport",
    "field_map": {"kind": "planar-xz"},
    "baths": [
      {"label": "l", "axis": [0,0,1], "strength": -0.5, "temperature_energy": 1.0},
      {"label": "r", "axis": [1,0,0], "strength": 0.02, "temperature_energy": 1.0}
    ]
  })");
  const auto rn = run_cli("validate " + neg.string());
  CHECK(rn.code == 2);
  CHECK(rn.output.find("strength") != std::string::npos);
  CHECK(rn.output.find(">= 0") != std::string::npos);
}

TEST_CASE("numerical failures surface the module error name in the manifest") {
  // machine analysis of an open curve must refuse with OpenProtocol
  const auto cfg = write_config("numfail.json", R"({
    "command": "machine",
    "field_map": {"kind": "planar-xz"},
    "baths": [
      {"label": "l", "axis": [0,0,1], "strength": 0.02, "temperature_energy": 1.0},
      {"label": "r", "axis": [1,0,0], "strength": 0.02, "temperature_energy": 1.0}
    ],
    "protocol": {"kind": "spline", "duration_time": 50.0, "closed": false,
                 "samples": [[0.0, 0.8, 1.0], [0.3, 1.0, 1.2], [0.6, 1.2, 1.0], [1.0, 1.4, 0.8]]},
    "machine": {"dT_over_T": 0.05}
  })");
  const fs::path out = fs::temp_directory_path() / "qthermo_cli_test" / "numfail_out";
  fs::remove_all(out);
  const auto r = run_cli("run " + cfg.string() + " --out-dir " + out.string());
  CHECK(r.code == 3);
  const std::string manifest = slurp(out / "run_manifest.json");
  CHECK(manifest.find("OpenProtocol") != std::string::npos);
}
