// Drives the built command line tool and checks files and exit codes.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = CLI_PATH;
const std::string data = TEST_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "pulsefront_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("simulate writes csv, snapshots and summary") {
  const fs::path out = scratch("sim");
  CHECK(run("simulate --config " + data + "/sim.ini --out " + out.string() + " --audit") == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "snap_0.csv"));
  CHECK(fs::exists(out / "snap_4.csv"));
  std::ifstream csv(out / "trajectory.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,g,h,mass1,mass2,max1,max2");
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["audit"]["violations"] == 0);
  CHECK(j["run"]["periods"] == 4);
  CHECK(j["config"]["parameters"]["numerics.dt"] == "0.02");
}

TEST_CASE("identical configs give byte-identical outputs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run("simulate --config " + data + "/sim.ini --out " + a.string()) == 0);
  REQUIRE(run("simulate --config " + data + "/sim.ini --out " + b.string()) == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "snap_3.csv") == slurp(b / "snap_3.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("fixed domain simulation") {
  const fs::path out = scratch("fixed");
  CHECK(run("simulate --config " + data + "/sim.ini --fixed -1 1 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["run"]["fixed"] == true);
  CHECK(j["run"]["final"]["h"] == 1.0);
}

TEST_CASE("eigen modes") {
  const fs::path out = scratch("eigen");
  for (const char* mode : {"lambda0", "closed", "floquet", "bracket", "sensitivity"}) {
    const fs::path f = out / (std::string(mode) + ".json");
    CHECK(run("eigen --config " + data + "/sim.ini --mode " + mode + " --out " + f.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(f));
    CHECK(j["lambda"].is_number());
  }
  const auto fl = nlohmann::json::parse(slurp(out / "floquet.json"));
  CHECK(fs::exists(out / fl["eigenfunction_csv"].get<std::string>()));
  CHECK(fl["grid"]["cells"] == 64);
  CHECK(run("eigen --config " + data + "/sim.ini --mode nonsense") == 2);
}

TEST_CASE("periodic modes") {
  const fs::path out = scratch("periodic");
  CHECK(run("periodic --config " + data + "/sim.ini --mode ode-linear --out " + (out / "lin.csv").string()) == 3);
  const std::string bh = (out / "bh.ini").string();
  {
    std::ofstream f(bh);
    f << "[coefficients]\nb = 4\n[harvest]\nrule = beverton-holt\nm = 1\na = 1.25\n";
  }
  CHECK(run("periodic --config " + bh + " --mode ode-logistic --out " + (out / "log.csv").string()) == 0);
  std::ifstream csv(out / "log.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,U1,U2");
  CHECK(fs::exists(out / "log_summary.json"));
}

TEST_CASE("classify and threshold") {
  const fs::path out = scratch("classify");
  CHECK(run("classify --config " + data + "/sim.ini --out " + (out / "v.json").string()) == 0);
  const auto v = nlohmann::json::parse(slurp(out / "v.json"));
  CHECK(v["verdict"]["outcome"].is_string());
  CHECK(v["prediction"]["prediction"].is_string());
  // not the conditional regime
  CHECK(run("threshold --config " + data + "/sim.ini --ratio 1 --bracket 0.01 10 --out " +
            (out / "t.json").string()) == 2);
}

TEST_CASE("sweep writes a manifest") {
  const fs::path out = scratch("sweep");
  CHECK(run("sweep --config " + data + "/sweep.ini --out " + out.string()) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  REQUIRE(m["points"].size() == 5);
  double prev = 1e9;
  for (const auto& p : m["points"]) {
    CHECK(p["status"] == "ok");
    CHECK(p["lambda"].get<double>() < prev);
    prev = p["lambda"].get<double>();
    CHECK(fs::exists(out / p["file"].get<std::string>()));
  }
  CHECK(run("sweep --config " + data + "/sim.ini --out " + out.string()) == 2);
}

TEST_CASE("exit codes for bad input") {
  CHECK(run("simulate --config " + data + "/bad_dt.ini --out " + scratch("bad").string()) == 2);
  CHECK(run("simulate --config " + data + "/ricker.ini --strict --out " + scratch("strict").string()) == 2);
  CHECK(run("simulate --config /nonexistent.ini") == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("") == 2);
}
