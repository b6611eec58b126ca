#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "qdyn_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  auto dir = scratch_dir();
  auto out = dir / ("out" + std::to_string(counter) + ".txt");
  auto err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(QDYN_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("moments subcommand emits exact fractions in CSV") {
  auto r = run_cli("moments --kmax 10 --alpha 2 --format csv");
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::vector<std::string> lambdas;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) continue;
    auto pos = line.rfind(',');
    lambdas.push_back(line.substr(pos + 1));
  }
  REQUIRE(lambdas.size() == 11);
  CHECK(lambdas[0] == "1");
  CHECK(lambdas[1] == "1/2");
  CHECK(lambdas[2] == "3/8");
  CHECK(lambdas[3] == "5/16");
}

TEST_CASE("real-cert reports the refutation index") {
  auto r = run_cli("real-cert --alpha 1.9");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == "refuted");
  CHECK(doc["failure_index"] == 2);

  auto fixed = run_cli("real-cert --alpha 2");
  auto fdoc = json::parse(fixed.out);
  CHECK(fdoc["verdict"] == "fixed-chain");

  auto exact = run_cli("real-cert --alpha 1.9 --exact --alpha-exact 19/10");
  auto edoc = json::parse(exact.out);
  CHECK(edoc["exact"]["failure_index"] == 2);
  CHECK(edoc["exact"]["chain"][2] == "-4480101/10000000");
}

TEST_CASE("classify subcommand") {
  auto r = run_cli("classify --alpha 0.5");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["regime"] == "fixed-point-attracting");
  CHECK(std::abs(doc["x_star"].get<double>() - 0.7320508075688772) < 1e-12);

  CHECK(run_cli("classify --alpha 2.5").exit_code == 2);
  CHECK(run_cli("classify --alpha 0").exit_code == 2);
}

TEST_CASE("argument validation exits with code 2") {
  CHECK(run_cli("moments --kmax -1").exit_code == 2);
  CHECK(run_cli("bogus-subcommand").exit_code == 2);
  CHECK(run_cli("moments --unknown-flag 3").exit_code == 2);
  CHECK(run_cli("moments --alpha 0").exit_code == 2);
}

TEST_CASE("domain escape exits with code 4") {
  auto r = run_cli("orbit --system quad --alpha 1 --u 5 --n 50");
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("index 4") != std::string::npos);
}

TEST_CASE("non-convergence exits with code 3") {
  auto r = run_cli("stieltjes --alpha 2 --z 1.5 --tol 1e-12 --term-cap 2");
  CHECK(r.exit_code == 3);
  auto doc = json::parse(r.out);
  CHECK(doc["converged"] == false);
}

TEST_CASE("stieltjes value matches the closed form") {
  auto r = run_cli("stieltjes --alpha 2 --z 2");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(std::abs(doc["value"].get<double>() + 0.5773502691896258) < 1e-10);
}

TEST_CASE("critical orbit output") {
  auto r = run_cli("critical-orbit --alpha 2 --n 4");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["xi"] == json::array({0.0, 1.0, -1.0, -1.0, -1.0}));
}

TEST_CASE("sample-julia artifacts are reproducible byte for byte") {
  auto dir = scratch_dir();
  auto a = dir / "cloud_a.csv";
  auto b = dir / "cloud_b.csv";
  std::string base = "sample-julia --alpha 2 --count 500 --burn-in 50 --seed 7 "
                     "--format csv --out ";
  REQUIRE(run_cli(base + a.string()).exit_code == 0);
  REQUIRE(run_cli(base + b.string()).exit_code == 0);
  auto text_a = slurp(a);
  auto text_b = slurp(b);
  // the embedded command line differs only in the output path
  auto strip = [](std::string s, const std::string& path) {
    auto pos = s.find(path);
    while (pos != std::string::npos) {
      s.erase(pos, path.size());
      pos = s.find(path);
    }
    return s;
  };
  CHECK(strip(text_a, a.string()) == strip(text_b, b.string()));
  CHECK(text_a.find("re,im") != std::string::npos);

  auto c = dir / "cloud_c.csv";
  REQUIRE(run_cli("sample-julia --alpha 2 --count 500 --burn-in 50 --seed 8 "
                  "--format csv --out " +
                  c.string())
              .exit_code == 0);
  CHECK(strip(text_a, a.string()) != strip(slurp(c), c.string()));
}

TEST_CASE("sample-julia draws and reports a seed when omitted") {
  auto r = run_cli("sample-julia --alpha 2 --count 10");
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("seed:") != std::string::npos);
}

TEST_CASE("sample-julia writes the metadata JSON") {
  auto dir = scratch_dir();
  auto meta = dir / "cloud.meta.json";
  auto r = run_cli("sample-julia --alpha 2 --count 100 --seed 5 --meta " +
                   meta.string() + " --out " + (dir / "cloud.json").string());
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(slurp(meta));
  CHECK(doc["cloud"]["alpha"] == 2.0);
  CHECK(doc["cloud"]["seed"] == 5);
  CHECK(doc["cloud"]["count"] == 100);
  CHECK(doc["cloud"]["generator"] == "splitmix64");
}

TEST_CASE("perm-spectral end to end") {
  auto dir = scratch_dir();
  auto input = dir / "perm.json";
  {
    std::ofstream os(input);
    os << R"({"image": [1, 2, 0], "subset": [0]})";
  }
  auto r = run_cli("perm-spectral --input " + input.string() + " --seed 3");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["cycles"].size() == 1);
  REQUIRE(doc["atoms"].size() == 3);
  for (const auto& atom : doc["atoms"])
    CHECK(std::abs(atom["weight_re"].get<double>() - 1.0 / 9.0) < 1e-12);
  CHECK(doc["group_law"]["pass"] == true);
  // autocorrelation of a point in a 3-cycle on |Omega| = 3
  for (const auto& row : doc["autocorrelation"]) {
    int n = row["n"].get<int>();
    CHECK(row["value"] == (n % 3 == 0 ? "1/3" : "0"));
  }
}

TEST_CASE("transfer subcommands end to end") {
  auto dir = scratch_dir();
  auto input = dir / "system.json";
  {
    std::ofstream os(input);
    os << R"({"map": [1, 2, 3, 4, 0], "c": [0, 0, 0, 0, 0],)"
       << R"( "a": [1, 0, 0, 0, 0]})";
  }
  auto pot = run_cli("transfer-potential --input " + input.string());
  REQUIRE(pot.exit_code == 0);
  auto pot_doc = json::parse(pot.out);
  CHECK(std::abs(pot_doc["value"].get<double>() - 0.2) < 1e-9);
  CHECK(pot_doc["converged"] == true);

  auto props = run_cli("transfer-props --input " + input.string() +
                       " --trials 10 --seed 11");
  REQUIRE(props.exit_code == 0);
  CHECK(json::parse(props.out)["all_pass"] == true);

  auto t4 = run_cli("theorem4 --input " + input.string() + " --seed 11");
  REQUIRE(t4.exit_code == 0);
  CHECK(json::parse(t4.out)["pass"] == true);

  auto bad = dir / "bad.json";
  {
    std::ofstream os(bad);
    os << R"({"map": [1, 0, 3, 2]})";
  }
  auto err = run_cli("theorem4 --input " + bad.string() + " --seed 11");
  CHECK(err.exit_code == 2);

  CHECK(run_cli("transfer-potential --input /nonexistent.json").exit_code == 2);
}

TEST_CASE("birkhoff subcommand") {
  auto r = run_cli("birkhoff --system rotation --f cos --u 0.3 --n 100000");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(std::abs(doc["average"].get<double>()) < 1e-3);

  auto one = run_cli("birkhoff --system rotation --f one --u 0.3 --n 1000");
  CHECK(json::parse(one.out)["average"] == 1.0);
}

TEST_CASE("omega subcommand with probes") {
  auto r = run_cli(
      "omega --system quad --alpha 1 --u 0.3 --burn-in 1000 --tail 1000 "
      "--tol 1e-6 --minimality-eps 0.001 --link-radius 0.1");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["representatives"].size() == 2);
  CHECK(doc["minimality"]["pass"] == true);
  CHECK(doc["components"] == 2);
}

TEST_CASE("artifacts embed version, command line, and seed") {
  auto r = run_cli("classify --alpha 1.3");
  auto doc = json::parse(r.out);
  CHECK(doc["meta"]["tool"] == "qdyn");
  CHECK(doc["meta"]["version"] == "0.1.0");
  CHECK(doc["meta"]["command"].get<std::string>().find("classify") !=
        std::string::npos);
  CHECK(doc["meta"].contains("seed"));
  CHECK(doc["meta"].contains("tolerances"));
}
