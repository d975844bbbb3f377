#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MSML_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("msml_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("fit-ml") == 2);
  CHECK(run("fit-msml --data x.csv --schema s.ini --chains 0") == 2);
  CHECK(run("compare") == 2);
}

TEST_CASE("ingest failure exits with 3") {
  const fs::path d = fresh("ingest");
  REQUIRE(run("generate --seed 1 --periods 4 --per-period 5 --out " + d.string()) == 0);
  {
    std::ofstream bad(d / "bad.csv");
    bad << "week,outcome,x1,x2,x3,x4\n1,y9,1,0,0.5,0.5\n";
  }
  CHECK(run("fit-ml --data " + (d / "bad.csv").string() + " --schema " + (d / "schema.ini").string() +
            " --out " + d.string()) == 3);
  CHECK(run("fit-ml --data " + (d / "missing.csv").string() + " --schema " + (d / "schema.ini").string() +
            " --out " + d.string()) == 3);
}

TEST_CASE("reruns with the same seed are byte-identical") {
  const fs::path a = fresh("rerun_a"), b = fresh("rerun_b");
  for (const fs::path& d : {a, b}) {
    REQUIRE(run("generate --seed 7 --periods 10 --per-period 40 --out " + d.string()) == 0);
    REQUIRE(run("fit-msml --seed 3 --chains 2 --burnin 60 --keep 60 --data " + (d / "data.csv").string() +
                " --schema " + (d / "schema.ini").string() + " --out " + d.string()) == 0);
  }
  CHECK(slurp(a / "data.csv") == slurp(b / "data.csv"));
  CHECK(!slurp(a / "data.csv").empty());
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().filename().string());
  }
}

TEST_CASE("compare from log marginal likelihoods") {
  const fs::path d = fresh("compare");
  CHECK(run("compare --log-ml-a -100 --log-ml-b -161.39 --out " + d.string()) == 0);
}

}  // TEST_SUITE
