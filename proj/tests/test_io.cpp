#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "msml/io.hpp"

using namespace msml;
namespace fs = std::filesystem;

namespace {

Schema small_schema() {
  Schema s;
  s.periods = 2;
  s.outcomes = {"fatal", "injury", "pdo"};
  s.covariates = {{"male", CovariateRole::Dummy}, {"speed", CovariateRole::Quantitative}};
  return s;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("msml_io_" + name);
  fs::create_directories(p);
  return p;
}

std::string ingest_error(const std::string& csv, const Schema& s) {
  std::istringstream in(csv);
  try {
    ingest(in, s);
  } catch (const IngestError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("three-row file with intercept injection") {
  std::istringstream in("week,outcome,male,speed\n1,pdo,1,50\n2,fatal,0,80.5\n1,injury,1,30\n");
  const Dataset d = ingest(in, small_schema());
  CHECK(d.periods() == 2);
  CHECK(d.dim() == 3);
  CHECK(d.size() == 3);
  CHECK(d.count_in_period(0) == 2);
  CHECK(d.count_in_period(1) == 1);
  // period 0 records keep file order
  CHECK(d.outcome(0) == 2);
  CHECK(d.outcome(1) == 1);
  CHECK(d.covariates(2)[0] == 1.0);
  CHECK(d.covariates(2)[2] == 80.5);
}

TEST_CASE("columns in any order, unknown columns ignored, BOM stripped") {
  std::istringstream in("\xEF\xBB\xBFspeed,note,outcome,week,male\n50,x,pdo,2,1\n");
  const Dataset d = ingest(in, small_schema());
  REQUIRE(d.size() == 1);
  CHECK(d.period(0) == 1);
  CHECK(d.covariates(0)[1] == 1.0);
  CHECK(d.covariates(0)[2] == 50.0);
}

TEST_CASE("ingest errors cite the offending line") {
  const Schema s = small_schema();
  CHECK(ingest_error("week,outcome,male,speed\n1,pdo,1,50\n1,minor,0,3\n", s).find("line 3") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n1,pdo,1,50\n1,minor,0,3\n", s).find("minor") != std::string::npos);
  CHECK(ingest_error("week,outcome,male,speed\n1.5,pdo,1,50\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n3,pdo,1,50\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n0,pdo,1,50\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n1,pdo,2,50\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n1,pdo,1,fast\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male,speed\n1,pdo,1\n", s).find("line 2") == 0);
  CHECK(ingest_error("week,outcome,male\n1,pdo,1\n", s).find("speed") != std::string::npos);
  CHECK(ingest_error("", s).find("header") != std::string::npos);
  CHECK_THROWS_AS(ingest(std::string("/nonexistent/data.csv"), s), IngestError);
}

TEST_CASE("outcome counts of a large file") {
  Schema s;
  s.periods = 208;
  s.outcomes = {"fatal", "injury", "pdo"};
  std::ostringstream csv;
  csv << "week,outcome\n";
  const std::size_t counts[3] = {143, 3369, 15582};
  std::size_t n = 0;
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < counts[i]; ++k, ++n) csv << (n % 208) + 1 << "," << s.outcomes[i] << "\n";
  std::istringstream in(csv.str());
  const Dataset d = ingest(in, s);
  const auto sum = summarize_dataset(d);
  CHECK(sum.records == 19094);
  CHECK(sum.outcome_counts == std::vector<std::size_t>{143, 3369, 15582});
  CHECK(sum.text().find("143/3369/15582") != std::string::npos);
}

TEST_CASE("generate, write, ingest round trip is exact") {
  auto t = helpers::toy(12, 30);
  const auto sd = helpers::draw(t, 5);
  Schema s = Schema::generic(12, 3, 3);
  std::stringstream buf;
  write_dataset_csv(buf, sd.data, s);
  const Dataset back = ingest(buf, s);
  CHECK(back == sd.data);
}

TEST_CASE("schema INI round trip") {
  const fs::path dir = scratch("schema");
  const Schema s = small_schema();
  write_schema((dir / "s.ini").string(), s);
  const Schema r = read_schema((dir / "s.ini").string());
  CHECK(r.periods == 2);
  CHECK(r.outcomes == s.outcomes);
  REQUIRE(r.covariates.size() == 2);
  CHECK(r.covariates[0].name == "male");
  CHECK(r.covariates[0].role == CovariateRole::Dummy);
  CHECK(r.covariates[1].role == CovariateRole::Quantitative);
  CHECK(r.coef_label(1, 0) == "injury:const");
  CHECK(r.coef_label(0, 2) == "fatal:speed");
  CHECK(r.outcome_index("pdo") == 2);
  CHECK(r.outcome_index("minor") == -1);
}

TEST_CASE("series and state-series files") {
  const fs::path dir = scratch("series");
  write_series((dir / "x.csv").string(), {0.5, -1.25, 3.0}, "temp");
  CHECK(read_series((dir / "x.csv").string()) == std::vector<double>{0.5, -1.25, 3.0});
  {
    std::ofstream out(dir / "shuffled.csv");
    out << "index,value\n2,20\n1,10\n3,30\n";
  }
  CHECK(read_series((dir / "shuffled.csv").string()) == std::vector<double>{10, 20, 30});
  {
    std::ofstream out(dir / "gap.csv");
    out << "index,value\n1,10\n3,30\n";
  }
  CHECK_THROWS_AS(read_series((dir / "gap.csv").string()), IngestError);

  StateSeries s{{0.25, 0.5}, {0.433013, 0.5}};
  write_state_series((dir / "s.csv").string(), s);
  const StateSeries r = read_state_series((dir / "s.csv").string());
  CHECK(r.prob == s.prob);
  CHECK(r.sd == s.sd);
}

TEST_CASE("parameter tables parse back with lower <= upper") {
  const fs::path dir = scratch("params");
  std::vector<ParamRow> rows{{"y1:const", 0.5, -0.1, 1.2}, {"p01", 0.1, 0.05, 0.2}};
  write_param_table((dir / "p.csv").string(), rows);
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "parameter,estimate,lower,upper");
  int n = 0;
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    REQUIRE(f.size() == 4);
    CHECK(std::stod(f[2]) <= std::stod(f[3]));
    ++n;
  }
  CHECK(n == 2);
}

TEST_CASE("csv splitting handles quotes") {
  CHECK(split_csv_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
  CHECK(split_csv_line("a,,") == std::vector<std::string>{"a", "", ""});
  CHECK(sig6(3.14159265) == doctest::Approx(3.14159));
}

}  // TEST_SUITE
