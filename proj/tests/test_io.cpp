#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "netgame/io.hpp"
#include "netgame/rng.hpp"

using namespace netgame;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "netgame_io_test";
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("edge lists round-trip through csv with 1-based ids") {
  TempDir tmp;
  DirectedNetwork net = generate_random(30, 77);
  save_edges(tmp.file("edges.csv"), net);
  DirectedNetwork back = load_edges(tmp.file("edges.csv"), 30);
  for (int i = 0; i < 30; ++i) {
    auto a = net.friends(i);
    auto b = back.friends(i);
    CHECK(std::vector<int>(a.begin(), a.end()) == std::vector<int>(b.begin(), b.end()));
  }

  std::ifstream in(tmp.file("edges.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "src,dst");
}

TEST_CASE("edge loading reports the offending line") {
  TempDir tmp;
  write_file(tmp.file("bad.csv"), "src,dst\n1,2\n2,99\n");
  try {
    load_edges(tmp.file("bad.csv"), 5);
    FAIL("expected CsvError");
  } catch (const CsvError& err) {
    CHECK(err.line == 3);
    CHECK(std::string(err.what()).find("bad.csv:3") != std::string::npos);
  }

  write_file(tmp.file("dup.csv"), "src,dst\n1,2\n1,2\n");
  CHECK_THROWS_AS(load_edges(tmp.file("dup.csv"), 5), CsvError);
  write_file(tmp.file("self.csv"), "src,dst\n3,3\n");
  CHECK_THROWS_AS(load_edges(tmp.file("self.csv"), 5), CsvError);
  write_file(tmp.file("head.csv"), "from,to\n1,2\n");
  CHECK_THROWS_AS(load_edges(tmp.file("head.csv"), 5), CsvError);
  CHECK_THROWS_AS(load_edges(tmp.file("absent.csv"), 5), CsvError);
}

TEST_CASE("covariates round-trip at full precision in any row order") {
  TempDir tmp;
  Eigen::MatrixXd x(3, 2);
  x << 1.0 / 3.0, -2.5e-17, 0.1, 7.0, 1e300, -0.0;
  save_covariates(tmp.file("x.csv"), x, {"inc", "age"});
  CovariateTable table = load_covariates(tmp.file("x.csv"));
  CHECK(table.names == std::vector<std::string>{"inc", "age"});
  CHECK(table.x == x);  // bitwise: 17 significant digits round-trip

  write_file(tmp.file("shuffled.csv"), "id,a\n3,30\n1,10\n2,20\n");
  CovariateTable shuffled = load_covariates(tmp.file("shuffled.csv"));
  CHECK(shuffled.x(0, 0) == 10);
  CHECK(shuffled.x(2, 0) == 30);
}

TEST_CASE("missing covariate cells follow the chosen policy") {
  TempDir tmp;
  write_file(tmp.file("gap.csv"), "id,a,b\n1,1.5,\n2,,2.5\n");
  CHECK_THROWS_AS(load_covariates(tmp.file("gap.csv"), MissingPolicy::Error), CsvError);
  CovariateTable table = load_covariates(tmp.file("gap.csv"), MissingPolicy::Zero);
  CHECK(table.x(0, 1) == 0.0);
  CHECK(table.x(1, 0) == 0.0);
  CHECK(table.x(0, 0) == 1.5);

  write_file(tmp.file("dupid.csv"), "id,a\n1,1\n1,2\n");
  CHECK_THROWS_AS(load_covariates(tmp.file("dupid.csv")), CsvError);
  write_file(tmp.file("gapid.csv"), "id,a\n1,1\n3,2\n");
  CHECK_THROWS_AS(load_covariates(tmp.file("gapid.csv")), CsvError);
}

TEST_CASE("outcomes round-trip and validate ids") {
  TempDir tmp;
  std::vector<int> y{1, 0, 2, 1};
  save_outcomes(tmp.file("y.csv"), y);
  CHECK(load_outcomes(tmp.file("y.csv"), 4) == y);

  write_file(tmp.file("short.csv"), "id,y\n1,0\n2,1\n");
  CHECK_THROWS_AS(load_outcomes(tmp.file("short.csv"), 3), CsvError);
  write_file(tmp.file("neg.csv"), "id,y\n1,-2\n");
  CHECK_THROWS_AS(load_outcomes(tmp.file("neg.csv"), 1), CsvError);
}

TEST_CASE("profiles are written with headers and full precision") {
  TempDir tmp;
  ChoiceProfile profile;
  profile.probs.resize(2, 3);
  profile.probs << 0.2, 0.3, 0.5, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  save_profile(tmp.file("p.csv"), profile);
  std::ifstream in(tmp.file("p.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,p0,p1,p2");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "1,");
}

TEST_CASE("doubles print with 17 significant digits and read back exactly") {
  for (double v : {1.0 / 3.0, 0.8066, -1.9923e-7, 3.0, 1e17}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("parameter names follow the packed layout") {
  auto names = param_names(2, {"inc", "age"});
  REQUIRE(names.size() == 8);
  CHECK(names[0] == "beta_1_inc");
  CHECK(names[1] == "beta_1_age");
  CHECK(names[2] == "alpha_1_1");
  CHECK(names[3] == "alpha_1_2");
  CHECK(names[4] == "beta_2_inc");
  CHECK(names[7] == "alpha_2_2");
}
