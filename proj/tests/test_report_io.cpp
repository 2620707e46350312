#include "catch_amalgamated.hpp"

#include <sstream>

#include "tpfe/report_io.hpp"

using namespace tpfe;

namespace {
StudyReport sample() {
  StudyReport r;
  r.study = "interp";
  r.config = default_config("interp");
  r.rows = {{0.5, 1e-2}, {0.25, 2.5e-3}};
  r.fit = slope_fit(r.rows);
  r.target = 2.0;
  r.tolerance = 0.2;
  r.pass = true;
  r.outcome = "fitted";
  r.seed = 42;
  r.checks.push_back({"reproduction", true, "1e-15"});
  r.notes.push_back("hello");
  return r;
}
}  // namespace

TEST_CASE("json report") {
  const auto j = report_to_json(sample());
  for (const char* key : {"study", "config", "rows", "slope", "intercept", "target", "tolerance", "pass", "outcome",
                          "wall_ms", "seed", "checks", "notes"})
    CHECK(j.contains(key));
  CHECK(j["rows"].size() == 2);
  CHECK(j["slope"].get<double>() == Catch::Approx(2.0));
  CHECK(j["checks"][0]["name"] == "reproduction");
  CHECK(j["config"]["family"] == "gauss-lobatto");
  const auto round = nlohmann::json::parse(j.dump());
  CHECK(round == j);
}

TEST_CASE("csv report") {
  std::ostringstream os;
  write_csv(os, sample());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "scale,error");
  std::getline(is, line);
  CHECK(line == "0.5,0.01");
  std::getline(is, line);
  std::getline(is, line);
  CHECK(line.rfind("# slope=2", 0) == 0);
  CHECK(os.str().find("# check PASS reproduction") != std::string::npos);
  CHECK(os.str().find("# note hello") != std::string::npos);
}
