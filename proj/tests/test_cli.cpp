#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "resent/commands.hpp"
#include "resent/report_io.hpp"

using namespace resent;

namespace {

int run(RunConfig c, std::string* out_text = nullptr) {
  c.write_files = false;
  std::ostringstream out, err;
  const int code = run_command(c, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

}  // namespace

TEST_CASE("bound on the identity system is zero") {
  RunConfig c;
  c.system = "identity";
  c.metric = "identity";
  std::string text;
  CHECK(run(c, &text) == kExitOk);
  CHECK(text.find("bound = 0 bits/step") != std::string::npos);
}

TEST_CASE("bound on diag(2, 1/2) is one bit per step") {
  RunConfig c;
  c.system = "linmap";
  c.matrix = "diag:2,0.5";
  c.metric = "identity";
  std::string text;
  CHECK(run(c, &text) == kExitOk);
  CHECK(text.find("bound = 1 bits/step") != std::string::npos);
}

TEST_CASE("lanford bound at a = 0.6667") {
  RunConfig c;
  c.system = "lanford";
  c.params["a"] = 0.6667;
  c.metric = "lanford-eq15";
  c.resolution = 11;
  std::string text;
  CHECK(run(c, &text) == kExitOk);
  CHECK(text.find("bound = 0.96") != std::string::npos);
}

TEST_CASE("props with tol = 0 is a configuration error") {
  RunConfig c;
  c.command = Command::props;
  c.tol = 0.0;
  CHECK(run(c) == kExitConfig);
}

TEST_CASE("props on scalar instances pass") {
  RunConfig c;
  c.command = Command::props;
  c.dims = {1};
  c.instances = 20;
  std::string text;
  CHECK(run(c, &text) == kExitOk);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("time-type mismatch between system and metric") {
  RunConfig c;
  c.system = "lanford";
  c.metric = "auto:N=4";
  CHECK(run(c) == kExitConfig);
  RunConfig d;
  d.system = "linmap";
  d.matrix = "diag:2,0.5";
  d.metric = "lanford-eq15";
  CHECK(run(d) == kExitConfig);
}

TEST_CASE("non-invariant declared set fails the spot check") {
  RunConfig c;
  c.system = "linode";
  c.matrix = "diag:1,-1";
  c.box = std::vector<Interval>{{-1, 1}, {-1, 1}};
  c.resolution = 3;
  CHECK(run(c) == kExitInvariance);
}

TEST_CASE("unknown config keys and bad metrics") {
  RunConfig c;
  CHECK_THROWS_AS(apply_config_json(c, R"({"sytem": "lanford"})"), ConfigError);
  CHECK_THROWS_AS(parse_metric_spec("riemann"), ConfigError);
  CHECK_THROWS(parse_matrix_spec("1,2;3"));
}

TEST_CASE("config json mirrors the flags") {
  RunConfig c;
  apply_config_json(c, R"({"command": "sweep", "system": "linmap", "matrix": "2,1;0,2",
                           "horizons": [1, 2], "resolution": 2, "metric": "auto"})");
  CHECK(c.command == Command::sweep);
  CHECK(c.horizons.size() == 2);
  CHECK(run(c) == kExitOk);
}

TEST_CASE("sweep requires an automatic metric") {
  RunConfig c;
  c.command = Command::sweep;
  c.system = "linmap";
  c.matrix = "diag:2,0.5";
  c.metric = "identity";
  c.horizons = {1};
  CHECK(run(c) == kExitConfig);
}
