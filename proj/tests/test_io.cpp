#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "resent/commands.hpp"
#include "resent/entropy.hpp"
#include "resent/report_io.hpp"

using namespace resent;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("resent-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / std::log(2.0), 1e-300, -123456.789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("report json round trip") {
  const double a = 2.0 / 3.0;
  const SystemModel s = lanford_system(a);
  const CompactSet k = CompactSet::box({{-0.2, 0.2}, {-0.2, 0.2}, {0.0, 2 * a}});
  const int res[] = {3};
  BoundReport r = ct_bound(s, k, lanford_metric(a), res);
  r.oracle = OracleSummary{{5, 10, 20}, {0.9, 0.95, 0.96}, 0.9617};
  r.diagnostics.invariance = InvarianceReport{20.0, 27, 0};
  r.diagnostics.excluded.push_back({{1.0, 2.0, 3.0}, "escaped"});
  r.diagnostics.notes.push_back("note");
  r.diagnostics.refinement.push_back({3, r.bound});
  const BoundReport back = report_from_json(report_to_json(r));
  CHECK(back == r);
}

TEST_CASE("report json rejects a foreign schema version") {
  BoundReport r;
  r.schema_version = 99;
  r.per_point.push_back({{0.0}, {0.0}, 0.0});
  CHECK_THROWS(report_from_json(report_to_json(r)));
}

TEST_CASE("points csv layout") {
  const SystemModel s = identity_map(1);
  const int res[] = {2};
  const BoundReport r = dt_bound(s, CompactSet::box({{0.0, 1.0}}), MetricField::identity(1), res);
  const std::string csv = points_csv(r);
  CHECK(csv.rfind("x0,log2_alpha0,local\n", 0) == 0);
}

TEST_CASE("sweep output is byte-identical across runs") {
  auto run = [](const std::string& name) {
    const auto dir = scratch(name);
    RunConfig c;
    c.command = Command::sweep;
    c.system = "linmap";
    c.matrix = "2,1;0,2";
    c.metric = "auto";
    c.resolution = 2;
    c.horizons = {1, 2, 4};
    c.output = (dir / "run").string();
    std::ostringstream out, err;
    CHECK(run_command(c, out, err) == kExitOk);
    return std::pair{slurp(dir / "run.sweep.csv"), slurp(dir / "run-h0.points.csv")};
  };
  const auto first = run("det1");
  const auto second = run("det2");
  CHECK_FALSE(first.first.empty());
  CHECK(first == second);
}
