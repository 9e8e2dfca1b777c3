// Acceptance run: prints one PASS/FAIL line per criterion, exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "resent/config.hpp"
#include "resent/entropy.hpp"
#include "resent/props.hpp"

using namespace resent;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s -- %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ResolvedSystem lanford_on_auto_set(double a, int resolution) {
  RunConfig c;
  c.system = "lanford";
  c.params["a"] = a;
  c.resolution = resolution;
  return resolve_system(c);
}

const CompactSet kSquare = CompactSet::box({{-1.0, 1.0}, {-1.0, 1.0}});
const double kTarget = 2.0 * (2.0 * (2.0 / 3.0) - 1.0) / std::log(2.0);

// Pn sweep for a 2-D linear map, N in {1, 2, 4, 8, 16}
std::vector<double> pn_sweep(const Matrix& m) {
  const SystemModel s = linear_map(m);
  std::vector<double> out;
  for (int n : {1, 2, 4, 8, 16}) {
    const int res[] = {2};
    out.push_back(dt_bound(s, kSquare, minimizing_metric_dt(s, n), res).bound);
  }
  return out;
}

struct Case {
  std::string label;
  SystemModel system;
  CompactSet set;
  int resolution;
  MetricField metric;
};

}  // namespace

int main() {
  report(1, "Lanford bound equals 2(2a-1)/ln2 within 1e-3, lambdas within 1e-8 (21^3)", [] {
    Verdict v;
    for (double a : {2.0 / 3.0, 0.75, 1.0}) {
      const ResolvedSystem rs = lanford_on_auto_set(a, 21);
      const int res[] = {rs.resolution};
      const BoundReport r = ct_bound(rs.system, rs.set, lanford_metric(a), res);
      double lerr = 0.0;
      for (const PointBound& p : r.per_point) {
        const Vector x = Eigen::Map<const Vector>(p.state.data(), 3);
        const auto [l1, l23] = lanford_lambdas(a, x);
        const LogSingularVector want = LogSingularVector::sorted({l1, l23, l23});
        for (std::size_t i = 0; i < 3; ++i) lerr = std::max(lerr, std::abs(want[i] - p.spectrum[i]));
      }
      const double berr = std::abs(r.bound - lanford_closed_form(a));
      const bool ok = berr <= 1e-3 && lerr <= 1e-8 && rs.invariance && rs.invariance->passed();
      v.pass = v.pass && ok;
      v.detail += fmt("a=%.4g: |err|=%.2e lambda err=%.2e; ", a, berr, lerr) + "K=" + rs.set_label + "; ";
    }
    return v;
  });

  report(2, "proximate entropy at O2 equals 2(2a-1)/ln2 within 1e-10", [] {
    Verdict v;
    for (double a : {2.0 / 3.0, 0.75, 1.0}) {
      Vector o2(3);
      o2 << 0, 0, a;
      const double err = std::abs(proximate_entropy(lanford_system(a), o2) - lanford_closed_form(a));
      v.pass = v.pass && err <= 1e-10;
      v.detail += fmt("a=%.4g: %.2e; ", a, err);
    }
    return v;
  });

  report(3, "Lanford oracle at t=40 within 0.05 of 0.96179, Aitken within 0.01 (11^3)", [] {
    const ResolvedSystem rs = lanford_on_auto_set(2.0 / 3.0, 11);
    const std::vector<Vector> pts = sample_set(rs.set, rs.resolution);
    const double hs[] = {5, 10, 20, 40};
    const OracleResult o = lyapunov_oracle(rs.system, pts, hs);
    const double e40 = std::abs(o.values.back() - 0.96179);
    const double ea = o.aitken ? std::abs(*o.aitken - 0.96179) : std::numeric_limits<double>::infinity();
    return Verdict{e40 <= 0.05 && ea <= 0.01,
                   fmt("t=40: %.6f (err %.2e), aitken err %.2e", o.values.back(), e40, ea) + ", K=" + rs.set_label};
  });

  report(4, "linear exactness: diag(2,1/2) = 1 exactly; [[2,1],[0,2]] identity bound > 2, Pn sweep within 0.05 of 2",
         [] {
           Verdict v;
           const double eps = 4 * std::numeric_limits<double>::epsilon();
           const SystemModel d = linear_map(mat2(2, 0, 0, 0.5));
           const int res[] = {3};
           const double bd = dt_bound(d, kSquare, MetricField::identity(2), res).bound;
           const std::vector<Vector> pts = sample_set(kSquare, 3);
           // linear orbits leave the 1e8 blow-up ball near 2^27; stay inside it
           const double hs[] = {1, 3, 10, 20};
           const OracleResult od = lyapunov_oracle(d, pts, hs);
           double oerr = 0.0;
           for (double x : od.values) oerr = std::max(oerr, std::abs(x - 1.0));
           const bool diag_ok = std::abs(bd - 1.0) <= eps && oerr <= eps;

           const Matrix nn = mat2(2, 1, 0, 2);
           const double bi = dt_bound(linear_map(nn), kSquare, MetricField::identity(2), res).bound;
           const bool strict_ok = bi > 2.0 + 1e-12;  // strictly above, beyond round-off
           const std::vector<double> sweep = pn_sweep(nn);
           const bool sweep_ok = std::abs(sweep.back() - 2.0) <= 0.05;
           v.pass = diag_ok && strict_ok && sweep_ok;
           v.detail = fmt("diag: bound-1=%.1e oracle err=%.1e; ", bd - 1.0, oerr) +
                      fmt("non-normal identity bound=%.17g (> 2: ", bi) + (strict_ok ? "yes" : "no") +
                      fmt("); P16 bound=%.6f", sweep.back());

           // the intended looseness, on a non-normal map whose identity bound is not already optimal
           const std::vector<double> s2 = pn_sweep(mat2(1.5, 2, 0, 1));
           std::printf("  note: [[1.5,2],[0,1]]: identity bound %.6f, P16 bound %.6f (target log2 1.5 = %.6f)\n",
                       s2.front(), s2.back(), std::log2(1.5));
           return v;
         });

  report(5, "geometry property suite, seed 42, 200 instances at n in {1,2,3,5}", [] {
    const std::vector<PropertyResult> rs = run_property_suite();
    Verdict v;
    int bad = 0;
    for (const PropertyResult& r : rs) {
      if (!r.passed()) {
        ++bad;
        v.detail += r.name + fmt(" worst %.2e > %.2e; ", r.worst, r.tolerance);
      }
    }
    v.pass = bad == 0;
    v.detail += std::to_string(rs.size()) + " properties, " + std::to_string(bad) + " failing";
    return v;
  });

  report(6, "bound + calibrated slack >= oracle for every system, metric and horizon", [] {
    const double a = 2.0 / 3.0;
    const ResolvedSystem lan = lanford_on_auto_set(a, 5);
    MinimizingMetricOptions mo;
    mo.barycenter.max_cycles = 200;
    const SystemModel dmap = linear_map(mat2(2, 0, 0, 0.5));
    const SystemModel nmap = linear_map(mat2(2, 1, 0, 2));
    const SystemModel smap = linear_map(mat2(1.5, 2, 0, 1));
    const SystemModel ode = linear_ode(mat2(0.3, 2, 0, -0.3));
    const SpdMatrix pc(mat2(2, 0.5, 0.5, 1));
    std::vector<Case> cases{
        {"identity/identity", identity_map(2), kSquare, 3, MetricField::identity(2)},
        {"diag map/identity", dmap, kSquare, 3, MetricField::identity(2)},
        {"diag map/constant", dmap, kSquare, 3, MetricField::constant(pc, "constant")},
        {"non-normal/identity", nmap, kSquare, 3, MetricField::identity(2)},
        {"non-normal/constant", nmap, kSquare, 3, MetricField::constant(pc, "constant")},
        {"non-normal/auto:N=8", nmap, kSquare, 2, minimizing_metric_dt(nmap, 8, mo)},
        {"skew map/identity", smap, kSquare, 3, MetricField::identity(2)},
        {"skew map/auto:N=8", smap, kSquare, 2, minimizing_metric_dt(smap, 8, mo)},
        {"linear ode/identity", ode, kSquare, 3, MetricField::identity(2)},
        {"linear ode/constant", ode, kSquare, 3, MetricField::constant(pc, "constant")},
        {"linear ode/auto:T=2", ode, kSquare, 2, minimizing_metric_ct(ode, 2.0, 8, mo)},
        {"lanford/lanford-eq15", lan.system, lan.set, 5, lanford_metric(a)},
        {"lanford/identity", lan.system, lan.set, 5,
         MetricField::identity(3).with_flow_derivative(lan.system)},
    };
    Verdict v;
    int checked = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const Case& c : cases) {
      const int res[] = {c.resolution};
      const BoundReport r = compute_bound(c.system, c.set, c.metric, res);
      const std::vector<Vector> pts = sample_set(c.set, c.resolution);
      const std::vector<double> hs = c.system.is_discrete() ? std::vector<double>{1, 4, 10, 20}
                                                            : std::vector<double>{5, 10, 20, 40};
      const OracleResult o = lyapunov_oracle(c.system, pts, hs);
      const double distortion = metric_distortion(c.metric, pts);
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double excess = o.values[k] - (r.bound + distortion / hs[k] + 1e-6);
        worst = std::max(worst, excess);
        ++checked;
        if (excess > 0) {
          v.pass = false;
          v.detail += c.label + fmt(" t=%g excess %.2e; ", hs[k], excess);
        }
      }
    }
    v.detail += std::to_string(cases.size()) + " system/metric pairs, " + std::to_string(checked) +
                fmt(" horizons, worst oracle-(bound+slack) = %.3e", worst);
    return v;
  });

  report(7, "asymptotic claims covered by monotone convergence (Pn sweep nonincreasing, oracle approaching)", [] {
    const std::vector<double> sweep = pn_sweep(mat2(2, 1, 0, 2));
    double rise = 0.0;
    for (std::size_t k = 1; k < sweep.size(); ++k) rise = std::max(rise, sweep[k] - sweep[k - 1]);
    const ResolvedSystem rs = lanford_on_auto_set(2.0 / 3.0, 7);
    const std::vector<Vector> pts = sample_set(rs.set, rs.resolution);
    const double hs[] = {5, 10, 20, 40};
    const OracleResult o = lyapunov_oracle(rs.system, pts, hs);
    double gap_rise = 0.0;
    for (std::size_t k = 1; k < o.values.size(); ++k)
      gap_rise = std::max(gap_rise, std::abs(o.values[k] - kTarget) - std::abs(o.values[k - 1] - kTarget));
    return Verdict{rise <= 1e-9 && gap_rise <= 1e-6,
                   fmt("largest Pn bound increase %.2e, largest oracle gap increase %.2e", rise, gap_rise)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
