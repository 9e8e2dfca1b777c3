#include "resent/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "resent/parallel.hpp"

namespace resent {

namespace {

std::vector<double> key_of(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_dim(const MetricField& metric, const Vector& x) {
  if (x.size() != metric.dim()) {
    std::ostringstream os;
    os << "metric '" << metric.descriptor() << "' has dimension " << metric.dim() << ", point has " << x.size();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

LogSingularVector log_singular_values_with_zeros(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g);
  const Vector& s = svd.singularValues();
  std::vector<double> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s(i))) throw NumericError("singular value is not finite");
    out[static_cast<std::size_t>(i)] = s(i) > 0.0 ? std::log2(s(i)) : kLogZero;
  }
  return LogSingularVector::sorted(std::move(out));
}

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::constant: return "constant";
    case MetricKind::analytic: return "analytic";
    case MetricKind::tabulated: return "tabulated";
  }
  return "unknown";
}

std::string to_string(PdotSource s) {
  switch (s) {
    case PdotSource::none: return "none";
    case PdotSource::analytic: return "analytic";
    case PdotSource::finite_difference: return "finite_difference";
  }
  return "unknown";
}

MetricField MetricField::identity(Eigen::Index dim) {
  MetricField f = constant(SpdMatrix::identity(dim), "identity");
  return f;
}

MetricField MetricField::constant(const SpdMatrix& p, std::string descriptor) {
  MetricField f;
  f.descriptor_ = std::move(descriptor);
  f.dim_ = p.dim();
  f.kind_ = MetricKind::constant;
  f.pdot_ = PdotSource::analytic;
  f.rule_ = [p](const Vector&) { return MetricSample{p}; };
  const Eigen::Index n = p.dim();
  f.derivative_ = [n](const Vector&) { return Matrix::Zero(n, n).eval(); };
  return f;
}

MetricField MetricField::analytic(std::string descriptor, Eigen::Index dim,
                                  std::function<SpdMatrix(const Vector&)> eval, Derivative orbital_derivative) {
  MetricField f;
  f.descriptor_ = std::move(descriptor);
  f.dim_ = dim;
  f.kind_ = MetricKind::analytic;
  f.pdot_ = orbital_derivative ? PdotSource::analytic : PdotSource::none;
  f.rule_ = [eval = std::move(eval)](const Vector& x) { return MetricSample{eval(x)}; };
  f.derivative_ = std::move(orbital_derivative);
  return f;
}

MetricField MetricField::tabulated(std::string descriptor, Eigen::Index dim, Rule rule) {
  MetricField f;
  f.descriptor_ = std::move(descriptor);
  f.dim_ = dim;
  f.kind_ = MetricKind::tabulated;
  f.pdot_ = PdotSource::none;
  f.rule_ = std::move(rule);
  return f;
}

MetricSample MetricField::sample(const Vector& x) const {
  require_dim(*this, x);
  if (table_) {
    auto it = table_->find(key_of(x));
    if (it != table_->end()) return it->second;
  }
  return rule_(x);
}

SpdMatrix MetricField::eval(const Vector& x) const { return sample(x).value; }

Matrix MetricField::orbital_derivative(const Vector& x) const {
  require_dim(*this, x);
  if (combined_) return combined_(x).second;
  if (!derivative_) throw std::invalid_argument("metric '" + descriptor_ + "' has no orbital derivative");
  return derivative_(x);
}

std::pair<MetricSample, Matrix> MetricField::value_and_derivative(const Vector& x) const {
  require_dim(*this, x);
  if (combined_) return combined_(x);
  return {sample(x), orbital_derivative(x)};
}

MetricField MetricField::tabulate(std::span<const Vector> points) const {
  std::vector<MetricSample> values(points.size(), MetricSample{SpdMatrix::identity(dim_)});
  parallel_for(points.size(), [&](std::size_t i) { values[i] = sample(points[i]); });
  auto table = std::make_shared<Table>(table_ ? *table_ : Table{});
  for (std::size_t i = 0; i < points.size(); ++i) table->insert_or_assign(key_of(points[i]), values[i]);
  MetricField copy = *this;
  copy.table_ = std::move(table);
  return copy;
}

std::size_t MetricField::table_nonconverged() const {
  if (!table_) return 0;
  return static_cast<std::size_t>(
      std::count_if(table_->begin(), table_->end(), [](const auto& kv) { return !kv.second.converged; }));
}

MetricField MetricField::with_flow_derivative(const SystemModel& system, double h, ValueAndDerivative combined) const {
  if (system.is_discrete()) throw std::invalid_argument("orbital derivatives need a continuous-time system");
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  MetricField copy = *this;
  copy.pdot_ = PdotSource::finite_difference;
  copy.combined_ = std::move(combined);
  MetricField base = *this;
  copy.derivative_ = [base, system, h](const Vector& x) { return orbital_derivative_fd(base, system, x, h); };
  return copy;
}

MetricField MetricField::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("metric scale must be positive");
  MetricField copy = *this;
  copy.descriptor_ = descriptor_ + "*" + std::to_string(c);
  copy.table_.reset();
  copy.rule_ = [rule = rule_, c](const Vector& x) {
    MetricSample s = rule(x);
    s.value = SpdMatrix::trusted(c * s.value.matrix());
    return s;
  };
  if (derivative_) copy.derivative_ = [d = derivative_, c](const Vector& x) { return (c * d(x)).eval(); };
  if (combined_) {
    copy.combined_ = [cb = combined_, c](const Vector& x) {
      auto [p, pd] = cb(x);
      p.value = SpdMatrix::trusted(c * p.value.matrix());
      return std::pair<MetricSample, Matrix>{p, c * pd};
    };
  }
  return copy;
}

MetricField lanford_metric(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("lanford metric needs a > 0");
  auto eval = [a](const Vector& v) {
    const double s = std::exp(2.0 * v(2) / a);
    const double d[3] = {s, s, 0.5 * s};
    return SpdMatrix::diagonal(d);
  };
  auto pdot = [a, eval](const Vector& v) {
    const double zdot = a * v(2) - (v(0) * v(0) + v(1) * v(1) + v(2) * v(2));
    return ((2.0 * zdot / a) * eval(v).matrix()).eval();
  };
  return MetricField::analytic("lanford-eq15", 3, eval, pdot);
}

MetricSpectrum metric_singular_values(const MetricField& metric, const Vector& x, const Vector& phi_x,
                                      const Matrix& jacobian) {
  const SpdMatrix px = metric.eval(x);
  const SpdMatrix py = metric.eval(phi_x);
  const Matrix b = power(py, 0.5).matrix() * jacobian * power(px, -0.5).matrix();
  return {x, log_singular_values_with_zeros(b)};
}

MetricSpectrum ct_metric_spectrum(const SpdMatrix& p, const Vector& x, const Matrix& jacobian, const Matrix& pdot) {
  if (asymmetry(pdot) > 1e-8) throw std::invalid_argument("orbital derivative of the metric is not symmetric");
  const Matrix& pm = p.matrix();
  const Matrix s = symmetric_part(pm * jacobian + jacobian.transpose() * pm + symmetric_part(pdot));
  const Matrix r = power(p, -0.5).matrix();
  const Matrix m = symmetric_part(r * s * r);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigen-decomposition failed in the continuous-time spectrum");
  const Vector& ev = eig.eigenvalues();
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  for (double v : values)
    if (!std::isfinite(v)) throw NumericError("continuous-time spectrum is not finite");
  return {x, LogSingularVector::sorted(std::move(values))};
}

MetricSpectrum ct_metric_spectrum(const MetricField& metric, const Vector& x, const Matrix& jacobian,
                                  const Matrix& pdot) {
  return ct_metric_spectrum(metric.eval(x), x, jacobian, pdot);
}

Matrix orbital_derivative_fd(const MetricField& metric, const SystemModel& system, const Vector& x, double h) {
  const IntegratorOptions one_step{.step = h, .tol = 1e-9, .max_halvings = 0, .fixed_step = true};
  const Vector xh = flow(system, x, h, one_step);
  const Matrix d = (metric.eval(xh).matrix() - metric.eval(x).matrix()) / h;
  return symmetric_part(d);
}

double log_max_partial_product(const Matrix& g) {
  const LogSingularVector s = log_singular_values_with_zeros(g);
  double best = 0.0;
  double running = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    running += s[i];
    best = std::max(best, running);
  }
  return best;
}

}  // namespace resent
