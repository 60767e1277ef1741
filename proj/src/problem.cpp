#include "sgcp/problem.hpp"

#include "sgcp/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace sgcp {

namespace {

double signed_power(double v, double exponent) {
  // |v|^(exponent-2) v
  return std::pow(std::abs(v), exponent - 2.0) * v;
}

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double central_difference(const std::function<double(double)>& f, double v) {
  const double h = 1e-6 * std::max(1.0, std::abs(v));
  return (f(v + h) - f(v - h)) / (2.0 * h);
}

double primitive_by_quadrature(const std::function<double(double)>& f, double v) {
  if (v == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  const double lo = std::min(0.0, v);
  const double hi = std::max(0.0, v);
  double err = 0.0;
  const double val = gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-14, &err);
  return v > 0 ? val : -val;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression

Expression Expression::scaled_power(double scale, double exponent) {
  Expression e;
  e.kind = Kind::scaled_power;
  e.scale = scale;
  e.exponent = exponent;
  return e;
}

Expression Expression::clamped_affine(double offset, double slope, double lo, double hi) {
  if (lo > hi) throw PreconditionError("clamped_affine needs lo <= hi");
  Expression e;
  e.kind = Kind::clamped_affine;
  e.offset = offset;
  e.slope = slope;
  e.lo = lo;
  e.hi = hi;
  return e;
}

double Expression::operator()(double v) const {
  switch (kind) {
    case Kind::constant:
      return coeffs.empty() ? 0.0 : coeffs[0];
    case Kind::polynomial: {
      double s = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * v + *it;
      return s;
    }
    case Kind::scaled_power:
      return scale * signed_power(v, exponent);
    case Kind::clamped_affine:
      return std::clamp(offset + slope * v, lo, hi);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Nonlinearity

Nonlinearity Nonlinearity::power(double scale, double theta) {
  Nonlinearity n;
  n.kind_ = Kind::power;
  n.params_ = {scale};
  n.theta_ = theta;
  n.f_ = [scale, theta](double v) { return scale * signed_power(v, theta); };
  n.F_ = [scale, theta](double v) { return scale * std::pow(std::abs(v), theta) / theta; };
  n.df_ = [scale, theta](double v) { return scale * (theta - 1.0) * std::pow(std::abs(v), theta - 2.0); };
  return n;
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs, double theta) {
  Nonlinearity n;
  n.kind_ = Kind::polynomial;
  n.params_ = coeffs;
  n.theta_ = theta;
  n.f_ = [coeffs](double v) {
    double s = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * v + *it;
    return s;
  };
  n.F_ = [coeffs](double v) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * v + coeffs[k] / static_cast<double>(k + 1);
    return s * v;
  };
  n.df_ = [coeffs](double v) {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) s = s * v + static_cast<double>(k) * coeffs[k];
    return s;
  };
  return n;
}

Nonlinearity Nonlinearity::sign_power(double eta, double width, double scale, double theta) {
  if (!(width > 0.0)) throw PreconditionError("sign_power width must be positive");
  Nonlinearity n;
  n.kind_ = Kind::sign_power;
  n.params_ = {eta, width, scale};
  n.theta_ = theta;
  n.f_ = [=](double v) { return eta * std::tanh(v / width) + scale * signed_power(v, theta); };
  n.F_ = [=](double v) {
    return eta * width * log_cosh(v / width) + scale * std::pow(std::abs(v), theta) / theta;
  };
  n.df_ = [=](double v) {
    const double s = 1.0 / std::cosh(v / width);
    return eta / width * s * s + scale * (theta - 1.0) * std::pow(std::abs(v), theta - 2.0);
  };
  return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> f, double theta) {
  Nonlinearity n;
  n.kind_ = Kind::custom;
  n.theta_ = theta;
  n.f_ = std::move(f);
  return n;
}

Nonlinearity Nonlinearity::with_quadrature_primitive() const {
  Nonlinearity n = *this;
  n.F_ = nullptr;
  return n;
}

double Nonlinearity::F(double v) const { return F_ ? F_(v) : primitive_by_quadrature(f_, v); }

double Nonlinearity::df(double v) const { return df_ ? df_(v) : central_difference(f_, v); }

// ---------------------------------------------------------------------------
// ProblemInstance

ProblemBounds ProblemInstance::fill_data_bounds(ProblemBounds b, const VertexField& g, const Expression& h) {
  b.g_lo = g.values().minCoeff();
  b.g_hi = g.values().maxCoeff();
  double lo = h(-b.M), hi = lo;
  constexpr int kSamples = 201;
  for (int i = 0; i < kSamples; ++i) {
    const double v = -b.M + 2.0 * b.M * i / (kSamples - 1);
    lo = std::min(lo, h(v));
    hi = std::max(hi, h(v));
  }
  b.h_lo = lo;
  b.h_hi = hi;
  return b;
}

ProblemInstance::ProblemInstance(FormPtr form, VertexField a, VertexField g, VertexField u, Expression h,
                                 Nonlinearity nonlinearity, ProblemBounds bounds)
    : form_(std::move(form)),
      a_(std::move(a)),
      g_(std::move(g)),
      u_(std::move(u)),
      h_(std::move(h)),
      nl_(std::move(nonlinearity)),
      bounds_(bounds) {
  if (!form_) throw PreconditionError("problem needs an assembled form");
  require_same_graph(graph(), a_.graph(), "coefficient a");
  require_same_graph(graph(), g_.graph(), "coefficient g");
  require_same_graph(graph(), u_.graph(), "parameter field u");
  if (!(bounds_.M > 0.0)) throw PreconditionError("bound M must be positive");
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (std::abs(u_[i]) > bounds_.M) {
      std::ostringstream msg;
      msg << "parameter field u = " << u_[i] << " at vertex " << i << " lies outside [-M, M] with M = "
          << bounds_.M << "; h is only defined there";
      throw DomainError(msg.str());
    }
  }
  const auto& idx = graph().interior();
  const auto n = static_cast<Eigen::Index>(idx.size());
  mass_a_.resize(n);
  forcing_.resize(n);
  const VertexField& w = form_->weights();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t v = idx[static_cast<std::size_t>(i)];
    mass_a_[i] = w[v] * a_[v];
    forcing_[i] = w[v] * g_[v] * h_(u_[v]);
  }
}

ProblemInstance ProblemInstance::with_data(VertexField g, VertexField u) const {
  ProblemBounds b = bounds_;
  b.g_lo = g.values().minCoeff();
  b.g_hi = g.values().maxCoeff();
  return ProblemInstance(form_, a_, std::move(g), std::move(u), h_, nl_, b);
}

void ProblemInstance::require_dirichlet(const VertexField& x, const char* what) const {
  require_same_graph(graph(), x.graph(), what);
  if (!x.is_dirichlet()) throw PreconditionError(std::string(what) + ": field must vanish on V_0");
}

double ProblemInstance::action_interior(const Eigen::VectorXd& x) const {
  double nonlinear = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) nonlinear += forcing_[i] * nl_.F(x[i]);
  return 0.5 * form_->interior_energy(x) - 0.5 * mass_a_.dot(x.cwiseAbs2()) - nonlinear;
}

double ProblemInstance::action_change(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
  // 5-point Gauss–Legendre on [0, 1] for F(b) − F(a) = (b − a) ∫ f(a + s (b − a)) ds
  static constexpr std::array<double, 5> kNodes = {0.046910077030668018, 0.23076534494715845, 0.5, 0.7692346550528415, 0.95308992296933193};
  static constexpr std::array<double, 5> kWeights = {0.11846344252809471, 0.2393143352496831, 0.2844444444444445, 0.2393143352496831, 0.11846344252809471};
  const Eigen::VectorXd kd = form_->interior_stiffness() * d;
  double change = x.dot(kd) + 0.5 * d.dot(kd);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    change -= 0.5 * mass_a_[i] * d[i] * (2.0 * x[i] + d[i]);
    double dF;
    if (std::abs(d[i]) <= 1e-4) {
      dF = 0.0;
      for (std::size_t q = 0; q < kNodes.size(); ++q) dF += kWeights[q] * nl_.f(x[i] + kNodes[q] * d[i]);
      dF *= d[i];
    } else {
      dF = nl_.F(x[i] + d[i]) - nl_.F(x[i]);
    }
    change -= forcing_[i] * dF;
  }
  return change;
}

Eigen::VectorXd ProblemInstance::residual_interior(const Eigen::VectorXd& x) const {
  Eigen::VectorXd r = form_->interior_stiffness() * x;
  for (Eigen::Index i = 0; i < x.size(); ++i) r[i] -= mass_a_[i] * x[i] + forcing_[i] * nl_.f(x[i]);
  return r;
}

SparseMatrix ProblemInstance::hessian_interior(const Eigen::VectorXd& x) const {
  SparseMatrix h = form_->interior_stiffness();
  for (Eigen::Index i = 0; i < x.size(); ++i) h.coeffRef(i, i) -= mass_a_[i] + forcing_[i] * nl_.df(x[i]);
  return h;
}

double ProblemInstance::energy_norm_interior(const Eigen::VectorXd& x) const {
  return std::sqrt(std::max(0.0, form_->interior_energy(x)));
}

double ProblemInstance::action(const VertexField& x) const {
  require_dirichlet(x, "action");
  return action_interior(form_->restrict_interior(x));
}

Gradient ProblemInstance::gradient(const VertexField& x) const {
  require_dirichlet(x, "gradient");
  const Eigen::VectorXd xi = form_->restrict_interior(x);
  if (xi.size() == 0) return Gradient{VertexField::zeros(graph_ptr()), 0.0, Eigen::VectorXd()};
  Eigen::VectorXd r = residual_interior(xi);
  Eigen::VectorXd p = riesz_interior(r);
  const double dual = std::sqrt(std::max(0.0, r.dot(p)));
  return Gradient{form_->extend_dirichlet(p), dual, std::move(r)};
}

double ProblemInstance::directional_derivative(const VertexField& x, const VertexField& w) const {
  require_dirichlet(x, "directional_derivative");
  require_dirichlet(w, "directional_derivative");
  return residual_interior(form_->restrict_interior(x)).dot(form_->restrict_interior(w));
}

}  // namespace sgcp
