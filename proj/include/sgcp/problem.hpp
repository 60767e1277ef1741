#pragma once

// Semilinear Dirichlet problem
//
//   Δx + a x + g f(x) h(u) = 0  on V \ V_0,   x = 0 on V_0,
//
// discretized at a fixed gasket level, together with its action functional
//
//   J(x) = ½ W_m(x) − ½ ∫ a x² dμ − ∫ g F(x) h(u) dμ
//
// whose critical points are the discrete weak solutions.

#include "sgcp/energy_form.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sgcp {

/// Named scalar expression from the fixed registry used for h and for
/// analytic coefficient fields.
struct Expression {
  enum class Kind { constant, polynomial, scaled_power, clamped_affine };

  Kind kind = Kind::constant;
  std::vector<double> coeffs;  ///< polynomial: sum_k coeffs[k] v^k; constant: coeffs[0]
  double scale = 1.0;          ///< scaled_power: scale |v|^(exponent-2) v
  double exponent = 2.0;
  double offset = 0.0;         ///< clamped_affine: clamp(offset + slope v, lo, hi)
  double slope = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  static Expression constant(double c) { return Expression{Kind::constant, {c}}; }
  static Expression polynomial(std::vector<double> c) { return Expression{Kind::polynomial, std::move(c)}; }
  static Expression scaled_power(double scale, double exponent);
  static Expression clamped_affine(double offset, double slope, double lo, double hi);

  double operator()(double v) const;
};

/// Nonlinearity f with primitive F(v) = ∫_0^v f and the exponent θ of the
/// Ambrosetti–Rabinowitz condition.
class Nonlinearity {
 public:
  enum class Kind { power, polynomial, sign_power, custom };

  /// f(v) = scale |v|^(θ-2) v, F(v) = scale |v|^θ / θ.
  static Nonlinearity power(double scale, double theta);
  /// f(v) = sum_k coeffs[k] v^k.
  static Nonlinearity polynomial(std::vector<double> coeffs, double theta);
  /// f(v) = eta tanh(v / width) + scale |v|^(θ-2) v. A smoothed sign term
  /// that makes F(v) ≈ eta |v| once |v| >> width.
  static Nonlinearity sign_power(double eta, double width, double scale, double theta);
  /// Arbitrary continuous f; F by adaptive quadrature.
  static Nonlinearity custom(std::function<double(double)> f, double theta);

  /// Same f, but F evaluated by quadrature regardless of closed forms.
  Nonlinearity with_quadrature_primitive() const;

  double f(double v) const { return f_(v); }
  double F(double v) const;
  /// f'(v); closed form where known, central difference otherwise.
  double df(double v) const;

  double theta() const noexcept { return theta_; }
  bool closed_form_F() const noexcept { return static_cast<bool>(F_); }
  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }

 private:
  Kind kind_ = Kind::custom;
  std::vector<double> params_;
  double theta_ = 4.0;
  std::function<double(double)> f_;
  std::function<double(double)> F_;
  std::function<double(double)> df_;
};

/// Constants named in the hypotheses on the problem data.
struct ProblemBounds {
  double M = 1.0;        ///< |u| <= M, domain of h
  double M1 = 1.0;       ///< sup-norm ball radius of the growth bound
  double beta = 0.0;
  double eta = 0.0;      ///< lower slope of F near 0
  double epsilon = 1.0;  ///< θ > 2 + epsilon
  double c = 0.0;        ///< ½ − 1/θ >= c
  double g_lo = 0.0, g_hi = 0.0;
  double h_lo = 0.0, h_hi = 0.0;
};

struct Gradient {
  VertexField riesz;         ///< p with W(p, w) = J'(x)(w) for all Dirichlet w
  double dual_norm = 0.0;    ///< sqrt(W(p, p))
  Eigen::VectorXd residual;  ///< J'(x)(e_i) for interior basis fields
};

class ProblemInstance {
 public:
  /// Throws DomainError if |u| > M anywhere, PreconditionError on graph mismatch.
  ProblemInstance(FormPtr form, VertexField a, VertexField g, VertexField u, Expression h,
                  Nonlinearity nonlinearity, ProblemBounds bounds);

  /// g¹, g², h¹, h² taken from the data (h sampled on 201 points of [−M, M]).
  static ProblemBounds fill_data_bounds(ProblemBounds b, const VertexField& g, const Expression& h);

  const DiscreteForm& form() const noexcept { return *form_; }
  const FormPtr& form_ptr() const noexcept { return form_; }
  const PrefractalGraph& graph() const noexcept { return form_->graph(); }
  const GraphPtr& graph_ptr() const noexcept { return form_->graph_ptr(); }
  const VertexField& a() const noexcept { return a_; }
  const VertexField& g() const noexcept { return g_; }
  const VertexField& u() const noexcept { return u_; }
  const Expression& h() const noexcept { return h_; }
  const Nonlinearity& nonlinearity() const noexcept { return nl_; }
  const ProblemBounds& bounds() const noexcept { return bounds_; }

  /// Same problem with replaced g and u data (bounds g¹, g² recomputed).
  ProblemInstance with_data(VertexField g, VertexField u) const;

  double action(const VertexField& x) const;
  Gradient gradient(const VertexField& x) const;
  /// J'(x)(w) for Dirichlet x and w.
  double directional_derivative(const VertexField& x, const VertexField& w) const;

  // Interior-DOF versions used by the solvers.
  std::size_t dofs() const noexcept { return form_->interior_size(); }
  double action_interior(const Eigen::VectorXd& x) const;
  /// J(x + d) − J(x), evaluated without cancellation for small d.
  double action_change(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const;
  Eigen::VectorXd residual_interior(const Eigen::VectorXd& x) const;
  /// Riesz representative of a residual: K_II^-1 r.
  Eigen::VectorXd riesz_interior(const Eigen::VectorXd& residual) const { return form_->solve_interior(residual); }
  /// K_II − diag(w a + w g h(u) f'(x)).
  SparseMatrix hessian_interior(const Eigen::VectorXd& x) const;
  double energy_norm_interior(const Eigen::VectorXd& x) const;

  /// w_i a_i and w_i g_i h(u_i) on interior vertices.
  const Eigen::VectorXd& interior_mass_a() const noexcept { return mass_a_; }
  const Eigen::VectorXd& interior_forcing() const noexcept { return forcing_; }

 private:
  void require_dirichlet(const VertexField& x, const char* what) const;

  FormPtr form_;
  VertexField a_, g_, u_;
  Expression h_;
  Nonlinearity nl_;
  ProblemBounds bounds_;
  Eigen::VectorXd mass_a_;
  Eigen::VectorXd forcing_;
};

}  // namespace sgcp
