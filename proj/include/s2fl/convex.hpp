#pragma once

#include <span>
#include <string>
#include <vector>

namespace s2fl {

// A convex program assembled from a fixed atom set. Every atom is convex by
// construction, so any expression built from them with nonnegative weights
// (plus free-sign affine parts) is verifiably convex. Atoms act on an inner
// affine map u = scale * x[var] + offset of a single variable; var = -1
// freezes the input to the constant `offset` (used by benchmark schemes that
// pin variables).
enum class Atom {
  Affine,         // c * u, any sign of c
  Square,         // c * u^2, c >= 0
  Quartic,        // c * u^4, c >= 0
  Reciprocal,     // c / u, c >= 0, u > 0
  NegSqrt,        // -c * sqrt(u), c >= 0, u > 0
  NegLog,         // -c * ln(u), c >= 0, u > 0
  QuotientSquare, // c * (u/u_anchor + v_anchor/v)^2, c >= 0, u >= 0, v > 0
};

struct Term {
  Atom kind = Atom::Affine;
  double coeff = 0;
  int var = -1;
  double scale = 1, offset = 0;
  // QuotientSquare second input v = scale2 * x[var2] + offset2
  int var2 = -1;
  double scale2 = 1, offset2 = 0;
  double u_anchor = 1, v_anchor = 1;
};

struct Expression {
  double constant = 0;
  std::vector<Term> terms;

  Expression& add_constant(double c);
  Expression& affine(int var, double coeff, double scale = 1, double offset = 0);
  Expression& square(int var, double coeff, double scale = 1, double offset = 0);
  Expression& quartic(int var, double coeff, double scale = 1, double offset = 0);
  Expression& reciprocal(int var, double coeff, double scale = 1, double offset = 0);
  Expression& neg_sqrt(int var, double coeff, double scale = 1, double offset = 0);
  Expression& neg_log(int var, double coeff, double scale = 1, double offset = 0);
  Expression& quotient_square(int u_var, int v_var, double coeff, double u_anchor,
                              double v_anchor, double u_scale = 1, double u_offset = 0,
                              double v_scale = 1, double v_offset = 0);

  bool in_domain(std::span<const double> x) const;
  double value(std::span<const double> x) const;
  // accumulate gradient / Hessian contributions (Hessian is dense row-major n*n)
  void add_gradient(std::span<const double> x, double weight, std::span<double> grad) const;
  void add_hessian(std::span<const double> x, double weight, std::span<double> hess,
                   int n) const;
};

struct Variable {
  std::string name;
  double lower = -1e300; // -inf sentinel handled via std::isfinite
  double upper = 1e300;
  double start = 0;
};

struct ConstraintRow {
  std::string label;  // which model constraint this encodes
  Expression expr;    // expr(x) <= 0
};

struct ConvexProgram {
  std::vector<Variable> vars;
  Expression objective;
  std::vector<ConstraintRow> constraints;

  int add_variable(const std::string& name, double lower, double upper, double start);
  // human-readable dump for debugging
  std::string dump() const;
};

}  // namespace s2fl
