#include "s2fl/convex.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace s2fl {

namespace {

double inner(const double* x, int var, double scale, double offset) {
  return var >= 0 ? scale * x[var] + offset : offset;
}

void check_nonneg(double coeff, const char* atom) {
  if (coeff < 0) throw std::invalid_argument(std::string(atom) + " weight must be >= 0");
}

}  // namespace

Expression& Expression::add_constant(double c) {
  constant += c;
  return *this;
}

Expression& Expression::affine(int var, double coeff, double scale, double offset) {
  terms.push_back({Atom::Affine, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::square(int var, double coeff, double scale, double offset) {
  check_nonneg(coeff, "square");
  terms.push_back({Atom::Square, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::quartic(int var, double coeff, double scale, double offset) {
  check_nonneg(coeff, "quartic");
  terms.push_back({Atom::Quartic, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::reciprocal(int var, double coeff, double scale, double offset) {
  check_nonneg(coeff, "reciprocal");
  terms.push_back({Atom::Reciprocal, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::neg_sqrt(int var, double coeff, double scale, double offset) {
  check_nonneg(coeff, "neg_sqrt");
  terms.push_back({Atom::NegSqrt, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::neg_log(int var, double coeff, double scale, double offset) {
  check_nonneg(coeff, "neg_log");
  terms.push_back({Atom::NegLog, coeff, var, scale, offset});
  return *this;
}

Expression& Expression::quotient_square(int u_var, int v_var, double coeff, double u_anchor,
                                        double v_anchor, double u_scale, double u_offset,
                                        double v_scale, double v_offset) {
  check_nonneg(coeff, "quotient_square");
  Term t;
  t.kind = Atom::QuotientSquare;
  t.coeff = coeff;
  t.var = u_var;
  t.scale = u_scale;
  t.offset = u_offset;
  t.var2 = v_var;
  t.scale2 = v_scale;
  t.offset2 = v_offset;
  t.u_anchor = u_anchor;
  t.v_anchor = v_anchor;
  terms.push_back(t);
  return *this;
}

bool Expression::in_domain(std::span<const double> x) const {
  for (const auto& t : terms) {
    const double u = inner(x.data(), t.var, t.scale, t.offset);
    switch (t.kind) {
      case Atom::Reciprocal:
      case Atom::NegSqrt:
      case Atom::NegLog:
        if (!(u > 0)) return false;
        break;
      case Atom::QuotientSquare: {
        const double v = inner(x.data(), t.var2, t.scale2, t.offset2);
        if (!(v > 0) || u < 0) return false;
        break;
      }
      default:
        break;
    }
  }
  return true;
}

double Expression::value(std::span<const double> x) const {
  double sum = constant;
  for (const auto& t : terms) {
    const double u = inner(x.data(), t.var, t.scale, t.offset);
    switch (t.kind) {
      case Atom::Affine: sum += t.coeff * u; break;
      case Atom::Square: sum += t.coeff * u * u; break;
      case Atom::Quartic: sum += t.coeff * u * u * u * u; break;
      case Atom::Reciprocal: sum += t.coeff / u; break;
      case Atom::NegSqrt: sum -= t.coeff * std::sqrt(u); break;
      case Atom::NegLog: sum -= t.coeff * std::log(u); break;
      case Atom::QuotientSquare: {
        const double v = inner(x.data(), t.var2, t.scale2, t.offset2);
        const double a = u / t.u_anchor + t.v_anchor / v;
        sum += t.coeff * a * a;
        break;
      }
    }
  }
  return sum;
}

void Expression::add_gradient(std::span<const double> x, double weight,
                              std::span<double> grad) const {
  for (const auto& t : terms) {
    if (t.var < 0 && t.kind != Atom::QuotientSquare) continue;
    const double u = inner(x.data(), t.var, t.scale, t.offset);
    const double w = weight * t.coeff;
    switch (t.kind) {
      case Atom::Affine:
        if (t.var >= 0) grad[t.var] += w * t.scale;
        break;
      case Atom::Square:
        if (t.var >= 0) grad[t.var] += w * 2.0 * u * t.scale;
        break;
      case Atom::Quartic:
        if (t.var >= 0) grad[t.var] += w * 4.0 * u * u * u * t.scale;
        break;
      case Atom::Reciprocal:
        if (t.var >= 0) grad[t.var] -= w / (u * u) * t.scale;
        break;
      case Atom::NegSqrt:
        if (t.var >= 0) grad[t.var] -= w * 0.5 / std::sqrt(u) * t.scale;
        break;
      case Atom::NegLog:
        if (t.var >= 0) grad[t.var] -= w / u * t.scale;
        break;
      case Atom::QuotientSquare: {
        const double v = inner(x.data(), t.var2, t.scale2, t.offset2);
        const double a = u / t.u_anchor + t.v_anchor / v;
        if (t.var >= 0) grad[t.var] += w * 2.0 * a * t.scale / t.u_anchor;
        if (t.var2 >= 0) grad[t.var2] -= w * 2.0 * a * t.v_anchor * t.scale2 / (v * v);
        break;
      }
    }
  }
}

void Expression::add_hessian(std::span<const double> x, double weight, std::span<double> hess,
                             int n) const {
  for (const auto& t : terms) {
    const double u = inner(x.data(), t.var, t.scale, t.offset);
    const double w = weight * t.coeff;
    switch (t.kind) {
      case Atom::Affine:
        break;
      case Atom::Square:
        if (t.var >= 0) hess[t.var * n + t.var] += w * 2.0 * t.scale * t.scale;
        break;
      case Atom::Quartic:
        if (t.var >= 0) hess[t.var * n + t.var] += w * 12.0 * u * u * t.scale * t.scale;
        break;
      case Atom::Reciprocal:
        if (t.var >= 0) hess[t.var * n + t.var] += w * 2.0 / (u * u * u) * t.scale * t.scale;
        break;
      case Atom::NegSqrt:
        if (t.var >= 0)
          hess[t.var * n + t.var] += w * 0.25 / (u * std::sqrt(u)) * t.scale * t.scale;
        break;
      case Atom::NegLog:
        if (t.var >= 0) hess[t.var * n + t.var] += w / (u * u) * t.scale * t.scale;
        break;
      case Atom::QuotientSquare: {
        const double v = inner(x.data(), t.var2, t.scale2, t.offset2);
        const double a = u / t.u_anchor + t.v_anchor / v;
        const double du = t.scale / t.u_anchor;                       // dA/dx_u
        const double dv = -t.v_anchor * t.scale2 / (v * v);           // dA/dx_v
        const double dvv = 2.0 * t.v_anchor * t.scale2 * t.scale2 / (v * v * v); // d2A/dx_v^2
        if (t.var >= 0) hess[t.var * n + t.var] += w * 2.0 * du * du;
        if (t.var2 >= 0) hess[t.var2 * n + t.var2] += w * 2.0 * (dv * dv + a * dvv);
        if (t.var >= 0 && t.var2 >= 0) {
          hess[t.var * n + t.var2] += w * 2.0 * du * dv;
          hess[t.var2 * n + t.var] += w * 2.0 * du * dv;
        }
        break;
      }
    }
  }
}

int ConvexProgram::add_variable(const std::string& name, double lower, double upper,
                                double start) {
  vars.push_back({name, lower, upper, start});
  return static_cast<int>(vars.size()) - 1;
}

namespace {

const char* atom_name(Atom a) {
  switch (a) {
    case Atom::Affine: return "affine";
    case Atom::Square: return "square";
    case Atom::Quartic: return "quartic";
    case Atom::Reciprocal: return "recip";
    case Atom::NegSqrt: return "-sqrt";
    case Atom::NegLog: return "-log";
    case Atom::QuotientSquare: return "quot2";
  }
  return "?";
}

void dump_expr(std::ostream& os, const Expression& e, const std::vector<Variable>& vars) {
  os << e.constant;
  for (const auto& t : e.terms) {
    const std::string v = t.var >= 0 ? vars[t.var].name : "const";
    os << " + " << t.coeff << "*" << atom_name(t.kind) << "(" << t.scale << "*" << v;
    if (t.offset != 0) os << (t.offset > 0 ? "+" : "") << t.offset;
    if (t.kind == Atom::QuotientSquare) {
      const std::string v2 = t.var2 >= 0 ? vars[t.var2].name : "const";
      os << "; " << t.scale2 << "*" << v2;
      if (t.offset2 != 0) os << (t.offset2 > 0 ? "+" : "") << t.offset2;
      os << "; ubar=" << t.u_anchor << ", vbar=" << t.v_anchor;
    }
    os << ")";
  }
}

}  // namespace

std::string ConvexProgram::dump() const {
  std::ostringstream os;
  os << "minimize ";
  dump_expr(os, objective, vars);
  os << "\nsubject to\n";
  for (const auto& c : constraints) {
    os << "  [" << c.label << "] ";
    dump_expr(os, c.expr, vars);
    os << " <= 0\n";
  }
  os << "variables\n";
  for (const auto& v : vars) {
    os << "  " << v.name << " in [" << v.lower << ", " << v.upper << "], start " << v.start
       << "\n";
  }
  return os.str();
}

}  // namespace s2fl
