#include "s2fl/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace s2fl {

namespace {

constexpr double kInfBound = 1e299;

bool finite_bound(double b) { return std::abs(b) < kInfBound; }

double term_magnitude(const Term& t, std::span<const double> x) {
  auto inner = [&](int var, double scale, double offset) {
    return var >= 0 ? scale * x[var] + offset : offset;
  };
  const double u = inner(t.var, t.scale, t.offset);
  switch (t.kind) {
    case Atom::Affine: return std::abs(t.coeff * u);
    case Atom::Square: return std::abs(t.coeff) * u * u;
    case Atom::Quartic: return std::abs(t.coeff) * u * u * u * u;
    case Atom::Reciprocal: return u > 0 ? t.coeff / u : 0.0;
    case Atom::NegSqrt: return u > 0 ? t.coeff * std::sqrt(u) : 0.0;
    case Atom::NegLog: return u > 0 ? std::abs(t.coeff * std::log(u)) : 0.0;
    case Atom::QuotientSquare: {
      const double v = inner(t.var2, t.scale2, t.offset2);
      if (!(v > 0)) return 0.0;
      const double a = u / t.u_anchor + t.v_anchor / v;
      return std::abs(t.coeff) * a * a;
    }
  }
  return 0.0;
}

double gross_magnitude(const Expression& e, std::span<const double> x) {
  double m = std::abs(e.constant);
  for (const auto& t : e.terms) m += term_magnitude(t, x);
  return m;
}

Expression scale_expression(const Expression& e, const std::vector<double>& var_scale,
                            double divisor) {
  Expression out = e;
  out.constant /= divisor;
  for (auto& t : out.terms) {
    t.coeff /= divisor;
    if (t.var >= 0) t.scale *= var_scale[t.var];
    if (t.var2 >= 0) t.scale2 *= var_scale[t.var2];
  }
  return out;
}

// Simple Lawson-Hanson nonnegative least squares: min ||A z - b||, z >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.cols());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  for (int guard = 0; guard < 3 * m + 10; ++guard) {
    const Eigen::VectorXd w = a.transpose() * (b - a * z);
    int best = -1;
    double best_w = 1e-12 * (1.0 + b.norm());
    for (int j = 0; j < m; ++j) {
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    // re-solve on the passive set, backing off if entries go negative
    for (int inner = 0; inner < 2 * m + 10; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < m; ++j)
        if (passive[j]) idx.push_back(j);
      if (idx.empty()) break;
      Eigen::MatrixXd ap(a.rows(), idx.size());
      for (size_t j = 0; j < idx.size(); ++j) ap.col(j) = a.col(idx[j]);
      const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
      bool all_pos = true;
      for (size_t j = 0; j < idx.size(); ++j) all_pos = all_pos && zp[j] > 0;
      if (all_pos) {
        z.setZero();
        for (size_t j = 0; j < idx.size(); ++j) z[idx[j]] = zp[j];
        break;
      }
      double alpha = 1.0;
      for (size_t j = 0; j < idx.size(); ++j) {
        if (zp[j] <= 0) {
          const double zj = z[idx[j]];
          alpha = std::min(alpha, zj / (zj - zp[j]));
        }
      }
      for (size_t j = 0; j < idx.size(); ++j) {
        z[idx[j]] += alpha * (zp[j] - z[idx[j]]);
        if (z[idx[j]] <= 1e-14 * (1.0 + b.norm())) {
          z[idx[j]] = 0;
          passive[idx[j]] = false;
        }
      }
    }
  }
  return z;
}

struct BarrierProblem {
  const ConvexProgram* prog;
  int n = 0;

  bool strictly_feasible(std::span<const double> x, double margin) const {
    for (int i = 0; i < n; ++i) {
      const auto& v = prog->vars[i];
      if (finite_bound(v.lower) && !(x[i] > v.lower)) return false;
      if (finite_bound(v.upper) && !(x[i] < v.upper)) return false;
    }
    if (!prog->objective.in_domain(x)) return false;
    for (const auto& c : prog->constraints) {
      if (!c.expr.in_domain(x)) return false;
      if (!(c.expr.value(x) < -margin)) return false;
    }
    return true;
  }

  int barrier_count() const {
    int m = static_cast<int>(prog->constraints.size());
    for (const auto& v : prog->vars) {
      if (finite_bound(v.lower)) ++m;
      if (finite_bound(v.upper)) ++m;
    }
    return m;
  }

  double phi(double t, std::span<const double> x) const {
    double val = t * prog->objective.value(x);
    for (const auto& c : prog->constraints) val -= std::log(-c.expr.value(x));
    for (int i = 0; i < n; ++i) {
      const auto& v = prog->vars[i];
      if (finite_bound(v.lower)) val -= std::log(x[i] - v.lower);
      if (finite_bound(v.upper)) val -= std::log(v.upper - x[i]);
    }
    return val;
  }

  void grad_hess(double t, std::span<const double> x, Eigen::VectorXd& g,
                 Eigen::MatrixXd& h) const {
    g.setZero(n);
    h.setZero(n, n);
    std::span<double> gs(g.data(), n);
    std::span<double> hs(h.data(), size_t(n) * n);
    prog->objective.add_gradient(x, t, gs);
    prog->objective.add_hessian(x, t, hs, n);
    Eigen::VectorXd gi(n);
    for (const auto& c : prog->constraints) {
      const double val = c.expr.value(x);
      gi.setZero();
      std::span<double> gis(gi.data(), n);
      c.expr.add_gradient(x, 1.0, gis);
      g += gi / (-val);
      h += gi * gi.transpose() / (val * val);
      c.expr.add_hessian(x, 1.0 / (-val), hs, n);
    }
    for (int i = 0; i < n; ++i) {
      const auto& v = prog->vars[i];
      if (finite_bound(v.lower)) {
        const double d = x[i] - v.lower;
        g[i] -= 1.0 / d;
        h(i, i) += 1.0 / (d * d);
      }
      if (finite_bound(v.upper)) {
        const double d = v.upper - x[i];
        g[i] += 1.0 / d;
        h(i, i) += 1.0 / (d * d);
      }
    }
  }
};

struct CenterResult {
  bool converged = true;
  int newton_steps = 0;
};

// Newton centering of phi(t, .) from x (modified in place).
CenterResult center(const BarrierProblem& bp, double t, std::vector<double>& x,
                    int newton_budget) {
  const int n = bp.n;
  CenterResult res;
  Eigen::VectorXd g(n), d(n);
  Eigen::MatrixXd h(n, n);
  for (int iter = 0; iter < newton_budget; ++iter) {
    bp.grad_hess(t, x, g, h);
    double damping = 0.0;
    const double diag_scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-30);
    double decrement = -1.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd hd = h;
      if (damping > 0) hd.diagonal().array() += damping;
      d = hd.ldlt().solve(-g);
      if (d.allFinite()) {
        decrement = -g.dot(d);
        if (decrement > 0) break;
      }
      damping = damping == 0 ? 1e-10 * diag_scale : damping * 100.0;
    }
    if (!(decrement > 0)) break;
    if (0.5 * decrement <= 3e-17 * std::max(1.0, t)) break;
    ++res.newton_steps;

    const double phi0 = bp.phi(t, x);
    double alpha = 1.0;
    std::vector<double> trial(x);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i) trial[i] = x[i] + alpha * d[i];
      if (bp.strictly_feasible(trial, 0.0) &&
          bp.phi(t, trial) <= phi0 - 0.25 * alpha * decrement) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
    x = trial;
  }
  return res;
}

struct ScaledProgram {
  ConvexProgram prog;           // normalized program
  std::vector<double> var_scale;
  std::vector<double> row_scale;
  double obj_scale = 1;
};

ScaledProgram build_scaled(const ConvexProgram& program, std::span<const double> start) {
  ScaledProgram sp;
  const int n = static_cast<int>(program.vars.size());
  sp.var_scale.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::abs(start[i]);
    sp.var_scale[i] = (s > 1e-12 && s < 1e14) ? s : 1.0;
  }
  sp.obj_scale = std::max(gross_magnitude(program.objective, start), 1e-12);
  sp.prog.objective = scale_expression(program.objective, sp.var_scale, sp.obj_scale);
  for (const auto& c : program.constraints) {
    const double rs = std::max(gross_magnitude(c.expr, start), 1e-12);
    sp.row_scale.push_back(rs);
    sp.prog.constraints.push_back({c.label, scale_expression(c.expr, sp.var_scale, rs)});
  }
  for (int i = 0; i < n; ++i) {
    const auto& v = program.vars[i];
    Variable sv = v;
    sv.lower = finite_bound(v.lower) ? v.lower / sp.var_scale[i] : v.lower;
    sv.upper = finite_bound(v.upper) ? v.upper / sp.var_scale[i] : v.upper;
    sv.start = start[i] / sp.var_scale[i];
    sp.prog.vars.push_back(sv);
  }
  return sp;
}

// shared residual computation; `relative_activity` rows are detected at a
// per-row magnitude scale
double kkt_residual_impl(const ConvexProgram& prog, std::span<const double> x) {
  const int n = static_cast<int>(prog.vars.size());
  Eigen::VectorXd grad0 = Eigen::VectorXd::Zero(n);
  std::span<double> g0s(grad0.data(), n);
  prog.objective.add_gradient(x, 1.0, g0s);

  struct Row {
    double value;
    Eigen::VectorXd grad;
  };
  std::vector<Row> active;
  auto consider = [&](double value, double scale, const Eigen::VectorXd& grad) {
    if (value / std::max(scale, 1e-12) >= -1e-5) active.push_back({value, grad});
  };
  Eigen::VectorXd gi(n);
  for (const auto& c : prog.constraints) {
    const double val = c.expr.value(x);
    gi.setZero();
    std::span<double> gis(gi.data(), n);
    c.expr.add_gradient(x, 1.0, gis);
    consider(val, gross_magnitude(c.expr, x), gi);
  }
  for (int i = 0; i < n; ++i) {
    const auto& v = prog.vars[i];
    const double s = std::max({1.0, std::abs(x[i]), std::abs(v.lower), std::abs(v.upper)});
    if (finite_bound(v.lower)) {
      gi.setZero();
      gi[i] = -1;
      consider(v.lower - x[i], std::max(1.0, std::abs(v.lower) + std::abs(x[i])), gi);
    }
    if (finite_bound(v.upper)) {
      gi.setZero();
      gi[i] = 1;
      consider(x[i] - v.upper, s, gi);
    }
  }

  if (active.empty()) return grad0.norm();
  Eigen::MatrixXd a(n, active.size());
  for (size_t j = 0; j < active.size(); ++j) a.col(j) = active[j].grad;
  const Eigen::VectorXd lambda = nnls(a, -grad0);
  const double stationarity = (grad0 + a * lambda).squaredNorm();
  double comp = 0.0;
  for (size_t j = 0; j < active.size(); ++j) {
    const double c = lambda[j] * active[j].value;
    comp += c * c;
  }
  return std::sqrt(stationarity + comp);
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max-iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

double kkt_residual(const ConvexProgram& program, std::span<const double> point) {
  return kkt_residual_impl(program, point);
}

SolverResult solve(const ConvexProgram& program, std::span<const double> start,
                   const SolverOptions& options) {
  const auto t_begin = std::chrono::steady_clock::now();
  const int n = static_cast<int>(program.vars.size());
  SolverResult res;
  res.point.assign(start.begin(), start.end());

  // clamp the start strictly inside the box
  for (int i = 0; i < n; ++i) {
    const auto& v = program.vars[i];
    if (finite_bound(v.lower) && finite_bound(v.upper)) {
      const double m = 1e-9 * (v.upper - v.lower);
      res.point[i] = std::clamp(res.point[i], v.lower + m, v.upper - m);
    } else if (finite_bound(v.lower)) {
      res.point[i] = std::max(res.point[i], v.lower + 1e-12 * std::max(1.0, std::abs(v.lower)));
    } else if (finite_bound(v.upper)) {
      res.point[i] = std::min(res.point[i], v.upper - 1e-12 * std::max(1.0, std::abs(v.upper)));
    }
  }

  ScaledProgram sp = build_scaled(program, res.point);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = res.point[i] / sp.var_scale[i];

  BarrierProblem bp{&sp.prog, n};
  int newton_used = 0;

  // ---- phase I: drive the worst normalized violation strictly negative ----
  double worst = -std::numeric_limits<double>::infinity();
  std::string worst_label;
  for (const auto& c : sp.prog.constraints) {
    const double v = c.expr.value(y);
    if (v > worst) {
      worst = v;
      worst_label = c.label;
    }
  }
  if (!sp.prog.constraints.empty() && worst >= -1e-10) {
    // The slack objective leaves unconstrained directions free, so the barrier
    // would push one-sided variables arbitrarily far; a trust window around
    // the start keeps the search local, with an unwindowed retry as fallback.
    auto phase1_attempt = [&](double window, std::vector<double>& out) {
      ConvexProgram phase1;
      phase1.vars = sp.prog.vars;
      if (window > 0) {
        for (int i = 0; i < n; ++i) {
          auto& v = phase1.vars[i];
          const double w = window * std::max(1.0, std::abs(v.start));
          if (!finite_bound(v.upper) || v.upper > v.start + w) v.upper = v.start + w;
          if (!finite_bound(v.lower) || v.lower < v.start - w) v.lower = v.start - w;
        }
      }
      const int slack = phase1.add_variable("_slack", -kInfBound * 10, kInfBound * 10, 0.0);
      phase1.objective.affine(slack, 1.0);
      for (const auto& c : sp.prog.constraints) {
        ConstraintRow row = c;
        row.expr.affine(slack, -1.0);
        phase1.constraints.push_back(row);
      }
      BarrierProblem bp1{&phase1, n + 1};
      std::vector<double> y1(y);
      y1.push_back(worst + 1.0);

      const int m = bp1.barrier_count();
      // start with the slack objective already competitive with the barrier,
      // so a warm start near the boundary is not dragged toward the center
      double t = std::max(1.0, double(m));
      while (newton_used < options.max_newton_total) {
        auto cr = center(bp1, t, y1, std::min(20, options.max_newton_total - newton_used));
        newton_used += cr.newton_steps;
        // check the true violation of the x-part
        double mv = -std::numeric_limits<double>::infinity();
        std::vector<double> xpart(y1.begin(), y1.begin() + n);
        for (const auto& c : sp.prog.constraints) {
          const double v = c.expr.value(xpart);
          if (v > mv) {
            mv = v;
            worst_label = c.label;
          }
        }
        if (mv < -1e-9) {
          out = xpart;
          return true;
        }
        if (m / t < 1e-12) {
          if (mv < -1e-14) {
            out = xpart;
            return true;
          }
          return false;
        }
        t *= options.barrier_growth;
      }
      return false;
    };
    bool feasible = phase1_attempt(10.0, y);
    if (!feasible) feasible = phase1_attempt(1e4, y);
    if (!feasible) feasible = phase1_attempt(0, y);
    if (!feasible) {
      res.status = SolveStatus::Infeasible;
      res.message = "no strictly feasible point found; most violated row: " + worst_label;
      res.iterations = newton_used;
      for (int i = 0; i < n; ++i) res.point[i] = y[i] * sp.var_scale[i];
      res.objective = program.objective.in_domain(res.point)
                          ? program.objective.value(res.point)
                          : std::numeric_limits<double>::quiet_NaN();
      res.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
      return res;
    }
  }

  // ---- phase II: central path ----
  const int m = std::max(bp.barrier_count(), 1);
  double t = 1.0;
  const double gap_target = 0.1 * options.tol;
  bool optimal = false;
  while (newton_used < options.max_newton_total) {
    auto cr = center(bp, t, y, std::min(120, options.max_newton_total - newton_used));
    newton_used += cr.newton_steps;
    if (double(m) / t <= gap_target) {
      res.kkt_residual = kkt_residual_impl(sp.prog, y);
      if (res.kkt_residual <= options.tol || t > 1e17) {
        optimal = res.kkt_residual <= options.tol;
        break;
      }
    }
    t *= options.barrier_growth;
  }

  for (int i = 0; i < n; ++i) res.point[i] = y[i] * sp.var_scale[i];
  res.objective = program.objective.value(res.point);
  res.iterations = newton_used;
  if (res.kkt_residual == 0) res.kkt_residual = kkt_residual_impl(sp.prog, y);
  res.status = optimal ? SolveStatus::Optimal : SolveStatus::MaxIter;
  if (!optimal) res.message = "barrier budget exhausted; scaled kkt residual " +
                              std::to_string(res.kkt_residual);
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return res;
}

}  // namespace s2fl
