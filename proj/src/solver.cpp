#include "restore/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

namespace restore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(std::uint64_t h, const Eigen::VectorXd& v) {
  const unsigned char* p = reinterpret_cast<const unsigned char*>(v.data());
  for (size_t i = 0; i < sizeof(double) * (size_t)v.size(); ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_limit: return "iteration_limit";
    default: return "infeasible_detected";
  }
}

double kkt_residual_norm(const NlpProblem& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y_eq,
                         const Eigen::VectorXd& y_ineq,
                         const Eigen::VectorXd& z_lower,
                         const Eigen::VectorXd& z_upper,
                         const Eigen::VectorXd& slacks, double sigma_f) {
  Eigen::VectorXd g;
  p.gradient(x, g);
  Eigen::VectorXd stat = sigma_f * g;
  if (p.m_eq) {
    Eigen::SparseMatrix<double> je;
    p.jac_eq(x, je);
    stat += je.transpose() * y_eq;
  }
  if (p.m_ineq) {
    Eigen::SparseMatrix<double> ji;
    p.jac_ineq(x, ji);
    stat += ji.transpose() * y_ineq;
  }
  stat -= z_lower;
  stat += z_upper;
  double r = inf_norm(stat);
  if (p.m_eq) {
    Eigen::VectorXd ce;
    p.eval_eq(x, ce);
    r = std::max(r, inf_norm(ce));
  }
  if (p.m_ineq) {
    Eigen::VectorXd ci;
    p.eval_ineq(x, ci);
    r = std::max(r, inf_norm(ci + slacks));
    r = std::max(r, inf_norm(y_ineq.cwiseProduct(slacks)));
  }
  for (int i = 0; i < p.n; ++i) {
    if (std::isfinite(p.lower(i)))
      r = std::max(r, std::abs(z_lower(i) * (x(i) - p.lower(i))));
    if (std::isfinite(p.upper(i)))
      r = std::max(r, std::abs(z_upper(i) * (p.upper(i) - x(i))));
  }
  return r;
}

Eigen::VectorXd default_start(const NlpProblem& p, const Eigen::VectorXd* hint) {
  Eigen::VectorXd x(p.n);
  for (int i = 0; i < p.n; ++i) {
    double lo = p.lower(i), hi = p.upper(i);
    double v;
    if (hint)
      v = (*hint)(i);
    else if (std::isfinite(lo) && std::isfinite(hi))
      v = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
      v = lo + 1.0;
    else if (std::isfinite(hi))
      v = hi - 1.0;
    else
      v = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      double pad = 1e-3 * (hi - lo);
      v = std::min(std::max(v, lo + pad), hi - pad);
    } else if (std::isfinite(lo)) {
      v = std::max(v, lo + 1e-3 * std::max(1.0, std::abs(lo)));
    } else if (std::isfinite(hi)) {
      v = std::min(v, hi - 1e-3 * std::max(1.0, std::abs(hi)));
    }
    x(i) = v;
  }
  return x;
}

SolveResult solve(const NlpProblem& p, const Eigen::VectorXd& x0,
                  const SolverOptions& opts) {
  if (opts.kkt_tolerance <= 0 || opts.step_fraction <= 0 ||
      opts.step_fraction >= 1)
    throw std::invalid_argument("invalid solver options");

  // Variables pinned by lb == ub are parameters, not unknowns: optimize
  // over the free subset and reconstruct their bound duals afterwards.
  {
    int nfix = 0;
    for (int i = 0; i < p.n; ++i)
      if (p.lower(i) == p.upper(i)) ++nfix;
    if (nfix > 0) {
      const int nf = p.n - nfix;
      std::vector<int> free_of(nf);
      Eigen::VectorXd xfull = Eigen::VectorXd::Zero(p.n);
      Eigen::SparseMatrix<double> S(p.n, nf);  // x_full = S x_free + pins
      S.reserve(Eigen::VectorXi::Constant(nf, 1));
      for (int i = 0, k = 0; i < p.n; ++i) {
        if (p.lower(i) == p.upper(i)) {
          xfull(i) = p.lower(i);
        } else {
          free_of[k] = i;
          S.insert(i, k) = 1.0;
          ++k;
        }
      }
      S.makeCompressed();
      auto expand = [&xfull, &S](const Eigen::VectorXd& xf) {
        Eigen::VectorXd x = xfull;
        x += S * xf;
        return x;
      };
      NlpProblem q;
      q.n = nf;
      q.m_eq = p.m_eq;
      q.m_ineq = p.m_ineq;
      q.lower.resize(nf);
      q.upper.resize(nf);
      Eigen::VectorXd xf0(nf);
      for (int k = 0; k < nf; ++k) {
        q.lower(k) = p.lower(free_of[k]);
        q.upper(k) = p.upper(free_of[k]);
        xf0(k) = x0(free_of[k]);
      }
      q.objective = [&](const Eigen::VectorXd& xf) {
        return p.objective(expand(xf));
      };
      q.gradient = [&](const Eigen::VectorXd& xf, Eigen::VectorXd& g) {
        Eigen::VectorXd gfull;
        p.gradient(expand(xf), gfull);
        g = S.transpose() * gfull;
      };
      if (p.m_eq) {
        q.eval_eq = [&](const Eigen::VectorXd& xf, Eigen::VectorXd& r) {
          p.eval_eq(expand(xf), r);
        };
        q.jac_eq = [&](const Eigen::VectorXd& xf,
                       Eigen::SparseMatrix<double>& j) {
          Eigen::SparseMatrix<double> jf;
          p.jac_eq(expand(xf), jf);
          j = jf * S;
        };
      }
      if (p.m_ineq) {
        q.eval_ineq = [&](const Eigen::VectorXd& xf, Eigen::VectorXd& r) {
          p.eval_ineq(expand(xf), r);
        };
        q.jac_ineq = [&](const Eigen::VectorXd& xf,
                         Eigen::SparseMatrix<double>& j) {
          Eigen::SparseMatrix<double> jf;
          p.jac_ineq(expand(xf), jf);
          j = jf * S;
        };
      }
      q.lag_hessian = [&](const Eigen::VectorXd& xf, double sf,
                          const Eigen::VectorXd& ye, const Eigen::VectorXd& yi,
                          Eigen::SparseMatrix<double>& h) {
        Eigen::SparseMatrix<double> hf;
        p.lag_hessian(expand(xf), sf, ye, yi, hf);
        h = S.transpose() * hf * S;
      };

      SolveResult rf = solve(q, xf0, opts);

      SolveResult res = rf;
      res.x = expand(rf.x);
      res.z_lower = Eigen::VectorXd::Zero(p.n);
      res.z_upper = Eigen::VectorXd::Zero(p.n);
      for (int k = 0; k < nf; ++k) {
        res.z_lower(free_of[k]) = rf.z_lower(k);
        res.z_upper(free_of[k]) = rf.z_upper(k);
      }
      // the pinned-variable duals absorb whatever stationarity requires
      Eigen::VectorXd stat;
      p.gradient(res.x, stat);
      stat *= rf.objective_scaling;
      if (p.m_eq) {
        Eigen::SparseMatrix<double> je;
        p.jac_eq(res.x, je);
        stat += je.transpose() * res.y_eq;
      }
      if (p.m_ineq) {
        Eigen::SparseMatrix<double> ji;
        p.jac_ineq(res.x, ji);
        stat += ji.transpose() * res.y_ineq;
      }
      for (int i = 0; i < p.n; ++i)
        if (p.lower(i) == p.upper(i)) {
          res.z_lower(i) = std::max(stat(i), 0.0);
          res.z_upper(i) = std::max(-stat(i), 0.0);
        }
      res.kkt_residual =
          kkt_residual_norm(p, res.x, res.y_eq, res.y_ineq, res.z_lower,
                            res.z_upper, res.slacks, rf.objective_scaling);
      if (res.status == SolveStatus::converged &&
          res.kkt_residual > opts.kkt_tolerance)
        res.status = SolveStatus::iteration_limit;
      return res;
    }
  }

  const int n = p.n, me = p.m_eq, mi = p.m_ineq;
  Eigen::VectorXd lb = p.lower, ub = p.upper;

  Eigen::VectorXd x = x0;
  for (int i = 0; i < n; ++i) {  // project strictly interior
    if (std::isfinite(lb(i)) && std::isfinite(ub(i))) {
      double pad = 1e-3 * (ub(i) - lb(i));
      x(i) = std::min(std::max(x(i), lb(i) + pad), ub(i) - pad);
    } else if (std::isfinite(lb(i))) {
      x(i) = std::max(x(i), lb(i) + 1e-3 * std::max(1.0, std::abs(lb(i))));
    } else if (std::isfinite(ub(i))) {
      x(i) = std::min(x(i), ub(i) - 1e-3 * std::max(1.0, std::abs(ub(i))));
    }
  }

  if (!std::isfinite(p.objective(x)))
    throw std::runtime_error("non-finite objective at the start point");

  Eigen::VectorXd grad(n);
  p.gradient(x, grad);
  const double sigma_f =
      std::min(1.0, 100.0 / std::max(100.0, inf_norm(grad)));

  const double tau = opts.step_fraction;
  const double mu_min = opts.kkt_tolerance / 10.0;
  double mu = opts.initial_barrier;
  const double dc = opts.regularization_floor;

  Eigen::VectorXd ce(me), ci(mi);
  if (me) p.eval_eq(x, ce);
  if (mi) p.eval_ineq(x, ci);

  Eigen::VectorXd s(mi), w(mi);
  for (int i = 0; i < mi; ++i) {
    s(i) = std::max(1e-3, -ci(i));
    w(i) = mu / s(i);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd zl = Eigen::VectorXd::Zero(n), zu = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lb(i))) zl(i) = mu / (x(i) - lb(i));
    if (std::isfinite(ub(i))) zu(i) = mu / (ub(i) - x(i));
  }

  SolveResult res;
  res.objective_scaling = sigma_f;
  std::uint64_t hash = 1469598103934665603ull;
  double nu = 1.0;     // l1 merit penalty weight
  double dx_last = 0;  // last inertia correction that worked

  Eigen::SparseMatrix<double> je, ji, hess;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;

  auto barrier_phi = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& ss,
                         const Eigen::VectorXd& cee, const Eigen::VectorXd& cii,
                         double& infeas) -> double {
    double phi = sigma_f * p.objective(xx);
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb(i))) {
        double d = xx(i) - lb(i);
        if (d <= 0) return kInf;
        phi -= mu * std::log(d);
      }
      if (std::isfinite(ub(i))) {
        double d = ub(i) - xx(i);
        if (d <= 0) return kInf;
        phi -= mu * std::log(d);
      }
    }
    for (int i = 0; i < mi; ++i) {
      if (ss(i) <= 0) return kInf;
      phi -= mu * std::log(ss(i));
    }
    infeas = (me ? cee.lpNorm<1>() : 0.0);
    if (mi) infeas += (cii + ss).lpNorm<1>();
    return phi + nu * infeas;
  };

  const bool trace = std::getenv("RESTORE_IPM_TRACE") != nullptr;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    p.gradient(x, grad);
    if (me) p.jac_eq(x, je);
    if (mi) p.jac_ineq(x, ji);

    // KKT residuals at the current barrier parameter and at zero
    Eigen::VectorXd stat = sigma_f * grad;
    if (me) stat += je.transpose() * y;
    if (mi) stat += ji.transpose() * w;
    stat -= zl;
    stat += zu;
    double e_stat = inf_norm(stat);
    double e_feas = me ? inf_norm(ce) : 0.0;
    if (mi) e_feas = std::max(e_feas, inf_norm(ci + s));
    double e_comp0 = 0.0, e_compmu = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb(i))) {
        double c = zl(i) * (x(i) - lb(i));
        e_comp0 = std::max(e_comp0, std::abs(c));
        e_compmu = std::max(e_compmu, std::abs(c - mu));
      }
      if (std::isfinite(ub(i))) {
        double c = zu(i) * (ub(i) - x(i));
        e_comp0 = std::max(e_comp0, std::abs(c));
        e_compmu = std::max(e_compmu, std::abs(c - mu));
      }
    }
    for (int i = 0; i < mi; ++i) {
      double c = w(i) * s(i);
      e_comp0 = std::max(e_comp0, std::abs(c));
      e_compmu = std::max(e_compmu, std::abs(c - mu));
    }
    double e0 = std::max({e_stat, e_feas, e_comp0});
    if (e0 <= opts.kkt_tolerance) {
      res.status = SolveStatus::converged;
      break;
    }
    if (std::max({e_stat, e_feas, e_compmu}) <= mu && mu > mu_min)
      mu = std::max(mu_min, mu / 10.0);

    // condensed symmetric KKT system in (dx, dy, dw)
    p.lag_hessian(x, sigma_f, y, w, hess);
    Eigen::VectorXd sig = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r1 = sigma_f * grad;
    if (me) r1 += je.transpose() * y;
    if (mi) r1 += ji.transpose() * w;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb(i))) {
        double d = x(i) - lb(i);
        sig(i) += zl(i) / d;
        r1(i) -= mu / d;
      }
      if (std::isfinite(ub(i))) {
        double d = ub(i) - x(i);
        sig(i) += zu(i) / d;
        r1(i) += mu / d;
      }
    }

    const int dim = n + me + mi;
    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -r1;
    if (me) rhs.segment(n, me) = -ce;
    for (int i = 0; i < mi; ++i) rhs(n + me + i) = -ci(i) - mu / w(i);

    Eigen::VectorXd step(dim);
    double dxreg = 0.0;
    bool factored = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::vector<Eigen::Triplet<double>> tr;
      tr.reserve(hess.nonZeros() + (me ? je.nonZeros() : 0) +
                 (mi ? ji.nonZeros() : 0) + dim);
      for (int k = 0; k < hess.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator itr(hess, k); itr;
             ++itr)
          if (itr.row() >= itr.col())
            tr.emplace_back((int)itr.row(), (int)itr.col(), itr.value());
      for (int i = 0; i < n; ++i) tr.emplace_back(i, i, sig(i) + dxreg);
      if (me)
        for (int k = 0; k < je.outerSize(); ++k)
          for (Eigen::SparseMatrix<double>::InnerIterator itr(je, k); itr;
               ++itr)
            tr.emplace_back(n + (int)itr.row(), (int)itr.col(), itr.value());
      for (int i = 0; i < me; ++i) tr.emplace_back(n + i, n + i, -dc);
      if (mi)
        for (int k = 0; k < ji.outerSize(); ++k)
          for (Eigen::SparseMatrix<double>::InnerIterator itr(ji, k); itr;
               ++itr)
            tr.emplace_back(n + me + (int)itr.row(), (int)itr.col(),
                            itr.value());
      for (int i = 0; i < mi; ++i)
        tr.emplace_back(n + me + i, n + me + i, -s(i) / w(i) - dc);

      Eigen::SparseMatrix<double> kkt(dim, dim);
      kkt.setFromTriplets(tr.begin(), tr.end());
      Eigen::SparseMatrix<double> kkt_full =
          Eigen::SparseMatrix<double>(kkt.selfadjointView<Eigen::Lower>());
      if (!analyzed) {
        ldlt.analyzePattern(kkt_full);
        analyzed = true;
      }
      ldlt.factorize(kkt_full);
      bool good = ldlt.info() == Eigen::Success;
      if (good) {
        int pos = 0, neg = 0, zero = 0;
        const auto& d = ldlt.vectorD();
        for (int i = 0; i < d.size(); ++i) {
          if (d(i) > 1e-14)
            ++pos;
          else if (d(i) < -1e-14)
            ++neg;
          else
            ++zero;
        }
        good = (pos == n && neg == me + mi && zero == 0);
      }
      if (good) {
        step = ldlt.solve(rhs);
        good = step.allFinite();
        if (good && trace) {
          double rres = inf_norm(kkt_full * step - rhs) /
                        std::max(1.0, inf_norm(rhs));
          std::fprintf(stderr, "  solve res %8.2e reg %8.2e\n", rres, dxreg);
        }
      }
      if (good) {
        factored = true;
        dx_last = dxreg;
        break;
      }
      dxreg = (dxreg == 0.0)
                  ? std::max(opts.regularization_floor,
                             (dx_last == 0.0 ? 1e-4 : dx_last / 3.0))
                  : dxreg * 10.0;
      if (dxreg > 1e40) break;
    }
    if (!factored) {
      res.status = SolveStatus::infeasible_detected;
      break;
    }

    Eigen::VectorXd dx = step.head(n);
    Eigen::VectorXd dy = me ? step.segment(n, me).eval() : Eigen::VectorXd();
    Eigen::VectorXd dw = mi ? step.tail(mi).eval() : Eigen::VectorXd();
    Eigen::VectorXd ds(mi), dzl(n), dzu(n);
    if (mi) ds = -(ci + s) - ji * dx;
    auto bound_dual_steps = [&](const Eigen::VectorXd& dxx, Eigen::VectorXd& dl,
                                Eigen::VectorXd& du) {
      for (int i = 0; i < n; ++i) {
        dl(i) = du(i) = 0.0;
        if (std::isfinite(lb(i))) {
          double d = x(i) - lb(i);
          dl(i) = mu / d - zl(i) - zl(i) / d * dxx(i);
        }
        if (std::isfinite(ub(i))) {
          double d = ub(i) - x(i);
          du(i) = mu / d - zu(i) + zu(i) / d * dxx(i);
        }
      }
    };
    bound_dual_steps(dx, dzl, dzu);

    // fraction-to-boundary step limits
    auto boundary_limits = [&](const Eigen::VectorXd& dxx,
                               const Eigen::VectorXd& dss,
                               const Eigen::VectorXd& dl,
                               const Eigen::VectorXd& du,
                               const Eigen::VectorXd& dww, double& app,
                               double& add) {
      app = add = 1.0;
      for (int i = 0; i < n; ++i) {
        if (std::isfinite(lb(i)) && dxx(i) < 0)
          app = std::min(app, -tau * (x(i) - lb(i)) / dxx(i));
        if (std::isfinite(ub(i)) && dxx(i) > 0)
          app = std::min(app, tau * (ub(i) - x(i)) / dxx(i));
        if (dl(i) < 0) add = std::min(add, -tau * zl(i) / dl(i));
        if (du(i) < 0) add = std::min(add, -tau * zu(i) / du(i));
      }
      for (int i = 0; i < mi; ++i) {
        if (dss(i) < 0) app = std::min(app, -tau * s(i) / dss(i));
        if (dww(i) < 0) add = std::min(add, -tau * w(i) / dww(i));
      }
    };
    double ap, ad;
    boundary_limits(dx, ds, dzl, dzu, dw, ap, ad);

    // l1 merit backtracking on the primal step
    double dualmax = 0.0;
    if (me) dualmax = std::max(dualmax, inf_norm(y + dy));
    if (mi) dualmax = std::max(dualmax, inf_norm(w + dw));
    // raise nu when the duals demand it, but let a stale large value decay:
    // an oversized penalty makes the merit reject full steps near a solution
    double nu_req = std::max(2.0 * dualmax, 1.0);
    if (nu < nu_req)
      nu = nu_req;
    else if (nu > 100.0 * nu_req)
      nu = 10.0 * nu_req;
    double infeas0 = 0.0;
    double phi0 = barrier_phi(x, s, ce, ci, infeas0);
    Eigen::VectorXd gphi = sigma_f * grad;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb(i))) gphi(i) -= mu / (x(i) - lb(i));
      if (std::isfinite(ub(i))) gphi(i) += mu / (ub(i) - x(i));
    }
    double dphi = gphi.dot(dx) - nu * infeas0;
    for (int i = 0; i < mi; ++i) dphi -= mu / s(i) * ds(i);

    double alpha = ap;
    Eigen::VectorXd xn, sn, cen(me), cin(mi);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + alpha * dx;
      sn = mi ? (s + alpha * ds).eval() : s;
      if (me) p.eval_eq(xn, cen);
      if (mi) p.eval_ineq(xn, cin);
      double infeas_n = 0.0;
      double phin = barrier_phi(xn, sn, cen, cin, infeas_n);
      double want = phi0 + 1e-4 * alpha * std::min(dphi, 0.0);
      if (std::isfinite(phin) && phin <= want) {
        accepted = true;
        break;
      }
      if (trace && ls < 2)
        std::fprintf(stderr,
                     "  ls %d a %8.2e phin-phi0 %+12.4e want-phi0 %+12.4e "
                     "dphi %+12.4e dinf %+12.4e\n",
                     ls, alpha, phin - phi0, want - phi0, dphi,
                     infeas_n - infeas0);
      if (ls == 0 && me) {
        // second-order corrections: re-solve with the constraint residuals
        // accumulated at the rejected trial point, reusing the factorization,
        // so curvature of the constraints does not force tiny steps near a
        // solution (the Maratos effect)
        Eigen::VectorXd ce_soc = alpha * ce + cen;
        Eigen::VectorXd ri_soc;
        if (mi) ri_soc = alpha * (ci + s) + (cin + sn);
        double inf_prev = infeas_n;
        bool soc_ok = true;
        for (int soc = 0; soc < 4 && soc_ok; ++soc) {
          Eigen::VectorXd rhs2 = rhs;
          rhs2.segment(n, me) = -ce_soc;
          for (int i = 0; i < mi; ++i)
            rhs2(n + me + i) = -ri_soc(i) + s(i) - mu / w(i);
          Eigen::VectorXd step2 = ldlt.solve(rhs2);
          if (!step2.allFinite()) break;
          Eigen::VectorXd dx2 = step2.head(n);
          Eigen::VectorXd dy2 =
              me ? step2.segment(n, me).eval() : Eigen::VectorXd();
          Eigen::VectorXd dw2 = mi ? step2.tail(mi).eval() : Eigen::VectorXd();
          Eigen::VectorXd ds2(mi), dzl2(n), dzu2(n);
          if (mi) ds2 = -ri_soc - ji * dx2;
          bound_dual_steps(dx2, dzl2, dzu2);
          double ap2, ad2;
          boundary_limits(dx2, ds2, dzl2, dzu2, dw2, ap2, ad2);
          Eigen::VectorXd xn2 = x + ap2 * dx2;
          Eigen::VectorXd sn2 = mi ? (s + ap2 * ds2).eval() : s;
          Eigen::VectorXd cen2(me), cin2(mi);
          if (me) p.eval_eq(xn2, cen2);
          if (mi) p.eval_ineq(xn2, cin2);
          double inf2 = 0.0;
          double phin2 = barrier_phi(xn2, sn2, cen2, cin2, inf2);
          if (trace)
            std::fprintf(stderr,
                         "  soc %d a2 %8.2e phin2-phi0 %+12.4e inf2 %+12.4e\n",
                         soc, ap2, phin2 - phi0, inf2);
          if (std::isfinite(phin2) &&
              phin2 <= phi0 + 1e-4 * ap2 * std::min(dphi, 0.0)) {
            dy = dy2;
            dw = dw2;
            dzl = dzl2;
            dzu = dzu2;
            ad = ad2;
            alpha = ap2;
            xn = xn2;
            sn = sn2;
            cen = cen2;
            cin = cin2;
            accepted = true;
            break;
          }
          // keep correcting only while the violation keeps dropping fast
          soc_ok = std::isfinite(inf2) && inf2 < 0.25 * inf_prev;
          inf_prev = inf2;
          ce_soc = ap2 * ce_soc + cen2;
          if (mi) ri_soc = ap2 * ri_soc + (cin2 + sn2);
        }
        if (accepted) break;
      }
      alpha *= 0.5;
      if (alpha < 1e-12) break;
    }
    if (!accepted) {
      // direction unusable even at tiny steps
      res.status = SolveStatus::infeasible_detected;
      break;
    }

    x = xn;
    if (me) {
      ce = cen;
      y += ad * dy;
    }
    if (mi) {
      ci = cin;
      s = sn;
      w += ad * dw;
    }
    zl += ad * dzl;
    zu += ad * dzu;
    // keep bound duals in a neighborhood of mu/d (IPOPT's kappa_sigma)
    const double ks = 1e10;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb(i))) {
        double d = x(i) - lb(i);
        zl(i) = std::min(std::max(zl(i), mu / (ks * d)), ks * mu / d);
      }
      if (std::isfinite(ub(i))) {
        double d = ub(i) - x(i);
        zu(i) = std::min(std::max(zu(i), mu / (ks * d)), ks * mu / d);
      }
    }
    for (int i = 0; i < mi; ++i)
      w(i) = std::min(std::max(w(i), mu / (ks * s(i))), ks * mu / s(i));

    hash = fnv1a(hash, x);
    if (trace)
      std::fprintf(stderr,
                   "it %4d mu %8.2e stat %8.2e feas %8.2e comp %8.2e "
                   "alpha %8.2e ad %8.2e reg %8.2e nu %8.2e f %.8e\n",
                   it, mu, e_stat, e_feas, e_comp0, alpha, ad, dxreg, nu,
                   p.objective(x));
  }

  res.x = x;
  res.y_eq = y;
  res.y_ineq = w;
  res.z_lower = zl;
  res.z_upper = zu;
  res.slacks = s;
  res.iterations = it;
  res.objective = p.objective(x);
  res.iterate_hash = hash;
  res.kkt_residual = kkt_residual_norm(p, x, y, w, zl, zu, s, sigma_f);
  if (res.status == SolveStatus::converged &&
      res.kkt_residual > opts.kkt_tolerance)
    res.status = SolveStatus::iteration_limit;
  return res;
}

DerivativeCheck check_derivatives(const NlpProblem& p, const Eigen::VectorXd& x,
                                  double step) {
  if (step <= 0) throw std::invalid_argument("step must be positive");
  DerivativeCheck rep;
  const double tol = 1e-5, floor = 1e-7;
  auto name_of = [](const std::vector<std::string>& names, int i,
                    const char* kind) {
    return (i < (int)names.size() && !names[i].empty())
               ? names[i]
               : std::string(kind) + "[" + std::to_string(i) + "]";
  };
  auto judge = [&](double ana, double fd, double fscale,
                   const std::string& where, double& worst) {
    double err = std::abs(ana - fd);
    // central differences cannot resolve below the rounding noise of the
    // function values themselves
    double noise =
        10.0 * std::numeric_limits<double>::epsilon() * fscale / step;
    if (err <= std::max(floor, noise)) return;
    double rel = err / std::max({std::abs(ana), std::abs(fd), floor});
    worst = std::max(worst, rel);
    if (rel > tol)
      rep.flagged.push_back(where + " analytic=" + std::to_string(ana) +
                            " fd=" + std::to_string(fd));
  };

  Eigen::VectorXd g(p.n);
  p.gradient(x, g);
  Eigen::SparseMatrix<double> je, ji;
  if (p.m_eq) p.jac_eq(x, je);
  if (p.m_ineq) p.jac_ineq(x, ji);

  Eigen::VectorXd xp = x, cep(p.m_eq), cem(p.m_eq), cip(p.m_ineq),
                  cim(p.m_ineq);
  for (int i = 0; i < p.n; ++i) {
    xp(i) = x(i) + step;
    double fp = p.objective(xp);
    if (p.m_eq) p.eval_eq(xp, cep);
    if (p.m_ineq) p.eval_ineq(xp, cip);
    xp(i) = x(i) - step;
    double fm = p.objective(xp);
    if (p.m_eq) p.eval_eq(xp, cem);
    if (p.m_ineq) p.eval_ineq(xp, cim);
    xp(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("non-finite objective near the check point");

    judge(g(i), (fp - fm) / (2 * step), std::max(std::abs(fp), std::abs(fm)),
          "grad/" + name_of(p.var_names, i, "x"), rep.max_rel_gradient);
    if (p.m_eq) {
      Eigen::VectorXd fd = (cep - cem) / (2 * step);
      Eigen::VectorXd ana = Eigen::VectorXd::Zero(p.m_eq);
      for (Eigen::SparseMatrix<double>::InnerIterator itr(je, i); itr; ++itr)
        ana(itr.row()) = itr.value();
      for (int r = 0; r < p.m_eq; ++r)
        judge(ana(r), fd(r), std::max(std::abs(cep(r)), std::abs(cem(r))),
              "jac_eq/" + name_of(p.eq_names, r, "eq") + "/" +
                  name_of(p.var_names, i, "x"),
              rep.max_rel_jac_eq);
    }
    if (p.m_ineq) {
      Eigen::VectorXd fd = (cip - cim) / (2 * step);
      Eigen::VectorXd ana = Eigen::VectorXd::Zero(p.m_ineq);
      for (Eigen::SparseMatrix<double>::InnerIterator itr(ji, i); itr; ++itr)
        ana(itr.row()) = itr.value();
      for (int r = 0; r < p.m_ineq; ++r)
        judge(ana(r), fd(r), std::max(std::abs(cip(r)), std::abs(cim(r))),
              "jac_ineq/" + name_of(p.ineq_names, r, "ineq") + "/" +
                  name_of(p.var_names, i, "x"),
              rep.max_rel_jac_ineq);
    }
  }
  return rep;
}

}  // namespace restore
