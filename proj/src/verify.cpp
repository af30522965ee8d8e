#include "restore/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace restore {

namespace {

Eigen::MatrixXcd build_ybus(const std::vector<TransmissionBus>& buses,
                            const std::vector<TransmissionBranch>& branches,
                            const std::map<int, int>& index) {
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(buses.size(), buses.size());
  for (const auto& br : branches) {
    int i = index.at(br.from_bus), k = index.at(br.to_bus);
    std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
    std::complex<double> sh(0.0, br.b_shunt / 2.0);
    y(i, i) += ys + sh;
    y(k, k) += ys + sh;
    y(i, k) -= ys;
    y(k, i) -= ys;
  }
  return y;
}

void bus_injection(const Eigen::MatrixXcd& y, const Eigen::VectorXd& v,
                   const Eigen::VectorXd& th, int i, double& pi, double& qi) {
  pi = 0.0;
  qi = 0.0;
  for (int k = 0; k < (int)v.size(); ++k) {
    double g = y(i, k).real(), b = y(i, k).imag();
    if (g == 0.0 && b == 0.0) continue;
    double d = th(i) - th(k);
    pi += v(i) * v(k) * (g * std::cos(d) + b * std::sin(d));
    qi += v(i) * v(k) * (g * std::sin(d) - b * std::cos(d));
  }
}

struct Tree {
  std::vector<int> up_node;    // line -> parent-side node index
  std::vector<int> down_node;  // line -> child-side node index
  std::vector<int> parent_line;          // node -> incoming line or -1
  std::vector<std::vector<int>> child_lines;  // node -> outgoing lines
  std::vector<int> order;      // nodes, root first, parents before children
  int root = 0;
};

Tree build_tree(const DistributionFeeder& fd) {
  Tree t;
  const int nn = (int)fd.nodes.size(), nl = (int)fd.lines.size();
  std::map<int, int> index;
  for (int i = 0; i < nn; ++i) index[fd.nodes[i].id] = i;
  t.root = index.at(fd.substation_node);
  std::vector<std::vector<std::pair<int, int>>> adj(nn);
  for (int l = 0; l < nl; ++l) {
    int a = index.at(fd.lines[l].from_node), b = index.at(fd.lines[l].to_node);
    adj[a].push_back({b, l});
    adj[b].push_back({a, l});
  }
  t.up_node.assign(nl, -1);
  t.down_node.assign(nl, -1);
  t.parent_line.assign(nn, -1);
  t.child_lines.assign(nn, {});
  std::vector<bool> seen(nn, false);
  std::deque<int> q{t.root};
  seen[t.root] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    t.order.push_back(u);
    for (auto [w, l] : adj[u]) {
      if (seen[w]) continue;
      seen[w] = true;
      t.up_node[l] = u;
      t.down_node[l] = w;
      t.parent_line[w] = l;
      t.child_lines[u].push_back(l);
      q.push_back(w);
    }
  }
  if ((int)t.order.size() != nn || nl + 1 != nn)
    throw std::invalid_argument("feeder " + fd.id + " is not a radial tree");
  return t;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

PowerFlowResult newton_power_flow(const std::vector<TransmissionBus>& buses,
                                  const std::vector<TransmissionBranch>& branches,
                                  const Eigen::VectorXd& p_inj,
                                  const Eigen::VectorXd& q_inj,
                                  int slack_index, double slack_v,
                                  double slack_theta, double tol, int max_iter) {
  const int nb = (int)buses.size();
  if (p_inj.size() != nb || q_inj.size() != nb || slack_index < 0 ||
      slack_index >= nb)
    throw std::invalid_argument("power flow input dimensions do not match");
  std::map<int, int> index;
  for (int i = 0; i < nb; ++i) index[buses[i].id] = i;
  Eigen::MatrixXcd y = build_ybus(buses, branches, index);

  PowerFlowResult res;
  res.v = Eigen::VectorXd::Constant(nb, 1.0);
  res.theta = Eigen::VectorXd::Constant(nb, slack_theta);
  res.v(slack_index) = slack_v;

  std::vector<int> free_bus;  // both V and theta unknown (all PQ here)
  for (int i = 0; i < nb; ++i)
    if (i != slack_index) free_bus.push_back(i);
  const int nf = (int)free_bus.size();

  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd mis(2 * nf);
    for (int a = 0; a < nf; ++a) {
      double pi, qi;
      bus_injection(y, res.v, res.theta, free_bus[a], pi, qi);
      mis(a) = p_inj(free_bus[a]) - pi;
      mis(nf + a) = q_inj(free_bus[a]) - qi;
    }
    res.iterations = it;
    if (mis.cwiseAbs().maxCoeff() < tol) {
      res.converged = true;
      return res;
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * nf, 2 * nf);
    for (int a = 0; a < nf; ++a) {
      int i = free_bus[a];
      double vi = res.v(i);
      double dp_dthi = 0, dq_dthi = 0;
      double dp_dvi = 2 * vi * y(i, i).real();
      double dq_dvi = -2 * vi * y(i, i).imag();
      for (int b = 0; b < nb; ++b) {
        if (b == i) continue;
        double g = y(i, b).real(), bb = y(i, b).imag();
        if (g == 0.0 && bb == 0.0) continue;
        double d = res.theta(i) - res.theta(b);
        double cs = std::cos(d), sn = std::sin(d);
        double vk = res.v(b);
        dp_dvi += vk * (g * cs + bb * sn);
        dq_dvi += vk * (g * sn - bb * cs);
        dp_dthi += vi * vk * (-g * sn + bb * cs);
        dq_dthi += vi * vk * (g * cs + bb * sn);
        auto itb = std::find(free_bus.begin(), free_bus.end(), b);
        if (itb != free_bus.end()) {
          int c = (int)(itb - free_bus.begin());
          jac(a, c) = -vi * vk * (-g * sn + bb * cs);        // dP/dth_k
          jac(a, nf + c) = vi * (g * cs + bb * sn);          // dP/dV_k
          jac(nf + a, c) = -vi * vk * (g * cs + bb * sn);    // dQ/dth_k
          jac(nf + a, nf + c) = vi * (g * sn - bb * cs);     // dQ/dV_k
        }
      }
      jac(a, a) = dp_dthi;
      jac(a, nf + a) = dp_dvi;
      jac(nf + a, a) = dq_dthi;
      jac(nf + a, nf + a) = dq_dvi;
    }
    Eigen::VectorXd dx = jac.fullPivLu().solve(mis);
    if (!dx.allFinite()) return res;
    for (int a = 0; a < nf; ++a) {
      res.theta(free_bus[a]) += dx(a);
      res.v(free_bus[a]) += dx(nf + a);
    }
    if (res.v.minCoeff() <= 0) return res;  // collapsed
  }
  return res;
}

SweepResult distflow_sweep(const DistributionFeeder& fd,
                           const Eigen::VectorXd& p_inj,
                           const Eigen::VectorXd& q_inj, double root_v_sq,
                           double tol, int max_iter) {
  const int nn = (int)fd.nodes.size(), nl = (int)fd.lines.size();
  if (p_inj.size() != nn || q_inj.size() != nn || root_v_sq <= 0)
    throw std::invalid_argument("sweep input dimensions do not match");
  Tree t = build_tree(fd);

  SweepResult res;
  res.v_sq = Eigen::VectorXd::Constant(nn, root_v_sq);
  res.line_p = Eigen::VectorXd::Zero(nl);
  res.line_q = Eigen::VectorXd::Zero(nl);
  res.line_l = Eigen::VectorXd::Zero(nl);

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    double change = 0.0;
    // backward: flows from the leaves, with the current loss estimates
    for (int o = nn - 1; o >= 0; --o) {
      int d = t.order[o];
      int l = t.parent_line[d];
      if (l < 0) continue;
      double p = -p_inj(d) + fd.lines[l].r * res.line_l(l);
      double q = -q_inj(d) + fd.lines[l].x * res.line_l(l);
      for (int c : t.child_lines[d]) {
        p += res.line_p(c);
        q += res.line_q(c);
      }
      change = std::max(change, std::abs(p - res.line_p(l)));
      change = std::max(change, std::abs(q - res.line_q(l)));
      res.line_p(l) = p;
      res.line_q(l) = q;
    }
    // forward: voltages from the root, then refresh squared currents
    for (int o = 0; o < nn; ++o) {
      int u = t.order[o];
      for (int l : t.child_lines[u]) {
        double vu = res.v_sq(u);
        double vd = vu -
                    2.0 * (fd.lines[l].r * res.line_p(l) +
                           fd.lines[l].x * res.line_q(l)) +
                    (fd.lines[l].r * fd.lines[l].r +
                     fd.lines[l].x * fd.lines[l].x) *
                        res.line_l(l);
        if (vd <= 0) return res;  // collapse
        change = std::max(change, std::abs(vd - res.v_sq(t.down_node[l])));
        res.v_sq(t.down_node[l]) = vd;
        double ll = (res.line_p(l) * res.line_p(l) +
                     res.line_q(l) * res.line_q(l)) /
                    vu;
        change = std::max(change, std::abs(ll - res.line_l(l)));
        res.line_l(l) = ll;
      }
    }
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.root_p = -p_inj(t.root);
  res.root_q = -q_inj(t.root);
  for (int l : t.child_lines[t.root]) {
    res.root_p += res.line_p(l);
    res.root_q += res.line_q(l);
  }
  return res;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "verdict: " << (pass ? "pass" : "fail") << "\n";
  os << "max_tn_balance_residual: " << fmt(max_tn_balance_residual) << "\n";
  os << "max_dn_balance_residual: " << fmt(max_dn_balance_residual) << "\n";
  os << "max_bound_violation: " << fmt(max_bound_violation) << "\n";
  os << "max_boundary_mismatch: " << fmt(max_boundary_mismatch) << "\n";
  os << "oracle_voltage_deviation: " << fmt(oracle_voltage_deviation) << "\n";
  os << "kkt_residual: " << fmt(kkt_residual) << "\n";
  for (const auto& f : failures) os << "failure: " << f << "\n";
  return os.str();
}

ValidationReport audit_solution(const CoupledCase& raw,
                                const RestorationSolution& s) {
  const CoupledCase c = to_per_unit(raw);
  const auto& sc = c.scenario;
  const int T = sc.periods, nb = (int)c.buses.size();
  if ((int)s.periods.size() != T)
    throw std::invalid_argument("solution horizon does not match the case");

  ValidationReport rep;
  const double tol = kAuditTolerance;
  auto fail = [&](const std::string& what, double v) {
    rep.failures.push_back(what + " = " + fmt(v));
  };
  auto track = [&](double& family, double v, const std::string& what) {
    family = std::max(family, std::abs(v));
    if (std::abs(v) > tol) fail(what, v);
  };
  auto track_bound = [&](double v, double lo, double hi,
                         const std::string& what) {
    double viol = std::max(0.0, std::max(lo - v, v - hi));
    rep.max_bound_violation = std::max(rep.max_bound_violation, viol);
    if (viol > tol) fail(what + " bound violation", viol);
  };

  std::map<int, int> bidx;
  for (int i = 0; i < nb; ++i) bidx[c.buses[i].id] = i;
  Eigen::MatrixXcd y = build_ybus(c.buses, c.branches, bidx);
  int slack = 0;
  for (int i = 0; i < nb; ++i)
    if (c.buses[i].id < c.buses[slack].id) slack = i;
  std::vector<bool> boundary(nb, false);
  for (const auto& fd : c.feeders) boundary[bidx.at(fd.boundary_bus)] = true;

  std::vector<Tree> trees;
  for (const auto& fd : c.feeders) trees.push_back(build_tree(fd));

  for (int t = 0; t < T; ++t) {
    const PeriodState& ps = s.periods[t];
    const double lp = c.profiles.load_profile[t];
    const double pvp = c.profiles.pv_profile[t];
    std::string pt = "t" + std::to_string(t) + " ";
    if (ps.v.size() != nb || (int)ps.feeders.size() != (int)c.feeders.size() ||
        ps.gen_p.size() != (int)c.generators.size())
      throw std::invalid_argument("solution dimensions do not match the case");

    // transmission balance and bounds
    Eigen::VectorXd pinj(nb), qinj(nb);
    for (int i = 0; i < nb; ++i) {
      double pg = 0, qg = 0;
      for (int g = 0; g < (int)c.generators.size(); ++g)
        if (bidx.at(c.generators[g].bus) == i) {
          pg += ps.gen_p(g);
          qg += ps.gen_q(g);
        }
      pinj(i) = pg - ps.served_p(i);
      qinj(i) = qg - ps.served_q(i);
      double pi, qi;
      bus_injection(y, ps.v, ps.theta, i, pi, qi);
      std::string id = std::to_string(c.buses[i].id);
      track(rep.max_tn_balance_residual, pinj(i) - pi,
            pt + "tn bus " + id + " P balance residual");
      track(rep.max_tn_balance_residual, qinj(i) - qi,
            pt + "tn bus " + id + " Q balance residual");
      track_bound(ps.v(i), c.buses[i].v_min, c.buses[i].v_max,
                  pt + "tn bus " + id + " voltage");
      if (boundary[i]) {
        track_bound(ps.served_p(i), -sc.intertie_s_max, sc.intertie_s_max,
                    pt + "tn bus " + id + " exchange P");
        track_bound(ps.served_q(i), -sc.intertie_s_max, sc.intertie_s_max,
                    pt + "tn bus " + id + " exchange Q");
      } else {
        double cp = c.buses[i].p_load_critical * lp,
               tp = c.buses[i].p_load_total * lp;
        track_bound(ps.served_p(i), std::min(cp, tp), std::max(cp, tp),
                    pt + "tn bus " + id + " served P");
        double cq = c.buses[i].q_load_critical * lp,
               tq = c.buses[i].q_load_total * lp;
        track_bound(ps.served_q(i), std::min(cq, tq), std::max(cq, tq),
                    pt + "tn bus " + id + " served Q");
      }
    }
    if (std::abs(ps.theta(slack)) > tol)
      fail(pt + "slack angle", ps.theta(slack));
    for (int g = 0; g < (int)c.generators.size(); ++g) {
      std::string id = std::to_string(c.generators[g].bus);
      track_bound(ps.gen_p(g), c.generators[g].p_min, c.generators[g].p_max,
                  pt + "gen " + id + " P");
      track_bound(ps.gen_q(g), c.generators[g].q_min, c.generators[g].q_max,
                  pt + "gen " + id + " Q");
    }

    // transmission oracle: Newton from flat start with the solution's
    // net injections, slack pinned to the solution's slack state
    PowerFlowResult pf = newton_power_flow(c.buses, c.branches, pinj, qinj,
                                           slack, ps.v(slack), ps.theta(slack));
    if (!pf.converged) {
      fail(pt + "newton oracle divergence", 0.0);
    } else {
      for (int i = 0; i < nb; ++i) {
        double dv = std::max(std::abs(pf.v(i) - ps.v(i)),
                             std::abs(pf.theta(i) - ps.theta(i)));
        rep.oracle_voltage_deviation =
            std::max(rep.oracle_voltage_deviation, dv);
        if (dv > tol)
          fail(pt + "tn oracle deviation bus " + std::to_string(c.buses[i].id),
               dv);
      }
    }

    // feeders
    for (int f = 0; f < (int)c.feeders.size(); ++f) {
      const auto& fd = c.feeders[f];
      const auto& tr = trees[f];
      const FeederState& fs = ps.feeders[f];
      const int nn = (int)fd.nodes.size(), nl = (int)fd.lines.size();
      std::string pf_id = pt + fd.id + " ";
      std::map<int, int> nidx;
      for (int i = 0; i < nn; ++i) nidx[fd.nodes[i].id] = i;

      // boundary consensus (exchange and squared voltage)
      int b = bidx.at(fd.boundary_bus);
      track(rep.max_boundary_mismatch, ps.served_p(b) - fs.grid_p,
            pf_id + "boundary P mismatch");
      track(rep.max_boundary_mismatch, ps.served_q(b) - fs.grid_q,
            pf_id + "boundary Q mismatch");
      track(rep.max_boundary_mismatch,
            ps.v(b) * ps.v(b) - fs.v_sq(tr.root),
            pf_id + "boundary V mismatch");

      Eigen::VectorXd ninj = Eigen::VectorXd::Zero(nn);
      Eigen::VectorXd ninjq = Eigen::VectorXd::Zero(nn);
      for (int d = 0; d < (int)fd.dgs.size(); ++d) {
        ninj(nidx.at(fd.dgs[d].node)) += fs.dg_p(d);
        ninjq(nidx.at(fd.dgs[d].node)) += fs.dg_q(d);
        std::string id = pf_id + "dg " + std::to_string(fd.dgs[d].node);
        track_bound(fs.dg_p(d), fd.dgs[d].p_min, fd.dgs[d].p_max, id + " P");
        track_bound(fs.dg_q(d), fd.dgs[d].q_min, fd.dgs[d].q_max, id + " Q");
      }
      for (int e = 0; e < (int)fd.esss.size(); ++e) {
        int k = nidx.at(fd.esss[e].node);
        ninj(k) += fs.ess_p(e);
        ninjq(k) += fs.ess_q(e);
        std::string id = pf_id + "ess " + std::to_string(fd.esss[e].node);
        double sm = fd.esss[e].s_max;
        track_bound(fs.ess_p(e), -sm, sm, id + " P");
        track_bound(fs.ess_q(e), -sm, sm, id + " Q");
        track_bound(fs.ess_loss(e), 0.0, std::numeric_limits<double>::infinity(),
                    id + " loss");
        double circ = fs.ess_p(e) * fs.ess_p(e) + fs.ess_q(e) * fs.ess_q(e) -
                      sm * sm;
        rep.max_bound_violation =
            std::max(rep.max_bound_violation, std::max(0.0, circ));
        if (circ > tol) fail(id + " MVA circle violation", circ);
        double lres = fd.esss[e].r_eq * fs.ess_p(e) * fs.ess_p(e) +
                      fd.esss[e].r_cvt * fs.ess_q(e) * fs.ess_q(e) -
                      fs.ess_loss(e) * fs.v_sq(k);
        track(rep.max_dn_balance_residual, lres, id + " loss residual");
      }
      for (int p = 0; p < (int)fd.pvs.size(); ++p) {
        int k = nidx.at(fd.pvs[p].node);
        ninj(k) += fs.pv_p(p);
        ninjq(k) += fs.pv_q(p);
        std::string id = pf_id + "pv " + std::to_string(fd.pvs[p].node);
        track_bound(fs.pv_p(p), 0.0, fd.pvs[p].p_max * pvp, id + " P");
        double qcap = fd.pvs[p].power_factor * fs.pv_p(p);
        track_bound(fs.pv_q(p), -qcap - tol, qcap + tol, id + " Q");
      }
      for (int k = 0; k < nn; ++k) {
        std::string id = pf_id + "node " + std::to_string(fd.nodes[k].id);
        track_bound(fs.v_sq(k), fd.nodes[k].v_sq_min, fd.nodes[k].v_sq_max,
                    id + " v");
        double cp = fd.nodes[k].p_load_critical * lp,
               tp = fd.nodes[k].p_load_total * lp;
        track_bound(fs.served_p(k), std::min(cp, tp), std::max(cp, tp),
                    id + " served P");
        double cq = fd.nodes[k].q_load_critical * lp,
               tq = fd.nodes[k].q_load_total * lp;
        track_bound(fs.served_q(k), std::min(cq, tq), std::max(cq, tq),
                    id + " served Q");
        ninj(k) -= fs.served_p(k);
        ninjq(k) -= fs.served_q(k);
      }

      // branch-flow physics re-derived from scratch
      for (int l = 0; l < nl; ++l) {
        int u = tr.up_node[l], d = tr.down_node[l];
        double r = fd.lines[l].r, x = fd.lines[l].x;
        std::string id = pf_id + "line " + std::to_string(fd.nodes[u].id) +
                         "-" + std::to_string(fd.nodes[d].id);
        track(rep.max_dn_balance_residual,
              fs.v_sq(d) - fs.v_sq(u) +
                  2.0 * (r * fs.line_p(l) + x * fs.line_q(l)) -
                  (r * r + x * x) * fs.line_l(l),
              id + " voltage drop residual");
        track(rep.max_dn_balance_residual,
              fs.line_l(l) * fs.v_sq(u) - fs.line_p(l) * fs.line_p(l) -
                  fs.line_q(l) * fs.line_q(l),
              id + " current definition residual");
        track_bound(fs.line_l(l), 0.0,
                    std::numeric_limits<double>::infinity(),
                    id + " squared current");
      }
      for (int k = 0; k < nn; ++k) {
        double pres = -ninj(k), qres = -ninjq(k);
        if (k == tr.root) {
          pres -= fs.grid_p;
          qres -= fs.grid_q;
        }
        for (int l : tr.child_lines[k]) {
          pres += fs.line_p(l);
          qres += fs.line_q(l);
        }
        if (int l = tr.parent_line[k]; l >= 0) {
          pres -= fs.line_p(l) - fd.lines[l].r * fs.line_l(l);
          qres -= fs.line_q(l) - fd.lines[l].x * fs.line_l(l);
        }
        std::string id = pf_id + "node " + std::to_string(fd.nodes[k].id);
        track(rep.max_dn_balance_residual, pres, id + " P balance residual");
        track(rep.max_dn_balance_residual, qres, id + " Q balance residual");
      }

      // feeder oracle: forward-backward sweep from the same injections
      SweepResult sw =
          distflow_sweep(fd, ninj, ninjq, fs.v_sq(tr.root));
      if (!sw.converged) {
        fail(pf_id + "distflow oracle divergence", 0.0);
      } else {
        double dev = (sw.v_sq - fs.v_sq).cwiseAbs().maxCoeff();
        if (nl) {
          dev = std::max(dev, (sw.line_p - fs.line_p).cwiseAbs().maxCoeff());
          dev = std::max(dev, (sw.line_q - fs.line_q).cwiseAbs().maxCoeff());
          dev = std::max(dev, (sw.line_l - fs.line_l).cwiseAbs().maxCoeff());
        }
        dev = std::max(dev, std::abs(sw.root_p - fs.grid_p));
        dev = std::max(dev, std::abs(sw.root_q - fs.grid_q));
        rep.oracle_voltage_deviation =
            std::max(rep.oracle_voltage_deviation, dev);
        if (dev > tol) fail(pf_id + "distflow oracle deviation", dev);
      }
    }
  }

  // ESS prefix-energy windows across the horizon
  for (int f = 0; f < (int)c.feeders.size(); ++f) {
    const auto& fd = c.feeders[f];
    for (int e = 0; e < (int)fd.esss.size(); ++e) {
      double acc = 0.0;
      for (int t = 0; t < T; ++t) {
        const FeederState& fs = s.periods[t].feeders[f];
        acc += (fs.ess_p(e) + fs.ess_loss(e)) * sc.delta_t;
        double energy = fd.esss[e].e_surplus - acc;
        track_bound(energy, 0.0, fd.esss[e].e_max,
                    "t" + std::to_string(t) + " " + fd.id + " ess " +
                        std::to_string(fd.esss[e].node) + " energy");
      }
    }
  }

  rep.pass = rep.failures.empty();
  return rep;
}

double recompute_kkt_residual(const NlpProblem& p, const SolveResult& r) {
  // same measure the solver reports, re-derived from the callbacks
  Eigen::VectorXd g;
  p.gradient(r.x, g);
  Eigen::VectorXd stat = r.objective_scaling * g;
  if (p.m_eq) {
    Eigen::SparseMatrix<double> je;
    p.jac_eq(r.x, je);
    stat += je.transpose() * r.y_eq;
  }
  if (p.m_ineq) {
    Eigen::SparseMatrix<double> ji;
    p.jac_ineq(r.x, ji);
    stat += ji.transpose() * r.y_ineq;
  }
  stat -= r.z_lower;
  stat += r.z_upper;
  double res = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  if (p.m_eq) {
    Eigen::VectorXd ce;
    p.eval_eq(r.x, ce);
    res = std::max(res, ce.cwiseAbs().maxCoeff());
  }
  if (p.m_ineq) {
    Eigen::VectorXd ci;
    p.eval_ineq(r.x, ci);
    res = std::max(res, (ci + r.slacks).cwiseAbs().maxCoeff());
    res = std::max(res, r.y_ineq.cwiseProduct(r.slacks).cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < p.n; ++i) {
    if (std::isfinite(p.lower(i)))
      res = std::max(res, std::abs(r.z_lower(i) * (r.x(i) - p.lower(i))));
    if (std::isfinite(p.upper(i)))
      res = std::max(res, std::abs(r.z_upper(i) * (p.upper(i) - r.x(i))));
  }
  return res;
}

}  // namespace restore
