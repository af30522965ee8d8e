#include "restore/formulation.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <stdexcept>

namespace restore {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
using Trip = Eigen::Triplet<double>;
}  // namespace

VariableIndex index_variables(const CoupledCase& c) {
  VariableIndex idx;
  idx.periods = c.scenario.periods;
  idx.nbus = (int)c.buses.size();
  idx.ngen = (int)c.generators.size();

  int min_id_pos = 0;
  for (int i = 0; i < idx.nbus; ++i) {
    idx.bus_index[c.buses[i].id] = i;
    if (c.buses[i].id < c.buses[min_id_pos].id) min_id_pos = i;
  }
  idx.slack_bus = min_id_pos;

  idx.is_boundary.assign(idx.nbus, false);
  for (const auto& f : c.feeders)
    idx.is_boundary[idx.bus_index.at(f.boundary_bus)] = true;

  idx.tn_load_slot.assign(idx.nbus, -1);
  idx.n_tn_load = 0;
  for (int i = 0; i < idx.nbus; ++i)
    if (c.buses[i].p_load_total != 0.0 || c.buses[i].q_load_total != 0.0 ||
        idx.is_boundary[i])
      idx.tn_load_slot[i] = idx.n_tn_load++;

  idx.off_v = 0;
  idx.off_th = idx.nbus;
  idx.off_gp = 2 * idx.nbus;
  idx.off_gq = idx.off_gp + idx.ngen;
  idx.off_plp = idx.off_gq + idx.ngen;
  idx.off_plq = idx.off_plp + idx.n_tn_load;
  int cursor = idx.off_plq + idx.n_tn_load;

  for (const auto& fd : c.feeders) {
    VariableIndex::FeederLayout L;
    L.nnode = (int)fd.nodes.size();
    L.ndg = (int)fd.dgs.size();
    L.ness = (int)fd.esss.size();
    L.npv = (int)fd.pvs.size();
    for (int i = 0; i < L.nnode; ++i) L.node_index[fd.nodes[i].id] = i;
    L.substation = L.node_index.at(fd.substation_node);

    L.load_slot.assign(L.nnode, -1);
    for (int i = 0; i < L.nnode; ++i)
      if (fd.nodes[i].p_load_total != 0.0 || fd.nodes[i].q_load_total != 0.0)
        L.load_slot[i] = L.nload++;

    // orient lines away from the substation; keep the case file order so
    // solution arrays have a layout-independent meaning
    L.nline = (int)fd.lines.size();
    if (L.nline + 1 != L.nnode)
      throw std::invalid_argument("feeder " + fd.id +
                                  " is not a connected radial tree");
    std::vector<std::vector<std::pair<int, int>>> adj(L.nnode);
    for (int l = 0; l < L.nline; ++l) {
      int a = L.node_index.at(fd.lines[l].from_node);
      int b = L.node_index.at(fd.lines[l].to_node);
      adj[a].push_back({b, l});
      adj[b].push_back({a, l});
    }
    L.lines.resize(L.nline);
    L.lines_down.assign(L.nnode, {});
    L.line_up.assign(L.nnode, -1);
    std::vector<bool> seen(L.nnode, false);
    std::deque<int> frontier{L.substation};
    seen[L.substation] = true;
    int reached = 1;
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop_front();
      for (auto [w, l] : adj[u]) {
        if (seen[w]) continue;
        seen[w] = true;
        ++reached;
        L.lines[l] = {u, w, fd.lines[l].r, fd.lines[l].x};
        L.line_up[w] = l;
        frontier.push_back(w);
      }
    }
    if (reached != L.nnode)
      throw std::invalid_argument("feeder " + fd.id +
                                  " is not a connected radial tree");
    for (int l = 0; l < L.nline; ++l) L.lines_down[L.lines[l].up].push_back(l);

    L.off_v = 0;
    L.off_lp = L.nnode;
    L.off_lq = L.off_lp + L.nline;
    L.off_ll = L.off_lq + L.nline;
    L.off_dgp = L.off_ll + L.nline;
    L.off_dgq = L.off_dgp + L.ndg;
    L.off_essp = L.off_dgq + L.ndg;
    L.off_essq = L.off_essp + L.ness;
    L.off_essl = L.off_essq + L.ness;
    L.off_pvp = L.off_essl + L.ness;
    L.off_pvq = L.off_pvp + L.npv;
    L.off_dlp = L.off_pvq + L.npv;
    L.off_dlq = L.off_dlp + L.nload;
    L.off_gridp = L.off_dlq + L.nload;
    L.off_gridq = L.off_gridp + 1;
    L.size = L.off_gridq + 1;
    L.base = cursor;
    cursor += L.size;
    idx.feeders.push_back(std::move(L));
  }
  idx.n_per_period = cursor;
  idx.n = idx.n_per_period * idx.periods;
  return idx;
}

std::shared_ptr<const RestorationNlp> assemble(const CoupledCase& c,
                                               const FormulationOptions& opts) {
  return std::make_shared<RestorationNlp>(c, opts);
}

RestorationNlp::RestorationNlp(const CoupledCase& c,
                               const FormulationOptions& opts)
    : case_(to_per_unit(c)), opts_(opts), idx_(index_variables(case_)) {
  build_admittance();
  build_layout_rows();
  build_bounds();
}

void RestorationNlp::build_admittance() {
  const int nb = idx_.nbus;
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(nb, nb);
  for (const auto& br : case_.branches) {
    int i = idx_.bus_index.at(br.from_bus);
    int k = idx_.bus_index.at(br.to_bus);
    std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
    std::complex<double> sh(0.0, br.b_shunt / 2.0);
    y(i, i) += ys + sh;
    y(k, k) += ys + sh;
    y(i, k) -= ys;
    y(k, i) -= ys;
  }
  gdiag_.resize(nb);
  bdiag_.resize(nb);
  bus_yoff_.assign(nb, {});
  for (int i = 0; i < nb; ++i) {
    gdiag_(i) = y(i, i).real();
    bdiag_(i) = y(i, i).imag();
    for (int k = 0; k < nb; ++k) {
      if (k == i || y(i, k) == 0.0) continue;
      bus_yoff_[i].push_back((int)yoff_.size());
      yoff_.push_back({i, k, y(i, k).real(), y(i, k).imag()});
    }
  }
}

void RestorationNlp::build_layout_rows() {
  const int nb = idx_.nbus;
  const int F = (int)idx_.feeders.size();
  r_pbal_ = 0;
  r_qbal_ = nb;
  r_slack_ = 2 * nb;
  r_bnd_ = 2 * nb + 1;
  int cur = r_bnd_ + 3 * F;
  r_feeder_.clear();
  for (const auto& L : idx_.feeders) {
    r_feeder_.push_back(cur);
    cur += 2 * L.nline + 2 * L.nnode + L.ness;
  }
  eq_per_period_ = cur;
  m_eq_ = eq_per_period_ * idx_.periods;

  // inequalities: per-period feeder blocks, then energy windows, then ramps
  cur = 0;
  q_feeder_.clear();
  for (const auto& L : idx_.feeders) {
    q_feeder_.push_back(cur);
    cur += L.ness + 2 * L.npv;
  }
  ineq_per_period_ = cur;
  q_energy_ = ineq_per_period_ * idx_.periods;
  cur = q_energy_;
  q_energy_feeder_.clear();
  for (const auto& L : idx_.feeders) {
    q_energy_feeder_.push_back(cur);
    cur += 2 * L.ness * idx_.periods;
  }
  q_ramp_ = cur;
  if (opts_.ramp_enabled) cur += 2 * idx_.ngen * (idx_.periods - 1);
  m_ineq_ = cur;
}

double RestorationNlp::tn_total_p(int t, int b) const {
  return case_.buses[b].p_load_total * case_.profiles.load_profile[t];
}
double RestorationNlp::dn_total_p(int t, int f, int k) const {
  return case_.feeders[f].nodes[k].p_load_total *
         case_.profiles.load_profile[t];
}

void RestorationNlp::build_bounds() {
  const auto& sc = case_.scenario;
  const int T = idx_.periods;
  lower_.setConstant(idx_.n, -kInf);
  upper_.setConstant(idx_.n, kInf);
  grad_.setZero(idx_.n);
  obj_const_ = 0.0;
  const double pen = sc.central_gen_penalty * sc.system_base;

  auto load_window = [](double crit, double total, double& lo, double& hi) {
    lo = std::min(crit, total);
    hi = std::max(crit, total);
  };

  for (int t = 0; t < T; ++t) {
    const double lp = case_.profiles.load_profile[t];
    const double pv = case_.profiles.pv_profile[t];
    for (int b = 0; b < idx_.nbus; ++b) {
      lower_(idx_.v(t, b)) = case_.buses[b].v_min;
      upper_(idx_.v(t, b)) = case_.buses[b].v_max;
      lower_(idx_.th(t, b)) = -kPi / 2;
      upper_(idx_.th(t, b)) = kPi / 2;
      int slot = idx_.tn_load_slot[b];
      if (slot < 0) continue;
      if (idx_.is_boundary[b]) {
        // boundary slot carries the intertie exchange, may be negative
        lower_(idx_.plp(t, slot)) = -sc.intertie_s_max;
        upper_(idx_.plp(t, slot)) = sc.intertie_s_max;
        lower_(idx_.plq(t, slot)) = -sc.intertie_s_max;
        upper_(idx_.plq(t, slot)) = sc.intertie_s_max;
      } else {
        double lo, hi;
        load_window(case_.buses[b].p_load_critical * lp,
                    case_.buses[b].p_load_total * lp, lo, hi);
        lower_(idx_.plp(t, slot)) = lo;
        upper_(idx_.plp(t, slot)) = hi;
        load_window(case_.buses[b].q_load_critical * lp,
                    case_.buses[b].q_load_total * lp, lo, hi);
        lower_(idx_.plq(t, slot)) = lo;
        upper_(idx_.plq(t, slot)) = hi;
        obj_const_ += sc.w_t * sc.delta_t * case_.buses[b].p_load_total * lp;
        grad_(idx_.plp(t, slot)) -= sc.w_t * sc.delta_t;
      }
    }
    for (int g = 0; g < idx_.ngen; ++g) {
      lower_(idx_.gp(t, g)) = case_.generators[g].p_min;
      upper_(idx_.gp(t, g)) = case_.generators[g].p_max;
      lower_(idx_.gq(t, g)) = case_.generators[g].q_min;
      upper_(idx_.gq(t, g)) = case_.generators[g].q_max;
      grad_(idx_.gp(t, g)) += pen;
    }
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      for (int k = 0; k < L.nnode; ++k) {
        lower_(idx_.fv(t, f, k)) = fd.nodes[k].v_sq_min;
        upper_(idx_.fv(t, f, k)) = fd.nodes[k].v_sq_max;
        int slot = L.load_slot[k];
        if (slot < 0) continue;
        double lo, hi;
        load_window(fd.nodes[k].p_load_critical * lp,
                    fd.nodes[k].p_load_total * lp, lo, hi);
        lower_(idx_.fdlp(t, f, slot)) = lo;
        upper_(idx_.fdlp(t, f, slot)) = hi;
        load_window(fd.nodes[k].q_load_critical * lp,
                    fd.nodes[k].q_load_total * lp, lo, hi);
        lower_(idx_.fdlq(t, f, slot)) = lo;
        upper_(idx_.fdlq(t, f, slot)) = hi;
        obj_const_ += sc.w_d * sc.delta_t * fd.nodes[k].p_load_total * lp;
        grad_(idx_.fdlp(t, f, slot)) -= sc.w_d * sc.delta_t;
      }
      // squared current and converter loss stay free: their defining
      // equalities already force them nonnegative at any feasible point,
      // and an explicit zero bound degenerates on unloaded lines
      for (int d = 0; d < L.ndg; ++d) {
        lower_(idx_.fdgp(t, f, d)) = fd.dgs[d].p_min;
        upper_(idx_.fdgp(t, f, d)) = fd.dgs[d].p_max;
        lower_(idx_.fdgq(t, f, d)) = fd.dgs[d].q_min;
        upper_(idx_.fdgq(t, f, d)) = fd.dgs[d].q_max;
      }
      for (int e = 0; e < L.ness; ++e) {
        lower_(idx_.fessp(t, f, e)) = -fd.esss[e].s_max;
        upper_(idx_.fessp(t, f, e)) = fd.esss[e].s_max;
        lower_(idx_.fessq(t, f, e)) = -fd.esss[e].s_max;
        upper_(idx_.fessq(t, f, e)) = fd.esss[e].s_max;
      }
      for (int p = 0; p < L.npv; ++p) {
        double cap = fd.pvs[p].p_max * pv;
        lower_(idx_.fpvp(t, f, p)) = 0.0;
        upper_(idx_.fpvp(t, f, p)) = cap;
        lower_(idx_.fpvq(t, f, p)) = -fd.pvs[p].power_factor * cap;
        upper_(idx_.fpvq(t, f, p)) = fd.pvs[p].power_factor * cap;
      }
      lower_(idx_.fgridp(t, f)) = -sc.intertie_s_max;
      upper_(idx_.fgridp(t, f)) = sc.intertie_s_max;
      lower_(idx_.fgridq(t, f)) = -sc.intertie_s_max;
      upper_(idx_.fgridq(t, f)) = sc.intertie_s_max;
    }
  }
}

double RestorationNlp::objective(const Eigen::VectorXd& x) const {
  return obj_const_ + grad_.dot(x);
}

void RestorationNlp::gradient(const Eigen::VectorXd&, Eigen::VectorXd& g) const {
  g = grad_;
}

void RestorationNlp::objective_split(const Eigen::VectorXd& x, double& unserved,
                                     double& penalty) const {
  const auto& sc = case_.scenario;
  const double pen = sc.central_gen_penalty * sc.system_base;
  penalty = 0.0;
  for (int t = 0; t < idx_.periods; ++t)
    for (int g = 0; g < idx_.ngen; ++g) penalty += pen * x(idx_.gp(t, g));
  unserved = objective(x) - penalty;
}

void RestorationNlp::eval_eq(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
  r.setZero(m_eq_);
  const int F = (int)idx_.feeders.size();
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * eq_per_period_;
    // transmission ACPF balance
    for (int i = 0; i < idx_.nbus; ++i) {
      double vi = x(idx_.v(t, i)), thi = x(idx_.th(t, i));
      double pinj = vi * vi * gdiag_(i);
      double qinj = -vi * vi * bdiag_(i);
      for (int eidx : bus_yoff_[i]) {
        const auto& e = yoff_[eidx];
        double vk = x(idx_.v(t, e.k));
        double dth = thi - x(idx_.th(t, e.k));
        double cs = std::cos(dth), sn = std::sin(dth);
        pinj += vi * vk * (e.g * cs + e.b * sn);
        qinj += vi * vk * (e.g * sn - e.b * cs);
      }
      double pg = 0, qg = 0;
      for (int g = 0; g < idx_.ngen; ++g)
        if (idx_.bus_index.at(case_.generators[g].bus) == i) {
          pg += x(idx_.gp(t, g));
          qg += x(idx_.gq(t, g));
        }
      double pl = 0, ql = 0;
      if (int s = idx_.tn_load_slot[i]; s >= 0) {
        pl = x(idx_.plp(t, s));
        ql = x(idx_.plq(t, s));
      }
      r(rb + r_pbal_ + i) = pg - pl - pinj;
      r(rb + r_qbal_ + i) = qg - ql - qinj;
    }
    r(rb + r_slack_) = x(idx_.th(t, idx_.slack_bus));
    // boundary coupling
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      int b = idx_.bus_index.at(case_.feeders[f].boundary_bus);
      int s = idx_.tn_load_slot[b];
      double vb = x(idx_.v(t, b));
      r(rb + r_bnd_ + 3 * f + 0) = x(idx_.plp(t, s)) - x(idx_.fgridp(t, f));
      r(rb + r_bnd_ + 3 * f + 1) = x(idx_.plq(t, s)) - x(idx_.fgridq(t, f));
      r(rb + r_bnd_ + 3 * f + 2) = vb * vb - x(idx_.fv(t, f, L.substation));
    }
    // feeders: DistFlow physics
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      const int fb = rb + r_feeder_[f];
      const int r_vdrop = 0, r_ldef = L.nline, r_pb = 2 * L.nline,
                r_qb = 2 * L.nline + L.nnode, r_el = 2 * (L.nline + L.nnode);
      for (int l = 0; l < L.nline; ++l) {
        const auto& ol = L.lines[l];
        double vu = x(idx_.fv(t, f, ol.up)), vd = x(idx_.fv(t, f, ol.down));
        double P = x(idx_.flp(t, f, l)), Q = x(idx_.flq(t, f, l));
        double Lk = x(idx_.fll(t, f, l));
        r(fb + r_vdrop + l) = vd - vu + 2.0 * (ol.r * P + ol.x * Q) -
                              (ol.r * ol.r + ol.x * ol.x) * Lk;
        r(fb + r_ldef + l) = Lk * vu - P * P - Q * Q;
      }
      for (int k = 0; k < L.nnode; ++k) {
        double injp = 0, injq = 0;
        if (k == L.substation) {
          injp += x(idx_.fgridp(t, f));
          injq += x(idx_.fgridq(t, f));
        }
        for (int d = 0; d < L.ndg; ++d)
          if (L.node_index.at(fd.dgs[d].node) == k) {
            injp += x(idx_.fdgp(t, f, d));
            injq += x(idx_.fdgq(t, f, d));
          }
        for (int e = 0; e < L.ness; ++e)
          if (L.node_index.at(fd.esss[e].node) == k) {
            injp += x(idx_.fessp(t, f, e));
            injq += x(idx_.fessq(t, f, e));
          }
        for (int p = 0; p < L.npv; ++p)
          if (L.node_index.at(fd.pvs[p].node) == k) {
            injp += x(idx_.fpvp(t, f, p));
            injq += x(idx_.fpvq(t, f, p));
          }
        if (int s = L.load_slot[k]; s >= 0) {
          injp -= x(idx_.fdlp(t, f, s));
          injq -= x(idx_.fdlq(t, f, s));
        }
        double outp = 0, outq = 0;
        for (int l : L.lines_down[k]) {
          outp += x(idx_.flp(t, f, l));
          outq += x(idx_.flq(t, f, l));
        }
        double inp = 0, inq = 0;
        if (int l = L.line_up[k]; l >= 0) {
          inp = x(idx_.flp(t, f, l)) - L.lines[l].r * x(idx_.fll(t, f, l));
          inq = x(idx_.flq(t, f, l)) - L.lines[l].x * x(idx_.fll(t, f, l));
        }
        r(fb + r_pb + k) = outp - inp - injp;
        r(fb + r_qb + k) = outq - inq - injq;
      }
      for (int e = 0; e < L.ness; ++e) {
        int k = L.node_index.at(fd.esss[e].node);
        double P = x(idx_.fessp(t, f, e)), Q = x(idx_.fessq(t, f, e));
        r(fb + r_el + e) = fd.esss[e].r_eq * P * P + fd.esss[e].r_cvt * Q * Q -
                           x(idx_.fessl(t, f, e)) * x(idx_.fv(t, f, k));
      }
    }
  }
}

void RestorationNlp::jac_eq(const Eigen::VectorXd& x,
                            Eigen::SparseMatrix<double>& J) const {
  std::vector<Trip> tr;
  tr.reserve((size_t)m_eq_ * 8);
  const int F = (int)idx_.feeders.size();
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * eq_per_period_;
    for (int i = 0; i < idx_.nbus; ++i) {
      const int rp = rb + r_pbal_ + i, rq = rb + r_qbal_ + i;
      double vi = x(idx_.v(t, i)), thi = x(idx_.th(t, i));
      double dP_dvi = 2.0 * vi * gdiag_(i);
      double dQ_dvi = -2.0 * vi * bdiag_(i);
      double dP_dthi = 0.0, dQ_dthi = 0.0;
      for (int eidx : bus_yoff_[i]) {
        const auto& e = yoff_[eidx];
        double vk = x(idx_.v(t, e.k));
        double dth = thi - x(idx_.th(t, e.k));
        double cs = std::cos(dth), sn = std::sin(dth);
        double a = e.g * cs + e.b * sn;    // P kernel
        double ap = -e.g * sn + e.b * cs;  // dP kernel / dth_i
        double u = e.g * sn - e.b * cs;    // Q kernel ( = -ap )
        double up = a;                     // dQ kernel / dth_i
        dP_dvi += vk * a;
        dQ_dvi += vk * u;
        dP_dthi += vi * vk * ap;
        dQ_dthi += vi * vk * up;
        tr.emplace_back(rp, idx_.v(t, e.k), -vi * a);
        tr.emplace_back(rp, idx_.th(t, e.k), vi * vk * ap);
        tr.emplace_back(rq, idx_.v(t, e.k), -vi * u);
        tr.emplace_back(rq, idx_.th(t, e.k), vi * vk * up);
      }
      tr.emplace_back(rp, idx_.v(t, i), -dP_dvi);
      tr.emplace_back(rp, idx_.th(t, i), -dP_dthi);
      tr.emplace_back(rq, idx_.v(t, i), -dQ_dvi);
      tr.emplace_back(rq, idx_.th(t, i), -dQ_dthi);
      for (int g = 0; g < idx_.ngen; ++g)
        if (idx_.bus_index.at(case_.generators[g].bus) == i) {
          tr.emplace_back(rp, idx_.gp(t, g), 1.0);
          tr.emplace_back(rq, idx_.gq(t, g), 1.0);
        }
      if (int s = idx_.tn_load_slot[i]; s >= 0) {
        tr.emplace_back(rp, idx_.plp(t, s), -1.0);
        tr.emplace_back(rq, idx_.plq(t, s), -1.0);
      }
    }
    tr.emplace_back(rb + r_slack_, idx_.th(t, idx_.slack_bus), 1.0);
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      int b = idx_.bus_index.at(case_.feeders[f].boundary_bus);
      int s = idx_.tn_load_slot[b];
      tr.emplace_back(rb + r_bnd_ + 3 * f + 0, idx_.plp(t, s), 1.0);
      tr.emplace_back(rb + r_bnd_ + 3 * f + 0, idx_.fgridp(t, f), -1.0);
      tr.emplace_back(rb + r_bnd_ + 3 * f + 1, idx_.plq(t, s), 1.0);
      tr.emplace_back(rb + r_bnd_ + 3 * f + 1, idx_.fgridq(t, f), -1.0);
      tr.emplace_back(rb + r_bnd_ + 3 * f + 2, idx_.v(t, b),
                      2.0 * x(idx_.v(t, b)));
      tr.emplace_back(rb + r_bnd_ + 3 * f + 2,
                      idx_.fv(t, f, L.substation), -1.0);
    }
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      const int fb = rb + r_feeder_[f];
      const int r_vdrop = 0, r_ldef = L.nline, r_pb = 2 * L.nline,
                r_qb = 2 * L.nline + L.nnode, r_el = 2 * (L.nline + L.nnode);
      for (int l = 0; l < L.nline; ++l) {
        const auto& ol = L.lines[l];
        int row = fb + r_vdrop + l;
        tr.emplace_back(row, idx_.fv(t, f, ol.down), 1.0);
        tr.emplace_back(row, idx_.fv(t, f, ol.up), -1.0);
        tr.emplace_back(row, idx_.flp(t, f, l), 2.0 * ol.r);
        tr.emplace_back(row, idx_.flq(t, f, l), 2.0 * ol.x);
        tr.emplace_back(row, idx_.fll(t, f, l),
                        -(ol.r * ol.r + ol.x * ol.x));
        row = fb + r_ldef + l;
        tr.emplace_back(row, idx_.fll(t, f, l), x(idx_.fv(t, f, ol.up)));
        tr.emplace_back(row, idx_.fv(t, f, ol.up), x(idx_.fll(t, f, l)));
        tr.emplace_back(row, idx_.flp(t, f, l), -2.0 * x(idx_.flp(t, f, l)));
        tr.emplace_back(row, idx_.flq(t, f, l), -2.0 * x(idx_.flq(t, f, l)));
      }
      for (int k = 0; k < L.nnode; ++k) {
        const int rp = fb + r_pb + k, rq = fb + r_qb + k;
        if (k == L.substation) {
          tr.emplace_back(rp, idx_.fgridp(t, f), -1.0);
          tr.emplace_back(rq, idx_.fgridq(t, f), -1.0);
        }
        for (int d = 0; d < L.ndg; ++d)
          if (L.node_index.at(fd.dgs[d].node) == k) {
            tr.emplace_back(rp, idx_.fdgp(t, f, d), -1.0);
            tr.emplace_back(rq, idx_.fdgq(t, f, d), -1.0);
          }
        for (int e = 0; e < L.ness; ++e)
          if (L.node_index.at(fd.esss[e].node) == k) {
            tr.emplace_back(rp, idx_.fessp(t, f, e), -1.0);
            tr.emplace_back(rq, idx_.fessq(t, f, e), -1.0);
          }
        for (int p = 0; p < L.npv; ++p)
          if (L.node_index.at(fd.pvs[p].node) == k) {
            tr.emplace_back(rp, idx_.fpvp(t, f, p), -1.0);
            tr.emplace_back(rq, idx_.fpvq(t, f, p), -1.0);
          }
        if (int s = L.load_slot[k]; s >= 0) {
          tr.emplace_back(rp, idx_.fdlp(t, f, s), 1.0);
          tr.emplace_back(rq, idx_.fdlq(t, f, s), 1.0);
        }
        for (int l : L.lines_down[k]) {
          tr.emplace_back(rp, idx_.flp(t, f, l), 1.0);
          tr.emplace_back(rq, idx_.flq(t, f, l), 1.0);
        }
        if (int l = L.line_up[k]; l >= 0) {
          tr.emplace_back(rp, idx_.flp(t, f, l), -1.0);
          tr.emplace_back(rp, idx_.fll(t, f, l), L.lines[l].r);
          tr.emplace_back(rq, idx_.flq(t, f, l), -1.0);
          tr.emplace_back(rq, idx_.fll(t, f, l), L.lines[l].x);
        }
      }
      for (int e = 0; e < L.ness; ++e) {
        int k = L.node_index.at(fd.esss[e].node);
        int row = fb + r_el + e;
        tr.emplace_back(row, idx_.fessp(t, f, e),
                        2.0 * fd.esss[e].r_eq * x(idx_.fessp(t, f, e)));
        tr.emplace_back(row, idx_.fessq(t, f, e),
                        2.0 * fd.esss[e].r_cvt * x(idx_.fessq(t, f, e)));
        tr.emplace_back(row, idx_.fessl(t, f, e), -x(idx_.fv(t, f, k)));
        tr.emplace_back(row, idx_.fv(t, f, k), -x(idx_.fessl(t, f, e)));
      }
    }
  }
  J.resize(m_eq_, idx_.n);
  J.setFromTriplets(tr.begin(), tr.end());
}

void RestorationNlp::eval_ineq(const Eigen::VectorXd& x,
                               Eigen::VectorXd& r) const {
  r.setZero(m_ineq_);
  const int F = (int)idx_.feeders.size();
  const double dt = case_.scenario.delta_t;
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * ineq_per_period_;
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      int q = rb + q_feeder_[f];
      for (int e = 0; e < L.ness; ++e) {
        double P = x(idx_.fessp(t, f, e)), Q = x(idx_.fessq(t, f, e));
        r(q + e) = P * P + Q * Q - fd.esss[e].s_max * fd.esss[e].s_max;
      }
      for (int p = 0; p < L.npv; ++p) {
        double pf = fd.pvs[p].power_factor;
        // zero period cap pins P and Q at zero; the power-factor rows
        // would then hold with zero slack, so stand in an inactive row
        if (fd.pvs[p].p_max * case_.profiles.pv_profile[t] == 0.0) {
          r(q + L.ness + 2 * p + 0) = -1.0;
          r(q + L.ness + 2 * p + 1) = -1.0;
          continue;
        }
        double P = x(idx_.fpvp(t, f, p)), Q = x(idx_.fpvq(t, f, p));
        r(q + L.ness + 2 * p + 0) = Q - pf * P;
        r(q + L.ness + 2 * p + 1) = -Q - pf * P;
      }
    }
  }
  for (int f = 0; f < F; ++f) {
    const auto& L = idx_.feeders[f];
    const auto& fd = case_.feeders[f];
    for (int e = 0; e < L.ness; ++e) {
      double acc = 0.0;
      for (int tau = 0; tau < idx_.periods; ++tau) {
        acc += (x(idx_.fessp(tau, f, e)) + x(idx_.fessl(tau, f, e))) * dt;
        int row = q_energy_feeder_[f] + 2 * (e * idx_.periods + tau);
        r(row) = acc - fd.esss[e].e_surplus;
        r(row + 1) = fd.esss[e].e_surplus - acc - fd.esss[e].e_max;
      }
    }
  }
  if (opts_.ramp_enabled) {
    int row = q_ramp_;
    for (int g = 0; g < idx_.ngen; ++g)
      for (int t = 0; t + 1 < idx_.periods; ++t) {
        double d = x(idx_.gp(t + 1, g)) - x(idx_.gp(t, g));
        r(row++) = d - opts_.ramp_limit;
        r(row++) = -d - opts_.ramp_limit;
      }
  }
}

void RestorationNlp::jac_ineq(const Eigen::VectorXd& x,
                              Eigen::SparseMatrix<double>& J) const {
  std::vector<Trip> tr;
  const int F = (int)idx_.feeders.size();
  const double dt = case_.scenario.delta_t;
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * ineq_per_period_;
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      int q = rb + q_feeder_[f];
      for (int e = 0; e < L.ness; ++e) {
        tr.emplace_back(q + e, idx_.fessp(t, f, e), 2.0 * x(idx_.fessp(t, f, e)));
        tr.emplace_back(q + e, idx_.fessq(t, f, e), 2.0 * x(idx_.fessq(t, f, e)));
      }
      for (int p = 0; p < L.npv; ++p) {
        if (fd.pvs[p].p_max * case_.profiles.pv_profile[t] == 0.0) continue;
        double pf = fd.pvs[p].power_factor;
        tr.emplace_back(q + L.ness + 2 * p + 0, idx_.fpvq(t, f, p), 1.0);
        tr.emplace_back(q + L.ness + 2 * p + 0, idx_.fpvp(t, f, p), -pf);
        tr.emplace_back(q + L.ness + 2 * p + 1, idx_.fpvq(t, f, p), -1.0);
        tr.emplace_back(q + L.ness + 2 * p + 1, idx_.fpvp(t, f, p), -pf);
      }
    }
  }
  for (int f = 0; f < F; ++f) {
    const auto& L = idx_.feeders[f];
    for (int e = 0; e < L.ness; ++e)
      for (int tau = 0; tau < idx_.periods; ++tau) {
        int row = q_energy_feeder_[f] + 2 * (e * idx_.periods + tau);
        for (int t = 0; t <= tau; ++t) {
          tr.emplace_back(row, idx_.fessp(t, f, e), dt);
          tr.emplace_back(row, idx_.fessl(t, f, e), dt);
          tr.emplace_back(row + 1, idx_.fessp(t, f, e), -dt);
          tr.emplace_back(row + 1, idx_.fessl(t, f, e), -dt);
        }
      }
  }
  if (opts_.ramp_enabled) {
    int row = q_ramp_;
    for (int g = 0; g < idx_.ngen; ++g)
      for (int t = 0; t + 1 < idx_.periods; ++t) {
        tr.emplace_back(row, idx_.gp(t + 1, g), 1.0);
        tr.emplace_back(row, idx_.gp(t, g), -1.0);
        ++row;
        tr.emplace_back(row, idx_.gp(t + 1, g), -1.0);
        tr.emplace_back(row, idx_.gp(t, g), 1.0);
        ++row;
      }
  }
  J.resize(m_ineq_, idx_.n);
  J.setFromTriplets(tr.begin(), tr.end());
}

void RestorationNlp::lag_hessian(const Eigen::VectorXd& x, double /*sigma*/,
                                 const Eigen::VectorXd& y_eq,
                                 const Eigen::VectorXd& y_ineq,
                                 Eigen::SparseMatrix<double>& H) const {
  // objective is linear; only constraint curvature contributes
  std::vector<Trip> tr;
  const int F = (int)idx_.feeders.size();
  auto sym = [&](int i, int j, double v) {
    tr.emplace_back(i, j, v);
    if (i != j) tr.emplace_back(j, i, v);
  };
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * eq_per_period_;
    for (int i = 0; i < idx_.nbus; ++i) {
      double yp = y_eq(rb + r_pbal_ + i);
      double yq = y_eq(rb + r_qbal_ + i);
      double vi = x(idx_.v(t, i)), thi = x(idx_.th(t, i));
      // residual = ... - P_i, so curvature enters with -y
      sym(idx_.v(t, i), idx_.v(t, i),
          -yp * 2.0 * gdiag_(i) + yq * 2.0 * bdiag_(i));
      double hp_thth = 0.0, hq_thth = 0.0;  // d2/dth_i2 accumulators
      double hp_vthi = 0.0, hq_vthi = 0.0;  // d2/dV_i dth_i
      for (int eidx : bus_yoff_[i]) {
        const auto& e = yoff_[eidx];
        double vk = x(idx_.v(t, e.k));
        double dth = thi - x(idx_.th(t, e.k));
        double cs = std::cos(dth), sn = std::sin(dth);
        double a = e.g * cs + e.b * sn;    // P kernel
        double ap = -e.g * sn + e.b * cs;  // its theta_i derivative
        double u = e.g * sn - e.b * cs;    // Q kernel
        double up = a;
        // P_i term V_i V_k a(th):
        double cp = -yp, cq = -yq;
        sym(idx_.v(t, i), idx_.v(t, e.k), cp * a + cq * u);
        sym(idx_.v(t, i), idx_.th(t, e.k), cp * (-vk * ap) + cq * (-vk * up));
        sym(idx_.v(t, e.k), idx_.th(t, i), cp * (vi * ap) + cq * (vi * up));
        sym(idx_.v(t, e.k), idx_.th(t, e.k),
            cp * (-vi * ap) + cq * (-vi * up));
        sym(idx_.th(t, i), idx_.th(t, e.k),
            cp * (vi * vk * a) + cq * (vi * vk * u));
        sym(idx_.th(t, e.k), idx_.th(t, e.k),
            cp * (-vi * vk * a) + cq * (-vi * vk * u));
        hp_thth += -vi * vk * a;
        hq_thth += -vi * vk * u;
        hp_vthi += vk * ap;
        hq_vthi += vk * up;
      }
      sym(idx_.th(t, i), idx_.th(t, i), -yp * hp_thth - yq * hq_thth);
      sym(idx_.v(t, i), idx_.th(t, i), -yp * hp_vthi - yq * hq_vthi);
    }
    for (int f = 0; f < F; ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      double yb = y_eq(rb + r_bnd_ + 3 * f + 2);
      int b = idx_.bus_index.at(fd.boundary_bus);
      sym(idx_.v(t, b), idx_.v(t, b), 2.0 * yb);
      const int fb = rb + r_feeder_[f];
      const int r_ldef = L.nline, r_el = 2 * (L.nline + L.nnode);
      for (int l = 0; l < L.nline; ++l) {
        double y = y_eq(fb + r_ldef + l);
        sym(idx_.fll(t, f, l), idx_.fv(t, f, L.lines[l].up), y);
        sym(idx_.flp(t, f, l), idx_.flp(t, f, l), -2.0 * y);
        sym(idx_.flq(t, f, l), idx_.flq(t, f, l), -2.0 * y);
      }
      for (int e = 0; e < L.ness; ++e) {
        double y = y_eq(fb + r_el + e);
        int k = L.node_index.at(fd.esss[e].node);
        sym(idx_.fessp(t, f, e), idx_.fessp(t, f, e), 2.0 * fd.esss[e].r_eq * y);
        sym(idx_.fessq(t, f, e), idx_.fessq(t, f, e), 2.0 * fd.esss[e].r_cvt * y);
        sym(idx_.fessl(t, f, e), idx_.fv(t, f, k), -y);
        // MVA circle (inequality)
        double w = y_ineq(t * ineq_per_period_ + q_feeder_[f] + e);
        sym(idx_.fessp(t, f, e), idx_.fessp(t, f, e), 2.0 * w);
        sym(idx_.fessq(t, f, e), idx_.fessq(t, f, e), 2.0 * w);
      }
    }
  }
  H.resize(idx_.n, idx_.n);
  H.setFromTriplets(tr.begin(), tr.end());
}

Eigen::VectorXd RestorationNlp::flat_start() const {
  Eigen::VectorXd x(idx_.n);
  for (int i = 0; i < idx_.n; ++i) {
    double lo = lower_(i), hi = upper_(i);
    if (std::isfinite(lo) && std::isfinite(hi))
      x(i) = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
      x(i) = lo;
    else if (std::isfinite(hi))
      x(i) = hi;
    else
      x(i) = 0.0;
  }
  for (int t = 0; t < idx_.periods; ++t) {
    for (int b = 0; b < idx_.nbus; ++b) {
      x(idx_.v(t, b)) = 1.0;
      x(idx_.th(t, b)) = 0.0;
      int s = idx_.tn_load_slot[b];
      if (s >= 0 && !idx_.is_boundary[b]) {
        x(idx_.plp(t, s)) = lower_(idx_.plp(t, s));
        x(idx_.plq(t, s)) = lower_(idx_.plq(t, s));
      } else if (s >= 0) {
        x(idx_.plp(t, s)) = 0.0;
        x(idx_.plq(t, s)) = 0.0;
      }
    }
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      for (int k = 0; k < L.nnode; ++k) {
        x(idx_.fv(t, f, k)) = 1.0;
        if (int s = L.load_slot[k]; s >= 0) {
          x(idx_.fdlp(t, f, s)) = lower_(idx_.fdlp(t, f, s));
          x(idx_.fdlq(t, f, s)) = lower_(idx_.fdlq(t, f, s));
        }
      }
      for (int l = 0; l < L.nline; ++l) {
        x(idx_.flp(t, f, l)) = 0.0;
        x(idx_.flq(t, f, l)) = 0.0;
        x(idx_.fll(t, f, l)) = 0.0;
      }
      for (int e = 0; e < L.ness; ++e) {
        x(idx_.fessp(t, f, e)) = 0.0;
        x(idx_.fessq(t, f, e)) = 0.0;
        x(idx_.fessl(t, f, e)) = 0.0;
      }
      x(idx_.fgridp(t, f)) = 0.0;
      x(idx_.fgridq(t, f)) = 0.0;
    }
  }
  return x;
}

RestorationSolution RestorationNlp::extract_solution(
    const Eigen::VectorXd& x) const {
  RestorationSolution s;
  s.periods.resize(idx_.periods);
  for (int t = 0; t < idx_.periods; ++t) {
    PeriodState& ps = s.periods[t];
    ps.v.resize(idx_.nbus);
    ps.theta.resize(idx_.nbus);
    ps.gen_p.resize(idx_.ngen);
    ps.gen_q.resize(idx_.ngen);
    ps.served_p.setZero(idx_.nbus);
    ps.served_q.setZero(idx_.nbus);
    for (int b = 0; b < idx_.nbus; ++b) {
      ps.v(b) = x(idx_.v(t, b));
      ps.theta(b) = x(idx_.th(t, b));
      if (int sl = idx_.tn_load_slot[b]; sl >= 0) {
        ps.served_p(b) = x(idx_.plp(t, sl));
        ps.served_q(b) = x(idx_.plq(t, sl));
      }
    }
    for (int g = 0; g < idx_.ngen; ++g) {
      ps.gen_p(g) = x(idx_.gp(t, g));
      ps.gen_q(g) = x(idx_.gq(t, g));
    }
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      FeederState fs;
      fs.v_sq.resize(L.nnode);
      fs.line_p.resize(L.nline);
      fs.line_q.resize(L.nline);
      fs.line_l.resize(L.nline);
      fs.dg_p.resize(L.ndg);
      fs.dg_q.resize(L.ndg);
      fs.ess_p.resize(L.ness);
      fs.ess_q.resize(L.ness);
      fs.ess_loss.resize(L.ness);
      fs.pv_p.resize(L.npv);
      fs.pv_q.resize(L.npv);
      fs.served_p.setZero(L.nnode);
      fs.served_q.setZero(L.nnode);
      for (int k = 0; k < L.nnode; ++k) {
        fs.v_sq(k) = x(idx_.fv(t, f, k));
        if (int sl = L.load_slot[k]; sl >= 0) {
          fs.served_p(k) = x(idx_.fdlp(t, f, sl));
          fs.served_q(k) = x(idx_.fdlq(t, f, sl));
        }
      }
      for (int l = 0; l < L.nline; ++l) {
        fs.line_p(l) = x(idx_.flp(t, f, l));
        fs.line_q(l) = x(idx_.flq(t, f, l));
        fs.line_l(l) = x(idx_.fll(t, f, l));
      }
      for (int d = 0; d < L.ndg; ++d) {
        fs.dg_p(d) = x(idx_.fdgp(t, f, d));
        fs.dg_q(d) = x(idx_.fdgq(t, f, d));
      }
      for (int e = 0; e < L.ness; ++e) {
        fs.ess_p(e) = x(idx_.fessp(t, f, e));
        fs.ess_q(e) = x(idx_.fessq(t, f, e));
        fs.ess_loss(e) = x(idx_.fessl(t, f, e));
      }
      for (int p = 0; p < L.npv; ++p) {
        fs.pv_p(p) = x(idx_.fpvp(t, f, p));
        fs.pv_q(p) = x(idx_.fpvq(t, f, p));
      }
      fs.grid_p = x(idx_.fgridp(t, f));
      fs.grid_q = x(idx_.fgridq(t, f));
      ps.feeders.push_back(std::move(fs));
    }
  }
  return s;
}

Eigen::VectorXd RestorationNlp::pack_solution(const RestorationSolution& s) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(idx_.n);
  for (int t = 0; t < idx_.periods; ++t) {
    const PeriodState& ps = s.periods.at(t);
    for (int b = 0; b < idx_.nbus; ++b) {
      x(idx_.v(t, b)) = ps.v(b);
      x(idx_.th(t, b)) = ps.theta(b);
      if (int sl = idx_.tn_load_slot[b]; sl >= 0) {
        x(idx_.plp(t, sl)) = ps.served_p(b);
        x(idx_.plq(t, sl)) = ps.served_q(b);
      }
    }
    for (int g = 0; g < idx_.ngen; ++g) {
      x(idx_.gp(t, g)) = ps.gen_p(g);
      x(idx_.gq(t, g)) = ps.gen_q(g);
    }
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      const FeederState& fs = ps.feeders.at(f);
      for (int k = 0; k < L.nnode; ++k) {
        x(idx_.fv(t, f, k)) = fs.v_sq(k);
        if (int sl = L.load_slot[k]; sl >= 0) {
          x(idx_.fdlp(t, f, sl)) = fs.served_p(k);
          x(idx_.fdlq(t, f, sl)) = fs.served_q(k);
        }
      }
      for (int l = 0; l < L.nline; ++l) {
        x(idx_.flp(t, f, l)) = fs.line_p(l);
        x(idx_.flq(t, f, l)) = fs.line_q(l);
        x(idx_.fll(t, f, l)) = fs.line_l(l);
      }
      for (int d = 0; d < L.ndg; ++d) {
        x(idx_.fdgp(t, f, d)) = fs.dg_p(d);
        x(idx_.fdgq(t, f, d)) = fs.dg_q(d);
      }
      for (int e = 0; e < L.ness; ++e) {
        x(idx_.fessp(t, f, e)) = fs.ess_p(e);
        x(idx_.fessq(t, f, e)) = fs.ess_q(e);
        x(idx_.fessl(t, f, e)) = fs.ess_loss(e);
      }
      for (int p = 0; p < L.npv; ++p) {
        x(idx_.fpvp(t, f, p)) = fs.pv_p(p);
        x(idx_.fpvq(t, f, p)) = fs.pv_q(p);
      }
      x(idx_.fgridp(t, f)) = fs.grid_p;
      x(idx_.fgridq(t, f)) = fs.grid_q;
    }
  }
  return x;
}

std::vector<std::string> RestorationNlp::var_names() const {
  std::vector<std::string> names(idx_.n);
  for (int t = 0; t < idx_.periods; ++t) {
    std::string p = "t" + std::to_string(t) + ".";
    for (int b = 0; b < idx_.nbus; ++b) {
      std::string id = std::to_string(case_.buses[b].id);
      names[idx_.v(t, b)] = p + "tn.V" + id;
      names[idx_.th(t, b)] = p + "tn.th" + id;
      if (int s = idx_.tn_load_slot[b]; s >= 0) {
        names[idx_.plp(t, s)] = p + "tn.Pl" + id;
        names[idx_.plq(t, s)] = p + "tn.Ql" + id;
      }
    }
    for (int g = 0; g < idx_.ngen; ++g) {
      std::string id = std::to_string(case_.generators[g].bus);
      names[idx_.gp(t, g)] = p + "tn.Pg" + id;
      names[idx_.gq(t, g)] = p + "tn.Qg" + id;
    }
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      std::string fp = p + fd.id + ".";
      for (int k = 0; k < L.nnode; ++k) {
        std::string id = std::to_string(fd.nodes[k].id);
        names[idx_.fv(t, f, k)] = fp + "v" + id;
        if (int s = L.load_slot[k]; s >= 0) {
          names[idx_.fdlp(t, f, s)] = fp + "Pl" + id;
          names[idx_.fdlq(t, f, s)] = fp + "Ql" + id;
        }
      }
      for (int l = 0; l < L.nline; ++l) {
        std::string id = std::to_string(fd.nodes[L.lines[l].up].id) + "_" +
                         std::to_string(fd.nodes[L.lines[l].down].id);
        names[idx_.flp(t, f, l)] = fp + "P" + id;
        names[idx_.flq(t, f, l)] = fp + "Q" + id;
        names[idx_.fll(t, f, l)] = fp + "l" + id;
      }
      for (int d = 0; d < L.ndg; ++d) {
        std::string id = std::to_string(fd.dgs[d].node);
        names[idx_.fdgp(t, f, d)] = fp + "Pdg" + id;
        names[idx_.fdgq(t, f, d)] = fp + "Qdg" + id;
      }
      for (int e = 0; e < L.ness; ++e) {
        std::string id = std::to_string(fd.esss[e].node);
        names[idx_.fessp(t, f, e)] = fp + "Pess" + id;
        names[idx_.fessq(t, f, e)] = fp + "Qess" + id;
        names[idx_.fessl(t, f, e)] = fp + "PessLoss" + id;
      }
      for (int pv = 0; pv < L.npv; ++pv) {
        std::string id = std::to_string(fd.pvs[pv].node);
        names[idx_.fpvp(t, f, pv)] = fp + "Ppv" + id;
        names[idx_.fpvq(t, f, pv)] = fp + "Qpv" + id;
      }
      names[idx_.fgridp(t, f)] = fp + "Pgrid";
      names[idx_.fgridq(t, f)] = fp + "Qgrid";
    }
  }
  return names;
}

std::vector<std::string> RestorationNlp::eq_names() const {
  std::vector<std::string> names(m_eq_);
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * eq_per_period_;
    std::string p = "t" + std::to_string(t) + ".";
    for (int b = 0; b < idx_.nbus; ++b) {
      std::string id = std::to_string(case_.buses[b].id);
      names[rb + r_pbal_ + b] = p + "tn.pbal" + id;
      names[rb + r_qbal_ + b] = p + "tn.qbal" + id;
    }
    names[rb + r_slack_] = p + "tn.slack";
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& fd = case_.feeders[f];
      names[rb + r_bnd_ + 3 * f + 0] = p + fd.id + ".bndP";
      names[rb + r_bnd_ + 3 * f + 1] = p + fd.id + ".bndQ";
      names[rb + r_bnd_ + 3 * f + 2] = p + fd.id + ".bndV";
      const auto& L = idx_.feeders[f];
      const int fb = rb + r_feeder_[f];
      for (int l = 0; l < L.nline; ++l) {
        std::string id = std::to_string(fd.nodes[L.lines[l].up].id) + "_" +
                         std::to_string(fd.nodes[L.lines[l].down].id);
        names[fb + l] = p + fd.id + ".vdrop" + id;
        names[fb + L.nline + l] = p + fd.id + ".ldef" + id;
      }
      for (int k = 0; k < L.nnode; ++k) {
        std::string id = std::to_string(fd.nodes[k].id);
        names[fb + 2 * L.nline + k] = p + fd.id + ".pbal" + id;
        names[fb + 2 * L.nline + L.nnode + k] = p + fd.id + ".qbal" + id;
      }
      for (int e = 0; e < L.ness; ++e)
        names[fb + 2 * (L.nline + L.nnode) + e] =
            p + fd.id + ".essloss" + std::to_string(fd.esss[e].node);
    }
  }
  return names;
}

std::vector<std::string> RestorationNlp::ineq_names() const {
  std::vector<std::string> names(m_ineq_);
  for (int t = 0; t < idx_.periods; ++t) {
    const int rb = t * ineq_per_period_;
    std::string p = "t" + std::to_string(t) + ".";
    for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
      const auto& L = idx_.feeders[f];
      const auto& fd = case_.feeders[f];
      int q = rb + q_feeder_[f];
      for (int e = 0; e < L.ness; ++e)
        names[q + e] = p + fd.id + ".mva" + std::to_string(fd.esss[e].node);
      for (int pv = 0; pv < L.npv; ++pv) {
        names[q + L.ness + 2 * pv + 0] =
            p + fd.id + ".pvq_ub" + std::to_string(fd.pvs[pv].node);
        names[q + L.ness + 2 * pv + 1] =
            p + fd.id + ".pvq_lb" + std::to_string(fd.pvs[pv].node);
      }
    }
  }
  for (int f = 0; f < (int)idx_.feeders.size(); ++f) {
    const auto& L = idx_.feeders[f];
    const auto& fd = case_.feeders[f];
    for (int e = 0; e < L.ness; ++e)
      for (int tau = 0; tau < idx_.periods; ++tau) {
        int row = q_energy_feeder_[f] + 2 * (e * idx_.periods + tau);
        std::string s = fd.id + ".energy" + std::to_string(fd.esss[e].node) +
                        ".tau" + std::to_string(tau);
        names[row] = s + ".lo";
        names[row + 1] = s + ".hi";
      }
  }
  if (opts_.ramp_enabled) {
    int row = q_ramp_;
    for (int g = 0; g < idx_.ngen; ++g)
      for (int t = 0; t + 1 < idx_.periods; ++t) {
        std::string s = "ramp.g" + std::to_string(case_.generators[g].bus) +
                        ".t" + std::to_string(t);
        names[row++] = s + ".up";
        names[row++] = s + ".dn";
      }
  }
  return names;
}

NlpProblem make_problem(std::shared_ptr<const RestorationNlp> nlp) {
  NlpProblem p;
  p.n = nlp->num_vars();
  p.m_eq = nlp->num_eq();
  p.m_ineq = nlp->num_ineq();
  p.lower = nlp->lower();
  p.upper = nlp->upper();
  p.objective = [nlp](const Eigen::VectorXd& x) { return nlp->objective(x); };
  p.gradient = [nlp](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    nlp->gradient(x, g);
  };
  p.eval_eq = [nlp](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    nlp->eval_eq(x, r);
  };
  p.eval_ineq = [nlp](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    nlp->eval_ineq(x, r);
  };
  p.jac_eq = [nlp](const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& J) {
    nlp->jac_eq(x, J);
  };
  p.jac_ineq = [nlp](const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& J) {
    nlp->jac_ineq(x, J);
  };
  p.lag_hessian = [nlp](const Eigen::VectorXd& x, double sigma,
                        const Eigen::VectorXd& ye, const Eigen::VectorXd& yi,
                        Eigen::SparseMatrix<double>& H) {
    nlp->lag_hessian(x, sigma, ye, yi, H);
  };
  p.var_names = nlp->var_names();
  p.eq_names = nlp->eq_names();
  p.ineq_names = nlp->ineq_names();
  return p;
}

}  // namespace restore
