#pragma once

// Assembles the multi-period restoration NLP from a CoupledCase:
// transmission ACPF balance, DistFlow branch-flow physics per feeder,
// DER constraints, boundary coupling, bounds, and the weighted
// unserved-energy objective with the central-generation penalty.
// All derivatives are analytic with fixed sparsity.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "restore/netmodel.hpp"
#include "restore/nlp.hpp"
#include "restore/solution.hpp"

namespace restore {

struct FormulationOptions {
  bool ramp_enabled = false;  // optional |P_g,t+1 - P_g,t| <= ramp_limit
  double ramp_limit = 0.0;    // pu per period
};

// Deterministic variable layout: period-major, transmission first,
// feeders in case order. Buses/nodes with zero total load carry no
// served-load slot; boundary buses always do (the exchange).
struct VariableIndex {
  struct OrientedLine {
    int up = 0, down = 0;  // node indices, up is the substation side
    double r = 0.0, x = 0.0;
  };
  struct FeederLayout {
    int nnode = 0, nline = 0, ndg = 0, ness = 0, npv = 0, nload = 0;
    std::map<int, int> node_index;
    std::vector<int> load_slot;    // node index -> ordinal or -1
    std::vector<OrientedLine> lines;
    std::vector<std::vector<int>> lines_down;  // node index -> outgoing lines
    std::vector<int> line_up;                  // node index -> incoming line or -1
    int substation = 0;  // node index
    int base = 0;        // offset inside the period block
    int off_v = 0, off_lp = 0, off_lq = 0, off_ll = 0, off_dgp = 0,
        off_dgq = 0, off_essp = 0, off_essq = 0, off_essl = 0, off_pvp = 0,
        off_pvq = 0, off_dlp = 0, off_dlq = 0, off_gridp = 0, off_gridq = 0;
    int size = 0;
  };

  int periods = 0;
  int nbus = 0, ngen = 0;
  int slack_bus = 0;  // bus index with angle pinned to zero
  std::map<int, int> bus_index;
  std::vector<int> tn_load_slot;  // bus index -> ordinal or -1
  std::vector<bool> is_boundary;  // bus index
  int n_tn_load = 0;
  int off_v = 0, off_th = 0, off_gp = 0, off_gq = 0, off_plp = 0, off_plq = 0;
  std::vector<FeederLayout> feeders;
  int n_per_period = 0;
  int n = 0;

  int base(int t) const { return t * n_per_period; }
  int v(int t, int b) const { return base(t) + off_v + b; }
  int th(int t, int b) const { return base(t) + off_th + b; }
  int gp(int t, int g) const { return base(t) + off_gp + g; }
  int gq(int t, int g) const { return base(t) + off_gq + g; }
  int plp(int t, int slot) const { return base(t) + off_plp + slot; }
  int plq(int t, int slot) const { return base(t) + off_plq + slot; }
  int fbase(int t, int f) const { return base(t) + feeders[f].base; }
  int fv(int t, int f, int node) const {
    return fbase(t, f) + feeders[f].off_v + node;
  }
  int flp(int t, int f, int l) const {
    return fbase(t, f) + feeders[f].off_lp + l;
  }
  int flq(int t, int f, int l) const {
    return fbase(t, f) + feeders[f].off_lq + l;
  }
  int fll(int t, int f, int l) const {
    return fbase(t, f) + feeders[f].off_ll + l;
  }
  int fdgp(int t, int f, int d) const {
    return fbase(t, f) + feeders[f].off_dgp + d;
  }
  int fdgq(int t, int f, int d) const {
    return fbase(t, f) + feeders[f].off_dgq + d;
  }
  int fessp(int t, int f, int e) const {
    return fbase(t, f) + feeders[f].off_essp + e;
  }
  int fessq(int t, int f, int e) const {
    return fbase(t, f) + feeders[f].off_essq + e;
  }
  int fessl(int t, int f, int e) const {
    return fbase(t, f) + feeders[f].off_essl + e;
  }
  int fpvp(int t, int f, int p) const {
    return fbase(t, f) + feeders[f].off_pvp + p;
  }
  int fpvq(int t, int f, int p) const {
    return fbase(t, f) + feeders[f].off_pvq + p;
  }
  int fdlp(int t, int f, int slot) const {
    return fbase(t, f) + feeders[f].off_dlp + slot;
  }
  int fdlq(int t, int f, int slot) const {
    return fbase(t, f) + feeders[f].off_dlq + slot;
  }
  int fgridp(int t, int f) const {
    return fbase(t, f) + feeders[f].off_gridp;
  }
  int fgridq(int t, int f) const {
    return fbase(t, f) + feeders[f].off_gridq;
  }
};

VariableIndex index_variables(const CoupledCase& case_pu);

class RestorationNlp;

// Builds the full NLP from a validated case (converted to per-unit
// internally if needed).
std::shared_ptr<const RestorationNlp> assemble(const CoupledCase& c,
                                               const FormulationOptions& opts = {});

// NlpProblem view over an assembled formulation; callbacks keep the
// formulation alive.
NlpProblem make_problem(std::shared_ptr<const RestorationNlp> nlp);

class RestorationNlp : public std::enable_shared_from_this<RestorationNlp> {
 public:
  RestorationNlp(const CoupledCase& c, const FormulationOptions& opts);

  const CoupledCase& case_pu() const { return case_; }
  const VariableIndex& index() const { return idx_; }
  const FormulationOptions& options() const { return opts_; }

  int num_vars() const { return idx_.n; }
  int num_eq() const { return m_eq_; }
  int num_ineq() const { return m_ineq_; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  double objective(const Eigen::VectorXd& x) const;
  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const;
  void eval_eq(const Eigen::VectorXd& x, Eigen::VectorXd& r) const;
  void eval_ineq(const Eigen::VectorXd& x, Eigen::VectorXd& r) const;
  void jac_eq(const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& J) const;
  void jac_ineq(const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& J) const;
  void lag_hessian(const Eigen::VectorXd& x, double sigma,
                   const Eigen::VectorXd& y_eq, const Eigen::VectorXd& y_ineq,
                   Eigen::SparseMatrix<double>& H) const;

  // Flat start: V = 1, theta = 0, v = 1, flows/currents 0, served loads
  // at their lower bound, injections at bound midpoints, exchanges 0.
  Eigen::VectorXd flat_start() const;

  RestorationSolution extract_solution(const Eigen::VectorXd& x) const;
  Eigen::VectorXd pack_solution(const RestorationSolution& s) const;

  // Unserved-energy term and penalty term of the objective, separately.
  void objective_split(const Eigen::VectorXd& x, double& unserved,
                       double& penalty) const;

  std::vector<std::string> var_names() const;
  std::vector<std::string> eq_names() const;
  std::vector<std::string> ineq_names() const;

  // Total load (profile-scaled) for period t: bus slot totals in pu.
  double tn_total_p(int t, int bus_idx) const;
  double dn_total_p(int t, int f, int node_idx) const;

 private:
  struct YEntry {
    int i, k;      // bus indices, i != k
    double g, b;   // off-diagonal admittance
  };

  void build_admittance();
  void build_layout_rows();
  void build_bounds();

  CoupledCase case_;  // per-unit
  FormulationOptions opts_;
  VariableIndex idx_;

  // admittance structure
  std::vector<YEntry> yoff_;                  // both (i,k) and (k,i)
  std::vector<std::vector<int>> bus_yoff_;    // bus index -> entries with .i==bus
  Eigen::VectorXd gdiag_, bdiag_;

  // equality row layout (per period block)
  int eq_per_period_ = 0;
  int r_pbal_ = 0, r_qbal_ = 0, r_slack_ = 0, r_bnd_ = 0;
  std::vector<int> r_feeder_;  // feeder -> offset of its block
  int m_eq_ = 0;

  // inequality rows
  int ineq_per_period_ = 0;
  std::vector<int> q_feeder_;  // feeder -> offset within period block
  int q_energy_ = 0;           // start of energy-window rows (global)
  std::vector<int> q_energy_feeder_;  // feeder -> offset after q_energy_
  int q_ramp_ = 0;
  int m_ineq_ = 0;

  Eigen::VectorXd lower_, upper_;
  Eigen::VectorXd grad_;      // constant objective gradient
  double obj_const_ = 0.0;    // sum of weighted total loads
};

}  // namespace restore
