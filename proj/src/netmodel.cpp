#include "restore/netmodel.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace restore {

namespace {

bool finite(double v) { return std::isfinite(v); }

// critical must lie between 0 and total in magnitude, same sign
void check_load_window(std::vector<std::string>& errs, const std::string& path,
                       double crit, double total, const char* what) {
  double lo = std::min(0.0, total);
  double hi = std::max(0.0, total);
  if (crit < lo - 1e-12 || crit > hi + 1e-12) {
    std::ostringstream os;
    os << path << ": critical " << what << " " << crit
       << " outside [0, total=" << total << "] window";
    errs.push_back(os.str());
  }
}

bool is_radial(const DistributionFeeder& f, std::string* why) {
  std::set<int> nodes;
  for (const auto& n : f.nodes) nodes.insert(n.id);
  if (f.lines.size() + 1 != f.nodes.size()) {
    *why = "line count " + std::to_string(f.lines.size()) +
           " != node count - 1 (" + std::to_string(f.nodes.size() - 1) + ")";
    return false;
  }
  // union-find cycle check
  std::map<int, int> parent;
  for (int n : nodes) parent[n] = n;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& l : f.lines) {
    if (!nodes.count(l.from_node) || !nodes.count(l.to_node)) {
      *why = "line " + std::to_string(l.from_node) + "-" +
             std::to_string(l.to_node) + " references unknown node";
      return false;
    }
    int a = find(l.from_node), b = find(l.to_node);
    if (a == b) {
      *why = "cycle through line " + std::to_string(l.from_node) + "-" +
             std::to_string(l.to_node);
      return false;
    }
    parent[a] = b;
  }
  return true;
}

}  // namespace

void apply_critical_fraction(CoupledCase& c) {
  const double k = c.scenario.critical_fraction;
  for (auto& b : c.buses) {
    b.p_load_critical = k * b.p_load_total;
    b.q_load_critical = k * b.q_load_total;
  }
  for (auto& f : c.feeders)
    for (auto& n : f.nodes) {
      n.p_load_critical = k * n.p_load_total;
      n.q_load_critical = k * n.q_load_total;
    }
}

const TransmissionBus* find_bus(const CoupledCase& c, int id) {
  for (const auto& b : c.buses)
    if (b.id == id) return &b;
  return nullptr;
}

const FeederNode* find_node(const DistributionFeeder& f, int id) {
  for (const auto& n : f.nodes)
    if (n.id == id) return &n;
  return nullptr;
}

ValidationOutcome validate_case(const CoupledCase& c) {
  ValidationOutcome out;
  auto& errs = out.errors;
  auto err = [&](const std::string& m) { errs.push_back(m); };

  std::set<int> bus_ids;
  for (const auto& b : c.buses) {
    std::string path = "bus " + std::to_string(b.id);
    if (!bus_ids.insert(b.id).second) err(path + ": duplicate id");
    check_load_window(errs, path, b.p_load_critical, b.p_load_total, "P");
    check_load_window(errs, path, b.q_load_critical, b.q_load_total, "Q");
    if (!(b.v_min > 0.0)) err(path + ": v_min must be > 0");
    if (!(b.v_min < b.v_max)) err(path + ": v_min >= v_max");
  }
  if (c.buses.empty()) err("transmission: empty bus list");

  for (const auto& br : c.branches) {
    std::string path = "branch " + std::to_string(br.from_bus) + "-" +
                       std::to_string(br.to_bus);
    if (br.x == 0.0) err(path + ": zero reactance");
    if (br.from_bus == br.to_bus) err(path + ": self-loop");
    if (!bus_ids.count(br.from_bus) || !bus_ids.count(br.to_bus))
      err(path + ": dangling bus reference");
  }
  for (const auto& g : c.generators) {
    std::string path = "gen at bus " + std::to_string(g.bus);
    if (!bus_ids.count(g.bus)) err(path + ": dangling bus reference");
    if (g.p_min > g.p_max) err(path + ": p_min > p_max");
    if (g.q_min > g.q_max) err(path + ": q_min > q_max");
  }

  std::set<int> boundary;
  for (const auto& f : c.feeders) {
    std::string fp = "feeder " + f.id;
    std::set<int> node_ids;
    for (const auto& n : f.nodes) {
      std::string path = fp + " node " + std::to_string(n.id);
      if (!node_ids.insert(n.id).second) err(path + ": duplicate id");
      check_load_window(errs, path, n.p_load_critical, n.p_load_total, "P");
      check_load_window(errs, path, n.q_load_critical, n.q_load_total, "Q");
      if (!(n.v_sq_min > 0.0)) err(path + ": v_sq_min must be > 0");
      if (!(n.v_sq_min < n.v_sq_max)) err(path + ": v_sq_min >= v_sq_max");
    }
    std::string why;
    if (f.nodes.empty())
      err(fp + ": empty node list");
    else if (!is_radial(f, &why))
      err(fp + ": not radial: " + why);
    for (const auto& l : f.lines) {
      std::string path = fp + " line " + std::to_string(l.from_node) + "-" +
                         std::to_string(l.to_node);
      if (l.from_node == l.to_node) err(path + ": self-loop");
    }
    if (!node_ids.count(f.substation_node))
      err(fp + ": substation node " + std::to_string(f.substation_node) +
          " does not exist");
    for (const auto& d : f.dgs) {
      std::string path = fp + " dg at node " + std::to_string(d.node);
      if (!node_ids.count(d.node)) err(path + ": dangling node reference");
      if (d.p_min > d.p_max) err(path + ": p_min > p_max");
      if (d.q_min > d.q_max) err(path + ": q_min > q_max");
    }
    for (const auto& e : f.esss) {
      std::string path = fp + " ess at node " + std::to_string(e.node);
      if (!node_ids.count(e.node)) err(path + ": dangling node reference");
      if (e.e_surplus < 0.0 || e.e_surplus > e.e_max)
        err(path + ": e_surplus outside [0, e_max]");
      if (!(e.s_max > 0.0)) err(path + ": s_max must be > 0");
      if (e.r_eq < 0.0 || e.r_cvt < 0.0) err(path + ": negative resistance");
    }
    for (const auto& p : f.pvs) {
      std::string path = fp + " pv at node " + std::to_string(p.node);
      if (!node_ids.count(p.node)) err(path + ": dangling node reference");
      if (p.p_max < 0.0) err(path + ": negative p_max");
      if (!(p.power_factor > 0.0 && p.power_factor <= 1.0))
        err(path + ": power_factor outside (0, 1]");
    }
    if (!bus_ids.count(f.boundary_bus))
      err(fp + ": boundary bus " + std::to_string(f.boundary_bus) +
          " does not exist");
    else {
      if (!boundary.insert(f.boundary_bus).second)
        err(fp + ": boundary bus " + std::to_string(f.boundary_bus) +
            " already used by another feeder");
      const TransmissionBus* b = find_bus(c, f.boundary_bus);
      if (b && (b->p_load_total != 0.0 || b->q_load_total != 0.0))
        err(fp + ": boundary bus " + std::to_string(f.boundary_bus) +
            " has nonzero native load (feeder replaces it)");
    }
  }

  const ScenarioConfig& s = c.scenario;
  if (s.periods < 1) err("scenario: periods must be >= 1");
  if (!(s.delta_t > 0.0)) err("scenario: delta_t must be > 0");
  if (!(s.w_t > 0.0) || !(s.w_d > 0.0)) err("scenario: weights must be > 0");
  if (s.critical_fraction < 0.0 || s.critical_fraction > 1.0)
    err("scenario: critical_fraction outside [0, 1]");
  if (!(s.system_base > 0.0)) err("scenario: system_base must be > 0");
  auto check_profile = [&](const std::vector<double>& p, const char* name) {
    if ((int)p.size() != s.periods)
      err(std::string("profiles: ") + name + " length " +
          std::to_string(p.size()) + " != periods " +
          std::to_string(s.periods));
    for (double v : p)
      if (!finite(v) || v < 0.0 || v > 1.2)
        err(std::string("profiles: ") + name + " entry " + std::to_string(v) +
            " outside [0, 1.2]");
  };
  check_profile(c.profiles.load_profile, "load");
  check_profile(c.profiles.pv_profile, "pv");

  return out;
}

CoupledCase to_per_unit(const CoupledCase& c) {
  if (c.per_unit) return c;
  if (!(c.scenario.system_base > 0.0))
    throw std::invalid_argument("to_per_unit: system_base must be > 0");
  const double sb = c.scenario.system_base;
  CoupledCase out = c;
  for (auto& b : out.buses) {
    b.p_load_total /= sb;
    b.q_load_total /= sb;
    b.p_load_critical /= sb;
    b.q_load_critical /= sb;
  }
  for (auto& g : out.generators) {
    g.p_min /= sb;
    g.p_max /= sb;
    g.q_min /= sb;
    g.q_max /= sb;
  }
  for (auto& f : out.feeders) {
    for (auto& n : f.nodes) {
      n.p_load_total /= sb;
      n.q_load_total /= sb;
      n.p_load_critical /= sb;
      n.q_load_critical /= sb;
    }
    for (auto& d : f.dgs) {
      d.p_min /= sb;
      d.p_max /= sb;
      d.q_min /= sb;
      d.q_max /= sb;
    }
    for (auto& e : f.esss) {
      e.e_surplus /= sb;  // MWh -> pu*h on base*1h
      e.e_max /= sb;
      e.s_max /= sb;
    }
    for (auto& p : f.pvs) p.p_max /= sb;
  }
  out.scenario.intertie_s_max /= sb;
  out.per_unit = true;
  return out;
}

}  // namespace restore
