#include "restore/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace restore {

namespace {

int bus_pos(const CoupledCase& c, int id) {
  for (int i = 0; i < (int)c.buses.size(); ++i)
    if (c.buses[i].id == id) return i;
  throw std::out_of_range("unknown bus " + std::to_string(id));
}

void check_period(const RestorationSchedule& s, int period) {
  if (period < 0 || period >= (int)s.solution.periods.size())
    throw std::out_of_range("period " + std::to_string(period) +
                            " outside the horizon");
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::vector<BoundaryRow> emit_boundary_table(const RestorationSchedule& s,
                                             int period) {
  check_period(s, period);
  const double base = s.case_pu.scenario.system_base;
  const PeriodState& ps = s.solution.periods[period];
  std::vector<BoundaryRow> rows;
  for (int f = 0; f < (int)s.case_pu.feeders.size(); ++f) {
    const auto& fd = s.case_pu.feeders[f];
    BoundaryRow row;
    row.feeder = fd.id;
    row.p_mw = ps.feeders[f].grid_p * base;
    row.q_mvar = ps.feeders[f].grid_q * base;
    row.v_pu = ps.v(bus_pos(s.case_pu, fd.boundary_bus));
    rows.push_back(row);
  }
  return rows;
}

std::vector<GenerationRow> emit_generation_table(const RestorationSchedule& s,
                                                 int period) {
  check_period(s, period);
  const double base = s.case_pu.scenario.system_base;
  const PeriodState& ps = s.solution.periods[period];
  std::vector<GenerationRow> rows;
  for (int g = 0; g < (int)s.case_pu.generators.size(); ++g)
    rows.push_back({s.case_pu.generators[g].bus, ps.gen_p(g) * base,
                    ps.gen_q(g) * base});
  return rows;
}

std::string format_boundary_table(const std::vector<BoundaryRow>& rows) {
  std::ostringstream os;
  os << std::fixed;
  os << std::setw(8) << "feeder" << std::setw(12) << "P (MW)" << std::setw(12)
     << "Q (MVAr)" << std::setw(10) << "V (pu)" << "\n";
  for (const auto& r : rows)
    os << std::setw(8) << r.feeder << std::setw(12) << std::setprecision(2)
       << r.p_mw << std::setw(12) << r.q_mvar << std::setw(10)
       << std::setprecision(4) << r.v_pu << "\n";
  return os.str();
}

std::string format_generation_table(const std::vector<GenerationRow>& rows) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::setw(6) << "bus" << std::setw(12) << "P (MW)" << std::setw(12)
     << "Q (MVAr)" << "\n";
  for (const auto& r : rows)
    os << std::setw(6) << r.bus << std::setw(12) << r.p_mw << std::setw(12)
       << r.q_mvar << "\n";
  return os.str();
}

double served_fraction(const RestorationSchedule& s, const std::string& network,
                       int period) {
  check_period(s, period);
  const auto& c = s.case_pu;
  const PeriodState& ps = s.solution.periods[period];
  const double lp = c.profiles.load_profile[period];
  double served = 0.0, total = 0.0;
  if (network == "tn") {
    std::map<int, bool> boundary;
    for (const auto& fd : c.feeders) boundary[fd.boundary_bus] = true;
    for (int b = 0; b < (int)c.buses.size(); ++b) {
      if (boundary.count(c.buses[b].id)) continue;
      served += ps.served_p(b);
      total += c.buses[b].p_load_total * lp;
    }
  } else {
    for (int f = 0; f < (int)c.feeders.size(); ++f) {
      if (c.feeders[f].id != network) continue;
      for (int k = 0; k < (int)c.feeders[f].nodes.size(); ++k) {
        served += ps.feeders[f].served_p(k);
        total += c.feeders[f].nodes[k].p_load_total * lp;
      }
    }
    if (total == 0.0 && served == 0.0)
      throw std::out_of_range("unknown network " + network);
  }
  return total > 0.0 ? served / total : 0.0;
}

void emit_schedule_csv(const RestorationSchedule& s, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const auto& c = s.case_pu;
  const double base = c.scenario.system_base;
  fs::create_directories(out_dir);
  const int T = (int)s.solution.periods.size();

  {
    auto out = open_out(fs::path(out_dir) / "boundary.csv");
    out << "period,feeder,p_mw,q_mvar,v_pu\n";
    for (int t = 0; t < T; ++t)
      for (const auto& r : emit_boundary_table(s, t))
        out << t << ',' << r.feeder << ',' << r.p_mw << ',' << r.q_mvar << ','
            << r.v_pu << "\n";
  }
  {
    auto out = open_out(fs::path(out_dir) / "generation.csv");
    out << "period,bus,p_mw,q_mvar\n";
    for (int t = 0; t < T; ++t)
      for (const auto& r : emit_generation_table(s, t))
        out << t << ',' << r.bus << ',' << r.p_mw << ',' << r.q_mvar << "\n";
  }
  {
    auto out = open_out(fs::path(out_dir) / "served.csv");
    out << "period,network,element,p_served_mw,p_total_mw\n";
    std::map<int, bool> boundary;
    for (const auto& fd : c.feeders) boundary[fd.boundary_bus] = true;
    for (int t = 0; t < T; ++t) {
      const PeriodState& ps = s.solution.periods[t];
      const double lp = c.profiles.load_profile[t];
      for (int b = 0; b < (int)c.buses.size(); ++b) {
        if (boundary.count(c.buses[b].id) || c.buses[b].p_load_total == 0.0)
          continue;
        out << t << ",tn," << c.buses[b].id << ',' << ps.served_p(b) * base
            << ',' << c.buses[b].p_load_total * lp * base << "\n";
      }
      for (int f = 0; f < (int)c.feeders.size(); ++f)
        for (int k = 0; k < (int)c.feeders[f].nodes.size(); ++k) {
          const auto& nd = c.feeders[f].nodes[k];
          if (nd.p_load_total == 0.0 && nd.q_load_total == 0.0) continue;
          out << t << ',' << c.feeders[f].id << ',' << nd.id << ','
              << ps.feeders[f].served_p(k) * base << ','
              << nd.p_load_total * lp * base << "\n";
        }
    }
  }
  {
    // full per-unit state, enough to rebuild the solution for auditing
    auto out = open_out(fs::path(out_dir) / "solution.csv");
    out << "period,scope,element,field,value\n";
    for (int t = 0; t < T; ++t) {
      const PeriodState& ps = s.solution.periods[t];
      for (int b = 0; b < (int)c.buses.size(); ++b) {
        int id = c.buses[b].id;
        out << t << ",tn," << id << ",v," << ps.v(b) << "\n";
        out << t << ",tn," << id << ",theta," << ps.theta(b) << "\n";
        out << t << ",tn," << id << ",served_p," << ps.served_p(b) << "\n";
        out << t << ",tn," << id << ",served_q," << ps.served_q(b) << "\n";
      }
      for (int g = 0; g < (int)c.generators.size(); ++g) {
        out << t << ",tn," << c.generators[g].bus << ",gen_p," << ps.gen_p(g)
            << "\n";
        out << t << ",tn," << c.generators[g].bus << ",gen_q," << ps.gen_q(g)
            << "\n";
      }
      for (int f = 0; f < (int)c.feeders.size(); ++f) {
        const auto& fd = c.feeders[f];
        const FeederState& st = ps.feeders[f];
        for (int k = 0; k < (int)fd.nodes.size(); ++k) {
          int id = fd.nodes[k].id;
          out << t << ',' << fd.id << ',' << id << ",v_sq," << st.v_sq(k)
              << "\n";
          out << t << ',' << fd.id << ',' << id << ",served_p,"
              << st.served_p(k) << "\n";
          out << t << ',' << fd.id << ',' << id << ",served_q,"
              << st.served_q(k) << "\n";
        }
        for (int l = 0; l < (int)fd.lines.size(); ++l) {
          out << t << ',' << fd.id << ',' << l << ",line_p," << st.line_p(l)
              << "\n";
          out << t << ',' << fd.id << ',' << l << ",line_q," << st.line_q(l)
              << "\n";
          out << t << ',' << fd.id << ',' << l << ",line_l," << st.line_l(l)
              << "\n";
        }
        for (int d = 0; d < (int)fd.dgs.size(); ++d) {
          out << t << ',' << fd.id << ',' << d << ",dg_p," << st.dg_p(d)
              << "\n";
          out << t << ',' << fd.id << ',' << d << ",dg_q," << st.dg_q(d)
              << "\n";
        }
        for (int e = 0; e < (int)fd.esss.size(); ++e) {
          out << t << ',' << fd.id << ',' << e << ",ess_p," << st.ess_p(e)
              << "\n";
          out << t << ',' << fd.id << ',' << e << ",ess_q," << st.ess_q(e)
              << "\n";
          out << t << ',' << fd.id << ',' << e << ",ess_loss,"
              << st.ess_loss(e) << "\n";
        }
        for (int p = 0; p < (int)fd.pvs.size(); ++p) {
          out << t << ',' << fd.id << ',' << p << ",pv_p," << st.pv_p(p)
              << "\n";
          out << t << ',' << fd.id << ',' << p << ",pv_q," << st.pv_q(p)
              << "\n";
        }
        out << t << ',' << fd.id << ",0,grid_p," << st.grid_p << "\n";
        out << t << ',' << fd.id << ",0,grid_q," << st.grid_q << "\n";
      }
    }
  }
  {
    nlohmann::json j;
    j["objective"]["unserved_energy"] = s.unserved_energy;
    j["objective"]["generation_penalty"] = s.penalty_term;
    j["objective"]["total"] = s.unserved_energy + s.penalty_term;
    j["solver"]["status"] = s.solver_status;
    j["solver"]["iterations"] = s.iterations;
    j["solver"]["kkt_residual"] = s.kkt_residual;
    j["audited"] = s.audited;
    j["system_base_mva"] = base;
    nlohmann::json fr;
    for (int t = 0; t < T; ++t) fr["tn"].push_back(served_fraction(s, "tn", t));
    for (const auto& fd : c.feeders)
      for (int t = 0; t < T; ++t)
        fr[fd.id].push_back(served_fraction(s, fd.id, t));
    j["served_fraction"] = fr;
    auto out = open_out(std::filesystem::path(out_dir) / "summary.json");
    out << j.dump(2) << "\n";
  }
}

RestorationSolution read_solution_csv(const CoupledCase& c,
                                      const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "period,scope,element,field,value")
    throw std::runtime_error(path + ": unexpected header");

  RestorationSolution s;
  s.periods.resize(c.scenario.periods);
  std::map<std::string, int> feeder_pos;
  std::map<int, int> buspos, genpos;
  for (int i = 0; i < (int)c.buses.size(); ++i) buspos[c.buses[i].id] = i;
  for (int g = 0; g < (int)c.generators.size(); ++g)
    genpos[c.generators[g].bus] = g;
  for (int f = 0; f < (int)c.feeders.size(); ++f)
    feeder_pos[c.feeders[f].id] = f;
  std::vector<std::map<int, int>> nodepos(c.feeders.size());
  for (int f = 0; f < (int)c.feeders.size(); ++f)
    for (int k = 0; k < (int)c.feeders[f].nodes.size(); ++k)
      nodepos[f][c.feeders[f].nodes[k].id] = k;

  for (auto& ps : s.periods) {
    ps.v.setZero(c.buses.size());
    ps.theta.setZero(c.buses.size());
    ps.gen_p.setZero(c.generators.size());
    ps.gen_q.setZero(c.generators.size());
    ps.served_p.setZero(c.buses.size());
    ps.served_q.setZero(c.buses.size());
    for (const auto& fd : c.feeders) {
      FeederState fs;
      fs.v_sq.setZero(fd.nodes.size());
      fs.served_p.setZero(fd.nodes.size());
      fs.served_q.setZero(fd.nodes.size());
      fs.line_p.setZero(fd.lines.size());
      fs.line_q.setZero(fd.lines.size());
      fs.line_l.setZero(fd.lines.size());
      fs.dg_p.setZero(fd.dgs.size());
      fs.dg_q.setZero(fd.dgs.size());
      fs.ess_p.setZero(fd.esss.size());
      fs.ess_q.setZero(fd.esss.size());
      fs.ess_loss.setZero(fd.esss.size());
      fs.pv_p.setZero(fd.pvs.size());
      fs.pv_q.setZero(fd.pvs.size());
      ps.feeders.push_back(std::move(fs));
    }
  }

  int ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ss, tok[i], i == 4 ? '\n' : ','))
        throw std::runtime_error(path + ":" + std::to_string(ln) +
                                 ": malformed row");
    int t, el;
    double val;
    try {
      t = std::stoi(tok[0]);
      el = std::stoi(tok[2]);
      val = std::stod(tok[4]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(ln) +
                               ": malformed row");
    }
    if (t < 0 || t >= (int)s.periods.size())
      throw std::runtime_error(path + ":" + std::to_string(ln) +
                               ": period out of range");
    PeriodState& ps = s.periods[t];
    const std::string& scope = tok[1];
    const std::string& field = tok[3];
    auto bad = [&]() {
      return std::runtime_error(path + ":" + std::to_string(ln) +
                                ": unknown field " + scope + "/" + field);
    };
    if (scope == "tn") {
      if (field == "gen_p" || field == "gen_q") {
        auto it = genpos.find(el);
        if (it == genpos.end()) throw bad();
        (field == "gen_p" ? ps.gen_p : ps.gen_q)(it->second) = val;
        continue;
      }
      auto it = buspos.find(el);
      if (it == buspos.end()) throw bad();
      int b = it->second;
      if (field == "v")
        ps.v(b) = val;
      else if (field == "theta")
        ps.theta(b) = val;
      else if (field == "served_p")
        ps.served_p(b) = val;
      else if (field == "served_q")
        ps.served_q(b) = val;
      else
        throw bad();
    } else {
      auto it = feeder_pos.find(scope);
      if (it == feeder_pos.end()) throw bad();
      int f = it->second;
      FeederState& fs = ps.feeders[f];
      auto at = [&](Eigen::VectorXd& v, int i) -> double& {
        if (i < 0 || i >= (int)v.size()) throw bad();
        return v(i);
      };
      if (field == "v_sq" || field == "served_p" || field == "served_q") {
        auto nit = nodepos[f].find(el);
        if (nit == nodepos[f].end()) throw bad();
        int k = nit->second;
        (field == "v_sq" ? fs.v_sq
                         : field == "served_p" ? fs.served_p : fs.served_q)(k) =
            val;
      } else if (field == "line_p")
        at(fs.line_p, el) = val;
      else if (field == "line_q")
        at(fs.line_q, el) = val;
      else if (field == "line_l")
        at(fs.line_l, el) = val;
      else if (field == "dg_p")
        at(fs.dg_p, el) = val;
      else if (field == "dg_q")
        at(fs.dg_q, el) = val;
      else if (field == "ess_p")
        at(fs.ess_p, el) = val;
      else if (field == "ess_q")
        at(fs.ess_q, el) = val;
      else if (field == "ess_loss")
        at(fs.ess_loss, el) = val;
      else if (field == "pv_p")
        at(fs.pv_p, el) = val;
      else if (field == "pv_q")
        at(fs.pv_q, el) = val;
      else if (field == "grid_p")
        fs.grid_p = val;
      else if (field == "grid_q")
        fs.grid_q = val;
      else
        throw bad();
    }
  }
  return s;
}

}  // namespace restore
