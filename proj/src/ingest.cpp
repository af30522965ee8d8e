#include "restore/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace restore {

namespace {

struct Line {
  int number;
  std::string text;
};

// Strips comments and blank lines, keeps original line numbers.
std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string raw;
  int n = 0;
  while (std::getline(is, raw)) {
    ++n;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto b = raw.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = raw.find_last_not_of(" \t\r");
    out.push_back({n, raw.substr(b, e - b + 1)});
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_num(const std::string& file, int line, const std::string& tok) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "not a number: '" + tok + "'");
  }
}

int to_int(const std::string& file, int line, const std::string& tok) {
  double v = to_num(file, line, tok);
  int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9)
    throw ParseError(file, line, "expected integer, got '" + tok + "'");
  return i;
}

// A generic section walker: dispatches each record/key line to the
// handler registered for the current section.
class SectionReader {
 public:
  SectionReader(const std::string& file, const std::string& text)
      : file_(file), lines_(tokenize(text)) {}

  // handler(line_number, tokens) for table sections
  using RowFn = std::function<void(int, const std::vector<std::string>&)>;
  // handler(line_number, key, value) for key=value sections
  using KvFn = std::function<void(int, const std::string&, const std::string&)>;

  void table(const std::string& name, RowFn fn) { rows_[name] = std::move(fn); }
  void kv(const std::string& name, KvFn fn) { kvs_[name] = std::move(fn); }

  void run() {
    std::string section;
    for (const auto& ln : lines_) {
      if (ln.text.front() == '[') {
        if (ln.text.back() != ']')
          throw ParseError(file_, ln.number, "malformed section header");
        section = ln.text.substr(1, ln.text.size() - 2);
        if (!rows_.count(section) && !kvs_.count(section))
          throw ParseError(file_, ln.number, "unknown section [" + section + "]");
        continue;
      }
      if (section.empty())
        throw ParseError(file_, ln.number, "data before any section header");
      if (auto it = kvs_.find(section); it != kvs_.end()) {
        auto eq = ln.text.find('=');
        if (eq == std::string::npos)
          throw ParseError(file_, ln.number, "expected key = value");
        auto trim = [](std::string s) {
          auto b = s.find_first_not_of(" \t");
          auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        it->second(ln.number, trim(ln.text.substr(0, eq)),
                   trim(ln.text.substr(eq + 1)));
      } else {
        rows_[section](ln.number, split_ws(ln.text));
      }
    }
  }

 private:
  std::string file_;
  std::vector<Line> lines_;
  std::map<std::string, RowFn> rows_;
  std::map<std::string, KvFn> kvs_;
};

void need_cols(const std::string& file, int line,
               const std::vector<std::string>& t, size_t n,
               const char* what) {
  if (t.size() != n)
    throw ParseError(file, line,
                     std::string(what) + " record needs " + std::to_string(n) +
                         " fields, got " + std::to_string(t.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TransmissionSystem parse_transmission(const std::string& text,
                                      const std::string& name) {
  TransmissionSystem tn;
  SectionReader r(name, text);
  std::set<int> bus_ids;
  r.kv("base", [&](int ln, const std::string& k, const std::string& v) {
    if (k == "s_base_MVA")
      tn.s_base = to_num(name, ln, v);
    else
      throw ParseError(name, ln, "unknown key '" + k + "' in [base]");
  });
  r.table("bus", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 5, "bus");
    TransmissionBus b;
    b.id = to_int(name, ln, t[0]);
    b.p_load_total = to_num(name, ln, t[1]);
    b.q_load_total = to_num(name, ln, t[2]);
    b.v_min = to_num(name, ln, t[3]);
    b.v_max = to_num(name, ln, t[4]);
    if (!bus_ids.insert(b.id).second)
      throw ParseError(name, ln, "duplicate bus id " + std::to_string(b.id));
    tn.buses.push_back(b);
  });
  r.table("branch", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 5, "branch");
    TransmissionBranch br;
    br.from_bus = to_int(name, ln, t[0]);
    br.to_bus = to_int(name, ln, t[1]);
    br.r = to_num(name, ln, t[2]);
    br.x = to_num(name, ln, t[3]);
    br.b_shunt = to_num(name, ln, t[4]);
    if (!bus_ids.count(br.from_bus) || !bus_ids.count(br.to_bus))
      throw ParseError(name, ln, "branch references unknown bus");
    tn.branches.push_back(br);
  });
  r.table("gen", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 5, "gen");
    CentralGenerator g;
    g.bus = to_int(name, ln, t[0]);
    g.p_min = to_num(name, ln, t[1]);
    g.p_max = to_num(name, ln, t[2]);
    g.q_min = to_num(name, ln, t[3]);
    g.q_max = to_num(name, ln, t[4]);
    if (!bus_ids.count(g.bus))
      throw ParseError(name, ln, "gen references unknown bus");
    tn.generators.push_back(g);
  });
  r.run();
  if (tn.buses.empty()) throw ParseError(name, 0, "empty bus list");
  return tn;
}

DistributionFeeder parse_feeder(const std::string& text,
                                const std::string& name) {
  DistributionFeeder f;
  bool have_boundary = false;
  std::set<int> node_ids;
  SectionReader r(name, text);
  r.kv("feeder", [&](int ln, const std::string& k, const std::string& v) {
    if (k == "id")
      f.id = v;
    else
      throw ParseError(name, ln, "unknown key '" + k + "' in [feeder]");
  });
  r.table("node", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 5, "node");
    FeederNode n;
    n.id = to_int(name, ln, t[0]);
    n.p_load_total = to_num(name, ln, t[1]);
    n.q_load_total = to_num(name, ln, t[2]);
    double vmin = to_num(name, ln, t[3]);
    double vmax = to_num(name, ln, t[4]);
    n.v_sq_min = vmin * vmin;
    n.v_sq_max = vmax * vmax;
    if (!node_ids.insert(n.id).second)
      throw ParseError(name, ln, "duplicate node id " + std::to_string(n.id));
    f.nodes.push_back(n);
  });
  r.table("line", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 4, "line");
    FeederLine l;
    l.from_node = to_int(name, ln, t[0]);
    l.to_node = to_int(name, ln, t[1]);
    l.r = to_num(name, ln, t[2]);
    l.x = to_num(name, ln, t[3]);
    if (!node_ids.count(l.from_node) || !node_ids.count(l.to_node))
      throw ParseError(name, ln, "line references unknown node");
    f.lines.push_back(l);
  });
  r.table("dg", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 5, "dg");
    DgDevice d;
    d.node = to_int(name, ln, t[0]);
    d.p_min = to_num(name, ln, t[1]);
    d.p_max = to_num(name, ln, t[2]);
    d.q_min = to_num(name, ln, t[3]);
    d.q_max = to_num(name, ln, t[4]);
    if (!node_ids.count(d.node))
      throw ParseError(name, ln, "dg references unknown node");
    f.dgs.push_back(d);
  });
  r.table("ess", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 6, "ess");
    EssDevice e;
    e.node = to_int(name, ln, t[0]);
    e.e_surplus = to_num(name, ln, t[1]);
    e.e_max = to_num(name, ln, t[2]);
    e.s_max = to_num(name, ln, t[3]);
    e.r_eq = to_num(name, ln, t[4]);
    e.r_cvt = to_num(name, ln, t[5]);
    if (!node_ids.count(e.node))
      throw ParseError(name, ln, "ess references unknown node");
    f.esss.push_back(e);
  });
  r.table("pv", [&](int ln, const std::vector<std::string>& t) {
    need_cols(name, ln, t, 3, "pv");
    PvDevice p;
    p.node = to_int(name, ln, t[0]);
    p.p_max = to_num(name, ln, t[1]);
    p.power_factor = to_num(name, ln, t[2]);
    if (!node_ids.count(p.node))
      throw ParseError(name, ln, "pv references unknown node");
    f.pvs.push_back(p);
  });
  r.kv("boundary", [&](int ln, const std::string& k, const std::string& v) {
    if (k == "substation_node")
      f.substation_node = to_int(name, ln, v);
    else if (k == "transmission_bus")
      f.boundary_bus = to_int(name, ln, v);
    else
      throw ParseError(name, ln, "unknown key '" + k + "' in [boundary]");
    have_boundary = true;
  });
  r.run();
  if (!have_boundary)
    throw ParseError(name, 0, "missing [boundary] section");
  if (!node_ids.count(f.substation_node))
    throw ParseError(name, 0, "substation node " +
                                  std::to_string(f.substation_node) +
                                  " not declared in [node]");
  return f;
}

std::pair<ScenarioConfig, ProfileSeries> parse_scenario(
    const std::string& text, const std::string& name) {
  ScenarioConfig sc;
  ProfileSeries prof;
  SectionReader r(name, text);
  r.kv("scenario", [&](int ln, const std::string& k, const std::string& v) {
    if (k == "periods")
      sc.periods = to_int(name, ln, v);
    else if (k == "delta_t_h")
      sc.delta_t = to_num(name, ln, v);
    else if (k == "w_t")
      sc.w_t = to_num(name, ln, v);
    else if (k == "w_d")
      sc.w_d = to_num(name, ln, v);
    else if (k == "central_gen_penalty_per_MW")
      sc.central_gen_penalty = to_num(name, ln, v);
    else if (k == "critical_fraction")
      sc.critical_fraction = to_num(name, ln, v);
    else if (k == "intertie_s_max_MVA")
      sc.intertie_s_max = to_num(name, ln, v);
    else if (k == "s_base_MVA")
      sc.system_base = to_num(name, ln, v);
    else
      throw ParseError(name, ln, "unknown key '" + k + "' in [scenario]");
  });
  r.kv("profiles", [&](int ln, const std::string& k, const std::string& v) {
    std::vector<double> vals;
    std::istringstream is(v);
    std::string tok;
    while (std::getline(is, tok, ',')) vals.push_back(to_num(name, ln, tok));
    if (k == "load")
      prof.load_profile = vals;
    else if (k == "pv")
      prof.pv_profile = vals;
    else
      throw ParseError(name, ln, "unknown key '" + k + "' in [profiles]");
  });
  r.run();
  // defaults for omitted profiles (synthetic; see bundled scenario files)
  if (prof.load_profile.empty())
    prof.load_profile = {0.90, 0.95, 1.00, 1.00, 0.95, 0.90};
  if (prof.pv_profile.empty())
    prof.pv_profile = {0.00, 0.30, 0.60, 0.80, 0.50, 0.10};
  if ((int)prof.load_profile.size() != sc.periods)
    throw ParseError(name, 0, "load profile length " +
                                  std::to_string(prof.load_profile.size()) +
                                  " != periods " + std::to_string(sc.periods));
  if ((int)prof.pv_profile.size() != sc.periods)
    throw ParseError(name, 0, "pv profile length " +
                                  std::to_string(prof.pv_profile.size()) +
                                  " != periods " + std::to_string(sc.periods));
  return {sc, prof};
}

TransmissionSystem parse_transmission_file(const std::string& path) {
  return parse_transmission(read_file(path), path);
}
DistributionFeeder parse_feeder_file(const std::string& path) {
  return parse_feeder(read_file(path), path);
}
std::pair<ScenarioConfig, ProfileSeries> parse_scenario_file(
    const std::string& path) {
  return parse_scenario(read_file(path), path);
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace

std::string serialize_transmission(const TransmissionSystem& tn) {
  std::ostringstream os;
  os << "[base]\ns_base_MVA = " << fmt(tn.s_base) << "\n[bus]\n";
  for (const auto& b : tn.buses)
    os << b.id << " " << fmt(b.p_load_total) << " " << fmt(b.q_load_total)
       << " " << fmt(b.v_min) << " " << fmt(b.v_max) << "\n";
  os << "[branch]\n";
  for (const auto& br : tn.branches)
    os << br.from_bus << " " << br.to_bus << " " << fmt(br.r) << " "
       << fmt(br.x) << " " << fmt(br.b_shunt) << "\n";
  os << "[gen]\n";
  for (const auto& g : tn.generators)
    os << g.bus << " " << fmt(g.p_min) << " " << fmt(g.p_max) << " "
       << fmt(g.q_min) << " " << fmt(g.q_max) << "\n";
  return os.str();
}

std::string serialize_feeder(const DistributionFeeder& f) {
  std::ostringstream os;
  os << "[feeder]\nid = " << f.id << "\n[node]\n";
  for (const auto& n : f.nodes)
    os << n.id << " " << fmt(n.p_load_total) << " " << fmt(n.q_load_total)
       << " " << fmt(std::sqrt(n.v_sq_min)) << " " << fmt(std::sqrt(n.v_sq_max))
       << "\n";
  os << "[line]\n";
  for (const auto& l : f.lines)
    os << l.from_node << " " << l.to_node << " " << fmt(l.r) << " " << fmt(l.x)
       << "\n";
  os << "[dg]\n";
  for (const auto& d : f.dgs)
    os << d.node << " " << fmt(d.p_min) << " " << fmt(d.p_max) << " "
       << fmt(d.q_min) << " " << fmt(d.q_max) << "\n";
  os << "[ess]\n";
  for (const auto& e : f.esss)
    os << e.node << " " << fmt(e.e_surplus) << " " << fmt(e.e_max) << " "
       << fmt(e.s_max) << " " << fmt(e.r_eq) << " " << fmt(e.r_cvt) << "\n";
  os << "[pv]\n";
  for (const auto& p : f.pvs)
    os << p.node << " " << fmt(p.p_max) << " " << fmt(p.power_factor) << "\n";
  os << "[boundary]\nsubstation_node = " << f.substation_node
     << "\ntransmission_bus = " << f.boundary_bus << "\n";
  return os.str();
}

std::string serialize_scenario(const ScenarioConfig& sc,
                               const ProfileSeries& prof) {
  std::ostringstream os;
  os << "[scenario]\nperiods = " << sc.periods
     << "\ndelta_t_h = " << fmt(sc.delta_t) << "\nw_t = " << fmt(sc.w_t)
     << "\nw_d = " << fmt(sc.w_d) << "\ncentral_gen_penalty_per_MW = "
     << fmt(sc.central_gen_penalty)
     << "\ncritical_fraction = " << fmt(sc.critical_fraction)
     << "\nintertie_s_max_MVA = " << fmt(sc.intertie_s_max)
     << "\ns_base_MVA = " << fmt(sc.system_base) << "\n[profiles]\n";
  auto emit = [&](const char* k, const std::vector<double>& v) {
    os << k << " = ";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt(v[i]);
    os << "\n";
  };
  emit("load", prof.load_profile);
  emit("pv", prof.pv_profile);
  return os.str();
}

CoupledCase assemble_case(const TransmissionSystem& tn,
                          std::vector<DistributionFeeder> feeders,
                          const ScenarioConfig& sc, const ProfileSeries& prof) {
  CoupledCase c;
  c.buses = tn.buses;
  c.branches = tn.branches;
  c.generators = tn.generators;
  c.feeders = std::move(feeders);
  c.scenario = sc;
  c.scenario.system_base = tn.s_base;
  c.profiles = prof;
  // the feeder replaces the native load at its boundary bus
  for (const auto& f : c.feeders)
    for (auto& b : c.buses)
      if (b.id == f.boundary_bus) {
        b.p_load_total = 0.0;
        b.q_load_total = 0.0;
      }
  apply_critical_fraction(c);
  return c;
}

BundledCaseId bundled_case_from_string(const std::string& s) {
  if (s == "case_study_1") return BundledCaseId::case_study_1;
  if (s == "case_study_2") return BundledCaseId::case_study_2;
  throw std::invalid_argument("unknown bundled case '" + s +
                              "' (expected case_study_1 or case_study_2)");
}

CoupledCase load_bundled(BundledCaseId id) {
  TransmissionSystem tn =
      parse_transmission(bundled_transmission_text(id), "bundled:tn");
  std::vector<DistributionFeeder> feeders;
  for (int i = 0; i < 3; ++i)
    feeders.push_back(parse_feeder(bundled_feeder_text(i),
                                   "bundled:D" + std::to_string(i + 1)));
  auto [sc, prof] = parse_scenario(bundled_scenario_text(id), "bundled:scenario");
  CoupledCase c = assemble_case(tn, std::move(feeders), sc, prof);
  ValidationOutcome v = validate_case(c);
  if (!v.ok()) {
    std::string msg = "bundled case failed validation:";
    for (const auto& e : v.errors) msg += "\n  " + e;
    throw std::logic_error(msg);
  }
  return c;
}

}  // namespace restore
