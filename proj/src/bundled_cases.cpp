#include "restore/ingest.hpp"

// Bundled restoration instance: IEEE 14-bus transmission system with
// three modified 13-node feeders attached at buses 5, 9, and 14.
//
// Transmission branch parameters follow the MATPOWER 14-bus case
// (transformer taps and the bus-9 shunt omitted; tap/shifter modeling is
// out of scope). Bus loads are the published 14-bus values with the
// boundary-bus loads carried by the feeders instead.
//
// Feeder data: node loads are the per-node aggregate MW/MVAr of the
// modified feeders; the topology mirrors the 13-node feeder's radial
// shape with the source mapped to node 7. Line impedances are
// positive-sequence equivalents of overhead-line data (roughly
// 0.2 + j0.5 ohm/mile at 500-2000 ft spans) converted on a 13.8 kV /
// 100 MVA base (Z_base = 1.904 ohm); they are synthetic to that extent
// and declared as such here.
//
// ESS initial energy is taken as full (e_surplus = e_max) and
// r_eq = r_cvt = 0.01 pu where the source tables are silent; PV power
// factor 0.9. Load/PV profiles are synthetic six-period shapes (the
// source gives only a plot).

namespace restore {

namespace {

const char* kTransmissionCommon = R"(# IEEE 14-bus transmission system
[base]
s_base_MVA = 100
[bus]
# id  p_load_MW  q_load_MVAr  v_min_pu  v_max_pu
1    0      0       0.95 1.06
2    21.70  12.70   0.95 1.06
3    94.20  19      0.95 1.06
4    47.80  -3.90   0.95 1.06
5    10.398 5.0448  0.95 1.06
6    11.20  7.50    0.95 1.06
7    0      0       0.95 1.06
8    0      0       0.95 1.06
9    34.66  16.816  0.95 1.06
10   9      5.80    0.95 1.06
11   3.50   1.80    0.95 1.06
12   6.10   1.60    0.95 1.06
13   13.50  5.80    0.95 1.06
14   17.33  8.408   0.95 1.06
[branch]
# from to  r_pu     x_pu     b_pu
1  2   0.01938  0.05917  0.0528
1  5   0.05403  0.22304  0.0492
2  3   0.04699  0.19797  0.0438
2  4   0.05811  0.17632  0.0340
2  5   0.05695  0.17388  0.0346
3  4   0.06701  0.17103  0.0128
4  5   0.01335  0.04211  0
4  7   0        0.20912  0
4  9   0        0.55618  0
5  6   0        0.25202  0
6  11  0.09498  0.19890  0
6  12  0.12291  0.25581  0
6  13  0.06615  0.13027  0
7  8   0        0.17615  0
7  9   0        0.11001  0
9  10  0.03181  0.08450  0
9  14  0.12711  0.27038  0
10 11  0.08205  0.19207  0
12 13  0.22092  0.19988  0
13 14  0.17093  0.34802  0
[gen]
# bus p_min_MW p_max_MW q_min_MVAr q_max_MVAr
)";

// Case Study I generation limits
const char* kGenCase1 = R"(1  0  332.4  0    10
2  0  140    -40  50
3  0  0      0    40
6  0  0      -6   24
8  0  0      -6   24
)";

// Case Study II generation limits
const char* kGenCase2 = R"(1  0  114.62 0    5.26
2  0  48.28  -40  26.32
3  0  0      0    21.05
6  0  0      -6   12.63
8  0  0      -6   12.63
)";

// Shared feeder topology: radial tree rooted at the substation node 7.
const char* kFeederLines = R"([line]
# from to  r_pu    x_pu
7  3   0.0015  0.0035
3  1   0.0040  0.0080
3  2   0.0030  0.0060
3  4   0.0020  0.0045
4  5   0.0045  0.0085
4  6   0.0040  0.0075
4  8   0.0025  0.0050
8  9   0.0030  0.0055
9  10  0.0035  0.0065
8  11  0.0050  0.0090
4  12  0.0055  0.0100
12 13  0.0060  0.0110
)";

std::string feeder_text(const char* id, const char* nodes, const char* dg,
                        const char* ess, int boundary_bus) {
  std::string s = "[feeder]\nid = ";
  s += id;
  s += "\n[node]\n# id p_load_MW q_load_MVAr v_min_pu v_max_pu\n";
  s += nodes;
  s += kFeederLines;
  s += "[dg]\n# node p_min_MW p_max_MW q_min_MVAr q_max_MVAr\n";
  s += dg;
  s += "[ess]\n# node e_surplus_MWh e_max_MWh s_max_MVA r_eq_pu r_cvt_pu\n";
  s += ess;
  s += "[pv]\n# node p_max_MW pf\n11 3 0.9\n";
  s += "[boundary]\nsubstation_node = 7\ntransmission_bus = " +
       std::to_string(boundary_bus) + "\n";
  return s;
}

const char* kNodesD1 = R"(1  0.51   0.1920  0.95 1.06
2  0.30   0.1392  0.95 1.06
3  0      0       0.95 1.06
4  1.20   0.6960  0.95 1.06
5  0.51   0.3000  0.95 1.06
6  0.69   0.3168  0.95 1.06
7  0      0       0.95 1.06
8  0.384  0.2064  0.95 1.06
9  3.765  1.7232  0.95 1.06
10 2.529  1.1088  0.95 1.06
11 0      0       0.95 1.06
12 0      0       0.95 1.06
13 0.51   0.3624  0.95 1.06
)";

const char* kNodesD2 = R"(1  1.70   0.64    0.95 1.06
2  1.00   0.464   0.95 1.06
3  0      0       0.95 1.06
4  4.0    2.32    0.95 1.06
5  1.70   1.00    0.95 1.06
6  2.30   1.056   0.95 1.06
7  0      0       0.95 1.06
8  1.28   0.688   0.95 1.06
9  12.55  5.744   0.95 1.06
10 8.43   3.696   0.95 1.06
11 0      0       0.95 1.06
12 0      0       0.95 1.06
13 1.70   1.208   0.95 1.06
)";

const char* kNodesD3 = R"(1  0.85   0.32    0.95 1.06
2  0.50   0.232   0.95 1.06
3  0      0       0.95 1.06
4  2.00   1.16    0.95 1.06
5  0.85   0.50    0.95 1.06
6  1.15   0.528   0.95 1.06
7  0      0       0.95 1.06
8  0.64   0.344   0.95 1.06
9  6.275  2.872   0.95 1.06
10 4.215  1.848   0.95 1.06
11 0      0       0.95 1.06
12 0      0       0.95 1.06
13 0.85   0.604   0.95 1.06
)";

// Case study 1 penalizes central generation so the dispatch leans on the
// DERs and serves only the critical fraction. Case study 2 is the
// generation-shortage study: no penalty, tightened generation limits, and
// doubled transmission load weight, so both units run up to their caps.
std::string scenario_text(double w_t, long long penalty) {
  std::string s = R"([scenario]
periods = 6
delta_t_h = 1
)";
  s += "w_t = " + std::to_string(w_t) + "\n";
  s += "w_d = 1\n";
  s += "central_gen_penalty_per_MW = " + std::to_string(penalty) + "\n";
  s += R"(critical_fraction = 0.5
intertie_s_max_MVA = 100
[profiles]
load = 0.90,0.95,1.00,1.00,0.95,0.90
pv = 0.00,0.30,0.60,0.80,0.50,0.10
)";
  return s;
}

}  // namespace

std::string bundled_transmission_text(BundledCaseId id) {
  std::string s = kTransmissionCommon;
  s += (id == BundledCaseId::case_study_1) ? kGenCase1 : kGenCase2;
  return s;
}

std::string bundled_feeder_text(int feeder_index) {
  switch (feeder_index) {
    case 0:
      return feeder_text("D1", kNodesD1, "1 0 4 -3.2 3.2\n8 0 4 -3.2 3.2\n",
                         "3 50 50 25 0.01 0.01\n", 5);
    case 1:
      return feeder_text("D2", kNodesD2, "1 0 1 -0.8 0.8\n8 0 1 -0.8 0.8\n",
                         "3 12.5 12.5 6.25 0.01 0.01\n", 9);
    case 2:
      return feeder_text("D3", kNodesD3, "1 0 14 -9 9\n8 0 14 -9 9\n",
                         "3 50 50 25 0.01 0.01\n", 14);
    default:
      throw std::out_of_range("bundled feeder index must be 0..2");
  }
}

std::string bundled_scenario_text(BundledCaseId id) {
  return id == BundledCaseId::case_study_1 ? scenario_text(1.0, 10000000)
                                           : scenario_text(2.0, 0);
}

}  // namespace restore
