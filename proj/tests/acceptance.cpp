// Acceptance harness: run with a criterion number 1..10, prints one
// "criterion N: PASS/FAIL ..." line and exits 0/1.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "exsamp/cftp.hpp"
#include "exsamp/chain.hpp"
#include "exsamp/models.hpp"
#include "exsamp/rng.hpp"
#include "exsamp/verify.hpp"

using namespace exsamp;

namespace {

Graph k2() { return Graph::from_edges(2, {{0, 1}}); }
Graph p3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }
Graph p4() { return Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}); }
Graph c4() { return Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
Graph c5() { return Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}); }

struct ExactRun {
  std::string name;
  double tv = 1.0;
  double chi_p = 0.0;
  int aborted = 0;
  bool congest_ok = true;
  std::uint32_t peak_bits = 0;
  int budget = 0;
};

// Distributed sampling run over N seeds against the enumerated target.
ExactRun run_exact(Model model, const Graph& g, const Rational& weight, double p, int n_samples,
                   std::uint64_t base_seed, const std::string& name) {
  ExactRun out;
  out.name = name;
  CspInstance csp = make_model(model, g, weight);
  auto rules = make_rules(model, csp);
  NetworkMode mode = NetworkMode::congest(g.vertex_count());
  out.budget = mode.bit_budget;
  EnumeratedDistribution d = enumerate_distribution(csp);
  std::vector<std::int64_t> counts(d.support.size(), 0);
  for (int s = 0; s < n_samples; ++s) {
    SampleReport r = cftp_sample(csp, g, mode, base_seed + s, p, 40, rules.get());
    out.congest_ok = out.congest_ok && r.congest_ok;
    out.peak_bits = std::max(out.peak_bits, r.peak_message_bits);
    if (r.status != SampleReport::Status::Exact) {
      out.aborted++;
      continue;
    }
    counts[d.index_of(r.labeling)]++;
  }
  out.tv = tv_distance(counts, d.prob_d);
  out.chi_p = chi_square(counts, d.prob_d).p_value;
  return out;
}

std::vector<ExactRun> criterion1_runs() {
  return {run_exact(Model::Hardcore, k2(), Rational(1), 0.1, 100000, 11000000, "K2 l=1"),
          run_exact(Model::Hardcore, k2(), Rational(2), 0.1, 100000, 12000000, "K2 l=2"),
          run_exact(Model::Hardcore, p3(), Rational(1), 0.1, 100000, 13000000, "P3 l=1"),
          run_exact(Model::Hardcore, p4(), Rational(1), 0.1, 100000, 14000000, "P4 l=1"),
          run_exact(Model::Hardcore, c5(), Rational(3, 10), 0.1, 100000, 15000000, "C5 l=0.3")};
}

std::vector<ExactRun> criterion2_runs() {
  return {run_exact(Model::Wds, c4(), Rational(8), 0.05, 100000, 21000000, "C4 l=8"),
          run_exact(Model::Wds, k2(), Rational(8), 0.05, 100000, 22000000, "K2 l=8")};
}

ScalingReport criterion8_report(NetKind net) {
  return scaling_experiment(Model::Hardcore, Rational(3, 10), 0.1, "cycle",
                            {64, 128, 256, 512, 1024, 2048, 4096}, 20, 88000000, net);
}

bool check_exact_runs(const std::vector<ExactRun>& runs, std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  for (const ExactRun& r : runs) {
    bool this_ok = r.tv <= 0.01 && r.chi_p >= 1e-3 && r.aborted == 0;
    ok = ok && this_ok;
    os << " [" << r.name << " tv=" << r.tv << " chi_p=" << r.chi_p << " aborted=" << r.aborted
       << "]";
  }
  detail = os.str();
  return ok;
}

int report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s%s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  return ok ? 0 : 1;
}

int criterion1() {
  std::string d;
  bool ok = check_exact_runs(criterion1_runs(), d);
  return report(1, ok, d);
}

int criterion2() {
  std::string d;
  bool ok = check_exact_runs(criterion2_runs(), d);
  return report(2, ok, d);
}

int criterion3() {
  bool ok = true;
  std::ostringstream os;
  for (const Graph& g : {k2(), p3()}) {
    CspInstance csp = make_ising(g, Rational(2));
    EnumeratedDistribution d = enumerate_distribution(csp);
    std::vector<std::int64_t> counts(d.support.size(), 0);
    int aborted = 0;
    const int n = 100000;
    for (int s = 0; s < n; ++s) {
      SampleReport r =
          monotone_cftp_ising(g, Rational(2), 31000000 + 200000 * g.vertex_count() + s, 0.1, 40);
      if (r.status != SampleReport::Status::Exact) {
        ++aborted;
        continue;
      }
      counts[d.index_of(r.labeling)]++;
    }
    double tv = tv_distance(counts, d.prob_d);
    ok = ok && tv <= 0.01 && aborted == 0;
    if (g.vertex_count() == 2) {
      // Enumerated target must itself be (1/3,1/6,1/6,1/3).
      ok = ok && d.prob[d.index_of({0, 0})] == Rational(1, 3) &&
           d.prob[d.index_of({1, 0})] == Rational(1, 6) &&
           d.prob[d.index_of({0, 1})] == Rational(1, 6) &&
           d.prob[d.index_of({1, 1})] == Rational(1, 3);
    }
    os << " [n=" << g.vertex_count() << " tv=" << tv << " aborted=" << aborted << "]";
  }
  return report(3, ok, os.str());
}

int criterion4() {
  Graph g = p4();
  CspInstance csp = make_hardcore(g, Rational(1));
  auto rules = make_rules(Model::Hardcore, csp);
  EnumeratedDistribution d = enumerate_distribution(csp);
  const int n = 100000;
  std::vector<double> fa(d.support.size(), 0.0), fb(d.support.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    SampleReport r = sequential_cftp_hardcore(g, 1.0, 41000000 + s, 40);
    if (r.status != SampleReport::Status::Exact) return report(4, false, " sequential abort");
    fa[d.index_of(r.labeling)] += 1.0 / n;
  }
  NetworkMode mode = NetworkMode::congest(4);
  for (int s = 0; s < n; ++s) {
    SampleReport r = cftp_sample(csp, g, mode, 42000000 + s, 0.1, 40, rules.get());
    if (r.status != SampleReport::Status::Exact) return report(4, false, " distributed abort");
    fb[d.index_of(r.labeling)] += 1.0 / n;
  }
  double tv = tv_distance(fa, fb);
  std::ostringstream os;
  os << " [P4 l=1 pairwise tv=" << tv << "]";
  return report(4, tv <= 0.015, os.str());
}

int criterion5() {
  double worst_b = 0, worst_s = 0;
  for (int gi = 0; gi < 2; ++gi) {
    Graph g = gi == 0 ? k2() : p3();
    for (int mi = 0; mi < 2; ++mi) {
      CspInstance csp =
          mi == 0 ? make_hardcore(g, Rational(1)) : make_ising(g, Rational(2));
      for (const Rational& p : {Rational(3, 10), Rational(1)}) {
        TransitionMatrix tm = build_transition_matrix(csp, p);
        worst_b = std::max(worst_b, check_detailed_balance(tm));
        worst_s = std::max(worst_s, check_stationarity(tm));
      }
    }
  }
  std::ostringstream os;
  os << " [max balance violation=" << worst_b << " max stationarity residual=" << worst_s << "]";
  return report(5, worst_b <= 1e-12 && worst_s <= 1e-12, os.str());
}

int criterion6() {
  struct Case {
    CspInstance csp;
    BoundedStepFn special;
    std::string name;
  };
  std::vector<Case> cases;
  for (const Rational& l : {Rational(3, 10), Rational(1)}) {
    for (const Graph& g : {k2(), p3(), c4()})
      cases.push_back({make_hardcore(g, l), &hardcore_bounded_step,
                       "hardcore n=" + std::to_string(g.vertex_count())});
  }
  cases.push_back({make_wds(c4(), Rational(8)), &wds_bounded_step, "wds C4"});

  bool ok = true;
  std::ostringstream os;
  for (const Case& c : cases) {
    SoundnessResult a = bounding_soundness_bruteforce(c.csp, 0.5, 61000000, 1000, 16);
    SoundnessResult b =
        bounding_soundness_bruteforce(c.csp, 0.5, 61000000, 1000, 16, c.special);
    ok = ok && a.ok && b.ok;
    if (!a.ok || !b.ok)
      os << " [" << c.name << " counterexample seed=" << (a.ok ? b.seed : a.seed) << "]";
  }
  if (ok) os << " [10 instance/rule pairs, 1000 seeds, T<=16, no counterexample]";
  return report(6, ok, os.str());
}

int criterion7() {
  rng::SmallRng pick(71);
  int done = 0;
  while (done < 10000) {
    int n = 2 + int(pick.below(7));
    // A connected-enough random graph: spanning path plus random extra edges.
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    int extra = int(pick.below(std::uint64_t(n)));
    for (int e = 0; e < extra; ++e) {
      int u = int(pick.below(std::uint64_t(n))), v = int(pick.below(std::uint64_t(n)));
      if (u != v) edges.push_back({std::min(u, v), std::max(u, v)});
    }
    Graph g = Graph::from_edges(n, edges);

    bool wds = pick.below(2) == 1;
    Rational weight = wds ? Rational(4 + 4 * int(pick.below(2)))
                          : Rational(1 + int(pick.below(4)), 2);
    CspInstance csp = wds ? make_wds(g, weight) : make_hardcore(g, weight);

    std::uint64_t seed = 71000000 + done;
    LabelSetState s = LabelSetState::full(csp);
    int warm = int(pick.below(4));
    for (int t = 0; t < warm; ++t)
      s = bounded_step_general(csp, s, draw_step_randomness(seed, 0.5, t, csp));
    StepRandomness r = draw_step_randomness(seed, 0.5, warm, csp);
    LabelSetState a = wds ? wds_bounded_step(csp, s, r) : hardcore_bounded_step(csp, s, r);
    LabelSetState b = bounded_step_general(csp, s, r);
    if (a.sets != b.sets) {
      std::ostringstream os;
      os << " [mismatch at triple " << done << ", n=" << n << (wds ? " wds" : " hardcore")
         << "]";
      return report(7, false, os.str());
    }
    ++done;
  }
  return report(7, true, " [10000 randomized triples, specialized = general exactly]");
}

int criterion8() {
  ScalingReport rep = criterion8_report(NetKind::Congest);
  int aborted = 0;
  for (const ScalingPoint& pt : rep.points) aborted += pt.aborted;
  double t64 = rep.points.front().median_t_star, t4096 = rep.points.back().median_t_star;
  double ratio = t4096 / t64;
  double bound = 2.5 * std::log(4096.0) / std::log(64.0);
  std::ostringstream os;
  os << " [median T*(64)=" << t64 << " T*(4096)=" << t4096 << " ratio=" << ratio
     << " bound=" << bound << " aborted=" << aborted << "]";
  return report(8, aborted == 0 && ratio <= bound, os.str());
}

int criterion9() {
  bool ok = true;
  std::ostringstream os;
  for (const ExactRun& r : criterion1_runs()) {
    ok = ok && r.congest_ok && r.peak_bits <= std::uint32_t(r.budget) && r.aborted == 0;
    os << " [" << r.name << " peak=" << r.peak_bits << "/" << r.budget << "]";
  }
  for (const ExactRun& r : criterion2_runs()) {
    ok = ok && r.congest_ok && r.peak_bits <= std::uint32_t(r.budget) && r.aborted == 0;
    os << " [" << r.name << " peak=" << r.peak_bits << "/" << r.budget << "]";
  }
  ScalingReport rep = criterion8_report(NetKind::Congest);
  for (const ScalingPoint& pt : rep.points) {
    ok = ok && pt.congest_ok;
    os << " [n=" << pt.n << " peak=" << pt.peak_bits
       << "/" << NetworkMode::congest(pt.n).bit_budget << "]";
  }
  return report(9, ok, os.str());
}

int criterion10() {
  // Identical configuration => byte-identical report streams, across all
  // model paths.  Coalescence permanence and randomness reuse are asserted
  // inside every engine run (a violation throws), so completing these runs
  // without an exception also certifies the in-run assertions never fired.
  auto stream = [](int rep_count) {
    std::ostringstream os;
    Graph g = c5();
    CspInstance hc = make_hardcore(g, Rational(3, 10));
    auto hr = make_rules(Model::Hardcore, hc);
    Graph g4 = c4();
    CspInstance w = make_wds(g4, Rational(8));
    auto wr = make_rules(Model::Wds, w);
    for (int s = 0; s < rep_count; ++s) {
      os << cftp_sample(hc, g, NetworkMode::congest(5), 101000 + s, 0.1, 40, hr.get()).to_json()
         << "\n";
      os << cftp_sample(w, g4, NetworkMode::congest(4), 102000 + s, 0.05, 40, wr.get()).to_json()
         << "\n";
      os << monotone_cftp_ising(g, Rational(2), 103000 + s, 0.1, 40).to_json() << "\n";
      os << sequential_cftp_hardcore(g, 0.3, 104000 + s, 40).to_json() << "\n";
    }
    return os.str();
  };
  bool ok = false;
  std::string detail;
  try {
    std::string a = stream(200), b = stream(200);
    ok = a == b && !a.empty();
    detail = ok ? " [800-report streams byte-identical; no in-run assertion fired]"
                : " [streams differ]";
  } catch (const std::exception& e) {
    detail = std::string(" [in-run assertion fired: ") + e.what() + "]";
  }
  return report(10, ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
    return 2;
  }
  int n = std::atoi(argv[1]);
  switch (n) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
    default:
      std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
      return 2;
  }
}
