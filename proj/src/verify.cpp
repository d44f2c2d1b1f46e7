#include "exsamp/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace exsamp {

namespace {

double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace

TransitionMatrix build_transition_matrix(const CspInstance& csp, const Rational& p) {
  const int n = csp.num_vertices();
  if (n > 6 || csp.num_labels() > 3)
    throw std::invalid_argument("transition matrix: instance too large to enumerate");
  if (p < 0 || p > 1) throw std::invalid_argument("transition matrix: p outside [0,1]");

  TransitionMatrix tm;
  tm.dist = enumerate_distribution(csp);
  const int ns = static_cast<int>(tm.dist.support.size());
  tm.m.assign(ns, std::vector<Rational>(ns, Rational(0)));

  // Per-vertex proposal distribution over the unary support.
  std::vector<std::vector<std::pair<std::uint8_t, Rational>>> prop_dist(n);
  for (int v = 0; v < n; ++v) {
    Rational total = 0;
    for (int l = 0; l < csp.num_labels(); ++l) total += csp.unary(v, l);
    for (int l = 0; l < csp.num_labels(); ++l)
      if (csp.unary(v, l) > 0)
        prop_dist[v].emplace_back(static_cast<std::uint8_t>(l), csp.unary(v, l) / total);
  }

  std::vector<std::uint8_t> mark(n), prop(n);
  for (int si = 0; si < ns; ++si) {
    const Labeling& x = tm.dist.support[si];
    for (std::uint32_t mv = 0; mv < (1u << n); ++mv) {
      Rational pm = 1;
      std::vector<int> marked;
      for (int v = 0; v < n; ++v) {
        mark[v] = mv >> v & 1u;
        pm *= mark[v] ? p : 1 - p;
        if (mark[v]) marked.push_back(v);
      }
      if (pm == 0) continue;
      // Constraints with a marked member; all others pass with certainty.
      std::vector<int> rel;
      for (int cid = 0; cid < csp.num_constraints(); ++cid)
        for (int w : csp.constraint(cid).members)
          if (mark[w]) {
            rel.push_back(cid);
            break;
          }
      // Odometer over proposal vectors of the marked vertices.
      std::vector<int> pos(marked.size(), 0);
      for (;;) {
        Rational pp = pm;
        for (std::size_t i = 0; i < marked.size(); ++i) {
          auto& [lab, pr] = prop_dist[marked[i]][pos[i]];
          prop[marked[i]] = lab;
          pp *= pr;
        }
        std::vector<Rational> q(rel.size());
        std::vector<std::uint8_t> cur, prs, mks;
        for (std::size_t ci = 0; ci < rel.size(); ++ci) {
          const Constraint& c = csp.constraint(rel[ci]);
          cur.clear();
          prs.clear();
          mks.clear();
          for (int w : c.members) {
            cur.push_back(x[w]);
            prs.push_back(prop[w]);
            mks.push_back(mark[w]);
          }
          q[ci] = filter_pass_probability_exact(csp, c, cur, prs, mks);
        }
        // Outcome vectors over the relevant constraints.
        for (std::uint32_t ov = 0; ov < (1u << rel.size()); ++ov) {
          Rational po = pp;
          for (std::size_t ci = 0; ci < rel.size(); ++ci)
            po *= (ov >> ci & 1u) ? q[ci] : 1 - q[ci];
          if (po == 0) continue;
          Labeling y = x;
          for (int v : marked) {
            bool all_pass = true;
            for (int cid : csp.constraints_of(v)) {
              auto it = std::find(rel.begin(), rel.end(), cid);
              all_pass &= (ov >> (it - rel.begin()) & 1u) != 0;
            }
            if (all_pass) y[v] = prop[v];
          }
          int yi = tm.dist.index_of(y);
          if (yi < 0) throw std::logic_error("transition matrix: step left the valid states");
          tm.m[si][yi] += po;
        }
        // Advance the proposal odometer.
        std::size_t i = 0;
        while (i < marked.size() &&
               pos[i] + 1 == static_cast<int>(prop_dist[marked[i]].size())) {
          pos[i] = 0;
          ++i;
        }
        if (i == marked.size()) break;
        ++pos[i];
      }
    }
  }
  return tm;
}

double check_detailed_balance(const TransitionMatrix& tm) {
  const int ns = static_cast<int>(tm.m.size());
  Rational worst = 0;
  for (int a = 0; a < ns; ++a)
    for (int b = a + 1; b < ns; ++b) {
      Rational d = tm.dist.prob[a] * tm.m[a][b] - tm.dist.prob[b] * tm.m[b][a];
      if (d < 0) d = -d;
      worst = std::max(worst, d);
    }
  return to_double(worst);
}

double check_stationarity(const TransitionMatrix& tm) {
  const int ns = static_cast<int>(tm.m.size());
  Rational worst = 0;
  for (int b = 0; b < ns; ++b) {
    Rational s = 0;
    for (int a = 0; a < ns; ++a) s += tm.dist.prob[a] * tm.m[a][b];
    Rational d = s - tm.dist.prob[b];
    if (d < 0) d = -d;
    worst = std::max(worst, d);
  }
  return to_double(worst);
}

double tv_distance(const std::vector<std::int64_t>& counts, const std::vector<double>& pi) {
  if (counts.size() != pi.size())
    throw std::invalid_argument("tv_distance: size mismatch");
  double total = 0;
  for (std::int64_t c : counts) total += static_cast<double>(c);
  if (total <= 0) throw std::invalid_argument("tv_distance: no observations");
  double tv = 0;
  for (std::size_t i = 0; i < pi.size(); ++i)
    tv += std::abs(static_cast<double>(counts[i]) / total - pi[i]);
  return tv / 2.0;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double tv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2.0;
}

ChiSquareResult chi_square(const std::vector<std::int64_t>& counts,
                           const std::vector<double>& pi) {
  if (counts.size() != pi.size())
    throw std::invalid_argument("chi_square: size mismatch");
  double total = 0;
  for (std::int64_t c : counts) total += static_cast<double>(c);
  if (total <= 0) throw std::invalid_argument("chi_square: no observations");

  // Merge adjacent cells until each has expected count >= 5.
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double obs = 0, exp = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    obs += static_cast<double>(counts[i]);
    exp += total * pi[i];
    if (exp >= 5.0) {
      bins.emplace_back(obs, exp);
      obs = exp = 0;
    }
  }
  if (exp > 0 || obs > 0) {
    if (bins.empty())
      bins.emplace_back(obs, exp);
    else {
      bins.back().first += obs;
      bins.back().second += exp;
    }
  }
  if (bins.size() < 2)
    throw std::invalid_argument("chi_square: fewer than two usable cells");

  ChiSquareResult r;
  r.cells = static_cast<int>(bins.size());
  r.df = r.cells - 1;
  for (auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  boost::math::chi_squared dist(r.df);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

SoundnessResult bounding_soundness_bruteforce(const CspInstance& csp, double p,
                                              std::uint64_t base_seed, int num_seeds,
                                              int t_max, const BoundedStepFn& step) {
  EnumeratedDistribution dist = enumerate_distribution(csp);
  if (dist.support.size() > 12)
    throw std::invalid_argument("soundness brute force: more than 12 valid states");
  SoundnessResult res;
  for (int s = 0; s < num_seeds; ++s) {
    std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
    for (int t_len = 1; t_len <= t_max; ++t_len) {
      std::vector<StepRandomness> rnd;
      for (std::int64_t t = -t_len; t < 0; ++t)
        rnd.push_back(draw_step_randomness(seed, p, t, csp));
      LabelSetState bound = LabelSetState::full(csp);
      for (const StepRandomness& r : rnd) bound = step(csp, bound, r);
      for (std::size_t si = 0; si < dist.support.size(); ++si) {
        Labeling x = dist.support[si];
        for (const StepRandomness& r : rnd) x = apply_step(csp, x, r);
        for (int v = 0; v < csp.num_vertices(); ++v)
          if (!(bound.sets[v] >> x[v] & 1u)) {
            res.ok = false;
            res.seed = seed;
            res.t = t_len;
            res.state_index = static_cast<int>(si);
            res.vertex = v;
            return res;
          }
      }
    }
  }
  return res;
}

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

std::string ScalingReport::to_json() const {
  nlohmann::ordered_json j;
  j["points"] = nlohmann::ordered_json::array();
  for (const ScalingPoint& p : points) {
    nlohmann::ordered_json jp;
    jp["n"] = p.n;
    jp["seeds_used"] = p.seeds_used;
    jp["aborted"] = p.aborted;
    jp["median_total_rounds"] = p.median_total_rounds;
    jp["median_t_star"] = p.median_t_star;
    jp["peak_bits"] = p.peak_bits;
    jp["congest_ok"] = p.congest_ok;
    j["points"].push_back(jp);
  }
  j["slope_defined"] = slope_defined;
  if (slope_defined)
    j["slope"] = slope;
  else
    j["slope"] = nullptr;
  return j.dump();
}

ScalingReport scaling_experiment(Model model, const Rational& weight, double p,
                                 const std::string& family, const std::vector<int>& sizes,
                                 int seeds_per_size, std::uint64_t base_seed, NetKind net) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("scaling: sizes must be strictly increasing");
  ScalingReport rep;
  for (int n : sizes) {
    Graph g = parse_graph_spec(family + ":n=" + std::to_string(n), base_seed);
    CspInstance csp = make_model(model, g, weight);
    std::unique_ptr<StepRules> rules = make_rules(model, csp);
    NetworkMode mode = net == NetKind::Congest ? NetworkMode::congest(g.vertex_count())
                                               : NetworkMode::local();
    ScalingPoint pt;
    pt.n = g.vertex_count();
    std::vector<double> t_stars, rounds;
    for (int s = 0; s < seeds_per_size; ++s) {
      SampleReport sr = cftp_sample(csp, g, mode, base_seed + 1000003ULL * s, p, 40,
                                    rules.get());
      pt.peak_bits = std::max(pt.peak_bits, sr.peak_message_bits);
      pt.congest_ok &= sr.congest_ok;
      if (sr.status != SampleReport::Status::Exact) {
        pt.aborted++;
        continue;
      }
      t_stars.push_back(std::ldexp(1.0, sr.stages_used - 1));
      rounds.push_back(static_cast<double>(sr.total_rounds));
    }
    pt.seeds_used = static_cast<int>(t_stars.size());
    if (!t_stars.empty()) {
      pt.median_t_star = median(t_stars);
      pt.median_total_rounds = median(rounds);
    }
    rep.points.push_back(pt);
  }
  std::vector<std::pair<double, double>> xy;
  for (const ScalingPoint& pt : rep.points)
    if (pt.seeds_used > 0) xy.emplace_back(std::log(pt.n), pt.median_t_star);
  if (xy.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : xy) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double m = xy.size();
    double denom = m * sxx - sx * sx;
    if (denom > 0) {
      rep.slope = (m * sxy - sx * sy) / denom;
      rep.slope_defined = true;
    }
  }
  return rep;
}

}  // namespace exsamp
