#include "exsamp/chain.hpp"

#include <stdexcept>

#include "exsamp/rng.hpp"

namespace exsamp {

bool mark_at(std::uint64_t seed, double p, std::int64_t t, int v) {
  return rng::unit(seed, t, static_cast<std::uint64_t>(v), rng::Stream::Mark) < p;
}

std::uint8_t proposal_at(std::uint64_t seed, std::int64_t t, int v, const CspInstance& csp) {
  double u = rng::unit(seed, t, static_cast<std::uint64_t>(v), rng::Stream::Proposal);
  double total = 0.0;
  for (int l = 0; l < csp.num_labels(); ++l) total += csp.unary_d(v, l);
  double acc = 0.0;
  int last = 0;
  for (int l = 0; l < csp.num_labels(); ++l) {
    double w = csp.unary_d(v, l);
    if (w <= 0.0) continue;
    acc += w;
    last = l;
    if (u * total < acc) return static_cast<std::uint8_t>(l);
  }
  return static_cast<std::uint8_t>(last);
}

double threshold_at(std::uint64_t seed, std::int64_t t, int cid) {
  return rng::unit(seed, t, static_cast<std::uint64_t>(cid), rng::Stream::Threshold);
}

StepRandomness draw_step_randomness(std::uint64_t seed, double p, std::int64_t t,
                                    const CspInstance& csp) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("step randomness: need 0 < p <= 1");
  StepRandomness r;
  r.t = t;
  const int n = csp.num_vertices();
  r.mark.resize(n);
  r.proposal.resize(n, 0);
  for (int v = 0; v < n; ++v) {
    r.mark[v] = mark_at(seed, p, t, v);
    if (r.mark[v]) r.proposal[v] = proposal_at(seed, t, v, csp);
  }
  r.threshold.resize(csp.num_constraints());
  for (int cid = 0; cid < csp.num_constraints(); ++cid)
    r.threshold[cid] = threshold_at(seed, t, cid);
  return r;
}

namespace {

// Visits each potential labeling of the constraint; fn gets the scratch
// buffer holding the restricted labeling.
template <class Fn>
void for_each_potential(const Constraint& c, std::span<const std::uint8_t> current,
                        std::span<const std::uint8_t> proposals,
                        std::span<const std::uint8_t> marks, Fn&& fn) {
  const int m = static_cast<int>(c.members.size());
  std::vector<int> marked_pos;
  for (int i = 0; i < m; ++i)
    if (marks[i]) marked_pos.push_back(i);
  const int mm = static_cast<int>(marked_pos.size());
  std::vector<std::uint8_t> ell(current.begin(), current.end());
  for (std::uint32_t sel = 1; sel < (1u << mm); ++sel) {
    for (int j = 0; j < mm; ++j)
      ell[marked_pos[j]] = (sel >> j & 1u) ? proposals[marked_pos[j]] : current[marked_pos[j]];
    fn(ell);
  }
}

}  // namespace

std::vector<std::vector<std::uint8_t>> potential_labelings(
    const Constraint& c, std::span<const std::uint8_t> current,
    std::span<const std::uint8_t> proposals, std::span<const std::uint8_t> marks) {
  std::vector<std::vector<std::uint8_t>> out;
  for_each_potential(c, current, proposals, marks,
                     [&](const std::vector<std::uint8_t>& ell) { out.push_back(ell); });
  return out;
}

double filter_pass_probability(const CspInstance& csp, const Constraint& c,
                               std::span<const std::uint8_t> current,
                               std::span<const std::uint8_t> proposals,
                               std::span<const std::uint8_t> marks) {
  double q = 1.0;
  for_each_potential(c, current, proposals, marks, [&](const std::vector<std::uint8_t>& ell) {
    q *= c.ratio[CspInstance::table_index(ell, csp.num_labels())];
  });
  return q;
}

Rational filter_pass_probability_exact(const CspInstance& csp, const Constraint& c,
                                       std::span<const std::uint8_t> current,
                                       std::span<const std::uint8_t> proposals,
                                       std::span<const std::uint8_t> marks) {
  Rational q = 1;
  for_each_potential(c, current, proposals, marks, [&](const std::vector<std::uint8_t>& ell) {
    q *= c.table[CspInstance::table_index(ell, csp.num_labels())] / c.max_value;
  });
  return q;
}

Labeling apply_step(const CspInstance& csp, const Labeling& x, const StepRandomness& r) {
  const int n = csp.num_vertices();
  std::vector<char> passes(csp.num_constraints(), 1);
  std::vector<std::uint8_t> cur, prop, mk;
  for (int cid = 0; cid < csp.num_constraints(); ++cid) {
    const Constraint& c = csp.constraint(cid);
    cur.clear();
    prop.clear();
    mk.clear();
    bool any_marked = false;
    for (int v : c.members) {
      cur.push_back(x[v]);
      prop.push_back(r.proposal[v]);
      mk.push_back(r.mark[v]);
      any_marked |= r.mark[v] != 0;
    }
    if (!any_marked) continue;  // empty product, always passes
    double q = filter_pass_probability(csp, c, cur, prop, mk);
    passes[cid] = r.threshold[cid] < q;
  }
  Labeling y = x;
  for (int v = 0; v < n; ++v) {
    if (!r.mark[v]) continue;
    bool ok = true;
    for (int cid : csp.constraints_of(v)) ok &= passes[cid] != 0;
    if (ok) y[v] = r.proposal[v];
  }
  return y;
}

Labeling run_forward(const CspInstance& csp, const Labeling& x0, std::uint64_t seed,
                     double p, int steps) {
  Labeling x = x0;
  for (std::int64_t t = 0; t < steps; ++t)
    x = apply_step(csp, x, draw_step_randomness(seed, p, t, csp));
  return x;
}

}  // namespace exsamp
