#include "exsamp/cftp.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "exsamp/rng.hpp"
#include "json.hpp"

namespace exsamp {

LabelSetState LabelSetState::full(const CspInstance& csp) {
  LabelSetState s;
  s.sets.resize(csp.num_vertices());
  for (int v = 0; v < csp.num_vertices(); ++v) s.sets[v] = csp.support_mask(v);
  return s;
}

bool LabelSetState::singular() const {
  for (std::uint32_t m : sets)
    if ((m & (m - 1)) != 0) return false;
  return true;
}

TriState tristate_filter(const CspInstance& csp, const Constraint& c,
                         std::span<const std::uint32_t> member_sets,
                         std::span<const std::uint8_t> proposals,
                         std::span<const std::uint8_t> marks, double u) {
  const int m = static_cast<int>(c.members.size());
  bool any_marked = false;
  for (int i = 0; i < m; ++i) any_marked |= marks[i] != 0;
  if (!any_marked) return TriState::Pass;  // empty product passes at any u

  double combos = 1.0;
  for (int i = 0; i < m; ++i) {
    if (member_sets[i] == 0) throw std::invalid_argument("tristate_filter: empty label set");
    combos *= std::popcount(member_sets[i]);
  }
  if (combos > double(1 << 20))
    throw std::invalid_argument("tristate_filter: too many consistent labelings to enumerate");

  double q_min = 1.0, q_max = 0.0;
  std::vector<std::uint8_t> x(m, 0);
  // Odometer over each member's label set.
  std::vector<std::vector<std::uint8_t>> choices(m);
  std::vector<int> pos(m, 0);
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < csp.num_labels(); ++l)
      if (member_sets[i] >> l & 1u) choices[i].push_back(static_cast<std::uint8_t>(l));
    x[i] = choices[i][0];
  }
  for (;;) {
    double q = filter_pass_probability(csp, c, x, proposals, marks);
    q_min = std::min(q_min, q);
    q_max = std::max(q_max, q);
    int i = 0;
    while (i < m && pos[i] + 1 == static_cast<int>(choices[i].size())) {
      pos[i] = 0;
      x[i] = choices[i][0];
      ++i;
    }
    if (i == m) break;
    ++pos[i];
    x[i] = choices[i][pos[i]];
  }
  if (u < q_min) return TriState::Pass;
  if (u >= q_max) return TriState::Fail;
  return TriState::Uncertain;
}

int SetRules::output_label(std::uint64_t state) const {
  return std::countr_zero(state);
}

std::uint8_t SetRules::constraint_info(const Constraint& c,
                                       std::span<const std::uint64_t> member_states,
                                       std::span<const std::uint8_t> member_marks,
                                       std::span<const std::uint8_t> member_proposals,
                                       double u) const {
  std::vector<std::uint32_t> sets(member_states.size());
  for (std::size_t i = 0; i < member_states.size(); ++i)
    sets[i] = static_cast<std::uint32_t>(member_states[i]);
  return static_cast<std::uint8_t>(
      tristate_filter(*csp_, c, sets, member_proposals, member_marks, u));
}

std::uint64_t SetRules::update(int /*v*/, std::uint64_t state, std::uint8_t proposal,
                               std::span<const std::uint8_t> cinfo) const {
  bool all_pass = true;
  for (std::uint8_t ci : cinfo) {
    if (ci == static_cast<std::uint8_t>(TriState::Fail)) return state;
    all_pass &= ci == static_cast<std::uint8_t>(TriState::Pass);
  }
  if (all_pass) return 1u << proposal;
  return state | (1u << proposal);
}

LabelSetState bounded_step_general(const CspInstance& csp, const LabelSetState& s,
                                   const StepRandomness& r) {
  SetRules rules(csp);
  std::vector<std::uint8_t> tri(csp.num_constraints(),
                                static_cast<std::uint8_t>(TriState::Pass));
  std::vector<std::uint64_t> states;
  std::vector<std::uint8_t> marks, props;
  for (int cid = 0; cid < csp.num_constraints(); ++cid) {
    const Constraint& c = csp.constraint(cid);
    states.clear();
    marks.clear();
    props.clear();
    for (int v : c.members) {
      states.push_back(s.sets[v]);
      marks.push_back(r.mark[v]);
      props.push_back(r.proposal[v]);
    }
    tri[cid] = rules.constraint_info(c, states, marks, props, r.threshold[cid]);
  }
  LabelSetState out = s;
  std::vector<std::uint8_t> cinfo;
  for (int v = 0; v < csp.num_vertices(); ++v) {
    if (!r.mark[v]) continue;
    cinfo.clear();
    for (int cid : csp.constraints_of(v)) cinfo.push_back(tri[cid]);
    out.sets[v] =
        static_cast<std::uint32_t>(rules.update(v, s.sets[v], r.proposal[v], cinfo));
  }
  return out;
}

std::string SampleReport::to_json() const {
  nlohmann::ordered_json j;
  j["status"] = status == Status::Exact ? "Exact" : "Aborted";
  if (status == Status::Exact) {
    j["labeling"] = labeling;
  } else {
    j["labeling"] = nullptr;
    j["warning"] = "aborted runs must not be used as samples";
  }
  j["stages_used"] = stages_used;
  j["total_rounds"] = total_rounds;
  j["total_messages"] = total_messages;
  j["peak_message_bits"] = peak_message_bits;
  j["congest_ok"] = congest_ok;
  return j.dump();
}

SampleReport sequential_cftp_hardcore(const Graph& g, double lambda, std::uint64_t seed,
                                      int max_doublings) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sequential cftp: lambda must be positive");
  const int n = g.vertex_count();
  const double heads_prob = lambda / (1.0 + lambda);
  SampleReport rep;
  std::int64_t t_prime = 1;
  std::vector<std::uint8_t> sets(n);
  for (int stage = 1; stage <= max_doublings; ++stage) {
    std::fill(sets.begin(), sets.end(), std::uint8_t{3});  // {0,1}
    for (std::int64_t t = -t_prime; t < 0; ++t) {
      int v = static_cast<int>(rng::unit(seed, t, 0, rng::Stream::SeqVertex) * n);
      if (v == n) v = n - 1;
      bool heads = rng::unit(seed, t, 0, rng::Stream::SeqCoin) < heads_prob;
      if (!heads) {
        sets[v] = 1;  // {0}
      } else {
        bool all_out = true, any_in = false;
        for (int u : g.neighbors(v)) {
          all_out &= sets[u] == 1;
          any_in |= sets[u] == 2;
        }
        if (all_out)
          sets[v] = 2;  // {1}
        else if (any_in)
          sets[v] = 1;  // {0}
        else
          sets[v] = 3;  // {0,1}
      }
    }
    rep.stages_used = stage;
    rep.total_rounds += t_prime;
    bool singular = true;
    for (std::uint8_t s : sets) singular &= s != 3;
    if (singular) {
      rep.status = SampleReport::Status::Exact;
      rep.labeling.resize(n);
      for (int v = 0; v < n; ++v) rep.labeling[v] = sets[v] == 2 ? 1 : 0;
      return rep;
    }
    t_prime *= 2;
  }
  rep.status = SampleReport::Status::Aborted;
  return rep;
}

}  // namespace exsamp
