#include "exsamp/models.hpp"

#include <cmath>
#include <stdexcept>

namespace exsamp {

namespace {

// k for the dominating-set instance: 1 if every inclusive neighborhood is a
// clique-like set of diameter <= 1, else 2.
int wds_k(const Graph& g) {
  for (int v = 0; v < g.vertex_count(); ++v) {
    std::vector<int> ball = g.k_hop_ball(v, 1);
    int d = g.set_diameter(ball);
    if (d < 0 || d > 2) throw std::logic_error("wds: inclusive neighborhood diameter > 2");
    if (d > 1) return 2;
  }
  return 1;
}

}  // namespace

ModelParams parse_model_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  ModelParams mp;
  std::string weight_key;
  if (name == "hardcore") {
    mp.model = Model::Hardcore;
    mp.p = 0.1;
    weight_key = "lambda";
  } else if (name == "wds") {
    mp.model = Model::Wds;
    mp.p = 0.05;
    weight_key = "lambda";
  } else if (name == "ising") {
    mp.model = Model::Ising;
    mp.p = 0.1;
    weight_key = "beta";
  } else {
    throw std::invalid_argument("unknown model '" + name + "'");
  }
  bool have_weight = false;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto comma = rest.find(',', pos);
      std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("model spec: expected key=value in '" + item + "'");
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      if (key == weight_key) {
        mp.weight = parse_rational(val);
        have_weight = true;
      } else if (key == "p") {
        mp.p = std::stod(val);
      } else {
        throw std::invalid_argument("model spec: unknown key '" + key + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (!have_weight)
    throw std::invalid_argument("model spec: missing " + weight_key);
  if (mp.weight <= 0) throw std::invalid_argument("model spec: weight must be positive");
  if (!(mp.p > 0.0) || mp.p > 1.0)
    throw std::invalid_argument("model spec: p must be in (0,1]");
  return mp;
}

CspInstance make_hardcore(const Graph& g, const Rational& lambda) {
  if (lambda <= 0) throw std::invalid_argument("hardcore: lambda must be positive");
  std::vector<std::vector<Rational>> unary(g.vertex_count(), {Rational(1), lambda});
  std::vector<Constraint> cons;
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int u : g.neighbors(v))
      if (u > v) {
        Constraint c;
        c.members = {v, u};
        c.table = {Rational(1), Rational(1), Rational(1), Rational(0)};
        c.max_value = 1;
        cons.push_back(std::move(c));
      }
  return CspInstance({"0", "1"}, std::move(unary), std::move(cons), 1);
}

CspInstance make_wds(const Graph& g, const Rational& lambda) {
  if (lambda <= 0) throw std::invalid_argument("wds: lambda must be positive");
  std::vector<std::vector<Rational>> unary(g.vertex_count(), {Rational(1), lambda});
  std::vector<Constraint> cons;
  for (int v = 0; v < g.vertex_count(); ++v) {
    Constraint c;
    c.members = g.k_hop_ball(v, 1);
    if (c.members.size() < 2)
      throw std::invalid_argument("wds: isolated vertex " + std::to_string(v));
    std::size_t entries = std::size_t{1} << c.members.size();
    c.table.resize(entries, Rational(1));
    c.table[0] = 0;  // no member in the set
    c.max_value = 1;
    c.hub = v;
    cons.push_back(std::move(c));
  }
  return CspInstance({"0", "1"}, std::move(unary), std::move(cons), wds_k(g));
}

CspInstance make_ising(const Graph& g, const Rational& beta) {
  if (beta <= 0) throw std::invalid_argument("ising: beta must be positive");
  std::vector<std::vector<Rational>> unary(g.vertex_count(), {Rational(1), Rational(1)});
  Rational hi = beta > 1 ? beta : Rational(1);
  std::vector<Constraint> cons;
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int u : g.neighbors(v))
      if (u > v) {
        Constraint c;
        c.members = {v, u};
        c.table = {beta, Rational(1), Rational(1), beta};
        c.max_value = hi;
        cons.push_back(std::move(c));
      }
  return CspInstance({"-1", "+1"}, std::move(unary), std::move(cons), 1);
}

CspInstance make_model(Model m, const Graph& g, const Rational& weight) {
  switch (m) {
    case Model::Hardcore: return make_hardcore(g, weight);
    case Model::Wds: return make_wds(g, weight);
    case Model::Ising: return make_ising(g, weight);
  }
  throw std::logic_error("make_model: bad model");
}

std::uint8_t HardcoreRules::constraint_info(const Constraint& /*c*/,
                                            std::span<const std::uint64_t> member_states,
                                            std::span<const std::uint8_t> member_marks,
                                            std::span<const std::uint8_t> member_proposals,
                                            double /*u*/) const {
  // The filter value is 0 or 1, so the threshold never matters: a potential
  // labeling (1,1) forces a fail, anything else passes.
  if (!member_marks[0] && !member_marks[1]) return static_cast<std::uint8_t>(TriState::Pass);
  // A = this endpoint is marked and proposes 1.
  bool a0 = member_marks[0] && member_proposals[0] == 1;
  bool a1 = member_marks[1] && member_proposals[1] == 1;
  std::uint32_t s0 = static_cast<std::uint32_t>(member_states[0]);
  std::uint32_t s1 = static_cast<std::uint32_t>(member_states[1]);
  bool must_fail = (a0 && a1) || (a0 && s1 == 2u) || (a1 && s0 == 2u);
  if (must_fail) return static_cast<std::uint8_t>(TriState::Fail);
  bool can_fail = (a0 && (s1 >> 1 & 1u)) || (a1 && (s0 >> 1 & 1u));
  return static_cast<std::uint8_t>(can_fail ? TriState::Uncertain : TriState::Pass);
}

std::uint8_t WdsRules::constraint_info(const Constraint& c,
                                       std::span<const std::uint64_t> member_states,
                                       std::span<const std::uint8_t> member_marks,
                                       std::span<const std::uint8_t> member_proposals,
                                       double /*u*/) const {
  // 0/1 filter again: a potential labeling fails iff every member can be 0 in
  // it, which needs some marked member proposing 0 (the labeling must differ
  // from X somewhere) and a certainly-zero choice at every member.
  const std::size_t m = c.members.size();
  bool any_marked = false, marked_zero = false, any_cert_one = false, all_cert_zero = true;
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t s = static_cast<std::uint32_t>(member_states[i]);
    bool mk = member_marks[i] != 0;
    bool p1 = mk && member_proposals[i] == 1;
    any_marked |= mk;
    marked_zero |= mk && member_proposals[i] == 0;
    // Member contributes 1 in every potential labeling: X-side set is {1} and
    // any proposal is also 1.
    any_cert_one |= s == 2u && (!mk || p1);
    // Member can contribute 0: X-side set is {0}, or a sigma=0 choice exists.
    all_cert_zero &= s == 1u || (mk && member_proposals[i] == 0);
  }
  if (!any_marked) return static_cast<std::uint8_t>(TriState::Pass);
  if (marked_zero && all_cert_zero) return static_cast<std::uint8_t>(TriState::Fail);
  if (!marked_zero || any_cert_one) return static_cast<std::uint8_t>(TriState::Pass);
  return static_cast<std::uint8_t>(TriState::Uncertain);
}

std::unique_ptr<StepRules> make_rules(Model m, const CspInstance& csp) {
  switch (m) {
    case Model::Hardcore: return std::make_unique<HardcoreRules>(csp);
    case Model::Wds: return std::make_unique<WdsRules>(csp);
    case Model::Ising: return std::make_unique<SetRules>(csp);
  }
  throw std::logic_error("make_rules: bad model");
}

namespace {

LabelSetState bounded_step_with(const CspInstance& csp, const SetRules& rules,
                                const LabelSetState& s, const StepRandomness& r) {
  std::vector<std::uint8_t> tri(csp.num_constraints());
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

}  // namespace

LabelSetState hardcore_bounded_step(const CspInstance& csp, const LabelSetState& s,
                                    const StepRandomness& r) {
  return bounded_step_with(csp, HardcoreRules(csp), s, r);
}

LabelSetState wds_bounded_step(const CspInstance& csp, const LabelSetState& s,
                               const StepRandomness& r) {
  return bounded_step_with(csp, WdsRules(csp), s, r);
}

RateParameters rate_parameters(Model m, const Graph& g, double weight, double p) {
  RateParameters rp;
  double lambda = weight;
  if (m == Model::Hardcore) {
    rp.delta_k = g.delta_k(1);
    rp.gamma = (1.0 / (1.0 + lambda)) * (1.0 - rp.delta_k * p * lambda / (1.0 + lambda));
    rp.beta_rate = lambda / (1.0 + lambda);
  } else if (m == Model::Wds) {
    rp.delta_k = g.delta_k(2);
    rp.gamma = (lambda / (1.0 + lambda)) * (1.0 - rp.delta_k * p / (1.0 + lambda));
    rp.beta_rate = 1.0 / (1.0 + lambda);
  } else {
    throw std::invalid_argument("rate_parameters: defined for hardcore and wds only");
  }
  rp.rate = p * (rp.gamma - rp.delta_k * rp.beta_rate);
  return rp;
}

ConditionCheck condition_check(Model m, const Graph& g, double weight, double p) {
  RateParameters rp = rate_parameters(m, g, weight, p);
  ConditionCheck cc;
  cc.margin = rp.gamma - rp.delta_k * rp.beta_rate;
  cc.holds = cc.margin > 0.0;
  return cc;
}

}  // namespace exsamp
