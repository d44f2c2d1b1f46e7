#pragma once

#include <memory>
#include <string>

#include "exsamp/cftp.hpp"
#include "exsamp/csp.hpp"
#include "exsamp/graph.hpp"

namespace exsamp {

enum class Model { Hardcore, Wds, Ising };

struct ModelParams {
  Model model = Model::Hardcore;
  Rational weight;  // lambda (hardcore, wds) or beta (ising)
  double p = 0.1;   // marking probability
};

// "hardcore:lambda=0.3", "wds:lambda=8", "ising:beta=2"; optional ",p=...".
// Defaults: hardcore p=0.1, wds p=0.05, ising p=0.1.
ModelParams parse_model_spec(const std::string& spec);

// L={0,1}, b_v=(1,lambda), one constraint per edge forbidding (1,1); k=1.
CspInstance make_hardcore(const Graph& g, const Rational& lambda);
// L={0,1}, same unary, one constraint per inclusive neighborhood requiring a
// member labeled 1; k=2, or 1 when every inclusive neighborhood has diameter 1.
CspInstance make_wds(const Graph& g, const Rational& lambda);
// L={-1,+1}, uniform unary, per-edge constraint beta if equal else 1; k=1.
CspInstance make_ising(const Graph& g, const Rational& beta);

CspInstance make_model(Model m, const Graph& g, const Rational& weight);

// Specialized polynomial-time bounding rules; must agree with SetRules
// everywhere.
class HardcoreRules : public SetRules {
 public:
  using SetRules::SetRules;
  std::uint8_t constraint_info(const Constraint& c,
                               std::span<const std::uint64_t> member_states,
                               std::span<const std::uint8_t> member_marks,
                               std::span<const std::uint8_t> member_proposals,
                               double u) const override;
};

class WdsRules : public SetRules {
 public:
  using SetRules::SetRules;
  std::uint8_t constraint_info(const Constraint& c,
                               std::span<const std::uint64_t> member_states,
                               std::span<const std::uint8_t> member_marks,
                               std::span<const std::uint8_t> member_proposals,
                               double u) const override;
};

std::unique_ptr<StepRules> make_rules(Model m, const CspInstance& csp);

// Whole-state specialized bounding steps (equal to bounded_step_general).
LabelSetState hardcore_bounded_step(const CspInstance& csp, const LabelSetState& s,
                                    const StepRandomness& r);
LabelSetState wds_bounded_step(const CspInstance& csp, const LabelSetState& s,
                               const StepRandomness& r);

// Coalescence-rate parameters from the run-time analysis: gamma lower-bounds
// the per-marked-vertex probability of collapsing to a singleton, beta_rate
// upper-bounds the probability of set growth, and the chain contracts when
// gamma > delta_k * beta_rate.
struct RateParameters {
  double gamma = 0.0;
  double beta_rate = 0.0;
  int delta_k = 0;
  double rate = 0.0;  // p * (gamma - delta_k * beta_rate)
};
RateParameters rate_parameters(Model m, const Graph& g, double weight, double p);

struct ConditionCheck {
  bool holds = false;
  double margin = 0.0;  // gamma - delta_k * beta_rate
};
ConditionCheck condition_check(Model m, const Graph& g, double weight, double p);

}  // namespace exsamp
