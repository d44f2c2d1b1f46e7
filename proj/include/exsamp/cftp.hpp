#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "exsamp/chain.hpp"
#include "exsamp/csp.hpp"
#include "exsamp/graph.hpp"
#include "exsamp/simnet.hpp"

// Exact sampling via coupling from the past with bounding chains.  The
// distributed engine runs on the round-synchronous network simulator in
// stages of doubling length; each stage activates the kT'-hop neighborhoods
// of the not-yet-finalized vertices, replays the shared randomness, and
// finalizes every vertex whose label set collapses to a singleton.

namespace exsamp {

enum class TriState : std::uint8_t { Fail = 0, Pass = 1, Uncertain = 2 };

// Per-vertex label supersets, bitmask over the ordered label set.
struct LabelSetState {
  std::vector<std::uint32_t> sets;

  static LabelSetState full(const CspInstance& csp);
  bool singular() const;
};

// Tri-state of a constraint's filter over label-set uncertainty: Pass iff the
// filter passes for every consistent labeling of the members, Fail iff it
// fails for every one, Uncertain otherwise.  `member_sets`, `proposals`, and
// `marks` align with the constraint's member order.
TriState tristate_filter(const CspInstance& csp, const Constraint& c,
                         std::span<const std::uint32_t> member_sets,
                         std::span<const std::uint8_t> proposals,
                         std::span<const std::uint8_t> marks, double u);

// One bounding-chain step by per-constraint tri-states and the update
// contract: a marked vertex collapses to {sigma} when every incident
// constraint certainly passes, keeps its set when any certainly fails, and
// widens by sigma otherwise.
LabelSetState bounded_step_general(const CspInstance& csp, const LabelSetState& s,
                                   const StepRandomness& r);

struct SampleReport {
  enum class Status { Exact, Aborted };

  Labeling labeling;  // empty unless status == Exact
  int stages_used = 0;
  std::int64_t total_rounds = 0;
  std::int64_t total_messages = 0;
  std::uint32_t peak_message_bits = 0;
  bool congest_ok = true;
  Status status = Status::Aborted;

  std::string to_json() const;
};

// Model-specific bounding logic driven by the engine.  A vertex's tracked
// state is an opaque word (label-set bitmask, or a trajectory pair for the
// monotone variant); constraints contribute a small info byte computed at
// the constraint's hub from member records.
class StepRules {
 public:
  virtual ~StepRules() = default;

  virtual std::uint64_t initial_state(int v) const = 0;
  virtual bool settled(std::uint64_t state) const = 0;
  virtual int output_label(std::uint64_t state) const = 0;
  // Bits needed to transmit a state word.
  virtual int state_bits() const = 0;

  virtual std::uint8_t constraint_info(const Constraint& c,
                                       std::span<const std::uint64_t> member_states,
                                       std::span<const std::uint8_t> member_marks,
                                       std::span<const std::uint8_t> member_proposals,
                                       double u) const = 0;

  virtual std::uint64_t update(int v, std::uint64_t state, std::uint8_t proposal,
                               std::span<const std::uint8_t> cinfo) const = 0;
};

// Generic rules for any weighted local CSP: label-set bitmask state,
// tri-states by enumeration over consistent member labelings.
class SetRules : public StepRules {
 public:
  explicit SetRules(const CspInstance& csp) : csp_(&csp) {}

  std::uint64_t initial_state(int v) const override { return csp_->support_mask(v); }
  bool settled(std::uint64_t state) const override { return (state & (state - 1)) == 0; }
  int output_label(std::uint64_t state) const override;
  int state_bits() const override { return csp_->num_labels(); }

  std::uint8_t constraint_info(const Constraint& c,
                               std::span<const std::uint64_t> member_states,
                               std::span<const std::uint8_t> member_marks,
                               std::span<const std::uint8_t> member_proposals,
                               double u) const override;

  std::uint64_t update(int v, std::uint64_t state, std::uint8_t proposal,
                       std::span<const std::uint8_t> cinfo) const override;

 protected:
  const CspInstance* csp_;
};

// Exact sampler.  `rules` defaults to the generic SetRules; models provide
// faster specialized rules.  Aborted reports carry no labeling and must not
// be used as samples.
SampleReport cftp_sample(const CspInstance& csp, const Graph& g, NetworkMode mode,
                         std::uint64_t seed, double p, int max_stages,
                         const StepRules* rules = nullptr);

// Single-process reference sampler for the hardcore model: the single-site
// chain with the classic three-case bounding update.
SampleReport sequential_cftp_hardcore(const Graph& g, double lambda, std::uint64_t seed,
                                      int max_doublings);

// Monotone variant for the Ising model with beta > 1: tracks the coupled
// trajectories started from the all-plus and all-minus states and finalizes
// a vertex when they agree at time zero.
SampleReport monotone_cftp_ising(const Graph& g, const Rational& beta, std::uint64_t seed,
                                 double p, int max_stages);

}  // namespace exsamp
