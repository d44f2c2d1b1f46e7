#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "exsamp/csp.hpp"

// The marked distributed Markov chain: every vertex is marked independently
// with probability p, marked vertices propose labels proportional to their
// unary weights, and each constraint set passes a probabilistic local filter
// over its potential labelings.  All randomness is counter-based so that the
// same time index always yields the same draws.

namespace exsamp {

struct StepRandomness {
  std::int64_t t = 0;
  std::vector<std::uint8_t> mark;      // per vertex
  std::vector<std::uint8_t> proposal;  // meaningful only where mark is set
  std::vector<double> threshold;       // per constraint, uniform in [0,1)
};

bool mark_at(std::uint64_t seed, double p, std::int64_t t, int v);
// Label drawn proportional to b_v over {l : b_v(l) > 0}.
std::uint8_t proposal_at(std::uint64_t seed, std::int64_t t, int v, const CspInstance& csp);
double threshold_at(std::uint64_t seed, std::int64_t t, int cid);

StepRandomness draw_step_randomness(std::uint64_t seed, double p, std::int64_t t,
                                    const CspInstance& csp);

// Multiset of potential labelings of a constraint set: one entry per nonzero
// selection vector over the marked members.  `current` and `proposals` are
// aligned with the constraint's member order.
std::vector<std::vector<std::uint8_t>> potential_labelings(
    const Constraint& c, std::span<const std::uint8_t> current,
    std::span<const std::uint8_t> proposals, std::span<const std::uint8_t> marks);

// Filter pass probability, the product of C_R/C*_R over all potential
// labelings (empty product = 1).
double filter_pass_probability(const CspInstance& csp, const Constraint& c,
                               std::span<const std::uint8_t> current,
                               std::span<const std::uint8_t> proposals,
                               std::span<const std::uint8_t> marks);
Rational filter_pass_probability_exact(const CspInstance& csp, const Constraint& c,
                                       std::span<const std::uint8_t> current,
                                       std::span<const std::uint8_t> proposals,
                                       std::span<const std::uint8_t> marks);

// One chain step: a marked vertex adopts its proposal iff every constraint
// set containing it passes (threshold below the filter probability).
Labeling apply_step(const CspInstance& csp, const Labeling& x, const StepRandomness& r);

Labeling run_forward(const CspInstance& csp, const Labeling& x0, std::uint64_t seed,
                     double p, int steps);

}  // namespace exsamp
