#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exsamp/cftp.hpp"
#include "exsamp/csp.hpp"
#include "exsamp/graph.hpp"
#include "exsamp/models.hpp"

// Oracles and statistics used to check the sampler, never to produce samples.

namespace exsamp {

// Exact transition matrix of one chain step over the valid labelings, by
// exhaustive enumeration of mark vectors, proposal vectors, and per-constraint
// filter outcomes.  Refuses instances with n > 6 or |L| > 3.
struct TransitionMatrix {
  EnumeratedDistribution dist;            // states in code order, exact pi
  std::vector<std::vector<Rational>> m;   // row-stochastic
};
TransitionMatrix build_transition_matrix(const CspInstance& csp, const Rational& p);

// Max over state pairs of |pi(X) M[X,Y] - pi(Y) M[Y,X]|.
double check_detailed_balance(const TransitionMatrix& tm);
// Max entry of |pi M - pi|.
double check_stationarity(const TransitionMatrix& tm);

// Total variation distance between empirical counts (aligned with pi) and pi.
double tv_distance(const std::vector<std::int64_t>& counts, const std::vector<double>& pi);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// Pearson goodness-of-fit test; cells with expected count < 5 are merged.
struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
  int cells = 0;
};
ChiSquareResult chi_square(const std::vector<std::int64_t>& counts,
                           const std::vector<double>& pi);

// For every seed, horizon T <= t_max, and valid start X, composes the real
// chain forward from -T and checks its time-0 labeling is contained in the
// bounding chain's label sets.  Returns the first counterexample if any.
struct SoundnessResult {
  bool ok = true;
  std::uint64_t seed = 0;
  int t = 0;
  int state_index = -1;
  int vertex = -1;
};
using BoundedStepFn = std::function<LabelSetState(const CspInstance&, const LabelSetState&,
                                                  const StepRandomness&)>;
SoundnessResult bounding_soundness_bruteforce(const CspInstance& csp, double p,
                                              std::uint64_t base_seed, int num_seeds,
                                              int t_max,
                                              const BoundedStepFn& step = bounded_step_general);

// Round-scaling measurement: T* (final stage's T') and total rounds per run,
// medians per size, least-squares slope of median T* against ln n.
struct ScalingPoint {
  int n = 0;
  int seeds_used = 0;
  int aborted = 0;
  double median_total_rounds = 0.0;
  double median_t_star = 0.0;
  std::uint32_t peak_bits = 0;  // max over runs
  bool congest_ok = true;       // all runs within budget
};
struct ScalingReport {
  std::vector<ScalingPoint> points;
  bool slope_defined = false;
  double slope = 0.0;

  std::string to_json() const;
};
ScalingReport scaling_experiment(Model model, const Rational& weight, double p,
                                 const std::string& family, const std::vector<int>& sizes,
                                 int seeds_per_size, std::uint64_t base_seed,
                                 NetKind net = NetKind::Local);

}  // namespace exsamp
