#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exsamp/graph.hpp"

namespace exsamp {

using Rational = boost::multiprecision::cpp_rational;

// Parses "3/10", "0.3", "2" exactly.
Rational parse_rational(const std::string& s);

// Per-vertex label assignment; labels are dense codes 0..|L|-1.
using Labeling = std::vector<std::uint8_t>;

struct Constraint {
  std::vector<int> members;  // ascending vertex ids, |members| >= 2
  // Value table over restricted labelings, index = sum_i l_i * |L|^i with i
  // running over members in ascending order.
  std::vector<Rational> table;
  Rational max_value;
  // Vertex that draws the filter threshold and computes tri-states; defaults
  // to the highest member id.
  int hub = -1;
  // value / max_value cache for the sampler path.
  std::vector<double> ratio;
};

// Weighted local CSP: labels, per-vertex unary weights, constraint sets.
class CspInstance {
 public:
  CspInstance(std::vector<std::string> label_names,
              std::vector<std::vector<Rational>> unary,
              std::vector<Constraint> constraints, int k);

  int num_vertices() const { return static_cast<int>(unary_.size()); }
  int num_labels() const { return static_cast<int>(label_names_.size()); }
  const std::vector<std::string>& label_names() const { return label_names_; }
  int k() const { return k_; }

  const Rational& unary(int v, int l) const { return unary_[v][l]; }
  double unary_d(int v, int l) const { return unary_d_[v][l]; }
  // Bitmask of {l : b_v(l) > 0}.
  std::uint32_t support_mask(int v) const { return support_[v]; }

  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(int cid) const { return constraints_[cid]; }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  std::span<const int> constraints_of(int v) const {
    return {cof_.data() + cof_offsets_[v], cof_.data() + cof_offsets_[v + 1]};
  }

  static std::size_t table_index(std::span<const std::uint8_t> restricted, int num_labels);

 private:
  std::vector<std::string> label_names_;
  std::vector<std::vector<Rational>> unary_;
  std::vector<std::vector<double>> unary_d_;
  std::vector<std::uint32_t> support_;
  std::vector<Constraint> constraints_;
  std::vector<int> cof_offsets_, cof_;
  int k_;
};

Rational labeling_weight(const CspInstance& csp, const Labeling& ell);
bool is_valid(const CspInstance& csp, const Labeling& ell);

// Exact target distribution by exhaustive enumeration.  Refuses instances
// with |L|^n > 2^24.  This is the oracle, never the sampler.
struct EnumeratedDistribution {
  std::vector<Labeling> support;       // valid labelings in code order
  std::vector<std::uint64_t> codes;    // encode_labeling of each support entry
  std::vector<Rational> prob;          // exact probabilities, sum to 1
  std::vector<double> prob_d;

  // Probability of a labeling (0 for invalid ones).
  double prob_of(const Labeling& ell) const;
  int index_of(const Labeling& ell) const;  // -1 for invalid labelings
};
EnumeratedDistribution enumerate_distribution(const CspInstance& csp);

// Mixed-radix code with vertex 0 least significant.
std::uint64_t encode_labeling(const Labeling& ell, int num_labels);

// Verifies each constraint set has diameter <= csp.k in G; returns the max
// actual diameter, throws naming the offender otherwise.
int constraint_diameter_check(const CspInstance& csp, const Graph& g);

// Optional exponential irreducibility check: the single-site flip graph over
// valid labelings is connected.
bool single_site_connected(const CspInstance& csp);

// Canonical JSON interchange for custom instances.
CspInstance load_csp_json(const std::string& text);
std::string save_csp_json(const CspInstance& csp);

}  // namespace exsamp
