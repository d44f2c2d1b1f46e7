#include <cmath>

#include "doctest.h"
#include "exsamp/cftp.hpp"
#include "exsamp/models.hpp"
#include "exsamp/verify.hpp"
#include "helpers.hpp"

using namespace exsamp;
using namespace exsamp::testing;

namespace {

Graph k1() { return Graph::from_edges(1, {}); }

}  // namespace

TEST_SUITE("cftp") {
  TEST_CASE("label set state") {
    CspInstance csp = make_hardcore(p3(), Rational(1));
    LabelSetState s = LabelSetState::full(csp);
    REQUIRE(s.sets.size() == 3);
    for (std::uint32_t m : s.sets) CHECK(m == 3);
    CHECK(!s.singular());
    s.sets = {1, 2, 1};
    CHECK(s.singular());
  }

  TEST_CASE("hardcore edge tri-states") {
    CspInstance csp = make_hardcore(k2(), Rational(1));
    const Constraint& e = csp.constraint(0);
    HardcoreRules rules(csp);

    auto both = [&](std::uint32_t s0, std::uint32_t s1, std::uint8_t m0, std::uint8_t m1,
                    std::uint8_t p0, std::uint8_t p1, double u) {
      std::uint32_t sets[] = {s0, s1};
      std::uint8_t marks[] = {m0, m1}, props[] = {p0, p1};
      std::uint64_t st[] = {s0, s1};
      TriState a = tristate_filter(csp, e, sets, props, marks, u);
      TriState b = static_cast<TriState>(rules.constraint_info(e, st, marks, props, u));
      CHECK(a == b);
      return a;
    };

    // Marked vertex proposes 0, neighbor unmarked: certain pass.
    CHECK(both(3, 3, 1, 0, 0, 0, 0.5) == TriState::Pass);
    // Proposes 1 into an unmarked neighbor with set {0,1}: undecidable.
    CHECK(both(3, 3, 1, 0, 1, 0, 0.5) == TriState::Uncertain);
    // Proposes 1 into an unmarked neighbor pinned to {1}: certain fail.
    CHECK(both(3, 2, 1, 0, 1, 0, 0.5) == TriState::Fail);
    // Both marked proposing 1: certain fail regardless of sets.
    CHECK(both(3, 3, 1, 1, 1, 1, 0.5) == TriState::Fail);
  }

  TEST_CASE("wds neighborhood tri-states") {
    CspInstance csp = make_wds(c4(), Rational(8));
    const Constraint& c = csp.constraint(0);  // members {0,1,3}, center 0
    REQUIRE(c.members.size() == 3);
    REQUIRE(c.hub == 0);
    WdsRules rules(csp);

    auto both = [&](std::vector<std::uint32_t> sets, std::vector<std::uint8_t> marks,
                    std::vector<std::uint8_t> props, double u) {
      std::vector<std::uint64_t> st(sets.begin(), sets.end());
      TriState a = tristate_filter(csp, c, sets, props, marks, u);
      TriState b = static_cast<TriState>(rules.constraint_info(c, st, marks, props, u));
      CHECK(a == b);
      return a;
    };

    // Every member marked proposing 1: no all-zero selection outcome exists.
    CHECK(both({3, 3, 3}, {1, 1, 1}, {1, 1, 1}, 0.5) == TriState::Pass);
    // Center marked proposing 0 while every member set is {0}: certain fail.
    CHECK(both({1, 1, 1}, {1, 0, 0}, {0, 0, 0}, 0.5) == TriState::Fail);
    // Same but one unmarked member still has {0,1}: depends on its label.
    CHECK(both({1, 3, 1}, {1, 0, 0}, {0, 0, 0}, 0.5) == TriState::Uncertain);
  }

  TEST_CASE("bounded step on singletons equals the real chain") {
    CspInstance csp = make_hardcore(p3(), Rational(2));
    EnumeratedDistribution d = enumerate_distribution(csp);
    for (const Labeling& x : d.support)
      for (int t = 0; t < 30; ++t) {
        StepRandomness r = draw_step_randomness(17, 0.5, t, csp);
        LabelSetState s;
        for (std::uint8_t l : x) s.sets.push_back(1u << l);
        LabelSetState out = bounded_step_general(csp, s, r);
        Labeling y = apply_step(csp, x, r);
        for (std::size_t v = 0; v < y.size(); ++v) CHECK(out.sets[v] == (1u << y[v]));
      }
  }

  TEST_CASE("bounded step with no marks is the identity") {
    CspInstance csp = make_hardcore(c4(), Rational(1));
    StepRandomness r;
    r.mark.assign(4, 0);
    r.proposal.assign(4, 0);
    r.threshold.assign(csp.num_constraints(), 0.5);
    LabelSetState s = LabelSetState::full(csp);
    CHECK(bounded_step_general(csp, s, r).sets == s.sets);
  }

  TEST_CASE("bounded step collapses a safe proposal") {
    CspInstance csp = make_hardcore(k2(), Rational(1));
    StepRandomness r;
    r.mark = {1, 0};
    r.proposal = {0, 0};
    r.threshold = {0.5};
    LabelSetState s = LabelSetState::full(csp);
    LabelSetState out = bounded_step_general(csp, s, r);
    CHECK(out.sets[0] == 1);  // {0}
    CHECK(out.sets[1] == 3);  // untouched
  }

  TEST_CASE("single-step containment for every valid start") {
    for (int model = 0; model < 2; ++model) {
      CspInstance csp = model == 0 ? make_hardcore(c4(), Rational(2))
                                   : make_wds(c4(), Rational(8));
      EnumeratedDistribution d = enumerate_distribution(csp);
      for (int t = 0; t < 50; ++t) {
        StepRandomness r = draw_step_randomness(31 + model, 0.6, t, csp);
        LabelSetState s = bounded_step_general(csp, LabelSetState::full(csp), r);
        for (const Labeling& x : d.support) {
          Labeling y = apply_step(csp, x, r);
          for (std::size_t v = 0; v < y.size(); ++v)
            CHECK(((s.sets[v] >> y[v]) & 1u) == 1u);
        }
      }
    }
  }

  TEST_CASE("sequential hardcore sampler is deterministic") {
    Graph g = c5();
    SampleReport a = sequential_cftp_hardcore(g, 0.3, 77, 30);
    SampleReport b = sequential_cftp_hardcore(g, 0.3, 77, 30);
    CHECK(a.to_json() == b.to_json());
    REQUIRE(a.status == SampleReport::Status::Exact);
    CHECK(is_valid(make_hardcore(g, Rational(3, 10)), a.labeling));
  }

  TEST_CASE("sequential hardcore matches pi on a single vertex") {
    const int n = 100000;
    int ones = 0;
    for (int s = 0; s < n; ++s) {
      SampleReport r = sequential_cftp_hardcore(k1(), 1.0, 1000 + s, 30);
      REQUIRE(r.status == SampleReport::Status::Exact);
      ones += r.labeling[0];
    }
    double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(double(ones) / n - 0.5) < 3 * sigma);
  }

  TEST_CASE("sequential hardcore tv sanity on K2") {
    CspInstance csp = make_hardcore(k2(), Rational(2));
    EnumeratedDistribution d = enumerate_distribution(csp);
    std::vector<std::int64_t> counts(d.support.size(), 0);
    const int n = 20000;
    for (int s = 0; s < n; ++s) {
      SampleReport r = sequential_cftp_hardcore(k2(), 2.0, 5000 + s, 30);
      REQUIRE(r.status == SampleReport::Status::Exact);
      counts[d.index_of(r.labeling)]++;
    }
    CHECK(tv_distance(counts, d.prob_d) < 0.02);
  }

  TEST_CASE("aborted report carries a warning and no labeling") {
    SampleReport r;
    r.status = SampleReport::Status::Aborted;
    std::string j = r.to_json();
    CHECK(j.find("aborted") != std::string::npos);
    CHECK(j.find("\"labeling\":null") != std::string::npos);
  }
}
