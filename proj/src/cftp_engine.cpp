#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "exsamp/cftp.hpp"
#include "exsamp/models.hpp"
#include "exsamp/rng.hpp"

// Staged distributed CFTP.  Each stage doubles T', floods distances from the
// not-yet-finalized vertices, replays the bounding chain from -T' over the
// kT'-hop active region, and finalizes distance-0 vertices whose tracked
// state settles.  Every step costs 2k rounds: records out, (k-1) relay
// rounds, constraint tri-states back from the hubs, (k-1) relay rounds; the
// update itself lands at the head of the next step once all echoes are in.
//
// After every stage a single-process reference replay of the same stage over
// the whole graph cross-checks the engine: distance-0 states must match the
// reference exactly, finalized vertices must re-settle to the same label
// (coalescence permanence), and the per-step randomness digests must agree
// across stages (the shared randomness is a pure function of (seed, t)).

namespace exsamp {

namespace {

constexpr std::uint8_t kTagFlood = 1;
constexpr std::uint8_t kTagRecord = 2;
constexpr std::uint8_t kTagEcho = 3;
constexpr std::uint8_t kTagRelayRec = 4;
constexpr std::uint8_t kTagRelayEcho = 5;

constexpr std::int64_t kInf = std::int64_t{1} << 60;

int bits_for(std::int64_t max_value) {
  return std::max(
      1, static_cast<int>(std::bit_width(
             static_cast<std::uint64_t>(std::max<std::int64_t>(max_value, 1)))));
}

struct Rec {
  std::uint64_t state = 0;
  std::uint8_t mark = 0, prop = 0;
};

class CftpEngine {
 public:
  CftpEngine(const CspInstance& csp, const Graph& g, NetworkMode mode, std::uint64_t seed,
             double p, const StepRules& rules)
      : csp_(csp),
        g_(g),
        rules_(rules),
        net_(g, mode),
        seed_(seed),
        p_(p),
        n_(g.vertex_count()) {
    if (csp.num_vertices() != n_)
      throw std::invalid_argument("engine: csp and graph vertex counts differ");
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("engine: p must be in (0,1]");
    constraint_diameter_check(csp_, g_);

    idbits_ = bits_for(n_ - 1);
    cidbits_ = bits_for(csp_.num_constraints() - 1);
    lbits_ = bits_for(csp_.num_labels() - 1);

    adj_off_.resize(n_ + 1, 0);
    for (int v = 0; v < n_; ++v) adj_off_[v + 1] = adj_off_[v] + g_.degree(v);
    rec_state_.resize(adj_off_[n_]);
    rec_mark_.resize(adj_off_[n_]);
    rec_prop_.resize(adj_off_[n_]);
    rec_stamp_.assign(adj_off_[n_], -1);

    cof_off_.resize(n_ + 1, 0);
    for (int v = 0; v < n_; ++v)
      cof_off_[v + 1] = cof_off_[v] + static_cast<int>(csp_.constraints_of(v).size());
    cinfo_.resize(cof_off_[n_]);
    cinfo_stamp_.assign(cof_off_[n_], -1);

    hub_cons_.resize(n_);
    star_.resize(csp_.num_constraints());
    std::unordered_map<std::int64_t, int> shared;
    for (int cid = 0; cid < csp_.num_constraints(); ++cid) {
      const Constraint& c = csp_.constraint(cid);
      hub_cons_[c.hub].push_back(cid);
      bool star = true;
      for (int w : c.members) {
        if (w == c.hub) continue;
        star &= g_.has_edge(c.hub, w);
        int cnt = ++shared[(std::int64_t(c.hub) << 32) | std::uint32_t(w)];
        if (cnt > 1) echo_needs_cid_ = true;
      }
      star_[cid] = star;
      all_star_ &= star;
    }
    echo_bits_ = 2 + (echo_needs_cid_ ? cidbits_ : 0);

    coalesced_.assign(n_, 0);
    output_.assign(n_, 0);
    dist_.assign(n_, kInf);
    active_.assign(n_, 0);
    flood_pending_.assign(n_, 0);
    state_.assign(n_, 0);
    prev_mark_.assign(n_, 0);
    prev_prop_.assign(n_, 0);
    cur_mark_.assign(n_, 0);
    cur_prop_.assign(n_, 0);
    if (!all_star_) {
      relay_store_.resize(n_);
      relay_out_.resize(n_);
      echo_out_.resize(n_);
      rec_seen_.resize(n_);
      echo_seen_.resize(n_);
    }
  }

  SampleReport run(int max_stages) {
    SampleReport rep;
    std::int64_t t_prime = 1;
    for (int stage = 1; stage <= max_stages; ++stage) {
      run_stage(t_prime);
      rep.stages_used = stage;
      if (std::all_of(coalesced_.begin(), coalesced_.end(), [](char c) { return c != 0; })) {
        rep.status = SampleReport::Status::Exact;
        rep.labeling = output_;
        break;
      }
      t_prime *= 2;
    }
    Certification c = net_.certify();
    rep.total_rounds = c.total_rounds;
    rep.total_messages = c.total_messages;
    rep.peak_message_bits = c.peak_bits;
    rep.congest_ok = c.congest_ok;
    return rep;
  }

 private:
  int adj_slot(int v, int u) const {
    auto nb = g_.neighbors(v);
    auto it = std::lower_bound(nb.begin(), nb.end(), u);
    if (it == nb.end() || *it != u) return -1;
    return adj_off_[v] + static_cast<int>(it - nb.begin());
  }

  int cinfo_slot(int v, int cid) const {
    auto cons = csp_.constraints_of(v);
    for (int idx = 0; idx < static_cast<int>(cons.size()); ++idx)
      if (cons[idx] == cid) return cof_off_[v] + idx;
    throw std::logic_error("engine: echo for a constraint not containing the receiver");
  }

  int record_bits(bool marked) const {
    return rules_.state_bits() + 1 + (marked ? lbits_ : 0);
  }

  void note_record(int v, int id, const Rec& r) {
    if (!rec_seen_[v].insert(id).second) return;
    relay_store_[v].emplace(id, r);
    relay_out_[v].emplace_back(id, r);
  }

  void note_echo(int v, int cid, std::uint8_t info) {
    if (!echo_seen_[v].insert(cid).second) return;
    echo_out_[v].emplace_back(cid, info);
  }

  void drain(int v, std::span<const Message> inbox) {
    for (const Message& m : inbox) {
      switch (m.tag) {
        case kTagFlood: {
          std::int64_t nd = static_cast<std::int64_t>(m.a) + 1;
          if (nd < dist_[v]) {
            dist_[v] = nd;
            flood_pending_[v] = nd < radius_;
          }
          break;
        }
        case kTagRecord: {
          int slot = adj_slot(v, m.from);
          rec_state_[slot] = m.a;
          rec_mark_[slot] = m.b & 1;
          rec_prop_[slot] = static_cast<std::uint8_t>(m.b >> 1);
          rec_stamp_[slot] = step_id_;
          if (!all_star_)
            note_record(v, m.from, {m.a, rec_mark_[slot], rec_prop_[slot]});
          break;
        }
        case kTagEcho: {
          int slot = cinfo_slot(v, static_cast<int>(m.a));
          cinfo_[slot] = static_cast<std::uint8_t>(m.b);
          cinfo_stamp_[slot] = echo_drain_stamp_;
          break;
        }
        case kTagRelayRec: {
          for (std::size_t i = 0; i + 1 < m.ext.size(); i += 2) {
            int id = static_cast<int>(m.ext[i]);
            std::uint64_t payload = m.ext[i + 1];
            Rec r{payload >> 8, static_cast<std::uint8_t>(payload & 1),
                  static_cast<std::uint8_t>((payload >> 1) & 0x3f)};
            note_record(v, id, r);
          }
          break;
        }
        case kTagRelayEcho: {
          for (std::uint64_t e : m.ext) {
            int cid = static_cast<int>(e >> 8);
            std::uint8_t info = static_cast<std::uint8_t>(e & 0xff);
            const Constraint& c = csp_.constraint(cid);
            if (std::binary_search(c.members.begin(), c.members.end(), v)) {
              int slot = cinfo_slot(v, cid);
              cinfo_[slot] = info;
              cinfo_stamp_[slot] = echo_drain_stamp_;
            }
            note_echo(v, cid, info);
          }
          break;
        }
        default:
          throw std::logic_error("engine: unknown message tag");
      }
    }
  }

  void apply_update(int v) {
    if (!active_[v] || !prev_mark_[v]) return;
    if (dist_[v] > std::int64_t(csp_.k()) * (tp_ - 1 - upd_i_)) return;
    auto cons = csp_.constraints_of(v);
    scratch_cinfo_.clear();
    for (int idx = 0; idx < static_cast<int>(cons.size()); ++idx) {
      int slot = cof_off_[v] + idx;
      if (cinfo_stamp_[slot] != upd_stamp_)
        throw std::logic_error("engine: update without complete constraint info");
      scratch_cinfo_.push_back(cinfo_[slot]);
    }
    state_[v] = rules_.update(v, state_[v], prev_prop_[v], scratch_cinfo_);
  }

  void send_record(int v, Network::Outbox& out) {
    Message m;
    m.tag = kTagRecord;
    m.a = state_[v];
    bool mk = cur_mark_[v] != 0;
    m.b = mk ? (1u | (std::uint64_t(cur_prop_[v]) << 1)) : 0u;
    m.bits = static_cast<std::uint32_t>(record_bits(mk));
    for (int u : g_.neighbors(v)) out.send(u, m);
  }

  void hub_compute(int v, Network::Outbox& out) {
    if (!active_[v]) return;
    for (int cid : hub_cons_[v]) {
      const Constraint& c = csp_.constraint(cid);
      const int mm = static_cast<int>(c.members.size());
      scratch_states_.assign(mm, 0);
      scratch_marks_.assign(mm, 0);
      scratch_props_.assign(mm, 0);
      bool complete = true;
      for (int j = 0; j < mm && complete; ++j) {
        int w = c.members[j];
        if (w == v) {
          scratch_states_[j] = state_[v];
          scratch_marks_[j] = cur_mark_[v];
          scratch_props_[j] = cur_prop_[v];
          continue;
        }
        int slot = adj_slot(v, w);
        if (slot >= 0) {
          if (rec_stamp_[slot] != step_id_) {
            complete = false;
            break;
          }
          scratch_states_[j] = rec_state_[slot];
          scratch_marks_[j] = rec_mark_[slot];
          scratch_props_[j] = rec_prop_[slot];
        } else {
          auto it = relay_store_[v].find(w);
          if (it == relay_store_[v].end()) {
            complete = false;
            break;
          }
          scratch_states_[j] = it->second.state;
          scratch_marks_[j] = it->second.mark;
          scratch_props_[j] = it->second.prop;
        }
      }
      if (!complete) continue;
      double u = threshold_at(seed_, cur_t_, cid);
      std::uint8_t info =
          rules_.constraint_info(c, scratch_states_, scratch_marks_, scratch_props_, u);
      int own = cinfo_slot(v, cid);
      cinfo_[own] = info;
      cinfo_stamp_[own] = step_id_;
      if (star_[cid]) {
        Message m;
        m.tag = kTagEcho;
        m.a = static_cast<std::uint64_t>(cid);
        m.b = info;
        m.bits = static_cast<std::uint32_t>(echo_bits_);
        for (int w : c.members)
          if (w != v) out.send(w, m);
      } else {
        echo_seen_[v].insert(cid);
        Message m;
        m.tag = kTagRelayEcho;
        m.ext = {(std::uint64_t(cid) << 8) | info};
        m.bits = static_cast<std::uint32_t>(cidbits_ + 2);
        for (int w : g_.neighbors(v)) out.send(w, m);
      }
    }
  }

  void relay_records(int v, Network::Outbox& out) {
    if (relay_out_[v].empty()) return;
    Message m;
    m.tag = kTagRelayRec;
    std::uint32_t bits = 0;
    for (auto& [id, r] : relay_out_[v]) {
      m.ext.push_back(static_cast<std::uint64_t>(id));
      m.ext.push_back((r.state << 8) | (std::uint64_t(r.prop) << 1) | r.mark);
      bits += static_cast<std::uint32_t>(idbits_ + record_bits(r.mark != 0));
    }
    m.bits = bits;
    relay_out_[v].clear();
    for (int u : g_.neighbors(v)) out.send(u, m);
  }

  void relay_echoes(int v, Network::Outbox& out) {
    if (echo_out_[v].empty()) return;
    Message m;
    m.tag = kTagRelayEcho;
    for (auto& [cid, info] : echo_out_[v])
      m.ext.push_back((std::uint64_t(cid) << 8) | info);
    m.bits = static_cast<std::uint32_t>(m.ext.size() * (cidbits_ + 2));
    echo_out_[v].clear();
    for (int u : g_.neighbors(v)) out.send(u, m);
  }

  void clear_relay_state() {
    for (int v = 0; v < n_; ++v) {
      relay_store_[v].clear();
      relay_out_[v].clear();
      echo_out_[v].clear();
      rec_seen_[v].clear();
      echo_seen_[v].clear();
    }
  }

  void run_stage(std::int64_t t_prime) {
    tp_ = t_prime;
    const int k = csp_.k();
    radius_ = std::min<std::int64_t>(std::int64_t(k) * t_prime, n_);

    // Preprocessing: flood distances from the unfinalized vertices out to the
    // activation radius.
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(flood_pending_.begin(), flood_pending_.end(), 0);
    for (int v = 0; v < n_; ++v)
      if (!coalesced_[v]) {
        dist_[v] = 0;
        flood_pending_[v] = 1;
      }
    const std::uint32_t fbits = static_cast<std::uint32_t>(bits_for(radius_));
    for (std::int64_t r = 0; r < 2 * k * t_prime; ++r) {
      net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox& out) {
        drain(v, inbox);
        if (flood_pending_[v] && dist_[v] < radius_) {
          Message m;
          m.tag = kTagFlood;
          m.a = static_cast<std::uint64_t>(dist_[v]);
          m.bits = fbits;
          for (int u : g_.neighbors(v)) out.send(u, m);
        }
        flood_pending_[v] = 0;
      });
    }

    for (int v = 0; v < n_; ++v) {
      active_[v] = dist_[v] <= radius_;
      if (active_[v]) state_[v] = rules_.initial_state(v);
    }

    // Main phase: T' steps of 2k rounds each, then one flush round that lands
    // the final step's updates.
    for (int i = 0; i < t_prime; ++i) {
      cur_t_ = -t_prime + i;
      ++step_id_;
      std::swap(prev_mark_, cur_mark_);
      std::swap(prev_prop_, cur_prop_);
      upd_i_ = i - 1;
      upd_stamp_ = step_id_ - 1;
      echo_drain_stamp_ = step_id_ - 1;
      net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox& out) {
        drain(v, inbox);
        if (i > 0) apply_update(v);
        if (active_[v]) {
          cur_mark_[v] = mark_at(seed_, p_, cur_t_, v) ? 1 : 0;
          cur_prop_[v] = cur_mark_[v] ? proposal_at(seed_, cur_t_, v, csp_) : 0;
          send_record(v, out);
        }
      });
      // The previous step's stragglers drained above must not be re-relayed
      // into this step, so the relay stores reset only now.
      if (!all_star_) clear_relay_state();
      echo_drain_stamp_ = step_id_;
      for (int j = 1; j < k; ++j)
        net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox& out) {
          drain(v, inbox);
          if (!all_star_) relay_records(v, out);
        });
      net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox& out) {
        drain(v, inbox);
        hub_compute(v, out);
      });
      for (int j = k + 1; j < 2 * k; ++j)
        net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox& out) {
          drain(v, inbox);
          if (!all_star_) relay_echoes(v, out);
        });
    }
    std::swap(prev_mark_, cur_mark_);
    std::swap(prev_prop_, cur_prop_);
    upd_i_ = t_prime - 1;
    upd_stamp_ = step_id_;
    echo_drain_stamp_ = step_id_;
    net_.run_round([&](int v, std::span<const Message> inbox, Network::Outbox&) {
      drain(v, inbox);
      apply_update(v);
    });

    reference_check(t_prime);
  }

  // Whole-graph replay of this stage plus the three engine invariants.
  void reference_check(std::int64_t t_prime) {
    std::vector<std::uint64_t> ref(n_);
    for (int v = 0; v < n_; ++v) ref[v] = rules_.initial_state(v);
    std::vector<std::uint8_t> marks(n_), props(n_);
    std::vector<double> thr(csp_.num_constraints());
    std::vector<std::uint8_t> tri(csp_.num_constraints());
    for (std::int64_t t = -t_prime; t < 0; ++t) {
      std::uint64_t h = 0x243f6a8885a308d3ULL;
      for (int v = 0; v < n_; ++v) {
        marks[v] = mark_at(seed_, p_, t, v) ? 1 : 0;
        props[v] = marks[v] ? proposal_at(seed_, t, v, csp_) : 0;
        h = rng::mix(h ^ ((std::uint64_t(marks[v]) << 8) | props[v]));
      }
      for (int cid = 0; cid < csp_.num_constraints(); ++cid) {
        thr[cid] = threshold_at(seed_, t, cid);
        h = rng::mix(h ^ std::bit_cast<std::uint64_t>(thr[cid]));
      }
      auto [it, inserted] = rand_hash_.try_emplace(t, h);
      if (!inserted && it->second != h)
        throw std::logic_error("engine: step randomness changed between stages");
      for (int cid = 0; cid < csp_.num_constraints(); ++cid) {
        const Constraint& c = csp_.constraint(cid);
        const int mm = static_cast<int>(c.members.size());
        scratch_states_.assign(mm, 0);
        scratch_marks_.assign(mm, 0);
        scratch_props_.assign(mm, 0);
        for (int j = 0; j < mm; ++j) {
          scratch_states_[j] = ref[c.members[j]];
          scratch_marks_[j] = marks[c.members[j]];
          scratch_props_[j] = props[c.members[j]];
        }
        tri[cid] =
            rules_.constraint_info(c, scratch_states_, scratch_marks_, scratch_props_, thr[cid]);
      }
      for (int v = 0; v < n_; ++v) {
        if (!marks[v]) continue;
        auto cons = csp_.constraints_of(v);
        scratch_cinfo_.clear();
        for (int cid : cons) scratch_cinfo_.push_back(tri[cid]);
        ref[v] = rules_.update(v, ref[v], props[v], scratch_cinfo_);
      }
    }
    for (int v = 0; v < n_; ++v) {
      if (dist_[v] == 0 && state_[v] != ref[v])
        throw std::logic_error("engine: boundary state disagrees with reference replay");
      if (coalesced_[v] &&
          (!rules_.settled(ref[v]) || rules_.output_label(ref[v]) != output_[v]))
        throw std::logic_error("engine: finalized label not reproduced by longer stage");
    }
    for (int v = 0; v < n_; ++v)
      if (!coalesced_[v] && dist_[v] == 0 && rules_.settled(state_[v])) {
        coalesced_[v] = 1;
        output_[v] = static_cast<std::uint8_t>(rules_.output_label(state_[v]));
      }
  }

  const CspInstance& csp_;
  const Graph& g_;
  const StepRules& rules_;
  Network net_;
  std::uint64_t seed_;
  double p_;
  int n_;

  int idbits_ = 0, cidbits_ = 0, lbits_ = 0, echo_bits_ = 0;
  bool all_star_ = true, echo_needs_cid_ = false;
  std::vector<char> star_;
  std::vector<std::vector<int>> hub_cons_;

  std::vector<char> coalesced_;
  Labeling output_;

  std::vector<std::int64_t> dist_;
  std::vector<char> active_, flood_pending_;
  std::vector<std::uint64_t> state_;
  std::vector<std::uint8_t> prev_mark_, prev_prop_, cur_mark_, cur_prop_;

  std::vector<int> adj_off_;
  std::vector<std::uint64_t> rec_state_;
  std::vector<std::uint8_t> rec_mark_, rec_prop_;
  std::vector<std::int64_t> rec_stamp_;

  std::vector<int> cof_off_;
  std::vector<std::uint8_t> cinfo_;
  std::vector<std::int64_t> cinfo_stamp_;

  std::int64_t step_id_ = 0, cur_t_ = 0, tp_ = 0, radius_ = 0;
  std::int64_t upd_i_ = 0, upd_stamp_ = -1, echo_drain_stamp_ = -1;

  std::vector<std::unordered_map<int, Rec>> relay_store_;
  std::vector<std::vector<std::pair<int, Rec>>> relay_out_;
  std::vector<std::vector<std::pair<int, std::uint8_t>>> echo_out_;
  std::vector<std::unordered_set<int>> rec_seen_, echo_seen_;

  std::unordered_map<std::int64_t, std::uint64_t> rand_hash_;

  std::vector<std::uint64_t> scratch_states_;
  std::vector<std::uint8_t> scratch_marks_, scratch_props_, scratch_cinfo_;
};

// Coupled top/bottom trajectories for a monotone chain; the low byte holds
// the bottom label, the next byte the top label.
class MonotonePairRules : public StepRules {
 public:
  explicit MonotonePairRules(const CspInstance& csp) : csp_(&csp) {}

  std::uint64_t initial_state(int /*v*/) const override {
    return (std::uint64_t(csp_->num_labels() - 1) << 8) | 0;
  }
  bool settled(std::uint64_t s) const override { return (s >> 8) == (s & 0xff); }
  int output_label(std::uint64_t s) const override { return static_cast<int>(s & 0xff); }
  int state_bits() const override {
    return 2 * std::max(1, int(std::bit_width(std::uint32_t(csp_->num_labels() - 1))));
  }

  std::uint8_t constraint_info(const Constraint& c,
                               std::span<const std::uint64_t> member_states,
                               std::span<const std::uint8_t> member_marks,
                               std::span<const std::uint8_t> member_proposals,
                               double u) const override {
    const std::size_t mm = member_states.size();
    std::vector<std::uint8_t> top(mm), bot(mm);
    for (std::size_t i = 0; i < mm; ++i) {
      top[i] = static_cast<std::uint8_t>(member_states[i] >> 8);
      bot[i] = static_cast<std::uint8_t>(member_states[i] & 0xff);
    }
    double q_top = filter_pass_probability(*csp_, c, top, member_proposals, member_marks);
    double q_bot = filter_pass_probability(*csp_, c, bot, member_proposals, member_marks);
    return static_cast<std::uint8_t>((u < q_top ? 1 : 0) | (u < q_bot ? 2 : 0));
  }

  std::uint64_t update(int /*v*/, std::uint64_t state, std::uint8_t proposal,
                       std::span<const std::uint8_t> cinfo) const override {
    bool pass_top = true, pass_bot = true;
    for (std::uint8_t ci : cinfo) {
      pass_top &= (ci & 1) != 0;
      pass_bot &= (ci & 2) != 0;
    }
    std::uint64_t top = state >> 8, bot = state & 0xff;
    if (pass_top) top = proposal;
    if (pass_bot) bot = proposal;
    return (top << 8) | bot;
  }

 private:
  const CspInstance* csp_;
};

}  // namespace

SampleReport cftp_sample(const CspInstance& csp, const Graph& g, NetworkMode mode,
                         std::uint64_t seed, double p, int max_stages,
                         const StepRules* rules) {
  SetRules fallback(csp);
  const StepRules& r = rules ? *rules : static_cast<const StepRules&>(fallback);
  CftpEngine engine(csp, g, mode, seed, p, r);
  return engine.run(max_stages);
}

SampleReport monotone_cftp_ising(const Graph& g, const Rational& beta, std::uint64_t seed,
                                 double p, int max_stages) {
  if (beta <= 1)
    throw std::invalid_argument("monotone ising: beta must exceed 1 (ferromagnetic)");
  CspInstance csp = make_ising(g, beta);
  MonotonePairRules rules(csp);
  CftpEngine engine(csp, g, NetworkMode::local(), seed, p, rules);
  return engine.run(max_stages);
}

}  // namespace exsamp
