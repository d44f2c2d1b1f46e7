#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "exsamp/graph.hpp"

// Round-synchronous message passing.  Each round every vertex program reads
// its inbox and writes messages addressed to graph neighbors only; delivery
// is atomic at round end.  Per-message bit counts are recorded so a run can
// be certified against a CONGEST budget.

namespace exsamp {

enum class NetKind { Local, Congest };

struct NetworkMode {
  NetKind kind = NetKind::Local;
  int bit_budget = 0;  // per message per round, CONGEST only

  static NetworkMode local() { return {NetKind::Local, 0}; }
  // Default budget: a vertex id, a distance counter, and a constant payload.
  static NetworkMode congest(int n) {
    int lg = 1;
    while ((1 << lg) < n) ++lg;
    return {NetKind::Congest, 64 + 2 * lg};
  }
};

struct Message {
  int from = -1;
  std::uint8_t tag = 0;
  std::uint32_t bits = 0;
  std::uint64_t a = 0, b = 0;
  std::vector<std::uint64_t> ext;  // only used by wide LOCAL-mode messages
};

struct RoundStats {
  std::int64_t round_index = 0;
  std::int64_t messages_sent = 0;
  std::uint32_t max_message_bits = 0;
  std::int64_t violations = 0;
};

struct Certification {
  bool congest_ok = true;
  std::int64_t total_rounds = 0;
  std::uint32_t peak_bits = 0;
  std::int64_t total_messages = 0;
};

class Network {
 public:
  Network(const Graph& g, NetworkMode mode) : g_(&g), mode_(mode) {
    if (mode.kind == NetKind::Congest) {
      int lg = 1;
      while ((1 << lg) < g.vertex_count()) ++lg;
      if (mode.bit_budget < lg)
        throw std::invalid_argument("network: CONGEST budget below ceil(log2 n)");
    }
    inbox_.resize(g.vertex_count());
    next_.resize(g.vertex_count());
  }

  class Outbox {
   public:
    void send(int to, Message m) {
      if (!net_->g_->has_edge(from_, to))
        throw std::logic_error("network: message addressed to non-neighbor " +
                               std::to_string(to) + " from " + std::to_string(from_));
      m.from = from_;
      net_->account(m, to);
      net_->next_[to].push_back(std::move(m));
    }

   private:
    friend class Network;
    Network* net_;
    int from_;
  };

  // program(v, inbox, outbox); executes all vertices, then delivers.
  template <class F>
  RoundStats run_round(F&& program) {
    cur_ = RoundStats{};
    cur_.round_index = static_cast<std::int64_t>(log_.size());
    Outbox out;
    out.net_ = this;
    const int n = g_->vertex_count();
    for (int i = 0; i < n; ++i) {
      int v = order_.empty() ? i : order_[i];
      out.from_ = v;
      program(v, std::span<const Message>(inbox_[v]), out);
    }
    for (int v = 0; v < n; ++v) {
      inbox_[v].clear();
      std::swap(inbox_[v], next_[v]);
    }
    log_.push_back(cur_);
    return cur_;
  }

  const std::vector<RoundStats>& log() const { return log_; }
  NetworkMode mode() const { return mode_; }

  Certification certify() const {
    Certification c;
    for (const RoundStats& r : log_) {
      c.total_rounds++;
      c.total_messages += r.messages_sent;
      c.peak_bits = std::max(c.peak_bits, r.max_message_bits);
      if (r.violations > 0) c.congest_ok = false;
    }
    return c;
  }

  // Test hook: execute vertex programs in a custom order within each round.
  // Results must not depend on it.
  void set_order(std::vector<int> order) { order_ = std::move(order); }

  // Optional CSV trace sink: "round,sender,receiver,bits".
  void set_trace(std::ostream* os) { trace_ = os; }

 private:
  friend class Outbox;

  void account(const Message& m, int to);

  const Graph* g_;
  NetworkMode mode_;
  std::vector<std::vector<Message>> inbox_, next_;
  std::vector<RoundStats> log_;
  RoundStats cur_;
  std::vector<int> order_;
  std::ostream* trace_ = nullptr;
};

}  // namespace exsamp
