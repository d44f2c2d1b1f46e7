#include <sstream>

#include "doctest.h"
#include "exsamp/simnet.hpp"
#include "helpers.hpp"

using namespace exsamp;
using namespace exsamp::testing;

namespace {

Message msg(std::uint8_t tag, std::uint32_t bits, std::uint64_t a = 0) {
  Message m;
  m.tag = tag;
  m.bits = bits;
  m.a = a;
  return m;
}

}  // namespace

TEST_SUITE("simnet") {
  TEST_CASE("silent round records zeros") {
    Graph g = k2();
    Network net(g, NetworkMode::local());
    RoundStats s = net.run_round([](int, std::span<const Message>, Network::Outbox&) {});
    CHECK(s.messages_sent == 0);
    CHECK(s.max_message_bits == 0);
    CHECK(s.violations == 0);
    CHECK(s.round_index == 0);
  }

  TEST_CASE("one-bit exchange on K2") {
    Graph g = k2();
    Network net(g, NetworkMode::local());
    RoundStats s = net.run_round([](int v, std::span<const Message>, Network::Outbox& out) {
      out.send(1 - v, msg(3, 1, std::uint64_t(v)));
    });
    CHECK(s.messages_sent == 2);
    CHECK(s.max_message_bits == 1);

    // Delivery happens at round end only.
    int seen = 0;
    net.run_round([&](int v, std::span<const Message> inbox, Network::Outbox&) {
      REQUIRE(inbox.size() == 1);
      CHECK(inbox[0].from == 1 - v);
      CHECK(inbox[0].tag == 3);
      CHECK(inbox[0].a == std::uint64_t(1 - v));
      ++seen;
    });
    CHECK(seen == 2);

    // Inboxes hold only the previous round's messages.
    net.run_round([](int, std::span<const Message> inbox, Network::Outbox&) {
      CHECK(inbox.empty());
    });
  }

  TEST_CASE("congest budget violations are counted, not dropped") {
    NetworkMode mode{NetKind::Congest, 8};
    Graph g = k2();
    Network net(g, mode);
    net.run_round([](int v, std::span<const Message>, Network::Outbox& out) {
      if (v == 0) out.send(1, msg(0, 16));
    });
    RoundStats s = net.log().back();
    CHECK(s.violations == 1);
    net.run_round([](int v, std::span<const Message> inbox, Network::Outbox&) {
      if (v == 1) CHECK(inbox.size() == 1);
    });
    Certification c = net.certify();
    CHECK(!c.congest_ok);
    CHECK(c.peak_bits == 16);
    CHECK(c.total_rounds == 2);
    CHECK(c.total_messages == 1);
  }

  TEST_CASE("empty log certifies clean") {
    Graph g = p3();
    Network net(g, NetworkMode::congest(3));
    Certification c = net.certify();
    CHECK(c.congest_ok);
    CHECK(c.total_rounds == 0);
    CHECK(c.total_messages == 0);
    CHECK(c.peak_bits == 0);
  }

  TEST_CASE("non-neighbor sends throw") {
    Graph g = p3();
    Network net(g, NetworkMode::local());
    CHECK_THROWS_AS(net.run_round([](int v, std::span<const Message>, Network::Outbox& out) {
      if (v == 0) out.send(2, msg(0, 1));
    }),
                    std::logic_error);
  }

  TEST_CASE("default congest budget") {
    CHECK(NetworkMode::congest(64).bit_budget == 64 + 2 * 6);
    CHECK(NetworkMode::congest(65).bit_budget == 64 + 2 * 7);
    CHECK(NetworkMode::congest(2).bit_budget == 64 + 2 * 1);
  }

  TEST_CASE("trace emits csv rows") {
    Graph g = k2();
    Network net(g, NetworkMode::local());
    std::ostringstream os;
    net.set_trace(&os);
    net.run_round([](int v, std::span<const Message>, Network::Outbox& out) {
      if (v == 0) out.send(1, msg(0, 5));
    });
    CHECK(os.str() == "0,0,1,5\n");
  }

  TEST_CASE("execution order within a round does not change delivery") {
    Graph g = c4();
    auto program = [](int v, std::span<const Message>, Network::Outbox& out) {
      out.send((v + 1) % 4, msg(1, 2, std::uint64_t(v * 10)));
    };
    Network a(g, NetworkMode::local()), b(g, NetworkMode::local());
    b.set_order({3, 1, 0, 2});
    a.run_round(program);
    b.run_round(program);
    auto collect = [](Network& net) {
      std::vector<std::uint64_t> got(4, ~0ull);
      net.run_round([&](int v, std::span<const Message> inbox, Network::Outbox&) {
        REQUIRE(inbox.size() == 1);
        got[v] = inbox[0].a;
      });
      return got;
    };
    CHECK(collect(a) == collect(b));
  }
}
