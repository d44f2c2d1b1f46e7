#include "exsamp/simnet.hpp"

#include <ostream>

namespace exsamp {

void Network::account(const Message& m, int to) {
  cur_.messages_sent++;
  cur_.max_message_bits = std::max(cur_.max_message_bits, m.bits);
  if (mode_.kind == NetKind::Congest && m.bits > static_cast<std::uint32_t>(mode_.bit_budget))
    cur_.violations++;
  if (trace_)
    *trace_ << cur_.round_index << ',' << m.from << ',' << to << ',' << m.bits << '\n';
}

}  // namespace exsamp
