#pragma once

#include "exsamp/graph.hpp"

namespace exsamp::testing {

inline Graph k2() { return Graph::from_edges(2, {{0, 1}}); }
inline Graph p3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }
inline Graph p4() { return Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}); }
inline Graph c4() { return Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
inline Graph c5() { return Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}); }
inline Graph c6() {
  return Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
}
inline Graph c8() {
  return Graph::from_edges(8,
                           {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {0, 7}});
}

}  // namespace exsamp::testing
