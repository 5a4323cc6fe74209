#pragma once

#include <map>

#include "chatter/persistence.hpp"

namespace chatter::oracle {

// Test-only reference implementation of Vietoris-Rips persistence for tiny
// inputs (up to 8 points), independent of the production reduction. It
// enumerates every distinct filtration value, builds the full clique complex
// at each value, obtains persistent Betti numbers from Z2 ranks of cycle and
// boundary spaces (Gaussian elimination on bitmask vectors), and converts
// rank differences into pair multiplicities. Exact; no tolerances.
std::map<int, PersistenceDiagram> brute_force_rips(const DistanceMatrix& dist,
                                                   double max_radius);

}  // namespace chatter::oracle
