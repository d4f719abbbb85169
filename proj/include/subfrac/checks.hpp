#pragma once

#include "subfrac/asymptotics.hpp"

namespace subfrac {

// Group law + gauge axiom sweeps (exact-arithmetic tolerances).
std::vector<Verdict> geometrySuite(const CarnotGroup& g, HomogeneousGauge& ng,
                                   std::size_t samples, std::uint64_t seed,
                                   double tol = 1e-12);

// Haar invariance/scaling, |B(0,r)| = r^Q C_b, sphere/radial consistency.
std::vector<Verdict> measureSuite(const CarnotGroup& g, const HomogeneousGauge& ng,
                                  const QuadratureSpec& spec);

// (phi1)/(phi2) on sampled pairs, Delta_2 bound, improved splitting constant,
// inverse round trip, Young's inequality.
std::vector<Verdict> orliczSuite(const OrliczFunction& phi, std::size_t pairs,
                                 std::uint64_t seed);

}  // namespace subfrac
