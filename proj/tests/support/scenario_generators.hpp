#pragma once

#include "microlocal/scencli.hpp"
#include "support/sheaf_generators.hpp"

namespace gen {

using microlocal::scencli::Scenario;

inline Ring random_ring(Rng& rng)
{
    switch (uniform(rng, 0, 3)) {
    case 0: return Ring::rationals();
    case 1: return Ring::prime_field(2);
    case 2: return Ring::prime_field(5);
    default: return Ring::integers();
    }
}

/// A valid (F, φ) scenario of the given geometric kind on a small space,
/// written with explicit stalk and generization tables.
inline Scenario random_sheaf_scenario(Rng& rng, const std::string& kind, const std::string& id)
{
    using namespace microlocal::scencli;
    Space space = small_space(rng);
    Ring ring = random_ring(rng);
    CellSheaf f = random_sheaf(rng, space, ring, {.max_summands = 2});
    GeometrySpec g{describe_space(*space), describe_sheaf(f), std::nullopt, false};
    if (kind != "microsupport")
        g.phi = random_function(rng, *space, -2, 2).values;
    Scenario s;
    s.id = id;
    s.kind = kind;
    s.ring = ring.name();
    s.payload = g;
    return s;
}

} // namespace gen
