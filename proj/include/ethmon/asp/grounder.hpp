#pragma once

#include <cstddef>

#include "ethmon/asp/program.hpp"

namespace ethmon::asp {

struct GroundingLimits {
  std::size_t max_ground_atoms = 100000;
};

/// Instantiates every rule over the atoms that can possibly be derived,
/// found by a positive-body fixpoint. Instances whose positive body can
/// never hold are omitted, which leaves the stable models unchanged.
/// Head instances that would nest deeper than kMaxTermDepth are dropped.
///
/// Rules keep their source order; instances of one rule are sorted by
/// canonical rendering. Throws CapacityError when the number of possible
/// ground atoms or rule instances exceeds the limit.
Program ground_program(const Program& p, const GroundingLimits& limits = {});

}  // namespace ethmon::asp
