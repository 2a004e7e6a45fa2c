#pragma once

#include "orbitcert/dynamics.hpp"
#include "orbitcert/rigorode.hpp"
#include "orbitcert/tape.hpp"

namespace orbitcert {

// Tapes of the Levi-Civita field, its Jacobian, and the action-augmented
// versions, bound to fixed parameter enclosures.
struct LCSystem {
    Params params;
    Tape field4, jac4, field5, jac5;

    explicit LCSystem(const Params& p);

    Flow<4> flow(const IVec4& x0, const OdeOptions& opts) const {
        return Flow<4>(&field4, &jac4, x0, opts);
    }
    Flow<5> flow_aug(const IVec<5>& x0, const OdeOptions& opts) const {
        return Flow<5>(&field5, &jac5, x0, opts);
    }
};

// coordinate indices of the two section functions
inline constexpr int kSectionSm = 0; // S-: z1 = 0
inline constexpr int kSectionSp = 1; // S+: z2 = 0

} // namespace orbitcert
