#pragma once

#include <array>

#include "orbitcert/interval.hpp"
#include "orbitcert/linalg.hpp"

namespace orbitcert {

// Mass parameter and Jacobi energy, both enclosures.
struct Params {
    Interval mu;
    Interval c;

    Params(const Interval& mu_, const Interval& c_) : mu(mu_), c(c_) {
        if (mu.lo < 0.0 || mu.hi > 1.0) throw DomainError("Params: mu must lie in [0,1]");
    }
};

// Levi-Civita phase-space point enclosure (z1, z2; w1, w2).
struct LCState {
    Interval z1, z2, w1, w2;

    LCState() = default;
    LCState(const Interval& z1_, const Interval& z2_, const Interval& w1_, const Interval& w2_)
        : z1(z1_), z2(z2_), w1(w1_), w2(w2_) {}
    explicit LCState(const IVec4& v) : z1(v[0]), z2(v[1]), w1(v[2]), w2(v[3]) {}

    IVec4 vec() const { return {z1, z2, w1, w2}; }
};

struct AugmentedState {
    LCState state;
    Interval action;

    IVec<5> vec() const { return {state.z1, state.z2, state.w1, state.w2, action}; }
};

// --- Hamiltonians and derived fields ---------------------------------------

// Jacobi Hamiltonian of the unregularized rotating problem.
Interval eval_jacobi(const Params& p, const IVec2& q, const IVec2& pmom);

// Levi-Civita Hamiltonian K_{mu,c} and its closed-form derivatives.
Interval eval_K(const Params& p, const LCState& s);
IVec4 grad_K(const Params& p, const LCState& s);
IMat4 hess_K(const Params& p, const LCState& s);

// X_K and the action-augmented field.
IVec4 field_K(const Params& p, const LCState& s);
IVec<5> field_aug(const Params& p, const AugmentedState& s);

// Moser-regularized Hamiltonian pieces (evaluators only, never integrated).
Interval eval_moser_f(const Params& p, const IVec<3>& xi, const IVec<3>& eta);
Interval eval_moser_Q(const Params& p, const IVec<3>& xi, const IVec<3>& eta);

// Sign of L_mu - mu q1 - mu^2 along the orbit: positive = retrograde
// instant, negative = direct instant.
Interval retrograde_margin(const Params& p, const LCState& s);

// First critical energy c1(mu) = -H(L1) by interval Newton on the collinear
// restriction of the effective potential.
Interval critical_energy(const Interval& mu);

// true iff inf c > sup c1(mu) is certified
bool certify_above_critical(const Params& p);

// --- fixed-point loci -------------------------------------------------------

enum class Axis { Plus, Minus };   // C+ (z1-axis) or C- (z2-axis)
enum class Branch { Pos, Neg };    // which sign of the square root

// Closed-form parametrization of C+/C- by the position coordinate.
// With clamp_disc the discriminant is intersected with [0,inf) so that
// intervals touching the locus boundary still evaluate (all true locus
// points remain enclosed).
LCState fixed_locus_param(const Params& p, Axis axis, Branch br, const Interval& coord,
                          bool clamp_disc = false);

// Discriminant of the quadratic defining w on the locus, and its derivative.
Interval locus_disc(const Params& p, Axis axis, const Interval& coord);
Interval locus_disc_prime(const Params& p, Axis axis, const Interval& coord);

// Enclosure of the first positive root of the discriminant (the coordinate
// of the locus boundary point B^i_{mu,c}).
Interval locus_boundary(const Params& p, Axis axis);

// d(w)/d(coord) along the locus branch by implicit differentiation.
Interval locus_dw(const Params& p, Axis axis, Branch br, const Interval& coord);

// --- a priori bounds ---------------------------------------------------------

struct HillBounds {
    Interval z2bound; // certified bound on 2|z|^2 over Sigma_{mu,c}
    Interval wbound;  // certified bound on |w|
};

// Valid for c >= 2.1 and mu within [0, 1/2]; certifies the exclusion point
// of the Hill region before returning.
HillBounds hill_bounds(const Params& p);

} // namespace orbitcert
