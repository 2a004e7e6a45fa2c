#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitcert/dynamics.hpp"
#include "orbitcert/lcflow.hpp"
#include "orbitcert/rigorode.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Covering / shooting engine for symmetric periodic orbits: validated covers
// of the fixed-point loci, slope functions at certified first hits,
// existence/uniqueness/nonexistence certificates, and the action-bounded
// exhaustive sweep.
// ---------------------------------------------------------------------------

// Which section carries the certified first transverse hit.
enum class Designation { ToSm, ToSp }; // S-: z1 = 0, S+: z2 = 0

struct LocusInterval {
    Axis axis = Axis::Plus;
    Branch branch = Branch::Pos;
    Interval range{};                 // locus-coordinate range
    std::optional<double> seed{};     // approximate orbit coordinate (midpoint)
    Designation designation = Designation::ToSm;
    bool boundary = false;            // touches the locus boundary (clamped disc)
    bool mirrored = false;            // obtained from the s-symmetry
};

enum class CertKind { Nonexistence, Existence, ExistenceUnique };
enum class Classification { Retrograde, Direct, Indeterminate };

struct NondegRecord {
    Interval trace_half;  // tr Psi over half the LC period
    Interval trace_full;  // tr Psi over the full LC period
    bool nondegenerate = false;
    std::string subtype; // elliptic / pos-hyperbolic / neg-hyperbolic (half-period trace)
};

struct OrbitCertificate {
    CertKind kind = CertKind::Nonexistence;
    LocusInterval locus;
    Designation designation = Designation::ToSm;
    Interval slope;            // slope enclosure over the interval
    int slope_sign_left = 0;   // strict endpoint signs (existence only)
    int slope_sign_right = 0;
    std::optional<int> slope_deriv_sign{};

    Interval first_hit{};      // tau
    Interval half_period{};    // half the LC period
    Interval period{};         // full LC period (4 tau or 2 tau)
    Interval action{};         // augmented action over one LC period
    Classification classification = Classification::Indeterminate;
    int crossing = 0;          // certified crossing number
    std::optional<NondegRecord> nondeg{};
    bool closure_checked = false; // full-period box returned over the start
    IVec4 start_box{};            // locus enclosure the orbit starts from
};

struct CoverOptions {
    OdeOptions ode;            // interval shots
    OdeOptions ode_thin;       // endpoint (thin) shots
    double t_budget = 60.0;    // per-shot time horizon
    int max_intervals = 8000;
    int init_subdiv = 12;
    double seed_halfwidth = 1e-6;
    double min_width = 1e-10;  // subdivision floor -> CoverError
    int threads = 1;

    CoverOptions() {
        ode.tol = 1e-14;
        ode_thin.tol = 1e-15;
    }
};

// First certified transverse crossing of either section; the spec's
// (-)/(+) designation is exactly which one certifies first.
template <std::size_t N>
struct AnyHit {
    int section = -1; // 0: z1 = 0 (S-), 1: z2 = 0 (S+)
    SectionEvent<N> ev;
};

AnyHit<4> first_any_hit(Flow<4>& flow, double t_budget, bool want_mono);
AnyHit<5> first_any_hit(Flow<5>& flow, double t_budget, bool want_mono);

// Lift a locus interval to its phase-space box.
IVec4 lift_locus(const Params& p, const LocusInterval& I);

// Slope enclosure of the designated first-hit map over the whole interval.
Interval slope(const LCSystem& sys, const LocusInterval& I, const CoverOptions& opts);

// Build a validated cover of the positive branch of the locus over
// [-B, B]; every returned interval carries a certified designation.  The
// other branch is the image under s: (z,w) -> (-z,-w) and is appended with
// the mirrored flag.
std::vector<LocusInterval> build_cover(const LCSystem& sys, Axis axis,
                                       const std::vector<double>& seeds,
                                       const CoverOptions& opts);

// Certify one interval: nonexistence (strict slope sign), or existence
// through endpoint bracketing, plus local uniqueness through the slope
// derivative; existence certificates carry period, action, classification,
// crossing number and non-degeneracy data.
OrbitCertificate certify(const LCSystem& sys, const LocusInterval& I, const CoverOptions& opts);

struct CoverCertification {
    std::vector<LocusInterval> cover;          // final cover (after splits)
    std::vector<OrbitCertificate> certificates; // one per cover interval
    bool conclusive = false;
};

// Driver: build, certify, and subdivide on indeterminate slopes until every
// interval of the cover is conclusive (or budgets run out -> CoverError).
CoverCertification certify_cover(const LCSystem& sys, Axis axis,
                                 const std::vector<double>& seeds, const CoverOptions& opts);

// ---------------------------------------------------------------------------
// action-bounded sweep
// ---------------------------------------------------------------------------

struct ActionStage {
    int j = 0;            // return index (0 = possibly composite first map)
    Interval slope;       // home-locus slope at this return
    Interval action;      // accumulated action at this return
    bool zero_candidate = false;
};

struct ActionIntervalReport {
    LocusInterval locus;
    std::vector<ActionStage> stages;
    bool conclusive = false;
    bool distinguished = false; // carries a bracketed zero (a known orbit)
    int j_stop = -1;            // first stage with action > A0/2
};

struct ActionSweep {
    Axis axis = Axis::Plus;
    Interval bound;  // A0
    std::vector<ActionIntervalReport> reports;
    bool conclusive = false;
};

// Iterated returns to the home section with accumulated action until it
// exceeds A0/2; every R-symmetric orbit of action < A0 through this locus
// appears as a slope zero of some stage.
ActionSweep action_search(const LCSystem& sys, Axis axis, const Interval& A0,
                          const std::vector<double>& seeds, const CoverOptions& opts);

} // namespace orbitcert
