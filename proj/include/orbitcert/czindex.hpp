#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitcert/dynamics.hpp"
#include "orbitcert/lcflow.hpp"
#include "orbitcert/linalg.hpp"
#include "orbitcert/rigorode.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Validated transverse non-degeneracy and Conley-Zehnder index: quaternionic
// frame, reduced monodromy in Sp(2), retraction to U(1), half-plane angle
// lifting with integer quarter-turn counters, parity-constrained extraction.
// ---------------------------------------------------------------------------

// quaternionic matrices fixed as printed; X_K = I grad K
const DMat<4, 4>& quat_I();
const DMat<4, 4>& quat_J();
const DMat<4, 4>& quat_K();

// symplectic form matrices: Omega4 = -I (for dw ^ dz), Omega2 standard
const IMat4& omega4();
const IMat2& omega2();

// symplectic frame [U V] of the complement, U = J grad K / |grad K|,
// V = K grad K / |grad K|
struct Frame {
    IVec4 U, V;
};
Frame frame_at(const Params& p, const LCState& x);

// Psi(t) = Omega2^T F(x_t)^T Omega4 M(t) F(x_0)
IMat2 reduced_monodromy(const Params& p, const IVec4& x0, const IVec4& xt, const IMat4& M);

// explicit retraction to U(1):
// [[a+d, b-c], [-(b-c), a+d]] / sqrt((a+d)^2 + (b-c)^2)
IMat2 rho(const IMat2& psi);

// angle lifting through the four open half-planes; stores only integer
// quarter-turn counters plus the final enclosure
class HalfPlaneLift {
  public:
    // advance by one window enclosure of rho(Psi); throws IndeterminateError
    // on straddles or jumps
    void push(const IMat2& rho_enc);
    int counter() const { return m_; }
    const std::vector<int>& trail() const { return trail_; }
    // circle-point enclosure of the last pushed window
    Interval last_x() const { return x_; }
    Interval last_y() const { return y_; }

  private:
    bool started_ = false;
    int m_ = 0;
    std::vector<int> trail_;
    Interval x_{}, y_{};
};

struct NondegVerdict {
    Interval trace;
    bool nondegenerate = false;
    std::string subtype; // "elliptic", "positive-hyperbolic", "negative-hyperbolic", ""
};

// verdict from a trace enclosure; trace enclosing 2 is Indeterminate, not
// "degenerate"
NondegVerdict nondegeneracy_from(const Interval& trace);

struct IndexCertificate {
    Interval trace;             // tr Psi(T0)
    Interval theta_final;       // lifted angle window at T0 (radians)
    int index = 0;
    bool nondegenerate = false;
    std::vector<int> half_plane_trail; // tags 1..4
    int cover_multiple = 1;            // 1 = simple, 2 = double cover
    std::optional<int> moser_index_cited; // derived field, set by callers
};

// extraction from a completed lift: the unique integer of the parity forced
// by the trace sign within distance one of theta/pi
IndexCertificate extract_index(const HalfPlaneLift& lift, const Interval& trace_final);

struct CzOptions {
    OdeOptions ode;
    int max_step_halvings = 40; // per-window refinement cap
    CzOptions() { ode.tol = 1e-14; }
};

// orbit-level drivers (integrate internally, refine straddling windows by
// halving the step)
IndexCertificate cz_index(const LCSystem& sys, const IVec4& x0, const Interval& T0,
                          const CzOptions& opts);
NondegVerdict nondegeneracy(const LCSystem& sys, const IVec4& x0, const Interval& T0,
                            const CzOptions& opts);

// reduced monodromy trace over [T] from a fresh integration
Interval reduced_trace(const LCSystem& sys, const IVec4& x0, const Interval& T,
                       const OdeOptions& opts);

} // namespace orbitcert
