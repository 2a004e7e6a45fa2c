#include "orbitcert/czindex.hpp"

#include <cmath>

namespace orbitcert {

const DMat<4, 4>& quat_I() {
    static DMat<4, 4> m = [] {
        DMat<4, 4> r{};
        r(0, 2) = 1; r(1, 3) = 1; r(2, 0) = -1; r(3, 1) = -1;
        return r;
    }();
    return m;
}
const DMat<4, 4>& quat_J() {
    static DMat<4, 4> m = [] {
        DMat<4, 4> r{};
        r(0, 1) = 1; r(1, 0) = -1; r(2, 3) = -1; r(3, 2) = 1;
        return r;
    }();
    return m;
}
const DMat<4, 4>& quat_K() {
    static DMat<4, 4> m = [] {
        DMat<4, 4> r{};
        r(0, 3) = -1; r(1, 2) = 1; r(2, 1) = -1; r(3, 0) = 1;
        return r;
    }();
    return m;
}

const IMat4& omega4() {
    static IMat4 m = [] {
        IMat4 r = to_interval(quat_I());
        for (auto& e : r.e) e = -e;
        return r;
    }();
    return m;
}
const IMat2& omega2() {
    static IMat2 m = [] {
        IMat2 r;
        r(0, 1) = Interval(1.0);
        r(1, 0) = Interval(-1.0);
        return r;
    }();
    return m;
}

Frame frame_at(const Params& p, const LCState& x) {
    IVec4 g = grad_K(p, x);
    Interval n2 = norm2_sq(g);
    if (!(n2.lo > 0.0))
        throw DomainError("frame_at: |grad K|^2 enclosure touches zero");
    Interval n = sqrt_i(n2);
    IVec4 jg = to_interval(quat_J()) * g;
    IVec4 kg = to_interval(quat_K()) * g;
    Frame f;
    for (int i = 0; i < 4; ++i) {
        f.U[i] = jg[i] / n;
        f.V[i] = kg[i] / n;
    }
    return f;
}

IMat2 reduced_monodromy(const Params& p, const IVec4& x0, const IVec4& xt, const IMat4& M) {
    Frame f0 = frame_at(p, LCState(x0));
    Frame ft = frame_at(p, LCState(xt));
    IVec4 mu0 = M * f0.U;
    IVec4 mv0 = M * f0.V;
    IVec4 ou = omega4() * mu0;
    IVec4 ov = omega4() * mv0;
    Interval a = dot(ft.U, ou), b = dot(ft.U, ov);
    Interval c = dot(ft.V, ou), d = dot(ft.V, ov);
    // Omega2^T [[a, b], [c, d]] = [[-c, -d], [a, b]]
    IMat2 psi;
    psi(0, 0) = -c;
    psi(0, 1) = -d;
    psi(1, 0) = a;
    psi(1, 1) = b;
    return psi;
}

IMat2 rho(const IMat2& psi) {
    Interval pq = psi(0, 0) + psi(1, 1);
    Interval qq = psi(0, 1) - psi(1, 0);
    Interval n2 = sqr(pq) + sqr(qq);
    if (!(n2.lo > 0.0))
        throw IndeterminateError("rho: (a+d)^2 + (b-c)^2 enclosure touches zero");
    Interval n = sqrt_i(n2);
    IMat2 r;
    r(0, 0) = pq / n;
    r(0, 1) = qq / n;
    r(1, 0) = -qq / n;
    r(1, 1) = pq / n;
    return r;
}

namespace {

bool in_half_plane(int k, const Interval& x, const Interval& y) {
    switch (k & 3) {
    case 0: return x.strictly_positive();
    case 1: return y.strictly_positive();
    case 2: return x.strictly_negative();
    default: return y.strictly_negative();
    }
}

} // namespace

void HalfPlaneLift::push(const IMat2& rho_enc) {
    Interval x = rho_enc(0, 0);
    Interval y = rho_enc(1, 0);
    if (!started_) {
        if (!in_half_plane(0, x, y))
            throw IndeterminateError("half-plane lift: initial window not in U1");
        started_ = true;
        m_ = 0;
    } else if (in_half_plane(m_, x, y)) {
        // stay
    } else if (in_half_plane(m_ + 1, x, y)) {
        ++m_;
    } else if (in_half_plane(m_ - 1, x, y)) {
        --m_;
    } else {
        throw IndeterminateError("half-plane lift: window not in an adjacent half-plane");
    }
    trail_.push_back((m_ & 3) + 1);
    x_ = x;
    y_ = y;
}

NondegVerdict nondegeneracy_from(const Interval& trace) {
    if (trace.contains(2.0))
        throw IndeterminateError("nondegeneracy: trace enclosure contains 2");
    NondegVerdict v;
    v.trace = trace;
    v.nondegenerate = true;
    if (trace.hi < 2.0 && trace.lo > -2.0) v.subtype = "elliptic";
    else if (trace.lo > 2.0) v.subtype = "positive-hyperbolic";
    else if (trace.hi < -2.0) v.subtype = "negative-hyperbolic";
    else v.subtype = ""; // straddles -2: sign of tr - 2 still decided
    return v;
}

IndexCertificate extract_index(const HalfPlaneLift& lift, const Interval& trace_final) {
    IndexCertificate cert;
    cert.trace = trace_final;
    cert.half_plane_trail = lift.trail();
    if (trace_final.contains(2.0))
        throw IndeterminateError("cz extraction: trace enclosure contains 2");
    cert.nondegenerate = true;
    const bool odd = trace_final.hi < 2.0; // tr < 2: odd index, tr > 2: even

    int m = lift.counter();
    Interval x = lift.last_x(), y = lift.last_y();

    // quadrant sharpening when the second coordinate has strict sign:
    // theta in (a, a+1) * pi/2
    int a = 0;
    bool quadrant = false;
    int sx = x.strictly_positive() ? 1 : (x.strictly_negative() ? -1 : 0);
    int sy = y.strictly_positive() ? 1 : (y.strictly_negative() ? -1 : 0);
    if (sx != 0 && sy != 0) {
        int q = (sx > 0) ? (sy > 0 ? 0 : 3) : (sy > 0 ? 1 : 2);
        for (int cand : {m - 1, m}) {
            if (((cand % 4) + 4) % 4 == q) {
                a = cand;
                quadrant = true;
                break;
            }
        }
    }

    // candidate index k of the required parity with the theta/pi window
    // inside (k-1, k+1)
    int k_lo, k_hi;
    if (quadrant) {
        // theta/pi in (a/2, (a+1)/2): k in [ceil((a+1)/2)-1, floor(a/2)+1]
        k_lo = static_cast<int>(std::ceil((a + 1) / 2.0)) - 1;
        k_hi = static_cast<int>(std::floor(a / 2.0)) + 1;
    } else {
        // theta/pi in ((m-1)/2, (m+1)/2)
        k_lo = static_cast<int>(std::ceil((m + 1) / 2.0)) - 1;
        k_hi = static_cast<int>(std::floor((m - 1) / 2.0)) + 1;
    }
    int found = 0, k_sel = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        if ((((k % 2) + 2) % 2) == (odd ? 1 : 0)) {
            k_sel = k;
            ++found;
        }
    }
    if (found != 1)
        throw IndeterminateError("cz extraction: parity-constrained index not unique");
    cert.index = k_sel;

    Interval half_pi = pi_i() * Interval(0.5);
    if (quadrant) cert.theta_final = hull(Interval(a) * half_pi, Interval(a + 1) * half_pi);
    else cert.theta_final = hull(Interval(m - 1) * half_pi, Interval(m + 1) * half_pi);
    return cert;
}

namespace {

// Walk the flow over [0, sup T0], pushing rho windows into the lift (when
// present) and hull-accumulating the state/monodromy slice over [T0].
struct WalkResult {
    IVec4 slice_x{};
    IMat4 slice_M{};
    bool have_slice = false;
};

WalkResult walk_windows(const LCSystem& sys, Flow<4>& flow, const IVec4& x0,
                        const Interval& T0, HalfPlaneLift* lift, int max_halvings) {
    WalkResult res;
    int halvings = 0;
    double h_cap = 0.0; // 0: adaptive
    while (flow.time().hi < T0.hi) {
        Flow<4> backup = flow;
        double req = h_cap;
        {
            double remaining = T0.hi - flow.time().hi;
            if (req <= 0 || remaining < req) req = remaining * (1 + 1e-12);
            if (req > flow.options().h_max) req = 0.0;
        }
        Interval t_before = flow.time();
        TubeStep<4> st;
        try {
            st = flow.step(req > 0 ? req : 0.0);
        } catch (const BlowupError&) {
            throw IndeterminateError("cz walk: integrator could not continue");
        }
        bool ok = true;
        std::string why;
        try {
            if (lift) {
                IMat2 psi = reduced_monodromy(sys.params, x0, st.q, st.M);
                lift->push(rho(psi));
            }
        } catch (const IndeterminateError& e) {
            ok = false;
            why = e.what();
        } catch (const DomainError& e) {
            ok = false;
            why = e.what();
        }
        if (!ok) {
            if (++halvings > max_halvings)
                throw IndeterminateError(std::string("cz walk: window refinement cap: ") + why);
            flow = backup;
            double h_used = st.t.hi - st.t.lo;
            h_cap = 0.5 * h_used;
            continue;
        }
        h_cap = 0.0;

        // accumulate the [T0] slice from overlapping windows
        if (st.t.hi > T0.lo) {
            Interval dt = T0 - t_before;
            Interval dt_clip;
            double h_used = flow.last_step_size();
            if (intersect(dt, Interval(0.0, h_used), dt_clip)) {
                IVec4 xs = flow.eval_window(dt_clip);
                IMat4 ms = flow.eval_mono_window(dt_clip);
                if (!res.have_slice) {
                    res.slice_x = xs;
                    res.slice_M = ms;
                    res.have_slice = true;
                } else {
                    res.slice_x = hull(res.slice_x, xs);
                    res.slice_M = hull(res.slice_M, ms);
                }
            }
        }
    }
    if (!res.have_slice)
        throw IndeterminateError("cz walk: period slice not covered");
    return res;
}

} // namespace

Interval reduced_trace(const LCSystem& sys, const IVec4& x0, const Interval& T,
                       const OdeOptions& opts) {
    Flow<4> flow(&sys.field4, &sys.jac4, x0, opts);
    WalkResult w = walk_windows(sys, flow, x0, T, nullptr, 0);
    IMat2 psi = reduced_monodromy(sys.params, x0, w.slice_x, w.slice_M);
    return trace(psi);
}

NondegVerdict nondegeneracy(const LCSystem& sys, const IVec4& x0, const Interval& T0,
                            const CzOptions& opts) {
    return nondegeneracy_from(reduced_trace(sys, x0, T0, opts.ode));
}

IndexCertificate cz_index(const LCSystem& sys, const IVec4& x0, const Interval& T0,
                          const CzOptions& opts) {
    Flow<4> flow(&sys.field4, &sys.jac4, x0, opts.ode);
    HalfPlaneLift lift;
    // t = 0 window: Psi(0) = Id up to enclosure width
    {
        IMat2 psi0 = reduced_monodromy(sys.params, x0, x0, identity_i<4>());
        lift.push(rho(psi0));
    }
    WalkResult w = walk_windows(sys, flow, x0, T0, &lift, opts.max_step_halvings);
    IMat2 psi_fin = reduced_monodromy(sys.params, x0, w.slice_x, w.slice_M);
    lift.push(rho(psi_fin));
    IndexCertificate cert = extract_index(lift, trace(psi_fin));
    return cert;
}

} // namespace orbitcert
