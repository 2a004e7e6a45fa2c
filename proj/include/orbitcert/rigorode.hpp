#pragma once

#include <functional>
#include <string>
#include <vector>

#include "orbitcert/errors.hpp"
#include "orbitcert/interval.hpp"
#include "orbitcert/linalg.hpp"
#include "orbitcert/tape.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Rigorous initial-value solver: Taylor steps of configurable order with a
// validated Picard remainder, Lohner doubleton representation of the flowing
// set (point + C.[r0] + B.[r], B kept near-orthogonal by QR), and the
// variational equation propagated alongside for monodromy enclosures.
// ---------------------------------------------------------------------------

struct OdeOptions {
    int order = 18;
    double tol = 1e-15;        // local error scale for the step-size choice
    double h_min = 1e-10;
    double h_max = 0.3;
    double fixed_step = 0.0;   // > 0 disables adaptive stepping
    long max_steps = 2000000;
    int enclosure_tries = 30;
    bool variational = true;   // propagate the monodromy enclosure
};

template <std::size_t N>
struct TubeStep {
    Interval t;        // time window covered by this step
    IVec<N> q;         // state enclosure over the whole window
    IMat<N, N> M;      // monodromy enclosure over the whole window
    IVec<N> q_end;     // endpoint state hull
    IMat<N, N> M_end;  // endpoint monodromy hull
};

template <std::size_t N>
struct Tube {
    IVec<N> x0;
    std::vector<TubeStep<N>> steps;
};

// Lohner doubleton set m + C.[r0] + B.[r]
template <std::size_t N>
struct LohnerSet {
    DVec<N> m{};
    DMat<N, N> C;
    IVec<N> r0{};
    DMat<N, N> B;
    IVec<N> r{};

    static LohnerSet from_box(const IVec<N>& x) {
        LohnerSet s;
        s.C = identity_d<N>();
        s.B = identity_d<N>();
        for (std::size_t i = 0; i < N; ++i) {
            s.m[i] = x[i].mid();
            s.r0[i] = x[i] - Interval(s.m[i]);
            s.r[i] = Interval(0.0);
        }
        return s;
    }

    IVec<N> hull() const {
        IVec<N> h;
        for (std::size_t i = 0; i < N; ++i) {
            Interval acc(m[i]);
            for (std::size_t j = 0; j < N; ++j)
                acc += Interval(C(i, j)) * r0[j] + Interval(B(i, j)) * r[j];
            h[i] = acc;
        }
        return h;
    }
};

// monodromy doubleton D + Q.[S]
template <std::size_t N>
struct MonoSet {
    DMat<N, N> D;
    DMat<N, N> Q;
    IMat<N, N> S;

    static MonoSet identity() {
        MonoSet s;
        s.D = identity_d<N>();
        s.Q = identity_d<N>();
        return s;
    }

    IMat<N, N> hull() const {
        IMat<N, N> h = to_interval(Q) * S;
        for (std::size_t i = 0; i < N * N; ++i) h.e[i] += Interval(D.e[i]);
        return h;
    }
};

// ---------------------------------------------------------------------------
// Flow: drives one trajectory set; exposes the current step's local Taylor
// model so event location can query state/monodromy at interior times.
// ---------------------------------------------------------------------------
template <std::size_t N>
class Flow {
  public:
    // field: N inputs -> N outputs; jac: N inputs -> N*N outputs (row-major).
    // The Jacobian tape is required (the mean-value form needs it even
    // without monodromy output).
    Flow(const Tape* field, const Tape* jac, const IVec<N>& x0, const OdeOptions& opts)
        : field_(field), jac_(jac), opts_(opts), set_(LohnerSet<N>::from_box(x0)),
          mono_(MonoSet<N>::identity()), t_(0.0) {
        if (!jac_) throw DomainError("Flow: Jacobian tape required");
        int cap = opts_.order + 1;
        jets_m_.reset(field_, cap);
        jets_x_.reset(field_, cap);
        jets_w_.reset(field_, cap);
        ajets_x_.reset(jac_, cap);
        ajets_w_.reset(jac_, cap);
    }

    const Interval& time() const { return t_; }
    const LohnerSet<N>& set() const { return set_; }
    const OdeOptions& options() const { return opts_; }
    IVec<N> state_hull() const { return set_.hull(); }
    IMat<N, N> mono_hull() const { return mono_.hull(); }
    long steps_taken() const { return steps_; }

    // State enclosure at time (step base) + dt, dt inside the last step.
    IVec<N> eval_window(const Interval& dt) const {
        IVec<N> r;
        Interval hp = pow_i(dt, opts_.order + 1);
        for (std::size_t i = 0; i < N; ++i) {
            Interval acc = jets_x_.at(static_cast<int>(i), opts_.order);
            for (int k = opts_.order - 1; k >= 0; --k)
                acc = acc * dt + jets_x_.at(static_cast<int>(i), k);
            r[i] = acc + rem_[i] * hp;
        }
        return r;
    }

    // Monodromy enclosure (including history) at (step base) + dt.
    IMat<N, N> eval_mono_window(const Interval& dt) const {
        IMat<N, N> j = jphi_window(dt);
        return j * mono_prev_hull_;
    }

    Interval eval_coord_window(int coord, const Interval& dt) const {
        Interval acc = jets_x_.at(coord, opts_.order);
        for (int k = opts_.order - 1; k >= 0; --k)
            acc = acc * dt + jets_x_.at(coord, k);
        return acc + rem_[coord] * pow_i(dt, opts_.order + 1);
    }

    Interval eval_coord_dot_window(int coord, const Interval& dt) const {
        IVec<N> x = eval_window(dt);
        return eval_field(x)[coord];
    }

    IVec<N> eval_field(const IVec<N>& x) const {
        IVec<N> out;
        eval_tape(*field_, x.data(), out.data(), scratch_);
        return out;
    }

    // One accepted step. h_request > 0 forces the initial trial step size
    // (still subject to enclosure validation shrinking).
    TubeStep<N> step(double h_request = 0.0) {
        if (++steps_ > opts_.max_steps) throw BlowupError("rigorode: step budget exhausted");
        const int p = opts_.order;
        IVec<N> X = set_.hull();

        IVec<N> mpt;
        for (std::size_t i = 0; i < N; ++i) mpt[i] = Interval(set_.m[i]);
        ode_jets(jets_m_, mpt, p);

        // a requested step (horizon landing) never exceeds the adaptive one
        double h_adapt = (opts_.fixed_step > 0) ? opts_.fixed_step : choose_step(p);
        double h = (h_request > 0) ? std::min(h_request, h_adapt) : h_adapt;

        if (h_prev_ > 0 && opts_.fixed_step <= 0 && h_request <= 0)
            h = std::min(h, 1.5 * h_prev_);

        ode_jets(jets_x_, X, p);
        var_coeffs_at(ajets_x_, jets_x_, vx_, p, nullptr);

        // accept/reject: the remainder actually deposited must stay at the
        // tolerance scale, else far-from-point coefficients over the rough
        // enclosure dominate the set growth
        double scale = 1.0;
        for (std::size_t i = 0; i < N; ++i) scale = std::max(scale, std::abs(set_.m[i]));
        IVec<N> W;
        for (;;) {
            W = rough_enclosure(X, h);
            ode_jets(jets_w_, W, p + 1);
            for (std::size_t i = 0; i < N; ++i)
                rem_[i] = jets_w_.at(static_cast<int>(i), p + 1);
            if (opts_.fixed_step > 0) break;
            double hp1 = std::pow(h, p + 1);
            double deposit = 0;
            for (std::size_t i = 0; i < N; ++i)
                deposit = std::max(deposit, rem_[i].width() * hp1);
            if (deposit <= 64.0 * opts_.tol * scale || h <= 2.0 * opts_.h_min) break;
            h *= 0.5;
        }
        h_prev_ = h;

        if (opts_.variational) {
            IMat<N, N> wv = rough_var_enclosure(W, h);
            var_coeffs_at(ajets_w_, jets_w_, vw_, p + 1, &wv);
            mono_prev_hull_ = mono_.hull();
        }

        Interval hI(h);
        Interval hw(0.0, h);

        IVec<N> phim;
        {
            Interval hp1 = pow_i(hI, p + 1);
            for (std::size_t i = 0; i < N; ++i) {
                Interval acc = jets_m_.at(static_cast<int>(i), p);
                for (int k = p - 1; k >= 0; --k) acc = acc * hI + jets_m_.at(static_cast<int>(i), k);
                phim[i] = acc + rem_[i] * hp1;
            }
        }

        IMat<N, N> J = jphi_poly(hI);

        TubeStep<N> rec;
        rec.t = Interval(t_.lo, detail::add_up(t_.hi, h));
        rec.q = eval_window(hw);
        if (opts_.variational) rec.M = eval_mono_window(hw);

        advance_state(phim, J);
        if (opts_.variational) {
            IMat<N, N> jfull = J;
            Interval hp1 = pow_i(hI, p + 1);
            for (std::size_t e = 0; e < N * N; ++e)
                jfull.e[e] += vw_[static_cast<std::size_t>(p) + 1].e[e] * hp1;
            advance_mono(jfull);
        }
        t_ = Interval(detail::add_down(t_.lo, h), detail::add_up(t_.hi, h));
        last_h_ = h;

        rec.q_end = set_.hull();
        if (opts_.variational) rec.M_end = mono_.hull();
        return rec;
    }

    double last_step_size() const { return last_h_; }

    // Restart the set from a box (after a section crossing); the monodromy
    // restarts at the identity, callers compose per-leg derivatives.
    void restart(const IVec<N>& x) {
        set_ = LohnerSet<N>::from_box(x);
        mono_ = MonoSet<N>::identity();
    }

  private:
    static Interval pow_i(const Interval& x, int k) {
        Interval r(1.0);
        for (int i = 0; i < k; ++i) r *= x;
        return r;
    }

    // Taylor coefficients of the solution: x_{k+1} = f_k / (k+1)
    void ode_jets(TapeJets& jets, const IVec<N>& x0, int order) const {
        for (std::size_t i = 0; i < N; ++i) jets.set_input(static_cast<int>(i), 0, x0[i]);
        for (int k = 0; k < order; ++k) {
            jets.forward_order(k);
            for (std::size_t i = 0; i < N; ++i)
                jets.set_input(static_cast<int>(i), k + 1,
                               jets.output(static_cast<int>(i), k) / double(k + 1));
        }
    }

    // V_{k+1} = (sum_i A_i V_{k-i}) / (k+1); v0 == nullptr means identity,
    // otherwise the a-priori variational enclosure (remainder mode).
    void var_coeffs_at(TapeJets& ajets, const TapeJets& state_jets,
                       std::vector<IMat<N, N>>& v, int order, const IMat<N, N>* v0) {
        for (int k = 0; k <= order - 1; ++k) {
            for (std::size_t i = 0; i < N; ++i)
                ajets.set_input(static_cast<int>(i), k, state_jets.at(static_cast<int>(i), k));
            ajets.forward_order(k);
        }
        v.assign(static_cast<std::size_t>(order) + 1, IMat<N, N>{});
        v[0] = v0 ? *v0 : identity_i<N>();
        for (int k = 0; k < order; ++k) {
            IMat<N, N> acc{};
            for (int i = 0; i <= k; ++i) {
                IMat<N, N> a;
                for (std::size_t r = 0; r < N; ++r)
                    for (std::size_t c2 = 0; c2 < N; ++c2)
                        a(r, c2) = ajets.output(static_cast<int>(r * N + c2), i);
                acc = acc + a * v[static_cast<std::size_t>(k - i)];
            }
            for (std::size_t e = 0; e < N * N; ++e)
                v[static_cast<std::size_t>(k) + 1].e[e] = acc.e[e] / double(k + 1);
        }
    }

    double choose_step(int p) const {
        double scale = 1.0;
        for (std::size_t i = 0; i < N; ++i) scale = std::max(scale, std::abs(set_.m[i]));
        double h = opts_.h_max;
        for (int k : {p - 1, p}) {
            double nk = 0;
            for (std::size_t i = 0; i < N; ++i)
                nk = std::max(nk, abs_i(jets_m_.at(static_cast<int>(i), k)).hi);
            if (nk > 0) {
                double hk = std::pow(opts_.tol * scale / nk, 1.0 / k);
                h = std::min(h, 0.9 * hk);
            }
        }
        return std::max(h, opts_.h_min);
    }

    static Interval widen(const Interval& a, double d) { return a + Interval(-d, d); }

    IVec<N> rough_enclosure(const IVec<N>& X, double& h) {
        IVec<N> fx;
        try {
            fx = eval_field(X);
        } catch (const DomainError&) {
            throw BlowupError("rigorode: field undefined on current set");
        }
        for (int attempt = 0; attempt < opts_.enclosure_tries; ++attempt) {
            Interval hw(0.0, h);
            IVec<N> cand;
            for (std::size_t i = 0; i < N; ++i) {
                Interval g = X[i] + hw * fx[i];
                cand[i] = widen(g, 0.1 * g.width() + 1e-30 + 1e-16 * g.mag());
            }
            for (int it = 0; it < 12; ++it) {
                IVec<N> fw;
                try {
                    fw = eval_field(cand);
                } catch (const DomainError&) {
                    break;
                }
                IVec<N> next;
                bool inside = true;
                for (std::size_t i = 0; i < N; ++i) {
                    next[i] = X[i] + hw * fw[i];
                    if (!(cand[i].lo < next[i].lo && next[i].hi < cand[i].hi)) inside = false;
                }
                if (inside) return cand;
                // re-center on the Picard image; contraction shrinks it
                for (std::size_t i = 0; i < N; ++i)
                    cand[i] = widen(next[i], 0.05 * next[i].width() + 1e-30 +
                                                 1e-16 * next[i].mag());
            }
            h *= 0.5;
            if (h < opts_.h_min) break;
        }
        throw BlowupError("rigorode: no validated enclosure before step underflow");
    }

    IMat<N, N> rough_var_enclosure(const IVec<N>& W, double h) {
        IMat<N, N> a0;
        {
            std::array<Interval, N * N> out;
            eval_tape(*jac_, W.data(), out.data(), scratch_);
            for (std::size_t i = 0; i < N * N; ++i) a0.e[i] = out[i];
        }
        Interval hw(0.0, h);
        IMat<N, N> wv = identity_i<N>();
        for (std::size_t i = 0; i < N * N; ++i) wv.e[i] += Interval(-1e-12, 1e-12);
        for (int it = 0; it < 40; ++it) {
            IMat<N, N> prod = a0 * wv;
            IMat<N, N> next = identity_i<N>();
            bool inside = true;
            for (std::size_t i = 0; i < N * N; ++i) {
                next.e[i] += hw * prod.e[i];
                if (!(wv.e[i].lo < next.e[i].lo && next.e[i].hi < wv.e[i].hi)) inside = false;
            }
            if (inside) return wv;
            for (std::size_t i = 0; i < N * N; ++i)
                wv.e[i] = widen(next.e[i], 0.05 * next.e[i].width() + 1e-14);
        }
        // Gronwall fallback: |V - Id| <= h |A| e^{h |A|} entrywise
        double anorm = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double row = 0;
            for (std::size_t j = 0; j < N; ++j) row = detail::add_up(row, abs_i(a0(i, j)).hi);
            anorm = std::max(anorm, row);
        }
        Interval beta = Interval(h) * Interval(anorm);
        Interval euler(2.7182818284590451, 2.7182818284590456);
        Interval epow(1.0);
        for (int i = 0; i < static_cast<int>(std::ceil(beta.hi)); ++i) epow *= euler;
        double gamma = (beta * epow).hi;
        IMat<N, N> wv2 = identity_i<N>();
        for (std::size_t i = 0; i < N * N; ++i) wv2.e[i] += Interval(-gamma, gamma);
        return wv2;
    }

    IMat<N, N> jphi_poly(const Interval& h) const {
        IMat<N, N> acc = vx_[static_cast<std::size_t>(opts_.order)];
        for (int k = opts_.order - 1; k >= 0; --k)
            for (std::size_t e = 0; e < N * N; ++e)
                acc.e[e] = acc.e[e] * h + vx_[static_cast<std::size_t>(k)].e[e];
        return acc;
    }
    IMat<N, N> jphi_window(const Interval& dt) const {
        IMat<N, N> j = jphi_poly(dt);
        Interval hp = pow_i(dt, opts_.order + 1);
        for (std::size_t e = 0; e < N * N; ++e)
            j.e[e] += vw_[static_cast<std::size_t>(opts_.order) + 1].e[e] * hp;
        return j;
    }

    void advance_state(const IVec<N>& phim, const IMat<N, N>& J) {
        LohnerSet<N> ns;
        ns.r0 = set_.r0;
        IMat<N, N> zc = J * to_interval(set_.C);
        IMat<N, N> zb = J * to_interval(set_.B);
        ns.C = mid(zc);
        DMat<N, N> q = qr_orthonormalize(mid(zb));
        ns.B = q;
        DMat<N, N> qt;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) qt(i, j) = q(j, i);
        IMat<N, N> qinv;
        if (!verified_inverse(q, qinv, &qt))
            throw BlowupError("rigorode: basis inversion failed");

        IVec<N> l0;
        for (std::size_t i = 0; i < N; ++i) {
            ns.m[i] = phim[i].mid();
            l0[i] = phim[i] - Interval(ns.m[i]);
        }
        IMat<N, N> ec = zc - to_interval(ns.C);
        IVec<N> carry = l0 + ec * set_.r0;
        ns.r = qinv * carry + (qinv * zb) * set_.r;
        set_ = ns;
    }

    void advance_mono(const IMat<N, N>& jfull) {
        MonoSet<N> nm;
        IMat<N, N> zd = jfull * to_interval(mono_.D);
        IMat<N, N> zq = jfull * to_interval(mono_.Q);
        nm.D = mid(zd);
        DMat<N, N> q = qr_orthonormalize(mid(zq));
        nm.Q = q;
        DMat<N, N> qt;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) qt(i, j) = q(j, i);
        IMat<N, N> qinv;
        if (!verified_inverse(q, qinv, &qt))
            throw BlowupError("rigorode: monodromy basis inversion failed");
        IMat<N, N> ed = zd - to_interval(nm.D);
        nm.S = qinv * ed + (qinv * zq) * mono_.S;
        mono_ = nm;
    }

    const Tape* field_;
    const Tape* jac_;
    OdeOptions opts_;
    LohnerSet<N> set_;
    MonoSet<N> mono_;
    Interval t_;
    long steps_ = 0;
    double last_h_ = 0;
    double h_prev_ = 0;

    TapeJets jets_m_, jets_x_, jets_w_;
    TapeJets ajets_x_, ajets_w_;
    std::vector<IMat<N, N>> vx_, vw_;
    IVec<N> rem_{};
    IMat<N, N> mono_prev_hull_;
    mutable std::vector<Interval> scratch_;
};

// ---------------------------------------------------------------------------
// integrate to a fixed horizon
// ---------------------------------------------------------------------------
template <std::size_t N>
Tube<N> integrate(const Tape* field, const Tape* jac, const IVec<N>& x0, double T,
                  const OdeOptions& opts) {
    Flow<N> flow(field, jac, x0, opts);
    Tube<N> tube;
    tube.x0 = x0;
    while (flow.time().hi < T) {
        double remaining = T - flow.time().hi;
        double req = 0.0;
        if (opts.fixed_step > 0) req = std::min(opts.fixed_step, detail::next_up(remaining));
        else if (remaining < opts.h_max) req = detail::next_up(remaining);
        tube.steps.push_back(flow.step(req));
    }
    return tube;
}

// ---------------------------------------------------------------------------
// certified section events
// ---------------------------------------------------------------------------

enum class HitDirection { Any, Up, Down };

template <std::size_t N>
struct SectionEvent {
    Interval thit;           // crossing-time enclosure (absolute flow time)
    IVec<N> point;           // crossing point enclosure, section coord pinned to 0
    Interval transversality; // dg(X) over the event region
    IMat<N, N> mono;         // monodromy enclosure at the crossing
    IVec<N> flow_dir;        // field at the crossing enclosure
    int direction = 0;       // sign of dg/dt at the crossing
};

struct HitOptions {
    int nth = 1;
    HitDirection direction = HitDirection::Any;
    double t_budget = 400.0;
    bool want_monodromy = true;
};

// Certified n-th transverse crossing of the coordinate section x[coord] = 0.
template <std::size_t N>
SectionEvent<N> hit_section(Flow<N>& flow, int coord, const HitOptions& hopt) {
    int sign = 0;
    Interval g_start(0.0);
    {
        g_start = flow.state_hull()[coord];
        if (g_start.strictly_positive()) sign = 1;
        else if (g_start.strictly_negative()) sign = -1;
        else if (!(g_start.lo == 0.0 || g_start.hi == 0.0))
            throw IndeterminateError("hit_section: initial box straddles the section");
    }
    int count = 0;
    bool pending = false;
    double bracket_start = 0;
    bool multi_step = false;
    IVec<N> pending_hull{};
    IMat<N, N> pending_mono{};
    Interval pending_trans(0.0);

    while (flow.time().hi < hopt.t_budget) {
        double t_before = flow.time().lo;
        TubeStep<N> st = flow.step();
        Interval g_win = st.q[coord];
        Interval g_end = st.q_end[coord];

        if (sign == 0) {
            // departure phase: monotone g moving away from the section, so
            // nothing crosses unseen
            Interval gdot = flow.eval_field(st.q)[coord];
            if (gdot.contains_zero())
                throw IndeterminateError("hit_section: cannot certify departure from section");
            if (g_start.lo < 0.0 && !gdot.strictly_negative())
                throw IndeterminateError("hit_section: start box moves into the section");
            if (g_start.hi > 0.0 && !gdot.strictly_positive())
                throw IndeterminateError("hit_section: start box moves into the section");
            if (g_end.strictly_positive()) sign = 1;
            else if (g_end.strictly_negative()) sign = -1;
            continue;
        }

        bool win_same = (sign > 0) ? g_win.strictly_positive() : g_win.strictly_negative();
        if (win_same) {
            pending = false;
            continue;
        }

        Interval gdot = flow.eval_field(st.q)[coord];
        if (!pending) {
            pending = true;
            bracket_start = t_before;
            multi_step = false;
            pending_hull = st.q;
            pending_mono = st.M;
            pending_trans = gdot;
        } else {
            multi_step = true;
            pending_hull = hull(pending_hull, st.q);
            pending_mono = hull(pending_mono, st.M);
            pending_trans = hull(pending_trans, gdot);
        }
        if (pending_trans.contains_zero())
            throw IndeterminateError("hit_section: transversality not certified near section");

        bool end_opposite = (sign > 0) ? g_end.strictly_negative() : g_end.strictly_positive();
        bool end_same = (sign > 0) ? g_end.strictly_positive() : g_end.strictly_negative();
        if (end_opposite) {
            int dir = pending_trans.strictly_positive() ? 1 : -1;
            bool wanted = hopt.direction == HitDirection::Any ||
                          (hopt.direction == HitDirection::Up && dir > 0) ||
                          (hopt.direction == HitDirection::Down && dir < 0);
            ++count;
            if (wanted && count >= hopt.nth) {
                SectionEvent<N> ev;
                ev.direction = dir;
                ev.transversality = pending_trans;
                double t0 = st.t.lo;
                Interval dt(0.0, detail::add_up(st.t.hi, -t0));
                if (!multi_step) {
                    // time-interval Newton inside the current step
                    for (int it = 0; it < 50; ++it) {
                        Interval mid_t(dt.mid());
                        Interval gm = flow.eval_coord_window(coord, mid_t);
                        Interval gp = flow.eval_coord_dot_window(coord, dt);
                        if (gp.contains_zero()) break;
                        Interval nxt = mid_t - gm / gp;
                        Interval meet;
                        if (!intersect(nxt, dt, meet)) break;
                        bool done = meet.width() > 0.9 * dt.width();
                        dt = meet;
                        if (done) break;
                    }
                    ev.thit = Interval(detail::add_down(t0, dt.lo), detail::add_up(t0, dt.hi));
                    ev.point = flow.eval_window(dt);
                    if (hopt.want_monodromy) ev.mono = flow.eval_mono_window(dt);
                } else {
                    ev.thit = Interval(bracket_start, st.t.hi);
                    ev.point = pending_hull;
                    if (hopt.want_monodromy) ev.mono = pending_mono;
                }
                if (!ev.point[coord].contains_zero())
                    throw IndeterminateError("hit_section: crossing point enclosure off section");
                ev.point[coord] = Interval(0.0);
                ev.flow_dir = flow.eval_field(ev.point);
                return ev;
            }
            sign = -sign;
            pending = false;
        } else if (end_same) {
            // endpoint recovered the old sign: with transversality certified
            // no trajectory can have crossed, so the dip was overestimation
            pending = false;
        }
        // endpoint still straddles: extend the bracket
    }
    throw NoHitError("hit_section: no crossing before time budget");
}

// Derivative of the section-to-section map: project the monodromy along the
// flow direction onto the section {x[coord] = 0}.
template <std::size_t N>
IMat<N, N> return_map_derivative(const SectionEvent<N>& ev, int coord) {
    if (ev.transversality.contains_zero())
        throw IndeterminateError("return_map_derivative: transversality lost");
    IMat<N, N> proj = identity_i<N>();
    for (std::size_t i = 0; i < N; ++i)
        proj(i, static_cast<std::size_t>(coord)) -= ev.flow_dir[i] / ev.transversality;
    return proj * ev.mono;
}

// CSV dump of a tube (per step: t.lo,t.hi then lo/hi per coordinate).
template <std::size_t N>
std::string tube_to_csv(const Tube<N>& tube) {
    std::string out = "t_lo,t_hi";
    for (std::size_t i = 0; i < N; ++i)
        out += ",x" + std::to_string(i) + "_lo,x" + std::to_string(i) + "_hi";
    out += "\n";
    for (const auto& s : tube.steps) {
        out += format_double(s.t.lo) + "," + format_double(s.t.hi);
        for (std::size_t i = 0; i < N; ++i)
            out += "," + format_double(s.q[i].lo) + "," + format_double(s.q[i].hi);
        out += "\n";
    }
    return out;
}

} // namespace orbitcert
