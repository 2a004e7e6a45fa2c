#include "orbitcert/symsearch.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "orbitcert/czindex.hpp"

namespace orbitcert {

namespace {

int slope_coord(int section) { return section == 0 ? 3 : 2; } // w2 at S-, w1 at S+

int home_section(Axis axis) { return axis == Axis::Plus ? 1 : 0; }
int other_section(Axis axis) { return axis == Axis::Plus ? 0 : 1; }

// ---------------------------------------------------------------------------
// first transverse crossing of either section z1 = 0 / z2 = 0
// ---------------------------------------------------------------------------

template <std::size_t N>
struct CoordWatch {
    int sign = 0;            // armed sign; 0 = departing from the section
    Interval g0{};           // start enclosure (departure soundness checks)
    bool pending = false;
    bool multi = false;
    double bracket_start = 0;
    IVec<N> hull{};
    IMat<N, N> mono{};
    Interval trans{};
    bool closed = false;     // bracket closed this step
};

template <std::size_t N>
AnyHit<N> first_any_hit_impl(Flow<N>& flow, double t_budget, bool want_mono) {
    CoordWatch<N> w[2];
    {
        IVec<N> x = flow.state_hull();
        for (int c = 0; c < 2; ++c) {
            w[c].g0 = x[c];
            if (x[c].strictly_positive()) w[c].sign = 1;
            else if (x[c].strictly_negative()) w[c].sign = -1;
            else if (!(x[c].lo == 0.0 || x[c].hi == 0.0))
                throw IndeterminateError("first_any_hit: start box straddles a section");
        }
    }
    double t_start = flow.time().hi;
    while (flow.time().hi - t_start < t_budget) {
        double t_before = flow.time().lo;
        TubeStep<N> st = flow.step();
        IVec<N> fw{};
        bool have_fw = false;

        for (int c = 0; c < 2; ++c) {
            w[c].closed = false;
            Interval g_win = st.q[c];
            Interval g_end = st.q_end[c];

            if (w[c].sign == 0) {
                if (!have_fw) {
                    fw = flow.eval_field(st.q);
                    have_fw = true;
                }
                Interval gdot = fw[c];
                if (gdot.contains_zero())
                    throw IndeterminateError("first_any_hit: departure not certified");
                if (w[c].g0.lo < 0.0 && !gdot.strictly_negative())
                    throw IndeterminateError("first_any_hit: start box moves into section");
                if (w[c].g0.hi > 0.0 && !gdot.strictly_positive())
                    throw IndeterminateError("first_any_hit: start box moves into section");
                if (g_end.strictly_positive()) w[c].sign = 1;
                else if (g_end.strictly_negative()) w[c].sign = -1;
                continue;
            }

            bool win_same = (w[c].sign > 0) ? g_win.strictly_positive()
                                            : g_win.strictly_negative();
            if (win_same) {
                w[c].pending = false;
                continue;
            }
            if (!have_fw) {
                fw = flow.eval_field(st.q);
                have_fw = true;
            }
            Interval gdot = fw[c];
            if (!w[c].pending) {
                w[c].pending = true;
                w[c].multi = false;
                w[c].bracket_start = t_before;
                w[c].hull = st.q;
                w[c].mono = st.M;
                w[c].trans = gdot;
            } else {
                w[c].multi = true;
                w[c].hull = hull(w[c].hull, st.q);
                w[c].mono = hull(w[c].mono, st.M);
                w[c].trans = hull(w[c].trans, gdot);
            }
            if (w[c].trans.contains_zero())
                throw IndeterminateError("first_any_hit: transversality lost near section");

            bool end_opp = (w[c].sign > 0) ? g_end.strictly_negative()
                                           : g_end.strictly_positive();
            bool end_same = (w[c].sign > 0) ? g_end.strictly_positive()
                                            : g_end.strictly_negative();
            if (end_opp) {
                w[c].closed = true;
            } else if (end_same) {
                w[c].pending = false;
            }
        }

        if (w[0].closed && w[1].closed)
            throw IndeterminateError("first_any_hit: both sections close in one step");
        for (int c = 0; c < 2; ++c) {
            if (!w[c].closed) continue;
            int o = 1 - c;
            if (w[o].pending)
                throw IndeterminateError("first_any_hit: ambiguous first section");

            AnyHit<N> out;
            out.section = c;
            SectionEvent<N>& ev = out.ev;
            ev.direction = w[c].trans.strictly_positive() ? 1 : -1;
            ev.transversality = w[c].trans;
            double t0 = st.t.lo;
            Interval dt(0.0, detail::add_up(st.t.hi, -t0));
            if (!w[c].multi) {
                for (int it = 0; it < 50; ++it) {
                    Interval mid_t(dt.mid());
                    Interval gm = flow.eval_coord_window(c, mid_t);
                    Interval gp = flow.eval_coord_dot_window(c, dt);
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
                if (want_mono) ev.mono = flow.eval_mono_window(dt);
            } else {
                ev.thit = Interval(w[c].bracket_start, st.t.hi);
                ev.point = w[c].hull;
                if (want_mono) ev.mono = w[c].mono;
            }
            if (!ev.point[c].contains_zero())
                throw IndeterminateError("first_any_hit: crossing enclosure off section");
            ev.point[c] = Interval(0.0);
            ev.flow_dir = flow.eval_field(ev.point);
            return out;
        }
    }
    throw NoHitError("first_any_hit: no crossing before time budget");
}

// hull-accumulated state (and optional monodromy/action) slices over a list
// of absolute-time intervals; drives the flow until all are covered
template <std::size_t N>
struct TimeSlice {
    IVec<N> x{};
    IMat<N, N> M{};
    bool filled = false;
};

template <std::size_t N, class PerStep>
void run_with_slices(Flow<N>& flow, const std::vector<Interval>& targets,
                     std::vector<TimeSlice<N>>& slices, bool want_mono, PerStep&& per_step) {
    slices.assign(targets.size(), {});
    double t_end = 0;
    for (const auto& t : targets) t_end = std::max(t_end, t.hi);
    while (flow.time().hi < t_end) {
        Interval t_before = flow.time();
        double remaining = t_end - flow.time().hi;
        double req = (remaining < flow.options().h_max) ? detail::next_up(remaining) : 0.0;
        TubeStep<N> st = flow.step(req);
        per_step(st);
        double h_used = flow.last_step_size();
        for (std::size_t k = 0; k < targets.size(); ++k) {
            if (st.t.hi <= targets[k].lo || st.t.lo >= targets[k].hi) continue;
            Interval dt_clip;
            if (!intersect(targets[k] - t_before, Interval(0.0, h_used), dt_clip)) continue;
            IVec<N> xs = flow.eval_window(dt_clip);
            if (!slices[k].filled) {
                slices[k].x = xs;
                if (want_mono) slices[k].M = flow.eval_mono_window(dt_clip);
                slices[k].filled = true;
            } else {
                slices[k].x = hull(slices[k].x, xs);
                if (want_mono) slices[k].M = hull(slices[k].M, flow.eval_mono_window(dt_clip));
            }
        }
    }
    for (const auto& s : slices)
        if (!s.filled) throw IndeterminateError("run_with_slices: target window not covered");
}

} // namespace

AnyHit<4> first_any_hit(Flow<4>& flow, double t_budget, bool want_mono) {
    return first_any_hit_impl<4>(flow, t_budget, want_mono);
}
AnyHit<5> first_any_hit(Flow<5>& flow, double t_budget, bool want_mono) {
    return first_any_hit_impl<5>(flow, t_budget, want_mono);
}

IVec4 lift_locus(const Params& p, const LocusInterval& I) {
    return fixed_locus_param(p, I.axis, I.branch, I.range, I.boundary).vec();
}

Interval slope(const LCSystem& sys, const LocusInterval& I, const CoverOptions& opts) {
    OdeOptions ode = opts.ode;
    ode.variational = false;
    Flow<4> flow = sys.flow(lift_locus(sys.params, I), ode);
    AnyHit<4> hit = first_any_hit(flow, opts.t_budget, false);
    return hit.ev.point[slope_coord(hit.section)];
}

namespace {

Designation to_designation(int section) {
    return section == 0 ? Designation::ToSm : Designation::ToSp;
}

struct ThinShot {
    int section;
    Interval slope;
};

ThinShot thin_slope(const LCSystem& sys, Axis axis, Branch br, double coord, bool boundary,
                    const CoverOptions& opts) {
    LocusInterval I;
    I.axis = axis;
    I.branch = br;
    I.range = Interval(coord);
    I.boundary = boundary;
    OdeOptions ode = opts.ode_thin;
    ode.variational = false;
    Flow<4> flow = sys.flow(lift_locus(sys.params, I), ode);
    AnyHit<4> hit = first_any_hit(flow, opts.t_budget, false);
    return {hit.section, hit.ev.point[slope_coord(hit.section)]};
}

int sign_of(const Interval& v) {
    if (v.strictly_positive()) return 1;
    if (v.strictly_negative()) return -1;
    return 0;
}

LocusInterval mirror_interval(const LocusInterval& I) {
    LocusInterval m = I;
    m.range = Interval(-I.range.hi, -I.range.lo);
    m.branch = (I.branch == Branch::Pos) ? Branch::Neg : Branch::Pos;
    if (I.seed) m.seed = -*I.seed;
    m.mirrored = true;
    return m;
}

} // namespace

std::vector<LocusInterval> build_cover(const LCSystem& sys, Axis axis,
                                       const std::vector<double>& seeds,
                                       const CoverOptions& opts) {
    const Params& p = sys.params;
    Interval B = locus_boundary(p, axis);
    double bhi = B.hi, blo = B.lo;

    // initial partition of [-bhi, bhi]: exact seed intervals, uniform gaps
    std::vector<double> s_sorted = seeds;
    std::sort(s_sorted.begin(), s_sorted.end());
    std::vector<std::pair<double, double>> seed_ranges;
    for (double s : s_sorted) {
        double a = s - opts.seed_halfwidth, b = s + opts.seed_halfwidth;
        if (a <= -blo || b >= blo) continue; // seeds at the boundary: let subdivision cope
        seed_ranges.emplace_back(a, b);
    }
    double target = 2.0 * bhi / opts.init_subdiv;
    double cursor = -bhi;
    std::size_t si = 0;
    std::deque<LocusInterval> work;
    auto emit_gap = [&](double from, double to) {
        if (to <= from) return;
        int n = std::max(1, static_cast<int>(std::ceil((to - from) / target)));
        for (int i = 0; i < n; ++i) {
            LocusInterval I;
            I.axis = axis;
            I.branch = Branch::Pos;
            double a = from + (to - from) * i / n;
            double b = (i + 1 == n) ? to : from + (to - from) * (i + 1) / n;
            I.range = Interval(a, b);
            work.push_back(I);
        }
    };
    while (si < seed_ranges.size()) {
        emit_gap(cursor, seed_ranges[si].first);
        LocusInterval I;
        I.axis = axis;
        I.branch = Branch::Pos;
        I.range = Interval(seed_ranges[si].first, seed_ranges[si].second);
        I.seed = 0.5 * (seed_ranges[si].first + seed_ranges[si].second);
        work.push_back(I);
        cursor = seed_ranges[si].second;
        ++si;
    }
    emit_gap(cursor, bhi);
    (void)cuts;

    OdeOptions ode0 = opts.ode;
    ode0.variational = false;

    std::vector<LocusInterval> done;
    int processed = 0;
    std::string failures;
    while (!work.empty()) {
        if (++processed > opts.max_intervals)
            throw CoverError("build_cover: interval budget exhausted" + failures);
        LocusInterval I = work.front();
        work.pop_front();
        I.boundary = (std::abs(I.range.lo) >= blo || std::abs(I.range.hi) >= blo);
        try {
            Flow<4> flow = sys.flow(lift_locus(p, I), ode0);
            AnyHit<4> hit = first_any_hit(flow, opts.t_budget, false);
            I.designation = to_designation(hit.section);
            done.push_back(I);
            continue;
        } catch (const IndeterminateError& e) {
            if (I.range.width() < opts.min_width) {
                throw CoverError(std::string("build_cover: interval below width floor: ") +
                                 e.what());
            }
        } catch (const NoHitError& e) {
            if (I.range.width() < opts.min_width)
                throw CoverError(std::string("build_cover: no hit on minimal interval: ") +
                                 e.what());
        }
        double m = I.range.mid();
        LocusInterval a = I, b = I;
        a.range = Interval(I.range.lo, m);
        b.range = Interval(m, I.range.hi);
        if (I.seed) {
            a.seed = (*I.seed <= m) ? I.seed : std::nullopt;
            b.seed = (*I.seed > m) ? I.seed : std::nullopt;
        }
        work.push_front(b);
        work.push_front(a);
    }
    std::sort(done.begin(), done.end(),
              [](const LocusInterval& x, const LocusInterval& y) {
                  return x.range.lo < y.range.lo;
              });
    // the other branch of the locus is the image under s
    std::vector<LocusInterval> full = done;
    for (const auto& I : done) full.push_back(mirror_interval(I));
    return full;
}

OrbitCertificate certify(const LCSystem& sys, const LocusInterval& I,
                         const CoverOptions& opts) {
    const Params& p = sys.params;
    OrbitCertificate cert;
    cert.locus = I;
    IVec4 X = lift_locus(p, I);
    cert.start_box = X;

    // cheap pass without monodromy: most intervals resolve to nonexistence
    {
        OdeOptions ode0 = opts.ode;
        ode0.variational = false;
        Flow<4> flow = sys.flow(X, ode0);
        AnyHit<4> hit = first_any_hit(flow, opts.t_budget, false);
        cert.designation = to_designation(hit.section);
        cert.slope = hit.ev.point[slope_coord(hit.section)];
        if (sign_of(cert.slope) != 0) {
            cert.kind = CertKind::Nonexistence;
            return cert;
        }
    }

    // the slope encloses zero: only seeded intervals may certify existence
    ThinShot left = thin_slope(sys, I.axis, I.branch, I.range.lo, I.boundary, opts);
    ThinShot right = thin_slope(sys, I.axis, I.branch, I.range.hi, I.boundary, opts);

    // full shot with monodromy for the slope derivative and the hit time
    OdeOptions ode1 = opts.ode;
    ode1.variational = true;
    Flow<4> flow = sys.flow(X, ode1);
    AnyHit<4> hit = first_any_hit(flow, opts.t_budget, true);
    cert.designation = to_designation(hit.section);
    cert.slope = hit.ev.point[slope_coord(hit.section)];

    if (left.section != hit.section || right.section != hit.section)
        throw IndeterminateError("certify: endpoint designation differs from interval");
    int sl = sign_of(left.slope), sr = sign_of(right.slope);
    if (sl == 0 || sr == 0 || sl == sr)
        throw IndeterminateError("certify: slope encloses zero without an endpoint bracket");

    cert.kind = CertKind::Existence;
    cert.slope_sign_left = sl;
    cert.slope_sign_right = sr;

    // local uniqueness through the sign of the slope derivative over I
    try {
        IMat4 dp = return_map_derivative(hit.ev, hit.section);
        Interval dw = locus_dw(p, I.axis, I.branch, I.range);
        IVec4 tangent{};
        if (I.axis == Axis::Plus) {
            tangent[0] = Interval(1.0);
            tangent[3] = dw;
        } else {
            tangent[1] = Interval(1.0);
            tangent[2] = dw;
        }
        Interval sprime(0.0);
        int row = slope_coord(hit.section);
        for (int j = 0; j < 4; ++j) sprime += dp(row, j) * tangent[j];
        int ds = sign_of(sprime);
        if (ds != 0) {
            cert.kind = CertKind::ExistenceUnique;
            cert.slope_deriv_sign = ds;
        }
    } catch (const IndeterminateError&) {
        // existence stands; uniqueness not certified
    }

    // orbit data: periods from the gluing lemma
    cert.first_hit = hit.ev.thit;
    bool lands_other = (hit.section == other_section(I.axis));
    cert.period = (lands_other ? Interval(4.0) : Interval(2.0)) * cert.first_hit;
    cert.half_period = cert.period * Interval(0.5);
    Interval t_moser = lands_other ? cert.half_period : cert.period;

    // full-period augmented run: action, classification, crossings, closure
    {
        OdeOptions ode5 = opts.ode;
        ode5.variational = false;
        IVec<5> X5{X[0], X[1], X[2], X[3], Interval(0.0)};
        Flow<5> fa = sys.flow_aug(X5, ode5);
        std::vector<TimeSlice<5>> slices;
        std::vector<Interval> targets{cert.period};

        bool margin_pos = true, margin_neg = true, margin_known = true;
        // crossing bookkeeping: per coordinate, runs of straddling windows
        struct Run {
            bool active = false;
            int sign_before = 0;
            Interval t{};
        };
        Run runs[2];
        int sign_state[2] = {0, 0};
        int interior = 0; // certified transverse crossings in (0, T_moser)
        bool cross_ok = true;
        std::string cross_why;
        int start_coord = home_section(I.axis);
        {
            IVec<5> x0h = fa.state_hull();
            for (int c = 0; c < 2; ++c) {
                if (x0h[c].strictly_positive()) sign_state[c] = 1;
                else if (x0h[c].strictly_negative()) sign_state[c] = -1;
            }
        }
        bool processing = true;

        auto per_step = [&](const TubeStep<5>& st) {
            // margin classification over every window up to the full period
            if (st.t.lo <= cert.period.hi) {
                try {
                    Interval mg = retrograde_margin(
                        p, LCState(st.q[0], st.q[1], st.q[2], st.q[3]));
                    if (!mg.strictly_positive()) margin_pos = false;
                    if (!mg.strictly_negative()) margin_neg = false;
                } catch (const DomainError&) {
                    margin_known = false;
                }
            }
            // crossing runs up to the regularized (Moser) period
            if (!cross_ok || !processing) return;
            if (st.t.lo > t_moser.hi) {
                // stop counting; a run still open here must be the structural
                // endpoint crossing on the start section
                processing = false;
                for (int c = 0; c < 2; ++c)
                    if (runs[c].active && c != start_coord) {
                        cross_ok = false;
                        cross_why = "unresolved crossing run at the period endpoint";
                    }
                return;
            }
            for (int c = 0; c < 2; ++c) {
                Interval g_win = st.q[c];
                Interval g_end = st.q_end[c];
                if (!g_win.contains_zero()) {
                    sign_state[c] = g_win.strictly_positive() ? 1 : -1;
                    runs[c].active = false;
                    continue;
                }
                IVec<5> fw = fa.eval_field(st.q);
                if (fw[c].contains_zero()) {
                    cross_ok = false;
                    cross_why = "crossing transversality lost";
                    return;
                }
                if (!runs[c].active) {
                    runs[c].active = true;
                    runs[c].sign_before = sign_state[c];
                    runs[c].t = st.t;
                } else {
                    runs[c].t = hull(runs[c].t, st.t);
                }
                int end_sign = sign_of(g_end);
                if (end_sign != 0) {
                    bool crossed = (runs[c].sign_before != 0) &&
                                   (end_sign != runs[c].sign_before);
                    if (crossed) {
                        if (runs[c].t.hi < t_moser.lo) {
                            ++interior;
                        } else if (c != start_coord) {
                            cross_ok = false;
                            cross_why = "unexpected crossing at the period endpoint";
                        }
                    }
                    runs[c].active = false;
                    sign_state[c] = end_sign;
                }
            }
        };
        run_with_slices<5>(fa, targets, slices, false, per_step);
        if (processing) {
            for (int c = 0; c < 2; ++c)
                if (runs[c].active && c != start_coord) {
                    cross_ok = false;
                    cross_why = "unresolved crossing run at the horizon";
                }
        }

        cert.action = slices[0].x[4];
        IVec4 xT{slices[0].x[0], slices[0].x[1], slices[0].x[2], slices[0].x[3]};
        bool closure = true;
        for (int i = 0; i < 4; ++i)
            if (!xT[i].intersects(X[i])) closure = false;
        if (!closure)
            throw IndeterminateError("certify: full-period enclosure misses the start box");
        cert.closure_checked = true;

        if (margin_known && margin_pos) cert.classification = Classification::Retrograde;
        else if (margin_known && margin_neg) cert.classification = Classification::Direct;
        else cert.classification = Classification::Indeterminate;

        if (!cross_ok)
            throw IndeterminateError("certify: crossing count not certified: " + cross_why);
        // the t=0 departure is one crossing; interior counts the rest of
        // [0, T_moser), the endpoint belongs to the next cycle
        cert.crossing = 1 + interior;
    }

    // non-degeneracy over the regularized period and its double cover
    {
        Interval tr_half = reduced_trace(sys, X, t_moser, opts.ode);
        Interval tr_full = reduced_trace(sys, X, cert.period, opts.ode);
        NondegRecord nd;
        nd.trace_half = tr_half;
        nd.trace_full = tr_full;
        nd.nondegenerate = !tr_half.contains(2.0) && !tr_full.contains(2.0);
        if (!nd.nondegenerate)
            throw IndeterminateError("certify: trace enclosure contains 2");
        nd.subtype = nondegeneracy_from(tr_half).subtype;
        cert.nondeg = nd;
    }
    return cert;
}

namespace {

OrbitCertificate mirror_certificate(const OrbitCertificate& c) {
    OrbitCertificate m = c;
    m.locus = mirror_interval(c.locus);
    m.slope = -c.slope;
    m.slope_sign_left = -c.slope_sign_right;
    m.slope_sign_right = -c.slope_sign_left;
    for (int i = 0; i < 4; ++i) m.start_box[i] = -c.start_box[i];
    return m;
}

} // namespace

CoverCertification certify_cover(const LCSystem& sys, Axis axis,
                                 const std::vector<double>& seeds,
                                 const CoverOptions& opts) {
    CoverCertification out;
    std::vector<LocusInterval> cover = build_cover(sys, axis, seeds, opts);
    std::deque<LocusInterval> work;
    for (const auto& I : cover)
        if (!I.mirrored) work.push_back(I);

    int processed = 0;
    std::vector<std::pair<LocusInterval, OrbitCertificate>> results;
    while (!work.empty()) {
        if (++processed > opts.max_intervals)
            throw CoverError("certify_cover: interval budget exhausted");
        LocusInterval I = work.front();
        work.pop_front();
        try {
            OrbitCertificate c = certify(sys, I, opts);
            results.emplace_back(I, c);
            continue;
        } catch (const IndeterminateError& e) {
            if (I.range.width() < opts.min_width)
                throw CoverError(std::string("certify_cover: width floor reached: ") +
                                 e.what());
        } catch (const NoHitError& e) {
            if (I.range.width() < opts.min_width)
                throw CoverError(std::string("certify_cover: width floor reached: ") +
                                 e.what());
        }
        double m = I.range.mid();
        LocusInterval a = I, b = I;
        a.range = Interval(I.range.lo, m);
        b.range = Interval(m, I.range.hi);
        if (I.seed) {
            a.seed = (*I.seed <= m) ? I.seed : std::nullopt;
            b.seed = (*I.seed > m) ? I.seed : std::nullopt;
        }
        a.boundary = b.boundary = I.boundary;
        work.push_front(b);
        work.push_front(a);
    }
    std::sort(results.begin(), results.end(),
              [](const auto& x, const auto& y) { return x.first.range.lo < y.first.range.lo; });
    for (const auto& r : results) {
        out.cover.push_back(r.first);
        out.certificates.push_back(r.second);
    }
    std::size_t n = results.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.cover.push_back(mirror_interval(out.cover[i]));
        out.certificates.push_back(mirror_certificate(out.certificates[i]));
    }
    out.conclusive = true;
    return out;
}

// ---------------------------------------------------------------------------
// action sweep
// ---------------------------------------------------------------------------

namespace {

struct LegChain {
    Flow<5> flow;
    bool first = true;

    LegChain(const LCSystem& sys, const IVec<5>& x0, const OdeOptions& ode)
        : flow(sys.flow_aug(x0, ode)) {}

    // advance to the next arrival at the home section; j = 0 may be the
    // composite first map through the other section
    SectionEvent<5> next_arrival(Axis axis, double t_budget) {
        int home = home_section(axis);
        if (first) {
            first = false;
            AnyHit<5> hit = first_any_hit(flow, t_budget, false);
            if (hit.section == home) return hit.ev;
            // composite: continue from the other-section crossing to home
            flow.restart(hit.ev.point);
            HitOptions hopt;
            hopt.want_monodromy = false;
            hopt.t_budget = flow.time().hi + t_budget;
            return hit_section(flow, home, hopt);
        }
        HitOptions hopt;
        hopt.want_monodromy = false;
        hopt.t_budget = flow.time().hi + t_budget;
        return hit_section(flow, home, hopt);
    }

    void restart_at(const SectionEvent<5>& ev) { flow.restart(ev.point); }
};

} // namespace

ActionSweep action_search(const LCSystem& sys, Axis axis, const Interval& A0,
                          const std::vector<double>& seeds, const CoverOptions& opts) {
    ActionSweep sweep;
    sweep.axis = axis;
    sweep.bound = A0;
    double cutoff = A0.hi / 2.0;
    int sidx = (axis == Axis::Plus) ? 2 : 3; // w1 on S+, w2 on S-

    std::vector<LocusInterval> cover = build_cover(sys, axis, seeds, opts);
    std::deque<LocusInterval> work;
    for (const auto& I : cover)
        if (!I.mirrored) work.push_back(I);

    OdeOptions ode5 = opts.ode;
    ode5.variational = false;
    OdeOptions ode5_thin = opts.ode_thin;
    ode5_thin.variational = false;

    int processed = 0;
    std::vector<ActionIntervalReport> results;
    const int max_legs = 64;
    while (!work.empty()) {
        if (++processed > opts.max_intervals)
            throw CoverError("action_search: interval budget exhausted");
        LocusInterval I = work.front();
        work.pop_front();
        bool ok = true;
        std::string why;
        ActionIntervalReport rep;
        rep.locus = I;
        try {
            IVec4 X = lift_locus(sys.params, I);
            IVec<5> X5{X[0], X[1], X[2], X[3], Interval(0.0)};
            LegChain whole(sys, X5, ode5);

            LCState sl = fixed_locus_param(sys.params, I.axis, I.branch,
                                           Interval(I.range.lo), I.boundary);
            LCState sr = fixed_locus_param(sys.params, I.axis, I.branch,
                                           Interval(I.range.hi), I.boundary);
            IVec<5> L5{sl.z1, sl.z2, sl.w1, sl.w2, Interval(0.0)};
            IVec<5> R5{sr.z1, sr.z2, sr.w1, sr.w2, Interval(0.0)};
            LegChain left(sys, L5, ode5_thin);
            LegChain right(sys, R5, ode5_thin);

            for (int j = 0; j < max_legs; ++j) {
                SectionEvent<5> ev = whole.next_arrival(axis, opts.t_budget);
                SectionEvent<5> evl = left.next_arrival(axis, opts.t_budget);
                SectionEvent<5> evr = right.next_arrival(axis, opts.t_budget);

                ActionStage stage;
                stage.j = j;
                stage.slope = ev.point[sidx];
                stage.action = ev.point[4];
                stage.zero_candidate = stage.slope.contains_zero();
                if (stage.zero_candidate) {
                    int a = sign_of(evl.point[sidx]);
                    int b = sign_of(evr.point[sidx]);
                    if (a == 0 || b == 0 || a == b)
                        throw IndeterminateError(
                            "action_search: slope zero without endpoint bracket");
                    rep.distinguished = true;
                }
                rep.stages.push_back(stage);
                if (stage.action.lo > cutoff) {
                    rep.j_stop = j;
                    break;
                }
                whole.restart_at(ev);
                left.restart_at(evl);
                right.restart_at(evr);
            }
            if (rep.j_stop < 0)
                throw IndeterminateError("action_search: leg budget before action bound");
            rep.conclusive = true;
        } catch (const IndeterminateError& e) {
            ok = false;
            why = e.what();
        } catch (const NoHitError& e) {
            ok = false;
            why = e.what();
        }
        if (ok) {
            results.push_back(rep);
            continue;
        }
        if (I.range.width() < opts.min_width)
            throw CoverError("action_search: width floor reached: " + why);
        double m = I.range.mid();
        LocusInterval a = I, b = I;
        a.range = Interval(I.range.lo, m);
        b.range = Interval(m, I.range.hi);
        if (I.seed) {
            a.seed = (*I.seed <= m) ? I.seed : std::nullopt;
            b.seed = (*I.seed > m) ? I.seed : std::nullopt;
        }
        work.push_front(b);
        work.push_front(a);
    }
    std::sort(results.begin(), results.end(), [](const auto& x, const auto& y) {
        return x.locus.range.lo < y.locus.range.lo;
    });
    sweep.reports = std::move(results);
    sweep.conclusive = true;
    return sweep;
}

} // namespace orbitcert
