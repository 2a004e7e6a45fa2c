#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitcert/approx.hpp"
#include "orbitcert/lcflow.hpp"
#include "orbitcert/rigorode.hpp"

using namespace orbitcert;

namespace {

std::mt19937_64 rng(0x5eed0003);
double urand(double a, double b) {
    std::uniform_real_distribution<double> u(a, b);
    return u(rng);
}

struct Harmonic {
    Tape field, jac;
    Harmonic() {
        field = record_tape(2, [](const std::vector<TraceExpr>& in) {
            return std::vector<TraceExpr>{in[1], -in[0]};
        });
        jac = record_tape(2, [](const std::vector<TraceExpr>& in) {
            TraceExpr zero = in[0] - in[0];
            return std::vector<TraceExpr>{zero, TraceExpr(1.0), TraceExpr(-1.0), zero};
        });
    }
};

const Harmonic& harmonic() {
    static Harmonic h;
    return h;
}

const DMat<4, 4>& omega4() {
    // dw ^ dz on (z1,z2,w1,w2): Omega4 = -I_quat
    static DMat<4, 4> m = [] {
        DMat<4, 4> r{};
        r(0, 2) = -1; r(1, 3) = -1; r(2, 0) = 1; r(3, 1) = 1;
        return r;
    }();
    return m;
}

} // namespace

TEST_CASE("harmonic oscillator: closed-form flow and monodromy at 2 pi") {
    OdeOptions opts;
    opts.order = 14;
    double T = 2.0 * M_PI;
    IVec<2> x0{Interval(1.0), Interval(0.0)};
    Tube<2> tube = integrate<2>(&harmonic().field, &harmonic().jac, x0, T, opts);
    REQUIRE(!tube.steps.empty());
    const auto& last = tube.steps.back();
    CHECK(last.t.hi >= T);

    // the exact elapsed time lies inside last.t; compare against the value
    // hull over that window
    Interval zc = hull(Interval(std::cos(last.t.lo)), Interval(std::cos(last.t.hi)));
    Interval wc = hull(Interval(-std::sin(last.t.lo)), Interval(-std::sin(last.t.hi)));
    CHECK(last.q_end[0].intersects(zc + Interval(-1e-15, 1e-15)));
    CHECK(last.q_end[1].intersects(wc + Interval(-1e-15, 1e-15)));
    CHECK(last.q_end[0].width() < 1e-10);
    CHECK(last.q_end[1].width() < 1e-10);

    // monodromy encloses the rotation by 2 pi = identity
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double expect = (i == j) ? 1.0 : 0.0;
            CHECK(last.M_end(i, j).contains(std::nextafter(expect, expect - 1e-13)) ==
                  last.M_end(i, j).contains(expect));
            CHECK(std::abs(last.M_end(i, j).mid() - expect) < 1e-9);
            CHECK(last.M_end(i, j).width() < 1e-8);
        }
}

TEST_CASE("harmonic oscillator: first section hit at pi/2") {
    OdeOptions opts;
    opts.order = 14;
    IVec<2> x0{Interval(1.0), Interval(0.0)};
    Flow<2> flow(&harmonic().field, &harmonic().jac, x0, opts);
    HitOptions hopt;
    SectionEvent<2> ev = hit_section(flow, 0, hopt);

    CHECK(ev.thit.contains(M_PI / 2));
    CHECK(ev.thit.width() < 1e-10);
    CHECK(ev.point[0].lo == 0.0);
    CHECK(ev.point[0].hi == 0.0);
    CHECK(ev.point[1].contains(-1.0));
    CHECK(ev.point[1].width() < 1e-10);
    CHECK(ev.transversality.contains(-1.0));
    CHECK(ev.direction == -1);
}

TEST_CASE("harmonic oscillator: full-return derivative encloses identity on section") {
    OdeOptions opts;
    opts.order = 14;
    // start on the section itself; the full return is the second Down hit
    IVec<2> x0{Interval(0.0), Interval(-1.0)};
    Flow<2> flow(&harmonic().field, &harmonic().jac, x0, opts);
    HitOptions hopt;
    hopt.direction = HitDirection::Down;
    SectionEvent<2> ev = hit_section(flow, 0, hopt);
    CHECK(ev.thit.contains(2.0 * M_PI));
    IMat<2, 2> dp = return_map_derivative(ev, 0);
    // projected onto the section tangent (w axis): dP(1,1) = 1
    CHECK(dp(1, 1).contains(1.0));
    CHECK(dp(1, 1).width() < 1e-7);
    CHECK(std::abs(dp(1, 0).mid()) < 1e-9);
}

TEST_CASE("energy conservation: K enclosure contains 0 along tubes from the locus") {
    for (int trial = 0; trial < 4; ++trial) {
        Params p(Interval(urand(0.0, 0.5)), Interval(urand(2.1, 2.15)));
        LCSystem sys(p);
        Interval B = locus_boundary(p, Axis::Plus);
        double coord = urand(-0.8, 0.8) * B.lo;
        LCState s0 = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(coord));
        OdeOptions opts;
        opts.variational = false;
        Tube<4> tube = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), 1.2, opts);
        for (const auto& st : tube.steps) {
            Interval k = eval_K(p, LCState(st.q));
            CHECK(k.contains(0.0));
        }
    }
}

TEST_CASE("tight RK4 trajectory lies inside the rigorous tube") {
    Params p(Interval(0.25), Interval(2.1));
    LCSystem sys(p);
    LCState s0 = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(0.2));
    OdeOptions opts;
    opts.variational = false;
    double T = 1.5;
    Tube<4> tube = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), T, opts);

    approx::DParams pd{0.25, 2.1};
    DVec<4> x{s0.z1.mid(), s0.z2.mid(), s0.w1.mid(), s0.w2.mid()};
    double h = 1e-4;
    double t = 0;
    std::size_t step_idx = 0;
    int checked = 0;
    while (t < T && step_idx < tube.steps.size()) {
        while (step_idx < tube.steps.size() && tube.steps[step_idx].t.hi < t) ++step_idx;
        if (step_idx >= tube.steps.size()) break;
        if (tube.steps[step_idx].t.contains(t)) {
            CHECK(contains_point(tube.steps[step_idx].q, x));
            ++checked;
        }
        x = approx::rk4_step(pd, x, h);
        t += h;
    }
    CHECK(checked > 1000);
}

TEST_CASE("monotone refinement: halved boxes give contained enclosures") {
    OdeOptions opts;
    opts.order = 12;
    opts.fixed_step = 0.05;
    IVec<2> box{Interval(0.9, 1.1), Interval(-0.05, 0.05)};
    Tube<2> whole = integrate<2>(&harmonic().field, &harmonic().jac, box, 3.0, opts);

    IVec<2> left{Interval(0.9, 1.0), box[1]};
    IVec<2> right{Interval(1.0, 1.1), box[1]};
    Tube<2> tl = integrate<2>(&harmonic().field, &harmonic().jac, left, 3.0, opts);
    Tube<2> tr = integrate<2>(&harmonic().field, &harmonic().jac, right, 3.0, opts);

    IVec<2> refined = hull(tl.steps.back().q_end, tr.steps.back().q_end);
    CHECK(contains(whole.steps.back().q_end, refined));
}

TEST_CASE("determinism: identical inputs give bit-identical enclosures") {
    Params p(Interval(0.25), Interval(2.1));
    LCSystem sys(p);
    LCState s0 = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(0.21, 0.2100001));
    OdeOptions opts;
    Tube<4> a = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), 0.8, opts);
    Tube<4> b = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), 0.8, opts);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(a.steps[i].q_end[j].lo == b.steps[i].q_end[j].lo);
            CHECK(a.steps[i].q_end[j].hi == b.steps[i].q_end[j].hi);
        }
}

TEST_CASE("symplecticity: M^T Omega4 M - Omega4 encloses 0 along an LC tube") {
    Params p(Interval(0.5), Interval(2.1));
    LCSystem sys(p);
    LCState s0 = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(0.18));
    OdeOptions opts;
    Tube<4> tube = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), 1.0, opts);
    IMat4 om = to_interval(omega4());
    const auto& M = tube.steps.back().M_end;
    IMat4 res = transpose(M) * om * M - om;
    for (int i = 0; i < 16; ++i) CHECK(res.e[i].contains(0.0));
}

TEST_CASE("LC monodromy enclosure contains the RK4 variational estimate") {
    Params p(Interval(0.25), Interval(2.1));
    LCSystem sys(p);
    LCState s0 = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(0.2));
    OdeOptions opts;
    double T = 1.0;
    Tube<4> tube = integrate<4>(&sys.field4, &sys.jac4, s0.vec(), T, opts);
    approx::DParams pd{0.25, 2.1};
    DVec<4> x{s0.z1.mid(), s0.z2.mid(), s0.w1.mid(), s0.w2.mid()};
    double te = tube.steps.back().t.hi;
    DMat<4, 4> M = approx::monodromy(pd, x, te, 2e-5);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(tube.steps.back().M_end(i, j).mid() - M(i, j)) <
                  1e-6 + 1e-5 * std::abs(M(i, j)));
}

TEST_CASE("blowup reports as BlowupError") {
    // quadratic blowup field x' = 1 + x^2 from x = 1 diverges before t = 2
    Tape f = record_tape(1, [](const std::vector<TraceExpr>& in) {
        return std::vector<TraceExpr>{1.0 + sqr(in[0])};
    });
    Tape j = record_tape(1, [](const std::vector<TraceExpr>& in) {
        return std::vector<TraceExpr>{2.0 * in[0]};
    });
    OdeOptions opts;
    opts.h_min = 1e-6;
    CHECK_THROWS_AS((integrate<1>(&f, &j, {Interval(1.0)}, 2.0, opts)), BlowupError);
}
