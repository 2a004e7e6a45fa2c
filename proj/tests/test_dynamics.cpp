#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitcert/dynamics.hpp"
#include "orbitcert/model.hpp"
#include "oracle_mpfr.hpp"

using namespace orbitcert;

namespace {

std::mt19937_64 rng(0x5eed0002);

double urand(double a, double b) {
    std::uniform_real_distribution<double> u(a, b);
    return u(rng);
}

LCState rand_state() {
    // stay inside the region where |2z^2-1| is bounded away from zero
    return LCState(Interval(urand(-0.55, 0.55)), Interval(urand(-0.55, 0.55)),
                   Interval(urand(-2.0, 2.0)), Interval(urand(-2.0, 2.0)));
}

Params rand_params() {
    return Params(Interval(urand(0.0, 0.9)), Interval(urand(1.4, 2.6)));
}

LCState apply_linear(const DMat<4, 4>& m, const LCState& s) {
    IVec4 v = s.vec();
    IVec4 r = to_interval(m) * v;
    return LCState(r);
}

} // namespace

TEST_CASE("eval_jacobi closed-form point and collision error") {
    Params p(Interval(0.0), Interval(2.0));
    IVec2 q{Interval(1.0), Interval(0.0)};
    IVec2 pm{Interval(0.0), Interval(1.0)};
    Interval h = eval_jacobi(p, q, pm);
    CHECK(h.contains(0.5));
    CHECK(h.width() < 1e-14);

    IVec2 qc{Interval(-0.0), Interval(0.0)}; // at the first primary for mu=0
    CHECK_THROWS_AS(eval_jacobi(p, qc, pm), DomainError);
}

TEST_CASE("eval_jacobi against 256-bit oracle") {
    for (int i = 0; i < 300; ++i) {
        double mu = urand(0.0, 0.9);
        double q1 = urand(-2, 2), q2 = urand(-2, 2), p1 = urand(-2, 2), p2 = urand(-2, 2);
        double d1 = std::hypot(q1 + mu, q2), d2 = std::hypot(q1 - 1 + mu, q2);
        if (d1 < 1e-2 || d2 < 1e-2) continue;
        Params p(Interval(mu), Interval(2.0));
        Interval h = eval_jacobi(p, {Interval(q1), Interval(q2)}, {Interval(p1), Interval(p2)});
        double ref = oracle::jacobi(mu, q1, q2, p1, p2);
        CHECK(h.contains(ref));
        CHECK(h.width() < 1e-11);
    }
}

TEST_CASE("eval_K collision-circle points") {
    // z = 0, |w|^2 = 1 - mu lies on Sigma for every c
    Params p0(Interval(0.0), Interval(1.7));
    Interval k0 = eval_K(p0, LCState(Interval(0.0), Interval(0.0), Interval(1.0), Interval(0.0)));
    CHECK(k0.contains(0.0));
    CHECK(k0.width() < 1e-15);

    Params ph(Interval(0.5), Interval(2.1));
    Interval kh = eval_K(ph, LCState(Interval(0.0), Interval(0.0), Interval(1.0), Interval(0.0)));
    CHECK(kh.contains(0.25));
    CHECK(kh.width() < 1e-15);
}

TEST_CASE("eval_K against 256-bit oracle") {
    for (int i = 0; i < 300; ++i) {
        Params p = rand_params();
        LCState s = rand_state();
        Interval k = eval_K(p, s);
        double ref = oracle::lc_energy(p.mu.lo, p.c.lo, s.z1.lo, s.z2.lo, s.w1.lo, s.w2.lo);
        CHECK(k.contains(ref));
        CHECK(k.width() < 1e-12);
    }
}

TEST_CASE("second-primary collision rejected") {
    Params p(Interval(0.3), Interval(2.0));
    LCState bad(Interval(1.0 / std::sqrt(2.0)), Interval(-1e-9, 1e-9), Interval(0.0),
                Interval(0.0));
    CHECK_THROWS_AS(eval_K(p, bad), DomainError);
}

TEST_CASE("grad_K and hess_K match step-refined finite differences") {
    for (int i = 0; i < 100; ++i) {
        Params p = rand_params();
        LCState s = rand_state();
        double mu = p.mu.lo, c = p.c.lo;
        double x[4] = {s.z1.lo, s.z2.lo, s.w1.lo, s.w2.lo};

        IVec4 g = grad_K(p, s);
        IMat4 h = hess_K(p, s);

        auto kat = [&](const double* y) {
            return lc_energy<double>(mu, c, y[0], y[1], y[2], y[3]);
        };
        auto gat = [&](const double* y) {
            return lc_grad<double>(mu, c, y[0], y[1], y[2], y[3]);
        };

        for (int j = 0; j < 4; ++j) {
            double err_prev = -1;
            for (double step : {1e-4, 1e-5}) {
                double yp[4], ym[4];
                for (int q = 0; q < 4; ++q) yp[q] = ym[q] = x[q];
                yp[j] += step;
                ym[j] -= step;
                double fd = (kat(yp) - kat(ym)) / (2 * step);
                double err = std::abs(fd - g[j].mid());
                CHECK(err < 5e-7);
                if (err_prev >= 0 && err_prev > 1e-10)
                    CHECK(err < err_prev); // second-order convergence
                err_prev = err;
            }
        }

        // Hessian columns from finite differences of the closed-form gradient
        double step = 1e-6;
        for (int j = 0; j < 4; ++j) {
            double yp[4], ym[4];
            for (int q = 0; q < 4; ++q) yp[q] = ym[q] = x[q];
            yp[j] += step;
            ym[j] -= step;
            auto gp = gat(yp), gm = gat(ym);
            for (int r = 0; r < 4; ++r) {
                double fd = (gp[r] - gm[r]) / (2 * step);
                CHECK(std::abs(fd - h(r, j).mid()) < 5e-5);
            }
        }
    }
}

TEST_CASE("field at the collision circle and augmented component") {
    Params p(Interval(0.0), Interval(2.1));
    LCState s(Interval(0.0), Interval(0.0), Interval(1.0), Interval(0.0));
    IVec4 f = field_K(p, s);
    CHECK(f[0].contains(1.0));
    CHECK(f[0].width() < 1e-15);
    for (int i = 1; i < 4; ++i) {
        CHECK(f[i].contains(0.0));
        CHECK(f[i].width() < 1e-15);
    }
    AugmentedState as{s, Interval(0.0)};
    IVec<5> fa = field_aug(p, as);
    CHECK(fa[4].contains(1.0));
    CHECK(fa[4].width() < 1e-15);
}

TEST_CASE("field is the symplectic gradient (finite-difference check)") {
    for (int i = 0; i < 50; ++i) {
        Params p = rand_params();
        LCState s = rand_state();
        double mu = p.mu.lo, c = p.c.lo;
        double x[4] = {s.z1.lo, s.z2.lo, s.w1.lo, s.w2.lo};
        IVec4 f = field_K(p, s);
        auto kat = [&](const double* y) {
            return lc_energy<double>(mu, c, y[0], y[1], y[2], y[3]);
        };
        double step = 1e-6;
        double fd[4];
        for (int j = 0; j < 4; ++j) {
            double yp[4], ym[4];
            for (int q = 0; q < 4; ++q) yp[q] = ym[q] = x[q];
            yp[j] += step;
            ym[j] -= step;
            fd[j] = (kat(yp) - kat(ym)) / (2 * step);
        }
        // (z', w') = (dK/dw, -dK/dz)
        CHECK(std::abs(f[0].mid() - fd[2]) < 1e-6);
        CHECK(std::abs(f[1].mid() - fd[3]) < 1e-6);
        CHECK(std::abs(f[2].mid() + fd[0]) < 1e-6);
        CHECK(std::abs(f[3].mid() + fd[1]) < 1e-6);
    }
}

TEST_CASE("K invariant under s and both anti-symplectic involutions") {
    DMat<4, 4> msym{};  // s: (z,w) -> (-z,-w)
    DMat<4, 4> mrp{};   // R+: (z,w) -> (conj z, -conj w)
    DMat<4, 4> mrm{};   // R-: (z,w) -> (-conj z, conj w)
    msym(0, 0) = msym(1, 1) = msym(2, 2) = msym(3, 3) = -1;
    mrp(0, 0) = 1; mrp(1, 1) = -1; mrp(2, 2) = -1; mrp(3, 3) = 1;
    mrm(0, 0) = -1; mrm(1, 1) = 1; mrm(2, 2) = 1; mrm(3, 3) = -1;

    for (int i = 0; i < 200; ++i) {
        Params p = rand_params();
        LCState s = rand_state();
        Interval k = eval_K(p, s);
        for (const auto& m : {msym, mrp, mrm}) {
            Interval kt = eval_K(p, apply_linear(m, s));
            CHECK(kt.lo == k.lo);
            CHECK(kt.hi == k.hi);
        }
    }
}

TEST_CASE("field anticommutes with R+ and R-") {
    DMat<4, 4> mrp{}, mrm{};
    mrp(0, 0) = 1; mrp(1, 1) = -1; mrp(2, 2) = -1; mrp(3, 3) = 1;
    mrm(0, 0) = -1; mrm(1, 1) = 1; mrm(2, 2) = 1; mrm(3, 3) = -1;

    for (int i = 0; i < 200; ++i) {
        Params p = rand_params();
        LCState s = rand_state();
        IVec4 fx = field_K(p, s);
        for (const auto& m : {mrp, mrm}) {
            IVec4 lhs = to_interval(m) * fx;           // dR X(x)
            IVec4 rhs = field_K(p, apply_linear(m, s));// X(R x)
            for (int j = 0; j < 4; ++j) {
                CHECK(lhs[j].lo == -rhs[j].hi);
                CHECK(lhs[j].hi == -rhs[j].lo);
            }
        }
    }
}

TEST_CASE("moser evaluator") {
    Params p(Interval(1.0), Interval(2.0));
    IVec<3> xi{Interval(1.0), Interval(0.0), Interval(0.0)};
    IVec<3> eta{Interval(0.3), Interval(0.1), Interval(-0.2)};
    Interval f = eval_moser_f(p, xi, eta);
    CHECK(f.contains(1.0));
    CHECK(f.width() < 1e-14);

    IVec<3> eta0{Interval(0.0), Interval(0.0), Interval(0.0)};
    Params p2(Interval(0.3), Interval(2.0));
    IVec<3> xi2{Interval(0.2), Interval(0.5), Interval(0.6)};
    Interval q = eval_moser_Q(p2, xi2, eta0);
    CHECK(q.contains(0.0));
    CHECK(q.width() == 0.0);

    for (int i = 0; i < 200; ++i) {
        std::array<double, 3> x{urand(-0.9, 0.9), urand(-0.7, 0.7), urand(-0.7, 0.7)};
        std::array<double, 3> e{urand(-1, 1), urand(-1, 1), urand(-1, 1)};
        double mu = urand(0, 1), c = urand(1.5, 2.5);
        double nx = e[1] * (1 - x[0]) + x[1] * e[0] + 1.0;
        double ny = e[2] * (1 - x[0]) + x[2] * e[0];
        if (std::hypot(nx, ny) < 1e-2) continue;
        Params pp{Interval(mu), Interval(c)};
        IVec<3> xiv{Interval(x[0]), Interval(x[1]), Interval(x[2])};
        IVec<3> etav{Interval(e[0]), Interval(e[1]), Interval(e[2])};
        CHECK(eval_moser_f(pp, xiv, etav).contains(oracle::moser_f(mu, c, x, e)));
        CHECK(eval_moser_Q(pp, xiv, etav).contains(oracle::moser_Q(mu, c, x, e)));
    }
}

TEST_CASE("retrograde margin: mu=0 angular momentum and coordinate-map oracle") {
    for (int i = 0; i < 200; ++i) {
        double z1 = urand(-0.6, 0.6), z2 = urand(-0.6, 0.6);
        if (std::hypot(z1, z2) < 0.05) continue;
        double w1 = urand(-1.5, 1.5), w2 = urand(-1.5, 1.5);
        double mu = urand(0.0, 0.9);
        Params p(Interval(mu), Interval(2.0));
        LCState s{Interval(z1), Interval(z2), Interval(w1), Interval(w2)};
        Interval m = retrograde_margin(p, s);
        CHECK(m.contains(oracle::margin_via_qp(mu, z1, z2, w1, w2)));
        CHECK(m.width() < 1e-13);
    }

    // state on the positive z1-axis with w = (0, w2), w2 > 0 is a
    // retrograde instant; equals 2 z1 w2 in (q,p)
    Params p0(Interval(0.0), Interval(2.0));
    LCState s0{Interval(0.3), Interval(0.0), Interval(0.0), Interval(0.7)};
    Interval m0 = retrograde_margin(p0, s0);
    CHECK(m0.strictly_positive());
    CHECK(m0.contains(2.0 * 0.3 * 0.7));
    CHECK(m0.contains(oracle::margin_via_qp(0.0, 0.3, 0.0, 0.0, 0.7)));

    LCState scol{Interval(-1e-9, 1e-9), Interval(-1e-9, 1e-9), Interval(1.0), Interval(0.0)};
    CHECK_THROWS_AS(retrograde_margin(p0, scol), DomainError);
}

TEST_CASE("margin positive along the rotating-Kepler retrograde circular orbit") {
    // mu = 0, c = 2.1: radius of the retrograde circular orbit solves
    // 1/(2r) - sqrt(r) = c  (angular momentum +sqrt(r))
    double lo = 0.05, hi = 0.4;
    auto fr = [](double r) { return 1.0 / (2.0 * r) - std::sqrt(r) - 2.1; };
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (fr(m) > 0 ? lo : hi) = m;
    }
    double r = 0.5 * (lo + hi);
    Params p(Interval(0.0), Interval(2.1));
    for (int k = 0; k < 64; ++k) {
        double th = 2.0 * M_PI * k / 64.0;
        // q = r e^{i th}, sidereal-velocity momentum tangential ccw
        double q1 = r * std::cos(th), q2 = r * std::sin(th);
        double v = 1.0 / std::sqrt(r);
        double p1 = -v * std::sin(th), p2 = v * std::cos(th);
        // Levi-Civita lift: z = sqrt(q/2), w = p * conj... w = p * z (conj z = z-bar)
        double ha = 0.5 * th;
        double zr = std::sqrt(r / 2.0);
        double z1 = zr * std::cos(ha), z2 = zr * std::sin(ha);
        // w = p * conj(z)... p = w / conj(z) => w = p * conj(z)
        double w1 = p1 * z1 + p2 * z2;
        double w2 = -p1 * z2 + p2 * z1;
        LCState s{Interval(z1), Interval(z2), Interval(w1), Interval(w2)};
        Interval m = retrograde_margin(p, s);
        CHECK(m.strictly_positive());
        CHECK(std::abs(m.mid() - std::sqrt(r)) < 1e-9);
        // the same point lies on Sigma_{0,2.1}
        CHECK(std::abs(eval_K(p, s).mid()) < 1e-10);
    }
}

TEST_CASE("critical energy") {
    Interval c_zero = critical_energy(Interval(0.0));
    CHECK(c_zero.contains(1.5));
    CHECK(c_zero.width() < 1e-12);

    Interval c_half = critical_energy(Interval(0.5));
    CHECK(c_half.contains(2.0)); // L1 at the midpoint by symmetry
    CHECK(c_half.width() < 1e-10);

    Interval c_quarter = critical_energy(Interval(0.25));
    CHECK(c_quarter.hi < 2.05);
    CHECK(c_quarter.lo > 1.9);

    Params p(Interval(0.25), parse_interval_literal("2.05:2.0500001"));
    CHECK(certify_above_critical(p));

    CHECK_THROWS_AS(critical_energy(Interval(0.0, 1e-3)), IndeterminateError);
}

TEST_CASE("fixed locus parametrization") {
    // z1 = 0: w2 = +- sqrt(1-mu)
    for (double mu : {0.0, 0.3, 0.5}) {
        Params p(Interval(mu), Interval(2.1));
        LCState sp = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(0.0));
        CHECK(std::abs(sp.w2.mid() - std::sqrt(1.0 - mu)) < 1e-14);
        CHECK(sp.w2.width() < 1e-14);
        LCState sm = fixed_locus_param(p, Axis::Plus, Branch::Neg, Interval(0.0));
        CHECK(std::abs(sm.w2.mid() + std::sqrt(1.0 - mu)) < 1e-14);
    }

    // K vanishes on the locus by construction, both axes and branches
    // (parameters above the critical energy so the locus boundary exists)
    for (int i = 0; i < 100; ++i) {
        Params p(Interval(urand(0.0, 0.5)), Interval(urand(2.05, 2.3)));
        for (Axis ax : {Axis::Plus, Axis::Minus}) {
            Interval B = locus_boundary(p, ax);
            double coord = urand(-0.95, 0.95) * B.lo;
            for (Branch br : {Branch::Pos, Branch::Neg}) {
                LCState s = fixed_locus_param(p, ax, br, Interval(coord));
                CHECK(eval_K(p, s).contains(0.0));
            }
        }
    }

    // at the boundary the discriminant vanishes and the branches meet
    Params p(Interval(0.5), Interval(2.1));
    Interval B = locus_boundary(p, Axis::Plus);
    CHECK(B.width() < 1e-8);
    CHECK(locus_disc(p, Axis::Plus, B).contains(0.0));
    LCState bp = fixed_locus_param(p, Axis::Plus, Branch::Pos, B, true);
    LCState bm = fixed_locus_param(p, Axis::Plus, Branch::Neg, B, true);
    CHECK(bp.w2.intersects(bm.w2));

    CHECK_THROWS_AS(fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(B.hi * 1.2)),
                    DomainError);
    CHECK_THROWS_AS(fixed_locus_param(p, Axis::Plus, Branch::Pos, B), IndeterminateError);
}

TEST_CASE("hill bounds") {
    Params ph(Interval(0.5), Interval(2.1));
    HillBounds hb = hill_bounds(ph);
    CHECK(hb.z2bound.hi <= 0.6 + 1e-12); // 2|z|^2 <= 3/5 at mu = 1/2 it is 2/5
    CHECK(hb.z2bound.hi >= 0.4 - 1e-12);

    Params p0(Interval(0.0), Interval(2.1));
    HillBounds hb0 = hill_bounds(p0);
    CHECK(hb0.wbound.hi <= 2.0);

    // sampled locus points satisfy both bounds
    for (int i = 0; i < 50; ++i) {
        Params p(Interval(urand(0.0, 0.5)), Interval(2.1 + urand(0, 1e-6)));
        HillBounds b = hill_bounds(p);
        Interval B = locus_boundary(p, Axis::Plus);
        double coord = urand(-1.0, 1.0) * B.lo;
        LCState s = fixed_locus_param(p, Axis::Plus, Branch::Pos, Interval(coord), true);
        Interval z2 = 2.0 * (sqr(s.z1) + sqr(s.z2));
        Interval wn = sqrt_i(sqr(s.w1) + sqr(s.w2));
        CHECK(z2.lo <= b.z2bound.hi + 1e-12);
        CHECK(wn.lo <= b.wbound.hi + 1e-12);
    }

    CHECK_THROWS_AS(hill_bounds(Params(Interval(0.7), Interval(2.1))), IndeterminateError);
    CHECK_THROWS_AS(hill_bounds(Params(Interval(0.2), Interval(1.9))), IndeterminateError);
}
