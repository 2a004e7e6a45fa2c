#include "orbitcert/dynamics.hpp"

#include <cmath>

#include "orbitcert/model.hpp"

namespace orbitcert {

namespace {

// |2z^2 - 1|^2 as an interval; must exclude zero for K and its derivatives
// to be defined (collision with the second primary).
Interval second_primary_gap_sq(const LCState& s) {
    Interval ss = sqr(s.z1) + sqr(s.z2);
    return 4.0 * sqr(ss) - 4.0 * (sqr(s.z1) - sqr(s.z2)) + 1.0;
}

void require_gap(const LCState& s) {
    if (!(second_primary_gap_sq(s).lo > 0.0))
        throw DomainError("|2z^2-1| enclosure touches zero (second-primary collision)");
}

} // namespace

Interval eval_jacobi(const Params& p, const IVec2& q, const IVec2& pm) {
    Interval kinetic = 0.5 * (sqr(pm[0]) + sqr(pm[1]));
    Interval ang = q[0] * pm[1] - q[1] * pm[0];
    Interval h = kinetic + ang;
    bool first_massive = !(p.mu.lo == 1.0 && p.mu.hi == 1.0);
    bool second_massive = !(p.mu.lo == 0.0 && p.mu.hi == 0.0);
    if (first_massive) {
        Interval d1 = sqr(q[0] + p.mu) + sqr(q[1]);
        if (!(d1.lo > 0.0))
            throw DomainError("eval_jacobi: first collision distance encloses zero");
        h -= (1.0 - p.mu) / sqrt_i(d1);
    }
    if (second_massive) {
        Interval d2 = sqr(q[0] - 1.0 + p.mu) + sqr(q[1]);
        if (!(d2.lo > 0.0))
            throw DomainError("eval_jacobi: second collision distance encloses zero");
        h -= p.mu / sqrt_i(d2);
    }
    return h;
}

Interval eval_K(const Params& p, const LCState& s) {
    require_gap(s);
    return lc_energy<Interval>(p.mu, p.c, s.z1, s.z2, s.w1, s.w2);
}

IVec4 grad_K(const Params& p, const LCState& s) {
    require_gap(s);
    auto g = lc_grad<Interval>(p.mu, p.c, s.z1, s.z2, s.w1, s.w2);
    return {g[0], g[1], g[2], g[3]};
}

IMat4 hess_K(const Params& p, const LCState& s) {
    require_gap(s);
    auto h = lc_hess<Interval>(p.mu, p.c, s.z1, s.z2, s.w1, s.w2);
    IMat4 m;
    for (int i = 0; i < 16; ++i) m.e[i] = h[i];
    return m;
}

IVec4 field_K(const Params& p, const LCState& s) {
    require_gap(s);
    auto f = lc_field<Interval>(p.mu, p.c, s.z1, s.z2, s.w1, s.w2);
    return {f[0], f[1], f[2], f[3]};
}

IVec<5> field_aug(const Params& p, const AugmentedState& s) {
    require_gap(s.state);
    auto f = lc_field_aug<Interval>(p.mu, p.c, s.state.z1, s.state.z2, s.state.w1, s.state.w2);
    return {f[0], f[1], f[2], f[3], f[4]};
}

Interval eval_moser_f(const Params& p, const IVec<3>& xi, const IVec<3>& eta) {
    Interval one_m_xi0 = 1.0 - xi[0];
    Interval nx = eta[1] * one_m_xi0 + xi[1] * eta[0] + 1.0;
    Interval ny = eta[2] * one_m_xi0 + xi[2] * eta[0];
    Interval dist_sq = sqr(nx) + sqr(ny);
    if (!(dist_sq.lo > 0.0))
        throw DomainError("eval_moser_f: distance enclosure contains zero");
    Interval rot = xi[2] * eta[1] - xi[1] * eta[2];
    return 1.0 + one_m_xi0 * (-(p.c + 0.5) + rot) - xi[2] * (1.0 - p.mu) -
           (1.0 - p.mu) * one_m_xi0 / sqrt_i(dist_sq);
}

Interval eval_moser_Q(const Params& p, const IVec<3>& xi, const IVec<3>& eta) {
    Interval f = eval_moser_f(p, xi, eta);
    Interval eta_sq = sqr(eta[0]) + sqr(eta[1]) + sqr(eta[2]);
    return 0.5 * sqr(f) * eta_sq;
}

Interval retrograde_margin(const Params& p, const LCState& s) {
    Interval zsq = sqr(s.z1) + sqr(s.z2);
    if (zsq.contains_zero())
        throw DomainError("retrograde_margin: |z|^2 enclosure contains zero");
    return lc_margin<Interval>(p.mu, s.z1, s.z2, s.w1, s.w2);
}

Interval critical_energy(const Interval& mu) {
    if (mu.lo == 0.0 && mu.hi == 0.0) {
        // analytic limit: 1/2 r^2 + 1/r minimized at r = 1
        return Interval(1.5);
    }
    if (!(mu.lo > 0.0) || !(mu.hi < 1.0))
        throw IndeterminateError("critical_energy: tighten mu into (0,1)");

    // bisection for an approximate root of ubar' (increasing, unique root)
    double mum = mu.mid();
    double lo = 1e-4, hi = 1.0 - 1e-4;
    if (!(ubar_prime(mum, lo) < 0.0) || !(ubar_prime(mum, hi) > 0.0))
        throw IndeterminateError("critical_energy: no sign change of ubar' on (0,1)");
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        (ubar_prime(mum, m) < 0.0 ? lo : hi) = m;
    }
    double r0 = 0.5 * (lo + hi);

    // interval Newton with inflation until contraction certifies the root
    for (double rad = std::max(1e-12, 4.0 * mu.width()); rad < 0.2; rad *= 8.0) {
        Interval X(r0 - rad, r0 + rad);
        if (!(X.lo > 0.0) || !(X.hi < 1.0)) break;
        for (int it = 0; it < 12; ++it) {
            Interval m(X.mid());
            Interval N = m - ubar_prime(mu, m) / ubar_second(mu, X);
            if (N.lo > X.lo && N.hi < X.hi) {
                // contraction: unique root of ubar'(mu,.) in X for every mu
                Interval Xn;
                while (intersect(N, X, Xn) && Xn.width() < 0.999 * X.width()) {
                    X = Xn;
                    m = Interval(X.mid());
                    N = m - ubar_prime(mu, m) / ubar_second(mu, X);
                }
                return ubar(mu, X);
            }
            Interval Xn;
            if (!intersect(N, X, Xn)) break;
            if (Xn.width() >= X.width()) break;
            X = Xn;
        }
    }
    throw IndeterminateError("critical_energy: interval Newton did not certify; tighten mu");
}

bool certify_above_critical(const Params& p) {
    Interval c1 = critical_energy(p.mu);
    return p.c.lo > c1.hi;
}

namespace {

struct LocusQuad {
    Interval a;    // linear coefficient: w = a +- sqrt(a^2 - 2b)
    Interval b;    // constant term of 1/2 w^2 + (-a) w + b
};

LocusQuad locus_quad(const Params& p, Axis axis, const Interval& x) {
    Interval xs = sqr(x);
    if (axis == Axis::Plus) {
        Interval D = abs_i(1.0 - 2.0 * xs);
        if (!(D.lo > 0.0)) throw DomainError("locus: |1-2 z1^2| encloses zero");
        return {p.mu * x - 2.0 * xs * x, p.c * xs - p.mu * xs / D - (1.0 - p.mu) * 0.5};
    }
    Interval D = 1.0 + 2.0 * xs;
    return {2.0 * xs * x + p.mu * x, p.c * xs - p.mu * xs / D - (1.0 - p.mu) * 0.5};
}

} // namespace

Interval locus_disc(const Params& p, Axis axis, const Interval& x) {
    LocusQuad q = locus_quad(p, axis, x);
    return sqr(q.a) - 2.0 * q.b;
}

Interval locus_disc_prime(const Params& p, Axis axis, const Interval& x) {
    Interval xs = sqr(x);
    if (axis == Axis::Plus) {
        Interval a = p.mu * x - 2.0 * xs * x;
        Interval ap = p.mu - 6.0 * xs;
        Interval D = 1.0 - 2.0 * xs;
        Interval bp = 2.0 * p.c * x - 2.0 * p.mu * x / sqr(D);
        return 2.0 * a * ap - 2.0 * bp;
    }
    Interval a = 2.0 * xs * x + p.mu * x;
    Interval ap = 6.0 * xs + p.mu;
    Interval D = 1.0 + 2.0 * xs;
    Interval bp = 2.0 * p.c * x - 2.0 * p.mu * x / sqr(D);
    return 2.0 * a * ap - 2.0 * bp;
}

LCState fixed_locus_param(const Params& p, Axis axis, Branch br, const Interval& coord,
                          bool clamp_disc) {
    LocusQuad q = locus_quad(p, axis, coord);
    Interval disc = sqr(q.a) - 2.0 * q.b;
    if (disc.hi < 0.0) throw DomainError("fixed_locus_param: negative discriminant");
    Interval root;
    if (disc.lo < 0.0) {
        if (!clamp_disc)
            throw IndeterminateError("fixed_locus_param: discriminant enclosure straddles zero");
        root = sqrt_clamped(disc);
    } else {
        root = sqrt_i(disc);
    }
    Interval w = (br == Branch::Pos) ? q.a + root : q.a - root;
    if (axis == Axis::Plus) return LCState(coord, Interval(0.0), Interval(0.0), w);
    return LCState(Interval(0.0), coord, w, Interval(0.0));
}

Interval locus_boundary(const Params& p, Axis axis) {
    // approximate first positive root of the discriminant by double bisection
    auto disc_mid = [&](double x) { return locus_disc(p, axis, Interval(x)).mid(); };
    double lo = 0.0, hi = 0.05;
    double cap = (axis == Axis::Plus) ? 0.70 : 2.0;
    while (hi < cap && disc_mid(hi) > 0.0) {
        lo = hi;
        hi += 0.05;
    }
    if (hi >= cap) throw IndeterminateError("locus_boundary: no sign change found");
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        (disc_mid(m) > 0.0 ? lo : hi) = m;
    }
    double r0 = 0.5 * (lo + hi);

    for (double rad = std::max(1e-12, 4.0 * (p.mu.width() + p.c.width())); rad < 0.05;
         rad *= 8.0) {
        Interval X(r0 - rad, r0 + rad);
        for (int it = 0; it < 12; ++it) {
            Interval m(X.mid());
            Interval N = m - locus_disc(p, axis, m) / locus_disc_prime(p, axis, X);
            if (N.lo > X.lo && N.hi < X.hi) {
                Interval Xn;
                while (intersect(N, X, Xn) && Xn.width() < 0.999 * X.width()) {
                    X = Xn;
                    m = Interval(X.mid());
                    N = m - locus_disc(p, axis, m) / locus_disc_prime(p, axis, X);
                }
                return X;
            }
            Interval Xn;
            if (!intersect(N, X, Xn)) break;
            if (Xn.width() >= X.width()) break;
            X = Xn;
        }
    }
    throw IndeterminateError("locus_boundary: interval Newton did not certify");
}

Interval locus_dw(const Params& p, Axis axis, Branch br, const Interval& coord) {
    LCState s = fixed_locus_param(p, axis, br, coord);
    IVec4 g = grad_K(p, s);
    if (axis == Axis::Plus) {
        if (g[3].contains_zero())
            throw IndeterminateError("locus_dw: dK/dw2 encloses zero on the locus");
        return -g[0] / g[3];
    }
    if (g[2].contains_zero())
        throw IndeterminateError("locus_dw: dK/dw1 encloses zero on the locus");
    return -g[1] / g[2];
}

HillBounds hill_bounds(const Params& p) {
    if (!(p.mu.lo >= 0.0 && p.mu.hi <= 0.5) || !(p.c.lo >= 2.1))
        throw IndeterminateError("hill_bounds: valid for mu in [0,1/2], c >= 2.1");
    Interval r = (3.0 - 2.0 * p.mu) / 5.0;
    Interval excl = ubar(p.mu, r);
    if (!(excl.hi < p.c.lo))
        throw IndeterminateError("hill_bounds: exclusion point not certified outside Hill region");
    // d_{mu,c} <= (3-2mu)/5, so 2|z|^2 <= (3-2mu)/5 on Sigma
    Interval z2b = Interval(0.0, r.hi);
    // |w| <= sqrt(1-mu) + |A(z) z| with |A(z)z| <= (2|z|^2 + mu) |z|
    Interval zmax = sqrt_i(Interval(0.0, detail::div_up(z2b.hi, 2.0)));
    Interval wb = sqrt_i(1.0 - p.mu) + (z2b + p.mu) * zmax;
    return {z2b, Interval(0.0, wb.hi)};
}

} // namespace orbitcert
