#include "orbitcert/approx.hpp"

#include <cmath>

#include "orbitcert/model.hpp"

namespace orbitcert::approx {

DVec<4> field(const DParams& p, const DVec<4>& x) {
    auto f = lc_field<double>(p.mu, p.c, x[0], x[1], x[2], x[3]);
    return {f[0], f[1], f[2], f[3]};
}

DVec<5> field_aug(const DParams& p, const DVec<5>& x) {
    auto f = lc_field_aug<double>(p.mu, p.c, x[0], x[1], x[2], x[3]);
    return {f[0], f[1], f[2], f[3], f[4]};
}

double energy(const DParams& p, const DVec<4>& x) {
    return lc_energy<double>(p.mu, p.c, x[0], x[1], x[2], x[3]);
}

double margin(const DParams& p, const DVec<4>& x) {
    return lc_margin<double>(p.mu, x[0], x[1], x[2], x[3]);
}

namespace {

template <std::size_t N, class F>
DVec<N> rk4_generic(const F& f, const DVec<N>& x, double h) {
    DVec<N> k1 = f(x), t{};
    for (std::size_t i = 0; i < N; ++i) t[i] = x[i] + 0.5 * h * k1[i];
    DVec<N> k2 = f(t);
    for (std::size_t i = 0; i < N; ++i) t[i] = x[i] + 0.5 * h * k2[i];
    DVec<N> k3 = f(t);
    for (std::size_t i = 0; i < N; ++i) t[i] = x[i] + h * k3[i];
    DVec<N> k4 = f(t);
    DVec<N> r{};
    for (std::size_t i = 0; i < N; ++i)
        r[i] = x[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return r;
}

} // namespace

DVec<4> rk4_step(const DParams& p, const DVec<4>& x, double h) {
    return rk4_generic<4>([&](const DVec<4>& y) { return field(p, y); }, x, h);
}

DVec<5> rk4_step_aug(const DParams& p, const DVec<5>& x, double h) {
    return rk4_generic<5>([&](const DVec<5>& y) { return field_aug(p, y); }, x, h);
}

std::vector<DVec<4>> trajectory(const DParams& p, const DVec<4>& x0, double T, double h) {
    std::vector<DVec<4>> out;
    DVec<4> x = x0;
    out.push_back(x);
    long n = static_cast<long>(std::ceil(T / h));
    for (long i = 0; i < n; ++i) {
        double step = std::min(h, T - i * h);
        if (step <= 0) break;
        x = rk4_step(p, x, step);
        out.push_back(x);
    }
    return out;
}

DVec<20> rk4_step_var(const DParams& p, const DVec<20>& x, double h) {
    auto f20 = [&](const DVec<20>& y) {
        DVec<20> r{};
        auto f = lc_field<double>(p.mu, p.c, y[0], y[1], y[2], y[3]);
        auto df = lc_jacobian<double>(p.mu, p.c, y[0], y[1], y[2], y[3]);
        for (int i = 0; i < 4; ++i) r[i] = f[i];
        // M' = Df . M with M row-major in y[4..19]
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += df[i * 4 + k] * y[4 + k * 4 + j];
                r[4 + i * 4 + j] = s;
            }
        return r;
    };
    return rk4_generic<20>(f20, x, h);
}

DMat<4, 4> monodromy(const DParams& p, const DVec<4>& x0, double T, double h) {
    DVec<20> y{};
    for (int i = 0; i < 4; ++i) y[i] = x0[i];
    y[4] = y[9] = y[14] = y[19] = 1.0;
    long n = static_cast<long>(std::ceil(T / h));
    for (long i = 0; i < n; ++i) {
        double step = std::min(h, T - i * h);
        if (step <= 0) break;
        y = rk4_step_var(p, y, step);
    }
    DMat<4, 4> m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = y[4 + i * 4 + j];
    return m;
}

double locus_w(const DParams& p, Axis axis, Branch br, double coord) {
    double xs = coord * coord;
    double a, b;
    if (axis == Axis::Plus) {
        a = p.mu * coord - 2.0 * xs * coord;
        b = p.c * xs - p.mu * xs / std::abs(1.0 - 2.0 * xs) - (1.0 - p.mu) * 0.5;
    } else {
        a = 2.0 * xs * coord + p.mu * coord;
        b = p.c * xs - p.mu * xs / (1.0 + 2.0 * xs) - (1.0 - p.mu) * 0.5;
    }
    double disc = a * a - 2.0 * b;
    if (disc < 0) return std::nan("");
    return (br == Branch::Pos) ? a + std::sqrt(disc) : a - std::sqrt(disc);
}

DVec<4> locus_point(const DParams& p, Axis axis, Branch br, double coord) {
    double w = locus_w(p, axis, br, coord);
    if (axis == Axis::Plus) return {coord, 0.0, 0.0, w};
    return {0.0, coord, w, 0.0};
}

double locus_bound(const DParams& p, Axis axis) {
    double cap = (axis == Axis::Plus) ? 0.70 : 2.0;
    double lo = 0.0, hi = 0.0;
    for (double x = 0.01; x < cap; x += 0.01) {
        if (std::isnan(locus_w(p, axis, Branch::Pos, x))) {
            hi = x;
            break;
        }
        lo = x;
    }
    if (hi == 0.0) return cap;
    for (int i = 0; i < 80; ++i) {
        double m = 0.5 * (lo + hi);
        (std::isnan(locus_w(p, axis, Branch::Pos, m)) ? hi : lo) = m;
    }
    return lo;
}

std::optional<FirstHit> first_any_hit(const DParams& p, const DVec<4>& x0, double tmax,
                                      double h) {
    DVec<4> x = x0;
    double t = 0;
    bool armed[2] = {std::abs(x0[0]) > 1e-9, std::abs(x0[1]) > 1e-9};
    while (t < tmax) {
        DVec<4> xn = rk4_step(p, x, h);
        double tn = t + h;
        for (int s = 0; s < 2; ++s) {
            if (!armed[s]) {
                if (std::abs(xn[s]) > 1e-7) armed[s] = true;
                continue;
            }
            if (x[s] == 0.0 || (x[s] > 0) == (xn[s] > 0)) continue;
            // bisect the crossing inside [t, tn]
            DVec<4> a = x;
            double ta = t, tb = tn;
            for (int it = 0; it < 60; ++it) {
                double tm = 0.5 * (ta + tb);
                DVec<4> mstate = rk4_step(p, a, tm - ta);
                if ((mstate[s] > 0) == (a[s] > 0)) {
                    a = mstate;
                    ta = tm;
                } else {
                    tb = tm;
                }
            }
            FirstHit hit;
            hit.t = 0.5 * (ta + tb);
            hit.x = rk4_step(p, a, hit.t - ta);
            hit.x[s] = 0.0;
            hit.section = s;
            return hit;
        }
        x = xn;
        t = tn;
    }
    return std::nullopt;
}

std::optional<SlopeSample> slope_at(const DParams& p, Axis axis, Branch br, double coord,
                                    double tmax, double h) {
    DVec<4> x0 = locus_point(p, axis, br, coord);
    if (std::isnan(x0[2]) || std::isnan(x0[3])) return std::nullopt;
    auto hit = first_any_hit(p, x0, tmax, h);
    if (!hit) return std::nullopt;
    SlopeSample s;
    s.coord = coord;
    s.section = hit->section;
    s.t = hit->t;
    s.slope = (hit->section == 0) ? hit->x[3] : hit->x[2]; // w2 on S-, w1 on S+
    return s;
}

namespace {

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

DVec<4> matvec(const DMat<4, 4>& m, const DVec<4>& v) {
    DVec<4> r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += m(i, j) * v[j];
    return r;
}

// frame columns U, V at x (normalized J grad / K grad)
void frame_at(const DParams& p, const DVec<4>& x, DVec<4>& U, DVec<4>& V) {
    auto g4 = lc_grad<double>(p.mu, p.c, x[0], x[1], x[2], x[3]);
    DVec<4> g{g4[0], g4[1], g4[2], g4[3]};
    double n = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
    U = matvec(quat_J(), g);
    V = matvec(quat_K(), g);
    for (int i = 0; i < 4; ++i) {
        U[i] /= n;
        V[i] /= n;
    }
}

} // namespace

double reduced_trace(const DParams& p, const DVec<4>& x0, double T, double h) {
    DMat<4, 4> M = monodromy(p, x0, T, h);
    DVec<4> xT = x0;
    {
        long n = static_cast<long>(std::ceil(T / h));
        for (long i = 0; i < n; ++i) {
            double step = std::min(h, T - i * h);
            if (step <= 0) break;
            xT = rk4_step(p, xT, step);
        }
    }
    DVec<4> U0, V0, UT, VT;
    frame_at(p, x0, U0, V0);
    frame_at(p, xT, UT, VT);
    // Psi = Om2^T F(xT)^T Om4 M F(x0), Om4 = -I_quat
    DVec<4> MU0 = matvec(M, U0), MV0 = matvec(M, V0);
    const DMat<4, 4>& qi = quat_I();
    auto om4 = [&](const DVec<4>& v) {
        DVec<4> r = matvec(qi, v);
        for (int i = 0; i < 4; ++i) r[i] = -r[i];
        return r;
    };
    DVec<4> oMU0 = om4(MU0), oMV0 = om4(MV0);
    auto dot4 = [](const DVec<4>& a, const DVec<4>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    };
    double a = dot4(UT, oMU0), b = dot4(UT, oMV0);
    double c = dot4(VT, oMU0), d = dot4(VT, oMV0);
    // Om2^T [ [U^T om4 M U, ...] ]: Om2^T (row swap with signs)
    double psi11 = -c, psi22 = b;
    (void)a;
    (void)d;
    return psi11 + psi22;
}

std::vector<SeedOrbit> find_symmetric_orbits(const DParams& p, Axis axis, Branch br, int grid,
                                             double tmax, double h) {
    std::vector<SeedOrbit> out;
    double B = locus_bound(p, axis);
    double lo = -B * 0.995, hi = B * 0.995;
    std::vector<SlopeSample> samples;
    for (int i = 0; i <= grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        auto s = slope_at(p, axis, br, x, tmax, h);
        if (s) samples.push_back(*s);
    }
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        if (a.section != b.section) continue;
        if (a.slope == 0.0 || (a.slope > 0) == (b.slope > 0)) continue;
        // bisect the slope zero
        double xa = a.coord, xb = b.coord;
        double sa = a.slope;
        SlopeSample best = a;
        for (int it = 0; it < 60; ++it) {
            double xm = 0.5 * (xa + xb);
            auto sm = slope_at(p, axis, br, xm, tmax, h);
            if (!sm || sm->section != a.section) break;
            best = *sm;
            if ((sm->slope > 0) == (sa > 0)) {
                xa = xm;
                sa = sm->slope;
            } else {
                xb = xm;
            }
        }
        SeedOrbit orb;
        orb.axis = axis;
        orb.branch = br;
        orb.coord = 0.5 * (xa + xb);
        orb.first_section = best.section;
        orb.t_hit = best.t;
        bool lands_other = (axis == Axis::Plus) ? (best.section == 0) : (best.section == 1);
        orb.period = lands_other ? 4.0 * best.t : 2.0 * best.t;

        DVec<4> x0 = locus_point(p, axis, br, orb.coord);
        // margin range and action over one full period
        DVec<5> y{x0[0], x0[1], x0[2], x0[3], 0.0};
        double mn = margin(p, x0), mx = mn;
        long n = static_cast<long>(std::ceil(orb.period / h));
        for (long k = 0; k < n; ++k) {
            double step = std::min(h, orb.period - k * h);
            if (step <= 0) break;
            y = rk4_step_aug(p, y, step);
            double m = margin(p, {y[0], y[1], y[2], y[3]});
            mn = std::min(mn, m);
            mx = std::max(mx, m);
        }
        orb.action = y[4];
        orb.margin_min = mn;
        orb.margin_max = mx;
        orb.trace_reduced = reduced_trace(p, x0, orb.period * 0.5, h);
        orb.trace_reduced_double = reduced_trace(p, x0, orb.period, h);
        out.push_back(orb);
    }
    return out;
}

std::string orbit_csv(const DParams& p, const DVec<4>& x0, double T, double h) {
    std::string out = "t,z1,z2,w1,w2,q1,q2,margin,K\n";
    DVec<4> x = x0;
    double t = 0;
    long n = static_cast<long>(std::ceil(T / h));
    for (long i = 0; i <= n; ++i) {
        double q1 = 2.0 * (x[0] * x[0] - x[1] * x[1]) - p.mu;
        double q2 = 4.0 * x[0] * x[1];
        out += std::to_string(t) + "," + std::to_string(x[0]) + "," + std::to_string(x[1]) +
               "," + std::to_string(x[2]) + "," + std::to_string(x[3]) + "," +
               std::to_string(q1) + "," + std::to_string(q2) + "," +
               std::to_string(margin(p, x)) + "," + std::to_string(energy(p, x)) + "\n";
        x = rk4_step(p, x, std::min(h, T - i * h));
        t += h;
    }
    return out;
}

} // namespace orbitcert::approx
