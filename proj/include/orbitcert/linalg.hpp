#pragma once

#include <array>
#include <cstddef>
#include <cmath>

#include "orbitcert/interval.hpp"

namespace orbitcert {

template <std::size_t N>
using IVec = std::array<Interval, N>;
template <std::size_t N>
using DVec = std::array<double, N>;

template <std::size_t R, std::size_t C>
struct IMat {
    std::array<Interval, R * C> e{};
    Interval& operator()(std::size_t i, std::size_t j) { return e[i * C + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return e[i * C + j]; }
};

template <std::size_t R, std::size_t C>
struct DMat {
    std::array<double, R * C> e{};
    double& operator()(std::size_t i, std::size_t j) { return e[i * C + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return e[i * C + j]; }
};

using IVec2 = IVec<2>;
using IVec4 = IVec<4>;
using IMat2 = IMat<2, 2>;
using IMat3 = IMat<3, 3>;
using IMat4 = IMat<4, 4>;

// --- element-wise -----------------------------------------------------

template <std::size_t N>
IVec<N> operator+(const IVec<N>& a, const IVec<N>& b) {
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}
template <std::size_t N>
IVec<N> operator-(const IVec<N>& a, const IVec<N>& b) {
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}
template <std::size_t N>
IVec<N> operator*(const Interval& s, const IVec<N>& a) {
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = s * a[i];
    return r;
}

template <std::size_t R, std::size_t C>
IMat<R, C> operator+(const IMat<R, C>& a, const IMat<R, C>& b) {
    IMat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}
template <std::size_t R, std::size_t C>
IMat<R, C> operator-(const IMat<R, C>& a, const IMat<R, C>& b) {
    IMat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

// --- products ----------------------------------------------------------

template <std::size_t R, std::size_t C>
IVec<R> operator*(const IMat<R, C>& m, const IVec<C>& v) {
    IVec<R> r;
    for (std::size_t i = 0; i < R; ++i) {
        Interval s(0.0);
        for (std::size_t j = 0; j < C; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

template <std::size_t R, std::size_t K, std::size_t C>
IMat<R, C> operator*(const IMat<R, K>& a, const IMat<K, C>& b) {
    IMat<R, C> r;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < K; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <std::size_t N>
Interval dot(const IVec<N>& a, const IVec<N>& b) {
    Interval s(0.0);
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
Interval norm2_sq(const IVec<N>& a) {
    Interval s(0.0);
    for (std::size_t i = 0; i < N; ++i) s += sqr(a[i]);
    return s;
}

template <std::size_t R, std::size_t C>
IMat<C, R> transpose(const IMat<R, C>& a) {
    IMat<C, R> r;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) r(j, i) = a(i, j);
    return r;
}

template <std::size_t N>
IMat<N, N> identity_i() {
    IMat<N, N> r;
    for (std::size_t i = 0; i < N; ++i) r(i, i) = Interval(1.0);
    return r;
}

template <std::size_t N>
Interval trace(const IMat<N, N>& a) {
    Interval s(0.0);
    for (std::size_t i = 0; i < N; ++i) s += a(i, i);
    return s;
}

// --- conversions ---------------------------------------------------------

template <std::size_t R, std::size_t C>
IMat<R, C> to_interval(const DMat<R, C>& a) {
    IMat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.e[i] = Interval(a.e[i]);
    return r;
}
template <std::size_t N>
IVec<N> to_interval(const DVec<N>& a) {
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = Interval(a[i]);
    return r;
}
template <std::size_t R, std::size_t C>
DMat<R, C> mid(const IMat<R, C>& a) {
    DMat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.e[i] = a.e[i].mid();
    return r;
}
template <std::size_t N>
DVec<N> mid(const IVec<N>& a) {
    DVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i].mid();
    return r;
}

template <std::size_t R, std::size_t K, std::size_t C>
DMat<R, C> operator*(const DMat<R, K>& a, const DMat<K, C>& b) {
    DMat<R, C> r;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < K; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <std::size_t N>
DMat<N, N> identity_d() {
    DMat<N, N> r;
    for (std::size_t i = 0; i < N; ++i) r(i, i) = 1.0;
    return r;
}

// --- factorizations ------------------------------------------------------

// Modified Gram-Schmidt orthonormalization of a point matrix; columns that
// collapse fall back to unit vectors so the result is always invertible.
template <std::size_t N>
DMat<N, N> qr_orthonormalize(const DMat<N, N>& a) {
    DMat<N, N> q = a;
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double d = 0;
            for (std::size_t i = 0; i < N; ++i) d += q(i, k) * q(i, j);
            for (std::size_t i = 0; i < N; ++i) q(i, j) -= d * q(i, k);
        }
        double n = 0;
        for (std::size_t i = 0; i < N; ++i) n += q(i, j) * q(i, j);
        n = std::sqrt(n);
        if (!(n > 1e-300)) {
            for (std::size_t i = 0; i < N; ++i) q(i, j) = (i == j) ? 1.0 : 0.0;
            // re-orthogonalize the substituted column
            for (std::size_t k = 0; k < j; ++k) {
                double d = 0;
                for (std::size_t i = 0; i < N; ++i) d += q(i, k) * q(i, j);
                for (std::size_t i = 0; i < N; ++i) q(i, j) -= d * q(i, k);
            }
            n = 0;
            for (std::size_t i = 0; i < N; ++i) n += q(i, j) * q(i, j);
            n = std::sqrt(n);
        }
        for (std::size_t i = 0; i < N; ++i) q(i, j) /= n;
    }
    return q;
}

// Floating approximate inverse by Gauss-Jordan with partial pivoting.
template <std::size_t N>
bool approx_inverse(const DMat<N, N>& a, DMat<N, N>& out) {
    DMat<N, N> m = a;
    DMat<N, N> inv = identity_d<N>();
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < N; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return false;
        if (piv != c)
            for (std::size_t j = 0; j < N; ++j) {
                std::swap(m(piv, j), m(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        double d = m(c, c);
        for (std::size_t j = 0; j < N; ++j) {
            m(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < N; ++r) {
            if (r == c) continue;
            double f = m(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) {
                m(r, j) -= f * m(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    out = inv;
    return true;
}

// Rigorous enclosure of B^{-1} for a well-conditioned point matrix B:
// with Y ~ B^{-1} and E = I - Y B, B^{-1} = (I-E)^{-1} Y lies in
// Y + [-d, d] entrywise, d = |E|_inf |Y|_inf / (1 - |E|_inf).
template <std::size_t N>
bool verified_inverse(const DMat<N, N>& b, IMat<N, N>& out,
                      const DMat<N, N>* hint = nullptr) {
    DMat<N, N> y;
    if (hint) {
        y = *hint;
    } else if (!approx_inverse(b, y)) {
        return false;
    }
    IMat<N, N> e = identity_i<N>() - to_interval(y) * to_interval(b);
    double enorm = 0, ynorm = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double es = 0, ys = 0;
        for (std::size_t j = 0; j < N; ++j) {
            es = detail::add_up(es, abs_i(e(i, j)).hi);
            ys = detail::add_up(ys, std::abs(y(i, j)));
        }
        enorm = std::max(enorm, es);
        ynorm = std::max(ynorm, ys);
    }
    if (enorm >= 1.0) return false;
    double d = detail::div_up(detail::mul_up(enorm, ynorm), detail::sub_down(1.0, enorm));
    Interval pad = Interval::unchecked(-d, d);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out(i, j) = Interval(y(i, j)) + pad;
    return true;
}

// Cofactor expansion with balanced association (keeps interval growth down).
inline Interval det3(const IMat3& m) {
    Interval c0 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    Interval c1 = m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0);
    Interval c2 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    return (m(0, 0) * c0 - m(0, 1) * c1) + m(0, 2) * c2;
}

inline Interval det2(const IMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

template <std::size_t N>
bool contains(const IVec<N>& outer, const IVec<N>& inner) {
    for (std::size_t i = 0; i < N; ++i)
        if (!outer[i].contains(inner[i])) return false;
    return true;
}
template <std::size_t N>
bool contains_point(const IVec<N>& outer, const DVec<N>& x) {
    for (std::size_t i = 0; i < N; ++i)
        if (!outer[i].contains(x[i])) return false;
    return true;
}
template <std::size_t N>
IVec<N> hull(const IVec<N>& a, const IVec<N>& b) {
    IVec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = hull(a[i], b[i]);
    return r;
}
template <std::size_t R, std::size_t C>
bool contains(const IMat<R, C>& outer, const IMat<R, C>& inner) {
    for (std::size_t i = 0; i < R * C; ++i)
        if (!outer.e[i].contains(inner.e[i])) return false;
    return true;
}
template <std::size_t R, std::size_t C>
IMat<R, C> hull(const IMat<R, C>& a, const IMat<R, C>& b) {
    IMat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.e[i] = hull(a.e[i], b.e[i]);
    return r;
}
template <std::size_t N>
double max_width(const IVec<N>& a) {
    double w = 0;
    for (std::size_t i = 0; i < N; ++i) w = std::max(w, a[i].width());
    return w;
}
template <std::size_t R, std::size_t C>
double max_width(const IMat<R, C>& a) {
    double w = 0;
    for (std::size_t i = 0; i < R * C; ++i) w = std::max(w, a.e[i].width());
    return w;
}

} // namespace orbitcert
