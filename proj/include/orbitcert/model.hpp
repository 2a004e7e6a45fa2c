#pragma once

#include <array>

#include "orbitcert/tape.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Regularized planar circular restricted three-body problem at the first
// primary, in Levi-Civita coordinates (z1, z2; w1, w2).
//
//   K = 1/2 |w|^2 + c |z|^2 - (1-mu)/2 + 2|z|^2 (z1 w2 - z2 w1)
//       - mu (z1 w2 + z2 w1) - mu |z|^2 / |2 z^2 - 1|
//
// with |2z^2 - 1| = sqrt(4|z|^4 - 4(z1^2 - z2^2) + 1).  Everything below is
// written over a generic scalar ring so the same body evaluates in plain
// doubles, in intervals, and under tape tracing for Taylor recurrences.
// All derivatives are closed forms (validated against finite differences in
// the test suite), not numerical differences.
// ---------------------------------------------------------------------------

template <class T>
T lc_energy(const T& mu, const T& c, const T& z1, const T& z2, const T& w1, const T& w2) {
    T s = sqr(z1) + sqr(z2);
    T P = z1 * w2 - z2 * w1;
    T Q = z1 * w2 + z2 * w1;
    T u = 4.0 * sqr(s) - 4.0 * (sqr(z1) - sqr(z2)) + 1.0;
    T rho = sqrt_r(u);
    return 0.5 * (sqr(w1) + sqr(w2)) + c * s - (1.0 - mu) * 0.5 + 2.0 * s * P - mu * Q -
           mu * s / rho;
}

// gradient in the order (z1, z2, w1, w2)
template <class T>
std::array<T, 4> lc_grad(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                         const T& w2) {
    T zs1 = sqr(z1), zs2 = sqr(z2);
    T s = zs1 + zs2;
    T d2 = zs1 - zs2;
    T P = z1 * w2 - z2 * w1;
    T u = 4.0 * sqr(s) - 4.0 * d2 + 1.0;
    T rho = sqrt_r(u);
    T iu32 = 1.0 / (u * rho);
    // d/dz_i of mu |z|^2 / rho, simplified
    T g1 = mu * (2.0 * z1) * (1.0 + 2.0 * s - 4.0 * d2) * iu32;
    T g2 = mu * (2.0 * z2) * (1.0 - 2.0 * s - 4.0 * d2) * iu32;
    T two_s = 2.0 * s;
    return {2.0 * c * z1 + 4.0 * z1 * P + two_s * w2 - mu * w2 - g1,
            2.0 * c * z2 + 4.0 * z2 * P - two_s * w1 - mu * w1 - g2,
            w1 - two_s * z2 - mu * z2,
            w2 + two_s * z1 - mu * z1};
}

// Hamiltonian vector field X_K = (dK/dw, -dK/dz)
template <class T>
std::array<T, 4> lc_field(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                          const T& w2) {
    auto g = lc_grad(mu, c, z1, z2, w1, w2);
    return {g[2], g[3], -g[0], -g[1]};
}

// field augmented with the action variable, dA/dt = (w dz - z dw)(X_K)
template <class T>
std::array<T, 5> lc_field_aug(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                              const T& w2) {
    auto g = lc_grad(mu, c, z1, z2, w1, w2);
    T adot = w1 * g[2] + w2 * g[3] + z1 * g[0] + z2 * g[1];
    return {g[2], g[3], -g[0], -g[1], adot};
}

// full 4x4 Hessian of K, row-major in the order (z1, z2, w1, w2)
template <class T>
std::array<T, 16> lc_hess(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                          const T& w2) {
    T zs1 = sqr(z1), zs2 = sqr(z2);
    T s = zs1 + zs2;
    T d2 = zs1 - zs2;
    T P = z1 * w2 - z2 * w1;
    T u = 4.0 * sqr(s) - 4.0 * d2 + 1.0;
    T rho = sqrt_r(u);
    T iu32 = 1.0 / (u * rho);
    T iu52 = iu32 / u;
    T A1 = 1.0 + 2.0 * s - 4.0 * d2;
    T A2 = 1.0 - 2.0 * s - 4.0 * d2;
    T G11 = 2.0 * mu * (A1 - 4.0 * zs1) * iu32 - 24.0 * mu * zs1 * A1 * (2.0 * s - 1.0) * iu52;
    T G22 = 2.0 * mu * (A2 + 4.0 * zs2) * iu32 - 24.0 * mu * zs2 * A2 * (2.0 * s + 1.0) * iu52;
    T G12 = 24.0 * mu * z1 * z2 * iu32 - 24.0 * mu * z1 * z2 * A1 * (2.0 * s + 1.0) * iu52;

    T h11 = 2.0 * c + 4.0 * P + 8.0 * z1 * w2 - G11;
    T h12 = -4.0 * z1 * w1 + 4.0 * z2 * w2 - G12;
    T h22 = 2.0 * c + 4.0 * P - 8.0 * z2 * w1 - G22;
    T h13 = -4.0 * z1 * z2;
    T h14 = 2.0 * s + 4.0 * zs1 - mu;
    T h23 = -(2.0 * s + 4.0 * zs2 + mu);
    T h24 = 4.0 * z1 * z2;
    T one = T(1.0), zero = T(0.0);
    return {h11, h12, h13, h14, //
            h12, h22, h23, h24, //
            h13, h23, one, zero, //
            h14, h24, zero, one};
}

// Jacobian of the vector field, Df = I . Hess K (rows w1,w2 of the Hessian,
// then the negated z rows)
template <class T>
std::array<T, 16> lc_jacobian(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                              const T& w2) {
    auto h = lc_hess(mu, c, z1, z2, w1, w2);
    std::array<T, 16> j;
    for (int col = 0; col < 4; ++col) {
        j[0 * 4 + col] = h[2 * 4 + col];
        j[1 * 4 + col] = h[3 * 4 + col];
        j[2 * 4 + col] = -h[0 * 4 + col];
        j[3 * 4 + col] = -h[1 * 4 + col];
    }
    return j;
}

// Jacobian of the augmented field (A column is zero, A row differentiates
// (w dz - z dw)(X_K) in the phase variables)
template <class T>
std::array<T, 25> lc_jacobian_aug(const T& mu, const T& c, const T& z1, const T& z2, const T& w1,
                                  const T& w2) {
    auto h = lc_hess(mu, c, z1, z2, w1, w2);
    auto g = lc_grad(mu, c, z1, z2, w1, w2);
    std::array<T, 25> j;
    T zero = T(0.0);
    for (int r = 0; r < 5; ++r) j[r * 5 + 4] = zero;
    for (int col = 0; col < 4; ++col) {
        j[0 * 5 + col] = h[2 * 4 + col];
        j[1 * 5 + col] = h[3 * 4 + col];
        j[2 * 5 + col] = -h[0 * 4 + col];
        j[3 * 5 + col] = -h[1 * 4 + col];
        // d/dx_col of (z . dK/dz + w . dK/dw)
        T acc = g[col] + z1 * h[0 * 4 + col] + z2 * h[1 * 4 + col] + w1 * h[2 * 4 + col] +
                w2 * h[3 * 4 + col];
        j[4 * 5 + col] = acc;
    }
    return j;
}

// Retrograde margin L_mu - mu q1 - mu^2 pulled back through q + mu = 2 z^2,
// p = w / conj(z); the pullback collapses to 2(z1 w2 - z2 w1) - 2 mu (z1^2 - z2^2).
template <class T>
T lc_margin(const T& mu, const T& z1, const T& z2, const T& w1, const T& w2) {
    return 2.0 * (z1 * w2 - z2 * w1) - 2.0 * mu * (sqr(z1) - sqr(z2));
}

// Negative effective potential restricted to the segment between the
// primaries, as a function of the distance r from the first primary.
template <class T>
T ubar(const T& mu, const T& r) {
    return 0.5 * sqr(r) + (1.0 - mu) / r + mu / (1.0 - r) - mu * r + 0.5 * sqr(mu);
}
template <class T>
T ubar_prime(const T& mu, const T& r) {
    return r - (1.0 - mu) / sqr(r) + mu / sqr(1.0 - r) - mu;
}
template <class T>
T ubar_second(const T& mu, const T& r) {
    return 1.0 + 2.0 * (1.0 - mu) / (sqr(r) * r) + 2.0 * mu / (sqr(1.0 - r) * (1.0 - r));
}

} // namespace orbitcert
