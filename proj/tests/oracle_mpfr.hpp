#pragma once

// 256-bit MPFR re-evaluations of the model functions, written directly from
// the closed formulas as an independent oracle for the interval enclosures.
// Test-only; the library proper never links MPFR.

#include <array>

namespace oracle {

// Levi-Civita Hamiltonian K_{mu,c}(z1,z2,w1,w2)
double lc_energy(double mu, double c, double z1, double z2, double w1, double w2);

// Jacobi Hamiltonian H(q1,q2,p1,p2)
double jacobi(double mu, double q1, double q2, double p1, double p2);

// Moser f(xi, eta) and Q = f^2 |eta|^2 / 2
double moser_f(double mu, double c, const std::array<double, 3>& xi,
               const std::array<double, 3>& eta);
double moser_Q(double mu, double c, const std::array<double, 3>& xi,
               const std::array<double, 3>& eta);

// Retrograde margin computed through the coordinate map q + mu = 2 z^2,
// p = w / conj(z) and the rotating-frame formula L_mu - mu q1 - mu^2.
double margin_via_qp(double mu, double z1, double z2, double w1, double w2);

} // namespace oracle
