#pragma once

// Non-rigorous double-precision pipeline: approximate orbit locations for
// seeding, reference trajectories for tests, and plot data.  Nothing in
// here feeds a certificate except as a starting guess.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "orbitcert/dynamics.hpp"
#include "orbitcert/linalg.hpp"

namespace orbitcert::approx {

struct DParams {
    double mu = 0;
    double c = 0;
};

DVec<4> field(const DParams& p, const DVec<4>& x);
DVec<5> field_aug(const DParams& p, const DVec<5>& x);
double energy(const DParams& p, const DVec<4>& x);
double margin(const DParams& p, const DVec<4>& x);

// classical fixed-step RK4
DVec<4> rk4_step(const DParams& p, const DVec<4>& x, double h);
DVec<5> rk4_step_aug(const DParams& p, const DVec<5>& x, double h);

// trajectory sampled every h from t=0 to t=T (inclusive end)
std::vector<DVec<4>> trajectory(const DParams& p, const DVec<4>& x0, double T, double h);

// state + 4x4 variational matrix, flattened row-major into 20 components
DVec<20> rk4_step_var(const DParams& p, const DVec<20>& x, double h);
DMat<4, 4> monodromy(const DParams& p, const DVec<4>& x0, double T, double h);

// locus lift; NaN when the discriminant is negative
double locus_w(const DParams& p, Axis axis, Branch br, double coord);
DVec<4> locus_point(const DParams& p, Axis axis, Branch br, double coord);
double locus_bound(const DParams& p, Axis axis);

// first crossing of z1 = 0 or z2 = 0 after leaving the start
struct FirstHit {
    double t = 0;
    DVec<4> x{};
    int section = -1; // coordinate index that vanished (0 = z1, 1 = z2)
};
std::optional<FirstHit> first_any_hit(const DParams& p, const DVec<4>& x0, double tmax,
                                      double h);

// slope of the first-hit map from a locus point: w2 at a z1=0 hit,
// w1 at a z2=0 hit
struct SlopeSample {
    double coord = 0;
    double slope = 0;
    int section = -1;
    double t = 0;
};
std::optional<SlopeSample> slope_at(const DParams& p, Axis axis, Branch br, double coord,
                                    double tmax = 60.0, double h = 2e-3);

// approximate symmetric periodic orbit found by grid + bisection on the
// slope function (the paper's grid-search + Newton seed, quarantined here)
struct SeedOrbit {
    Axis axis = Axis::Plus;
    Branch branch = Branch::Pos;
    double coord = 0;       // locus coordinate of the zero
    int first_section = -1; // 0: lands on the other locus, 1: returns home
    double t_hit = 0;       // first-hit time
    double period = 0;      // full Levi-Civita period (4 t or 2 t)
    double action = 0;      // augmented-action over the full period
    double margin_min = 0, margin_max = 0;
    double trace_reduced = 0;        // tr Psi over half the LC period
    double trace_reduced_double = 0; // tr Psi over the full LC period
};

std::vector<SeedOrbit> find_symmetric_orbits(const DParams& p, Axis axis, Branch br,
                                             int grid = 600, double tmax = 60.0,
                                             double h = 2e-3);

// reduced-monodromy trace diagnostics (double pipeline)
double reduced_trace(const DParams& p, const DVec<4>& x0, double T, double h);

// CSV helpers for orbit-dump
std::string orbit_csv(const DParams& p, const DVec<4>& x0, double T, double h);

} // namespace orbitcert::approx
