#include "oracle_mpfr.hpp"

#include <mpfr.h>

namespace oracle {

namespace {

constexpr mpfr_prec_t kPrec = 256;

// tiny RAII wrapper; enough arithmetic for the formulas below
struct MP {
    mpfr_t v;
    MP() { mpfr_init2(v, kPrec); }
    MP(double x) {
        mpfr_init2(v, kPrec);
        mpfr_set_d(v, x, MPFR_RNDN);
    }
    MP(const MP& o) {
        mpfr_init2(v, kPrec);
        mpfr_set(v, o.v, MPFR_RNDN);
    }
    MP& operator=(const MP& o) {
        mpfr_set(v, o.v, MPFR_RNDN);
        return *this;
    }
    ~MP() { mpfr_clear(v); }
    double d() const { return mpfr_get_d(v, MPFR_RNDN); }
};

MP operator+(const MP& a, const MP& b) {
    MP r;
    mpfr_add(r.v, a.v, b.v, MPFR_RNDN);
    return r;
}
MP operator-(const MP& a, const MP& b) {
    MP r;
    mpfr_sub(r.v, a.v, b.v, MPFR_RNDN);
    return r;
}
MP operator*(const MP& a, const MP& b) {
    MP r;
    mpfr_mul(r.v, a.v, b.v, MPFR_RNDN);
    return r;
}
MP operator/(const MP& a, const MP& b) {
    MP r;
    mpfr_div(r.v, a.v, b.v, MPFR_RNDN);
    return r;
}
MP operator-(const MP& a) {
    MP r;
    mpfr_neg(r.v, a.v, MPFR_RNDN);
    return r;
}
MP sqrt(const MP& a) {
    MP r;
    mpfr_sqrt(r.v, a.v, MPFR_RNDN);
    return r;
}

} // namespace

double lc_energy(double mu_, double c_, double z1_, double z2_, double w1_, double w2_) {
    MP mu(mu_), c(c_), z1(z1_), z2(z2_), w1(w1_), w2(w2_);
    MP zsq = z1 * z1 + z2 * z2;
    MP wsq = w1 * w1 + w2 * w2;
    // |2 z^2 - 1| with z^2 taken as the complex square
    MP re = MP(2.0) * (z1 * z1 - z2 * z2) - MP(1.0);
    MP im = MP(4.0) * z1 * z2;
    MP dist = sqrt(re * re + im * im);
    MP k = MP(0.5) * wsq + c * zsq - (MP(1.0) - mu) / MP(2.0) +
           MP(2.0) * zsq * (z1 * w2 - z2 * w1) - mu * (z1 * w2 + z2 * w1) - mu * zsq / dist;
    return k.d();
}

double jacobi(double mu_, double q1_, double q2_, double p1_, double p2_) {
    MP mu(mu_), q1(q1_), q2(q2_), p1(p1_), p2(p2_);
    MP d1 = sqrt((q1 + mu) * (q1 + mu) + q2 * q2);
    MP d2 = sqrt((q1 - MP(1.0) + mu) * (q1 - MP(1.0) + mu) + q2 * q2);
    MP h = MP(0.5) * (p1 * p1 + p2 * p2) + q1 * p2 - q2 * p1 - (MP(1.0) - mu) / d1 - mu / d2;
    return h.d();
}

double moser_f(double mu_, double c_, const std::array<double, 3>& xi_,
               const std::array<double, 3>& eta_) {
    MP mu(mu_), c(c_);
    MP xi0(xi_[0]), xi1(xi_[1]), xi2(xi_[2]);
    MP eta0(eta_[0]), eta1(eta_[1]), eta2(eta_[2]);
    MP omx = MP(1.0) - xi0;
    MP nx = eta1 * omx + xi1 * eta0 + MP(1.0);
    MP ny = eta2 * omx + xi2 * eta0;
    MP dist = sqrt(nx * nx + ny * ny);
    MP f = MP(1.0) + omx * (-(c + MP(0.5)) + xi2 * eta1 - xi1 * eta2) - xi2 * (MP(1.0) - mu) -
           (MP(1.0) - mu) * omx / dist;
    return f.d();
}

double moser_Q(double mu_, double c_, const std::array<double, 3>& xi_,
               const std::array<double, 3>& eta_) {
    MP f(moser_f(mu_, c_, xi_, eta_));
    MP e0(eta_[0]), e1(eta_[1]), e2(eta_[2]);
    MP q = MP(0.5) * f * f * (e0 * e0 + e1 * e1 + e2 * e2);
    return q.d();
}

double margin_via_qp(double mu_, double z1_, double z2_, double w1_, double w2_) {
    MP mu(mu_), z1(z1_), z2(z2_), w1(w1_), w2(w2_);
    // q + mu = 2 z^2 (complex), p = w / conj(z) = w z / |z|^2
    MP q1 = MP(2.0) * (z1 * z1 - z2 * z2) - mu;
    MP q2 = MP(4.0) * z1 * z2;
    MP zsq = z1 * z1 + z2 * z2;
    MP p1 = (w1 * z1 - w2 * z2) / zsq;
    MP p2 = (w1 * z2 + w2 * z1) / zsq;
    MP Lmu = (q1 + mu) * p2 - q2 * p1;
    MP m = Lmu - mu * q1 - mu * mu;
    return m.d();
}

} // namespace oracle
