#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "orbitcert/interval.hpp"
#include "orbitcert/linalg.hpp"

namespace orbitcert {

// Interval vector of runtime dimension; the covering algorithms work on
// these, the integrator uses the fixed-size IVec<N>.
struct Box {
    std::vector<Interval> coords;

    Box() = default;
    explicit Box(std::vector<Interval> c) : coords(std::move(c)) {
        if (coords.empty()) throw DomainError("Box: empty coordinate list");
    }
    template <std::size_t N>
    explicit Box(const IVec<N>& v) : coords(v.begin(), v.end()) {}

    std::size_t dim() const { return coords.size(); }
    const Interval& operator[](std::size_t i) const { return coords[i]; }
    Interval& operator[](std::size_t i) { return coords[i]; }

    std::vector<double> midpoint() const {
        std::vector<double> m(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) m[i] = coords[i].mid();
        return m;
    }

    double width() const {
        double w = 0;
        for (const auto& c : coords) w = std::max(w, c.width());
        return w;
    }

    std::size_t widest_axis() const {
        std::size_t a = 0;
        double w = coords[0].width();
        for (std::size_t i = 1; i < coords.size(); ++i)
            if (coords[i].width() > w) {
                w = coords[i].width();
                a = i;
            }
        return a;
    }

    bool contains(const Box& other) const {
        if (other.dim() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (!coords[i].contains(other.coords[i])) return false;
        return true;
    }

    template <std::size_t N>
    IVec<N> fixed() const {
        if (dim() != N) throw DomainError("Box: dimension mismatch");
        IVec<N> v;
        for (std::size_t i = 0; i < N; ++i) v[i] = coords[i];
        return v;
    }
};

// Split along the widest coordinate; pieces overlap only on the cut plane
// and their union is the input.
inline std::pair<Box, Box> bisect(const Box& b) {
    std::size_t a = b.widest_axis();
    double m = b.coords[a].mid();
    Box left = b, right = b;
    left.coords[a] = Interval::unchecked(b.coords[a].lo, m);
    right.coords[a] = Interval::unchecked(m, b.coords[a].hi);
    return {left, right};
}

inline Box hull(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DomainError("Box hull: dimension mismatch");
    Box r = a;
    for (std::size_t i = 0; i < a.dim(); ++i) r.coords[i] = hull(a.coords[i], b.coords[i]);
    return r;
}

// Empty intersection is a distinguished value, not an error.
inline std::optional<Box> intersect(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DomainError("Box intersect: dimension mismatch");
    Box r = a;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        Interval out;
        if (!intersect(a.coords[i], b.coords[i], out)) return std::nullopt;
        r.coords[i] = out;
    }
    return r;
}

} // namespace orbitcert
