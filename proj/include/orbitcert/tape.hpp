#pragma once

#include <cstddef>
#include <vector>

#include "orbitcert/interval.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Arithmetic-DAG tape for Taylor-coefficient recurrences.
//
// A vector field written as a template over its scalar ring is traced once
// into a flat op list; the integrator then extends Taylor jets order by
// order with the classical recurrences (products by convolution, division
// and square root by back-substitution).  The same tape also evaluates
// plain interval images for a-priori enclosures.
// ---------------------------------------------------------------------------

enum class OpKind : unsigned char { Input, Const, Add, Sub, Mul, Div, Sqrt, Sqr, Neg };

struct TapeNode {
    OpKind kind;
    int a = -1;
    int b = -1;
    Interval cval{};
};

struct Tape {
    std::vector<TapeNode> nodes;
    int n_inputs = 0;
    std::vector<int> outputs;

    bool is_const(int id) const { return nodes[id].kind == OpKind::Const; }
};

class TapeBuilder {
  public:
    explicit TapeBuilder(int n_inputs) {
        tape_.n_inputs = n_inputs;
        for (int i = 0; i < n_inputs; ++i)
            tape_.nodes.push_back({OpKind::Input, -1, -1, Interval(0.0)});
    }

    int add_const(const Interval& v) {
        tape_.nodes.push_back({OpKind::Const, -1, -1, v});
        return static_cast<int>(tape_.nodes.size()) - 1;
    }
    int add_op(OpKind k, int a, int b = -1) {
        tape_.nodes.push_back({k, a, b, Interval(0.0)});
        return static_cast<int>(tape_.nodes.size()) - 1;
    }
    void mark_output(int id) { tape_.outputs.push_back(id); }
    Tape take() { return std::move(tape_); }

    static TapeBuilder*& current() {
        static thread_local TapeBuilder* cur = nullptr;
        return cur;
    }

  private:
    Tape tape_;
};

// Scalar stand-in used while tracing a template function into a tape.
struct TraceExpr {
    int id = -1;
    TraceExpr() = default;
    explicit TraceExpr(int i) : id(i) {}
    TraceExpr(double v) : id(TapeBuilder::current()->add_const(Interval(v))) {}
    TraceExpr(const Interval& v) : id(TapeBuilder::current()->add_const(v)) {}
};

inline TraceExpr operator+(TraceExpr a, TraceExpr b) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Add, a.id, b.id));
}
inline TraceExpr operator-(TraceExpr a, TraceExpr b) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Sub, a.id, b.id));
}
inline TraceExpr operator*(TraceExpr a, TraceExpr b) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Mul, a.id, b.id));
}
inline TraceExpr operator/(TraceExpr a, TraceExpr b) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Div, a.id, b.id));
}
inline TraceExpr operator-(TraceExpr a) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Neg, a.id));
}
inline TraceExpr sqr(TraceExpr a) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Sqr, a.id));
}
inline TraceExpr sqrt_r(TraceExpr a) {
    return TraceExpr(TapeBuilder::current()->add_op(OpKind::Sqrt, a.id));
}
inline TraceExpr operator+(TraceExpr a, double x) { return a + TraceExpr(x); }
inline TraceExpr operator+(double x, TraceExpr a) { return TraceExpr(x) + a; }
inline TraceExpr operator-(TraceExpr a, double x) { return a - TraceExpr(x); }
inline TraceExpr operator-(double x, TraceExpr a) { return TraceExpr(x) - a; }
inline TraceExpr operator*(TraceExpr a, double x) { return a * TraceExpr(x); }
inline TraceExpr operator*(double x, TraceExpr a) { return TraceExpr(x) * a; }
inline TraceExpr operator/(TraceExpr a, double x) { return a / TraceExpr(x); }
inline TraceExpr operator/(double x, TraceExpr a) { return TraceExpr(x) / a; }

// ring helpers so the same template body works for double / Interval / trace
inline double sqr(double x) { return x * x; }
inline double sqrt_r(double x) { return std::sqrt(x); }
inline Interval sqrt_r(const Interval& a) { return sqrt_i(a); }

// Record a callable (inputs: vector of TraceExpr, returns vector of TraceExpr).
template <class F>
Tape record_tape(int n_inputs, F&& f) {
    TapeBuilder builder(n_inputs);
    TapeBuilder::current() = &builder;
    std::vector<TraceExpr> in(n_inputs);
    for (int i = 0; i < n_inputs; ++i) in[i] = TraceExpr(i);
    std::vector<TraceExpr> out = f(in);
    for (const auto& o : out) builder.mark_output(o.id);
    TapeBuilder::current() = nullptr;
    return builder.take();
}

// ---------------------------------------------------------------------------
// Jet evaluation workspace: Taylor coefficients per node, extended order by
// order.  Input coefficients are supplied by the caller (the ODE recurrence
// x_{k+1} = f_k/(k+1) lives in the integrator).
// ---------------------------------------------------------------------------
class TapeJets {
  public:
    TapeJets() = default;
    TapeJets(const Tape* tape, int order_cap) { reset(tape, order_cap); }

    void reset(const Tape* tape, int order_cap) {
        tape_ = tape;
        cap_ = order_cap;
        coef_.assign(tape->nodes.size() * static_cast<std::size_t>(cap_ + 1), Interval(0.0));
        for (std::size_t n = 0; n < tape_->nodes.size(); ++n)
            if (tape_->nodes[n].kind == OpKind::Const) at(static_cast<int>(n), 0) = tape_->nodes[n].cval;
    }

    int order_cap() const { return cap_; }

    Interval& at(int node, int k) { return coef_[static_cast<std::size_t>(node) * (cap_ + 1) + k]; }
    const Interval& at(int node, int k) const {
        return coef_[static_cast<std::size_t>(node) * (cap_ + 1) + k];
    }

    void set_input(int i, int k, const Interval& v) { at(i, k) = v; }
    const Interval& output(int o, int k) const { return at(tape_->outputs[o], k); }

    // Compute coefficient k of every non-input node (inputs 0..k must be set).
    void forward_order(int k) {
        const auto& nodes = tape_->nodes;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const TapeNode& nd = nodes[n];
            int id = static_cast<int>(n);
            switch (nd.kind) {
            case OpKind::Input:
                break;
            case OpKind::Const:
                if (k > 0) at(id, k) = Interval(0.0);
                break;
            case OpKind::Add:
                at(id, k) = at(nd.a, k) + at(nd.b, k);
                break;
            case OpKind::Sub:
                at(id, k) = at(nd.a, k) - at(nd.b, k);
                break;
            case OpKind::Neg:
                at(id, k) = -at(nd.a, k);
                break;
            case OpKind::Mul: {
                if (tape_->is_const(nd.a)) {
                    at(id, k) = nodes[nd.a].cval * at(nd.b, k);
                } else if (tape_->is_const(nd.b)) {
                    at(id, k) = at(nd.a, k) * nodes[nd.b].cval;
                } else {
                    Interval s(0.0);
                    for (int i = 0; i <= k; ++i) s += at(nd.a, i) * at(nd.b, k - i);
                    at(id, k) = s;
                }
                break;
            }
            case OpKind::Sqr: {
                Interval s(0.0);
                for (int i = 0; 2 * i < k; ++i) s += at(nd.a, i) * at(nd.a, k - i);
                s = s + s;
                if (k % 2 == 0) s += sqr(at(nd.a, k / 2));
                at(id, k) = s;
                break;
            }
            case OpKind::Div: {
                if (tape_->is_const(nd.b)) {
                    at(id, k) = at(nd.a, k) / nodes[nd.b].cval;
                } else {
                    Interval s = at(nd.a, k);
                    for (int i = 1; i <= k; ++i) s -= at(nd.b, i) * at(id, k - i);
                    at(id, k) = s / at(nd.b, 0);
                }
                break;
            }
            case OpKind::Sqrt: {
                if (k == 0) {
                    at(id, 0) = sqrt_i(at(nd.a, 0));
                } else {
                    Interval s(0.0);
                    for (int i = 1; 2 * i < k; ++i) s += at(id, i) * at(id, k - i);
                    s = s + s;
                    if (k % 2 == 0 && k >= 2) s += sqr(at(id, k / 2));
                    Interval num = at(nd.a, k) - s;
                    at(id, k) = num / (Interval(2.0) * at(id, 0));
                }
                break;
            }
            }
        }
    }

  private:
    const Tape* tape_ = nullptr;
    int cap_ = 0;
    std::vector<Interval> coef_;
};

// Plain order-zero interval image of the tape (for rough enclosures).
inline void eval_tape(const Tape& tape, const Interval* in, Interval* out,
                      std::vector<Interval>& scratch) {
    scratch.assign(tape.nodes.size(), Interval(0.0));
    for (std::size_t n = 0; n < tape.nodes.size(); ++n) {
        const TapeNode& nd = tape.nodes[n];
        switch (nd.kind) {
        case OpKind::Input: scratch[n] = in[n]; break;
        case OpKind::Const: scratch[n] = nd.cval; break;
        case OpKind::Add: scratch[n] = scratch[nd.a] + scratch[nd.b]; break;
        case OpKind::Sub: scratch[n] = scratch[nd.a] - scratch[nd.b]; break;
        case OpKind::Neg: scratch[n] = -scratch[nd.a]; break;
        case OpKind::Mul: scratch[n] = scratch[nd.a] * scratch[nd.b]; break;
        case OpKind::Div: scratch[n] = scratch[nd.a] / scratch[nd.b]; break;
        case OpKind::Sqrt: scratch[n] = sqrt_i(scratch[nd.a]); break;
        case OpKind::Sqr: scratch[n] = sqr(scratch[nd.a]); break;
        }
    }
    for (std::size_t o = 0; o < tape.outputs.size(); ++o) out[o] = scratch[tape.outputs[o]];
}

} // namespace orbitcert
