#include "orbitcert/lcflow.hpp"

#include "orbitcert/model.hpp"

namespace orbitcert {

LCSystem::LCSystem(const Params& p) : params(p) {
    field4 = record_tape(4, [&](const std::vector<TraceExpr>& in) {
        auto f = lc_field<TraceExpr>(TraceExpr(p.mu), TraceExpr(p.c), in[0], in[1], in[2], in[3]);
        return std::vector<TraceExpr>(f.begin(), f.end());
    });
    jac4 = record_tape(4, [&](const std::vector<TraceExpr>& in) {
        auto j = lc_jacobian<TraceExpr>(TraceExpr(p.mu), TraceExpr(p.c), in[0], in[1], in[2],
                                        in[3]);
        return std::vector<TraceExpr>(j.begin(), j.end());
    });
    field5 = record_tape(5, [&](const std::vector<TraceExpr>& in) {
        auto f = lc_field_aug<TraceExpr>(TraceExpr(p.mu), TraceExpr(p.c), in[0], in[1], in[2],
                                         in[3]);
        return std::vector<TraceExpr>(f.begin(), f.end());
    });
    jac5 = record_tape(5, [&](const std::vector<TraceExpr>& in) {
        auto j = lc_jacobian_aug<TraceExpr>(TraceExpr(p.mu), TraceExpr(p.c), in[0], in[1], in[2],
                                            in[3]);
        return std::vector<TraceExpr>(j.begin(), j.end());
    });
}

} // namespace orbitcert
