#pragma once

// Rationally 2-isogenous pairs over Q: arbitrary-precision Weierstrass models,
// reduction mod p, and load-time verification that E' really is the Velu
// quotient of E by the marked kernel point.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

#include "anomalous/isogeny.hpp"

namespace anomalous {

using bigint = boost::multiprecision::cpp_int;

struct RationalModel {
    bigint a1, a2, a3, a4, a6;
};

struct RationalPair {
    std::string label;
    RationalModel E;
    RationalModel Ep;
    bigint kernel_num;      // x-coordinate of the kernel point on E, as num/den
    bigint kernel_den = 1;
};

inline u64 mod_to_u64(const bigint& x, u64 p) {
    bigint r = x % p;
    if (r < 0) r += p;
    return static_cast<u64>(r);
}

// Residues of a big model mod p, packaged for reduce_model (which only ever
// sees the coefficients through F::from_int).
inline CurveModel model_mod_p(const RationalModel& m, u64 p, const std::string& label) {
    return CurveModel{static_cast<i64>(mod_to_u64(m.a1, p)), static_cast<i64>(mod_to_u64(m.a2, p)),
                      static_cast<i64>(mod_to_u64(m.a3, p)), static_cast<i64>(mod_to_u64(m.a4, p)),
                      static_cast<i64>(mod_to_u64(m.a6, p)), label};
}

template <class F>
struct ReducedPair {
    Reduction<F> E;
    Reduction<F> Ep;
    typename F::Elem kernel_x;  // on the depressed model of E
};

// Reduce both curves and the kernel x-coordinate at p.  Returns nullopt when
// either curve has bad reduction (or the kernel denominator vanishes, which
// only happens at bad primes for an integral pair).
template <class F>
std::optional<ReducedPair<F>> reduce_pair(const RationalPair& pair, const F& f) {
    const u64 p = f.p;
    auto rE = reduce_model(model_mod_p(pair.E, p, pair.label), f);
    auto rEp = reduce_model(model_mod_p(pair.Ep, p, pair.label), f);
    if (!rE || !rEp) return std::nullopt;
    u64 den = mod_to_u64(pair.kernel_den, p);
    if (den == 0) return std::nullopt;
    auto kx = f.mul(f.from_int(static_cast<i64>(mod_to_u64(pair.kernel_num, p))),
                    f.inv(f.from_int(static_cast<i64>(den))));
    auto x0 = transported_x(*rE, kx);
    if (!f.is_zero(curve_rhs(rE->ec, x0)))
        throw consistency_error("reduce_pair: kernel point is not 2-torsion mod " + std::to_string(p));
    return ReducedPair<F>{*rE, *rEp, x0};
}

// Load-time sanity check: at the first five good primes, the Velu quotient of
// E by the kernel point has the j-invariant of E' and the two curves have the
// same number of points.
inline void verify_pair(const RationalPair& pair) {
    int checked = 0;
    Rng rng(0x70616972);
    for (u64 p = 5; checked < 5; ++p) {
        if (!is_prime(p)) continue;
        if (p > 1000) throw error("verify_pair: no good primes below 1000 for " + pair.label);
        FpField f(p);
        std::optional<ReducedPair<FpField>> rp;
        try {
            rp = reduce_pair(pair, f);
        } catch (const consistency_error&) {
            throw error("verify_pair: kernel is not 2-torsion on " + pair.label);
        }
        if (!rp) continue;
        auto iso = velu2(rp->E.ec, pt_make<FpField>(rp->kernel_x, 0));
        if (!f.eq(j_invariant(iso.image), j_invariant(rp->Ep.ec)))
            throw error("verify_pair: E' is not the quotient of E by the kernel for " + pair.label);
        if (count_points_fp(rp->E.ec, rng) != count_points_fp(rp->Ep.ec, rng))
            throw error("verify_pair: point counts disagree at p=" + std::to_string(p) +
                        " for " + pair.label);
        ++checked;
    }
}

}  // namespace anomalous
