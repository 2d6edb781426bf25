#pragma once

// Elliptic curve core over F_p and F_{p^2}: reduction of rational models,
// group law, point counting (naive and BSGS), extension orders from the
// trace, 2-Sylow structure with independent cross-checks, 2-torsion roots,
// and the Lemma-5.4 halving quartic.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "anomalous/arith.hpp"
#include "anomalous/poly.hpp"
#include "anomalous/rng.hpp"

namespace anomalous {

// Long Weierstrass model over Q: y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct CurveModel {
    i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
    std::string label;
};

// Short (depressed) Weierstrass curve y^2 = x^3 + Ax + B over a field F.
template <class F>
struct ECurve {
    F field;
    typename F::Elem A, B;
};

template <class F>
struct Point {
    typename F::Elem x{}, y{};
    bool inf = true;
};

template <class F>
Point<F> pt_infinity() {
    return Point<F>{};
}

template <class F>
Point<F> pt_make(const typename F::Elem& x, const typename F::Elem& y) {
    Point<F> r;
    r.x = x;
    r.y = y;
    r.inf = false;
    return r;
}

template <class F>
bool pt_eq(const F& f, const Point<F>& P, const Point<F>& Q) {
    if (P.inf || Q.inf) return P.inf == Q.inf;
    return f.eq(P.x, Q.x) && f.eq(P.y, Q.y);
}

template <class F>
typename F::Elem curve_rhs(const ECurve<F>& ec, const typename F::Elem& x) {
    const F& f = ec.field;
    return f.add(f.mul(f.add(f.sqr(x), ec.A), x), ec.B);
}

template <class F>
bool on_curve(const ECurve<F>& ec, const Point<F>& P) {
    if (P.inf) return true;
    const F& f = ec.field;
    return f.eq(f.sqr(P.y), curve_rhs(ec, P.x));
}

template <class F>
Point<F> pt_neg(const ECurve<F>& ec, const Point<F>& P) {
    if (P.inf) return P;
    return pt_make<F>(P.x, ec.field.neg(P.y));
}

// Affine group law.
template <class F>
Point<F> pt_add(const ECurve<F>& ec, const Point<F>& P, const Point<F>& Q) {
    const F& f = ec.field;
    if (P.inf) return Q;
    if (Q.inf) return P;
    typename F::Elem lambda;
    if (f.eq(P.x, Q.x)) {
        if (!f.eq(P.y, Q.y) || f.is_zero(P.y)) return pt_infinity<F>();
        // Tangent: (3x^2 + A) / 2y.
        auto num = f.add(f.mul(f.from_int(3), f.sqr(P.x)), ec.A);
        auto den = f.mul(f.from_int(2), P.y);
        lambda = f.mul(num, f.inv(den));
    } else {
        lambda = f.mul(f.sub(Q.y, P.y), f.inv(f.sub(Q.x, P.x)));
    }
    auto x3 = f.sub(f.sub(f.sqr(lambda), P.x), Q.x);
    auto y3 = f.sub(f.mul(lambda, f.sub(P.x, x3)), P.y);
    return pt_make<F>(x3, y3);
}

template <class F>
Point<F> pt_dbl(const ECurve<F>& ec, const Point<F>& P) {
    return pt_add(ec, P, P);
}

// ---------------------------------------------------------------------------
// Scalar multiplication (Jacobian coordinates internally: no inversions)
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
struct JacPt {
    typename F::Elem X{}, Y{}, Z{};  // Z = 0 encodes infinity
};

template <class F>
bool jac_inf(const F& f, const JacPt<F>& P) {
    return f.is_zero(P.Z);
}

template <class F>
JacPt<F> jac_from_affine(const F& f, const Point<F>& P) {
    if (P.inf) return JacPt<F>{f.one(), f.one(), f.zero()};
    return JacPt<F>{P.x, P.y, f.one()};
}

template <class F>
Point<F> jac_to_affine(const ECurve<F>& ec, const JacPt<F>& P) {
    const F& f = ec.field;
    if (jac_inf(f, P)) return pt_infinity<F>();
    auto zi = f.inv(P.Z);
    auto zi2 = f.sqr(zi);
    return pt_make<F>(f.mul(P.X, zi2), f.mul(P.Y, f.mul(zi2, zi)));
}

// dbl-2007-bl / standard Jacobian doubling for y^2 = x^3 + Ax + B.
template <class F>
JacPt<F> jac_dbl(const ECurve<F>& ec, const JacPt<F>& P) {
    const F& f = ec.field;
    if (jac_inf(f, P) || f.is_zero(P.Y)) return JacPt<F>{f.one(), f.one(), f.zero()};
    auto XX = f.sqr(P.X);
    auto YY = f.sqr(P.Y);
    auto YYYY = f.sqr(YY);
    auto ZZ = f.sqr(P.Z);
    auto S = f.mul(f.from_int(2), f.sub(f.sub(f.sqr(f.add(P.X, YY)), XX), YYYY));
    auto M = f.add(f.mul(f.from_int(3), XX), f.mul(ec.A, f.sqr(ZZ)));
    auto X3 = f.sub(f.sqr(M), f.mul(f.from_int(2), S));
    auto Y3 = f.sub(f.mul(M, f.sub(S, X3)), f.mul(f.from_int(8), YYYY));
    auto Z3 = f.sub(f.sub(f.sqr(f.add(P.Y, P.Z)), YY), ZZ);
    return JacPt<F>{X3, Y3, Z3};
}

// Mixed addition Jacobian + affine (madd-2007-bl).
template <class F>
JacPt<F> jac_add_mixed(const ECurve<F>& ec, const JacPt<F>& P, const Point<F>& Q) {
    const F& f = ec.field;
    if (Q.inf) return P;
    if (jac_inf(f, P)) return jac_from_affine(f, Q);
    auto Z1Z1 = f.sqr(P.Z);
    auto U2 = f.mul(Q.x, Z1Z1);
    auto S2 = f.mul(Q.y, f.mul(P.Z, Z1Z1));
    if (f.eq(U2, P.X)) {
        if (f.eq(S2, P.Y)) return jac_dbl(ec, P);
        return JacPt<F>{f.one(), f.one(), f.zero()};
    }
    auto H = f.sub(U2, P.X);
    auto HH = f.sqr(H);
    auto I = f.mul(f.from_int(4), HH);
    auto J = f.mul(H, I);
    auto r = f.mul(f.from_int(2), f.sub(S2, P.Y));
    auto V = f.mul(P.X, I);
    auto X3 = f.sub(f.sub(f.sqr(r), J), f.mul(f.from_int(2), V));
    auto Y3 = f.sub(f.mul(r, f.sub(V, X3)), f.mul(f.from_int(2), f.mul(P.Y, J)));
    auto Z3 = f.sub(f.sub(f.sqr(f.add(P.Z, H)), Z1Z1), HH);
    return JacPt<F>{X3, Y3, Z3};
}

}  // namespace detail

template <class F>
Point<F> scalar_mul(const ECurve<F>& ec, u64 n, const Point<F>& P) {
    const F& f = ec.field;
    if (n == 0 || P.inf) return pt_infinity<F>();
    detail::JacPt<F> R{f.one(), f.one(), f.zero()};
    for (int i = 63 - std::countl_zero(n); i >= 0; --i) {
        R = detail::jac_dbl(ec, R);
        if ((n >> i) & 1) R = detail::jac_add_mixed(ec, R, P);
    }
    return detail::jac_to_affine(ec, R);
}

// ---------------------------------------------------------------------------
// Reduction of rational models
// ---------------------------------------------------------------------------

template <class F>
struct Reduction {
    ECurve<F> ec;
    typename F::Elem b2;  // needed to transport marked x-coordinates
};

// Reduce a long Weierstrass model to depressed form y^2 = x^3 + Ax + B via
// the standard (u = 6) substitution X = 36x + 3b2, Y = 216(y + (a1 x + a3)/2).
// Returns nullopt on bad reduction (discriminant vanishes mod p).
template <class F>
std::optional<Reduction<F>> reduce_model(const CurveModel& mod, const F& f) {
    auto a1 = f.from_int(mod.a1), a2 = f.from_int(mod.a2), a3 = f.from_int(mod.a3);
    auto a4 = f.from_int(mod.a4), a6 = f.from_int(mod.a6);
    auto b2 = f.add(f.sqr(a1), f.mul(f.from_int(4), a2));
    auto b4 = f.add(f.mul(f.from_int(2), a4), f.mul(a1, a3));
    auto b6 = f.add(f.sqr(a3), f.mul(f.from_int(4), a6));
    auto c4 = f.sub(f.sqr(b2), f.mul(f.from_int(24), b4));
    auto c6 = f.add(f.sub(f.mul(f.from_int(36), f.mul(b2, b4)), f.mul(f.sqr(b2), b2)),
                    f.mul(f.from_int(-216), b6));
    auto A = f.mul(f.from_int(-27), c4);
    auto B = f.mul(f.from_int(-54), c6);
    // disc = (c4^3 - c6^2)/1728; vanishes iff 4A^3 + 27B^2 = 0 (p >= 5).
    auto disc = f.add(f.mul(f.from_int(4), f.mul(f.sqr(A), A)), f.mul(f.from_int(27), f.sqr(B)));
    if (f.is_zero(disc)) return std::nullopt;
    return Reduction<F>{ECurve<F>{f, A, B}, b2};
}

// Image of a rational x-coordinate under the depression substitution.
template <class F>
typename F::Elem transported_x(const Reduction<F>& red, const typename F::Elem& x) {
    const F& f = red.ec.field;
    return f.add(f.mul(f.from_int(36), x), f.mul(f.from_int(3), red.b2));
}

template <class F>
typename F::Elem j_invariant(const ECurve<F>& ec) {
    const F& f = ec.field;
    auto a3 = f.mul(f.from_int(4), f.mul(f.sqr(ec.A), ec.A));
    auto disc = f.add(a3, f.mul(f.from_int(27), f.sqr(ec.B)));
    return f.mul(f.from_int(1728), f.mul(a3, f.inv(disc)));
}

// ---------------------------------------------------------------------------
// Random points
// ---------------------------------------------------------------------------

template <class F>
Point<F> random_point(const ECurve<F>& ec, Rng& rng) {
    const F& f = ec.field;
    for (;;) {
        auto x = f.rand(rng);
        auto rhs = curve_rhs(ec, x);
        if (f.is_zero(rhs)) return pt_make<F>(x, f.zero());
        auto s = f.sqrt(rhs);
        if (!s) continue;
        auto y = rng.coin() ? f.neg(*s) : *s;
        return pt_make<F>(x, y);
    }
}

// ---------------------------------------------------------------------------
// Point counting over F_p
// ---------------------------------------------------------------------------

// Naive Legendre-sum count with a precomputed square table: O(p).
inline u64 count_points_naive(const ECurve<FpField>& ec) {
    const u64 p = ec.field.p;
    std::vector<std::uint8_t> sq(p, 0);
    for (u64 x = 0; x <= (p - 1) / 2; ++x) sq[mulmod(x, x, p)] = 1;
    u64 n = 1;  // infinity
    for (u64 x = 0; x < p; ++x) {
        u64 v = addmod(mulmod(addmod(mulmod(x, x, p), ec.A, p), x, p), ec.B, p);
        if (v == 0)
            n += 1;
        else if (sq[v])
            n += 2;
    }
    return n;
}

namespace detail {

// All n in [lo, hi] with n*P = infinity, via baby-step giant-step.
inline std::vector<u64> annihilators_in_interval(const ECurve<FpField>& ec, const Point<FpField>& P,
                                                 u64 lo, u64 hi) {
    const FpField& f = ec.field;
    const u64 width = hi - lo + 1;
    const u64 m = isqrt_u64(width) + 1;
    std::unordered_map<u64, std::vector<u64>> baby;  // x-coord -> exponents j
    std::vector<Point<FpField>> babies(m);
    Point<FpField> R = pt_infinity<FpField>();
    for (u64 j = 0; j < m; ++j) {
        babies[j] = R;
        if (!R.inf) baby[R.x].push_back(j);
        R = pt_add(ec, R, P);
    }
    auto G = scalar_mul(ec, m, P);
    std::vector<u64> found;
    auto note = [&](u64 n) {
        if (n < lo || n > hi) return;
        if (!scalar_mul(ec, n, P).inf) return;
        for (u64 v : found)
            if (v == n) return;
        found.push_back(n);
    };
    Point<FpField> Q = scalar_mul(ec, lo, P);
    for (u64 i = 0; lo + i * m <= hi + m; ++i) {
        u64 base = lo + i * m;
        if (Q.inf) {
            note(base);
        } else {
            auto it = baby.find(Q.x);
            if (it != baby.end()) {
                for (u64 j : it->second) {
                    if (j == 0) continue;
                    if (f.eq(Q.y, babies[j].y)) note(base - j);  // Q = jP
                    note(base + j);                              // covers Q = -jP
                }
            }
        }
        Q = pt_add(ec, Q, G);
    }
    std::sort(found.begin(), found.end());
    return found;
}

// Exact order of P given some annihilating exponents.
inline u64 order_from_annihilators(const ECurve<FpField>& ec, const Point<FpField>& P,
                                   const std::vector<u64>& anns) {
    if (anns.empty()) throw error("BSGS found no annihilator in the Hasse interval");
    u64 g = 0;
    for (u64 n : anns) g = std::gcd(g, n);
    for (u64 q : factor(g)) {
        while (g % q == 0 && scalar_mul(ec, g / q, P).inf) g /= q;
    }
    return g;
}

}  // namespace detail

// BSGS order finding in the Hasse interval.  Ambiguity (several multiples of
// the observed exponent in the interval) is resolved by also sampling the
// quadratic twist, whose point orders divide 2p+2-N; for p > 229 the combined
// constraints single out N (Mestre).  Small primes may keep exceptional
// ambiguous curves, where the naive count is authoritative anyway.
inline u64 count_points_bsgs(const ECurve<FpField>& ec, Rng& rng) {
    const FpField& f = ec.field;
    const u64 p = f.p;
    const u64 s = isqrt_u64(4 * p);
    const u64 lo = p + 1 > s ? p + 1 - s : 1;
    const u64 hi = p + 1 + s;
    // Quadratic twist by the smallest non-residue c: y^2 = x^3 + Ac^2 x + Bc^3.
    u64 c = 2;
    while (legendre(static_cast<i64>(c), p) != -1) ++c;
    ECurve<FpField> tw{f, f.mul(ec.A, f.sqr(c)), f.mul(ec.B, f.mul(f.sqr(c), c))};
    u64 L = 1, Ltw = 1;
    for (int attempt = 0; attempt < 32; ++attempt) {
        const ECurve<FpField>& side = (attempt & 1) ? tw : ec;
        auto P = random_point(side, rng);
        auto anns = detail::annihilators_in_interval(side, P, lo, hi);
        u64 ord = detail::order_from_annihilators(side, P, anns);
        ((attempt & 1) ? Ltw : L) = std::lcm((attempt & 1) ? Ltw : L, ord);
        std::vector<u64> cands;
        for (u64 n = ((lo + L - 1) / L) * L; n <= hi; n += L)
            if ((2 * p + 2 - n) % Ltw == 0) cands.push_back(n);
        if (cands.empty()) throw error("BSGS: no candidate order in the Hasse interval");
        if (cands.size() == 1 && attempt >= 1) return cands[0];
    }
    if (p < (u64(1) << 16)) return count_points_naive(ec);
    throw error("BSGS: ambiguous group order after 32 points (p=" + std::to_string(p) + ")");
}

// Exact group order over F_p: naive below 2^16, BSGS above.
inline u64 count_points_fp(const ECurve<FpField>& ec, Rng& rng) {
    return ec.field.p < (u64(1) << 16) ? count_points_naive(ec) : count_points_bsgs(ec, rng);
}

// ---------------------------------------------------------------------------
// Extension orders from the trace
// ---------------------------------------------------------------------------

// N_m = p^m + 1 - t_m with t_1 = t, t_2 = t^2 - 2p, t_m = t*t_{m-1} - p*t_{m-2}.
inline u64 order_ext(i64 t, u64 p, int m) {
    if (m < 1 || m > 3) throw error("order_ext: extension degree out of supported range");
    i128 tm1 = t, tm2 = 2;  // t_0 = 2
    for (int i = 2; i <= m; ++i) {
        i128 tm = i128(t) * tm1 - i128(p) * tm2;
        tm2 = tm1;
        tm1 = tm;
    }
    u128 pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    i128 n = i128(pm) + 1 - tm1;
    if (n <= 0 || n > i128(~u64(0))) throw error("order_ext: order out of 64-bit range");
    return static_cast<u64>(n);
}

// ---------------------------------------------------------------------------
// 2-torsion, halving quartic, and the 2-Sylow shape
// ---------------------------------------------------------------------------

template <class F>
std::vector<typename F::Elem> two_torsion_roots(const ECurve<F>& ec, Rng& rng) {
    const F& f = ec.field;
    Poly<F> cubic = poly::from_coeffs(f, {ec.B, ec.A, f.zero(), f.one()});
    return poly::roots(f, cubic, rng);
}

// Lemma 5.4 quartic: the x-coordinates of the halves of (xi, eta) are the
// roots of x^4 - 4 xi x^3 - 2A x^2 + (-4 xi A - 8B) x + (A^2 - 4 xi B).
template <class F>
Poly<F> halving_quartic(const ECurve<F>& ec, const typename F::Elem& xi) {
    const F& f = ec.field;
    auto c0 = f.sub(f.sqr(ec.A), f.mul(f.mul(f.from_int(4), xi), ec.B));
    auto c1 = f.neg(f.add(f.mul(f.mul(f.from_int(4), xi), ec.A), f.mul(f.from_int(8), ec.B)));
    auto c2 = f.mul(f.from_int(-2), ec.A);
    auto c3 = f.mul(f.from_int(-4), xi);
    return poly::from_coeffs(f, {c0, c1, c2, c3, f.one()});
}

template <class F>
bool halving_quartic_splits(const ECurve<F>& ec, const typename F::Elem& xi) {
    return poly::splits_completely(ec.field, halving_quartic(ec, xi));
}

// Verifies E[2^k] subset E(F_q) for k >= 1 by iterated halving chains above
// every 2-torsion point (Lemma 5.4 realized directly).  Each chain step
// demands a completely-split quartic plus an actually rational half point
// (square right-hand side); both are necessary and the three chains together
// are sufficient.
template <class F>
bool full_two_power_torsion(const ECurve<F>& ec, int k, Rng& rng) {
    const F& f = ec.field;
    auto roots = two_torsion_roots(ec, rng);
    if (roots.size() != 3) return false;
    if (k == 1) return true;
    using Elem = typename F::Elem;
    std::map<std::pair<int, Elem>, bool, std::less<>> memo;
    std::function<bool(const Elem&, int)> chain = [&](const Elem& xi, int rounds) -> bool {
        if (rounds == 0) return true;
        auto key = std::make_pair(rounds, xi);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ok = false;
        auto quartic = halving_quartic(ec, xi);
        if (poly::splits_completely(f, quartic)) {
            for (const auto& u : poly::roots(f, quartic, rng)) {
                if (!f.sqrt(curve_rhs(ec, u))) continue;  // half not rational
                if (chain(u, rounds - 1)) {
                    ok = true;
                    break;
                }
            }
        }
        memo.emplace(key, ok);
        return ok;
    };
    for (const auto& r : roots)
        if (!chain(r, k - 1)) return false;
    return true;
}

struct SylowShape {
    int a = 0, b = 0;  // 2-Sylow isomorphic to Z/2^a x Z/2^b, a <= b
    bool operator==(const SylowShape&) const = default;
};

// Randomized 2-Sylow shape with three independent cross-checks (Weil-pairing
// divisibility, 2-torsion root count, halving chains).  40 samples leave a
// < 2^-40 chance of missing the true exponent; any miss is then caught by the
// cross-checks and turned into a hard error instead of silent bad data.
template <class F>
SylowShape two_sylow(const ECurve<F>& ec, u64 N, Rng& rng) {
    const F& f = ec.field;
    if (N & 1) return {0, 0};
    int v = std::countr_zero(N);
    u64 odd = N >> v;
    int b = 0;
    for (int i = 0; i < 40 && b < v; ++i) {
        auto P = random_point(ec, rng);
        auto Q = scalar_mul(ec, odd, P);
        int e = 0;
        while (!Q.inf) {
            Q = pt_dbl(ec, Q);
            ++e;
            if (e > v) throw consistency_error("two_sylow: point order does not divide N");
        }
        b = std::max(b, e);
    }
    int a = v - b;
    if (a > b) throw consistency_error("two_sylow: sampled exponent below ceil(v/2)");
    if ((f.size() - 1) % (u64(1) << a) != 0)
        throw consistency_error("two_sylow: 2^a does not divide q-1 (Weil pairing violated)");
    size_t nroots = two_torsion_roots(ec, rng).size();
    size_t expect = (a >= 1) ? 3 : 1;
    if (nroots != expect) throw consistency_error("two_sylow: 2-torsion root count contradicts shape");
    if (a >= 2 && !full_two_power_torsion(ec, a, rng))
        throw consistency_error("two_sylow: halving chains contradict full 2^a-torsion");
    return {a, b};
}

}  // namespace anomalous
