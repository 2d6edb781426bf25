#pragma once

// Velu 2-isogenies, volcano navigation (level above floor), volcano profile
// from the trace, Frobenius-in-order bookkeeping, and the Heuberger / anomaly
// predicates.

#include <limits>
#include <vector>

#include "anomalous/curve.hpp"

namespace anomalous {

// ---------------------------------------------------------------------------
// Velu 2-isogeny with kernel (x0, 0) on y^2 = x^3 + Ax + B:
//   t = 3 x0^2 + A,  image A' = A - 5t, B' = B - 7 x0 t,
//   phi(x, y) = (x + t/(x-x0),  y (1 - t/(x-x0)^2)).
// The x-coordinate of the dual kernel point on the image is -2 x0 (the other
// two 2-torsion roots both map there; their sum is -x0 on a depressed model).
// ---------------------------------------------------------------------------

template <class F>
struct TwoIsogeny {
    ECurve<F> image;
    typename F::Elem kernel_x;  // on the domain
    typename F::Elem t;         // Velu coefficient
    typename F::Elem dual_kernel_x;  // on the image: -2 x0

    Point<F> map(const Point<F>& P) const {
        const F& f = image.field;
        if (P.inf || f.eq(P.x, kernel_x)) return pt_infinity<F>();
        auto d = f.inv(f.sub(P.x, kernel_x));
        auto xx = f.add(P.x, f.mul(t, d));
        auto yy = f.mul(P.y, f.sub(f.one(), f.mul(t, f.sqr(d))));
        return pt_make<F>(xx, yy);
    }
};

template <class F>
TwoIsogeny<F> velu2(const ECurve<F>& ec, const Point<F>& kernel) {
    const F& f = ec.field;
    if (kernel.inf || !f.is_zero(kernel.y) || !on_curve(ec, kernel))
        throw error("velu2: kernel must be a rational point of order 2");
    auto x0 = kernel.x;
    auto t = f.add(f.mul(f.from_int(3), f.sqr(x0)), ec.A);
    auto A2 = f.sub(ec.A, f.mul(f.from_int(5), t));
    auto B2 = f.sub(ec.B, f.mul(f.from_int(7), f.mul(x0, t)));
    return TwoIsogeny<F>{ECurve<F>{f, A2, B2}, x0, t, f.neg(f.mul(f.from_int(2), x0))};
}

// One neighbor per rational 2-torsion point (root of the 2-division cubic).
template <class F>
std::vector<TwoIsogeny<F>> two_isogeny_neighbors(const ECurve<F>& ec, Rng& rng) {
    std::vector<TwoIsogeny<F>> out;
    for (const auto& r : two_torsion_roots(ec, rng))
        out.push_back(velu2(ec, pt_make<F>(r, ec.field.zero())));
    return out;
}

// ---------------------------------------------------------------------------
// Level above the floor: breadth-first non-backtracking descent.  Floor
// vertices are recognized by their 2-division cubic having exactly one root
// (cyclic 2-Sylow).  Backtracking is excluded by kernel identity: the edge
// just walked enters each child at the dual kernel root -2 x0, which is exact
// even at j = 0 / 1728 where j-invariant comparison is ambiguous.
// ---------------------------------------------------------------------------

template <class F>
int level_above_floor(const ECurve<F>& ec, int h_max, Rng& rng) {
    const F& f = ec.field;
    auto roots = two_torsion_roots(ec, rng);
    if (roots.empty())
        throw error("level_above_floor: curve has odd order (no 2-torsion)");
    if (roots.size() == 1) return 0;

    struct Node {
        ECurve<F> ec;
        typename F::Elem excl;  // arrival kernel root; do not walk back
    };
    std::vector<Node> frontier;
    for (const auto& r : roots) {
        auto iso = velu2(ec, pt_make<F>(r, f.zero()));
        frontier.push_back(Node{iso.image, iso.dual_kernel_x});
    }
    for (int depth = 1; depth <= h_max; ++depth) {
        std::vector<Node> next;
        for (const auto& node : frontier) {
            auto rs = two_torsion_roots(node.ec, rng);
            bool excl_seen = false;
            for (const auto& r : rs) excl_seen = excl_seen || f.eq(r, node.excl);
            if (!excl_seen)
                throw consistency_error("level_above_floor: dual kernel missing from child cubic");
            if (rs.size() == 1) return depth;  // reached the floor
            if (rs.size() != 3)
                throw consistency_error("level_above_floor: unexpected 2-torsion count");
            for (const auto& r : rs) {
                if (f.eq(r, node.excl)) continue;
                auto iso = velu2(node.ec, pt_make<F>(r, f.zero()));
                next.push_back(Node{iso.image, iso.dual_kernel_x});
            }
        }
        frontier = std::move(next);
    }
    throw consistency_error("level_above_floor: walk exceeded the height bound");
}

// ---------------------------------------------------------------------------
// Volcano profile from the trace
// ---------------------------------------------------------------------------

struct VolcanoProfile {
    i64 t = 0;
    i64 D = 0;       // squarefree part of t^2 - 4q
    i64 dK = 0;      // fundamental discriminant
    i64 f = 0;       // conductor of Z[pi]: t^2 - 4q = f^2 dK
    int h = 0;       // volcano height
    int crater_class = 0;  // dK mod 8, in {0, 1, 4, 5}
    bool operator==(const VolcanoProfile&) const = default;
};

inline VolcanoProfile volcano_profile(i64 t, u64 q) {
    if (t == 0) throw error("volcano_profile: supersingular trace rejected");
    if (q > (u64(1) << 61)) throw error("volcano_profile: q too large");
    i128 delta_wide = i128(t) * t - i128(4) * q;
    if (delta_wide >= 0) throw error("volcano_profile: t^2 must be < 4q");
    if (delta_wide < -(i128(1) << 62)) throw error("volcano_profile: discriminant overflow");
    i64 delta = static_cast<i64>(delta_wide);
    VolcanoProfile vp;
    vp.t = t;
    vp.D = squarefree_part(delta);
    i64 dmod4 = ((vp.D % 4) + 4) % 4;
    vp.dK = (dmod4 == 1) ? vp.D : 4 * vp.D;
    i64 cof = delta / vp.dK;
    u64 froot = 0;
    if (!is_perfect_square(static_cast<u64>(cof), &froot))
        throw consistency_error("volcano_profile: (t^2-4q)/dK is not a perfect square");
    vp.f = static_cast<i64>(froot);
    if (i128(vp.f) * vp.f * vp.dK != delta_wide)
        throw consistency_error("volcano_profile: discriminant factorization broken");
    vp.h = v2(cof) / 2;  // = v2(f)
    vp.crater_class = static_cast<int>(((vp.dK % 8) + 8) % 8);
    return vp;
}

// ---------------------------------------------------------------------------
// Frobenius in the maximal order
// ---------------------------------------------------------------------------

// pi = a + b*omega with omega = sqrt(D) for D = 2,3 (mod 4) and
// omega = (1 + sqrt(D))/2 for D = 1 (mod 4); identities asserted on every
// construction.  beta = f / g_up where g_up is the conductor with smaller
// 2-adic valuation (the upper curve); s2 = max(v2 g, v2 g').
struct FrobeniusRep {
    i64 a = 0, b = 0;
    i64 beta = 0;
    int s2 = 0;
    i64 D = 0;  // the squarefree radicand defining omega
};

inline FrobeniusRep frobenius_in_order(i64 t, u64 p, i64 g, i64 gp) {
    auto vp = volcano_profile(t, p);
    if (g < 1 || gp < 1 || vp.f % g != 0 || vp.f % gp != 0)
        throw error("frobenius_in_order: conductors must divide f");
    if (!(g == gp || g == 2 * gp || gp == 2 * g))
        throw error("frobenius_in_order: conductors must agree up to a factor of 2");
    FrobeniusRep rep;
    rep.D = vp.D;
    i64 dmod4 = ((vp.D % 4) + 4) % 4;
    i64 trw, nmw;
    if (dmod4 == 1) {
        if (((t - vp.f) & 1) != 0)
            throw consistency_error("frobenius_in_order: t-f parity broken (D=1 mod 4)");
        rep.a = (t - vp.f) / 2;
        rep.b = vp.f;
        trw = 1;
        nmw = (1 - vp.D) / 4;
    } else {
        if ((t & 1) != 0)
            throw consistency_error("frobenius_in_order: odd trace with D=2,3 mod 4");
        rep.a = t / 2;
        rep.b = vp.f;
        trw = 0;
        nmw = -vp.D;
    }
    // Self-policing identities: trace and norm of pi.
    if (2 * rep.a + rep.b * trw != t)
        throw consistency_error("frobenius_in_order: trace identity failed");
    i128 norm = i128(rep.a) * rep.a + i128(rep.a) * rep.b * trw + i128(rep.b) * rep.b * nmw;
    if (norm != i128(p)) throw consistency_error("frobenius_in_order: norm identity failed");
    i64 gup = (v2(g) <= v2(gp)) ? g : gp;
    if (vp.f % gup != 0) throw error("frobenius_in_order: beta not integral");
    rep.beta = vp.f / gup;
    rep.s2 = std::max(v2(g), v2(gp));
    return rep;
}

// (a_m, b_m) with pi^m = a_m + b_m * omega, exact integer arithmetic.
inline std::pair<i64, i64> pi_power(const FrobeniusRep& rep, int m) {
    if (m < 1 || m > 4) throw error("pi_power: unsupported exponent");
    i64 dmod4 = ((rep.D % 4) + 4) % 4;
    i128 x = rep.a, y = rep.b;
    for (int i = 1; i < m; ++i) {
        i128 nx, ny;
        if (dmod4 == 1) {
            // omega^2 = (D-1)/4 + omega
            nx = x * rep.a + y * rep.b * ((rep.D - 1) / 4);
            ny = x * rep.b + y * rep.a + y * rep.b;
        } else {
            // omega^2 = D
            nx = x * rep.a + y * rep.b * rep.D;
            ny = x * rep.b + y * rep.a;
        }
        x = nx;
        y = ny;
    }
    const i128 lim = i128(std::numeric_limits<i64>::max());
    if (x > lim || x < -lim || y > lim || y < -lim) throw error("pi_power: overflow");
    return {static_cast<i64>(x), static_cast<i64>(y)};
}

// Group-isomorphism criterion at 2: over F_{q^m} the groups are isomorphic
// iff v2(a_m - 1) <= v2(b_m) - s2, with v2(0) = +infinity.  The inequality
// presumes the pair is vertical (conductors differ at 2); when s2 = 0 both
// endomorphism rings coincide (a horizontal pair on the crater) and the
// groups are isomorphic over every extension.
inline bool heuberger_iso(i64 a_m, i64 b_m, int s2) {
    if (b_m == 0) throw consistency_error("heuberger_iso: pi^m rational (impossible for ordinary curves)");
    if (s2 == 0) return true;
    if (a_m == 1) return false;  // v2(0) = +inf on the left
    return v2(a_m - 1) <= v2(b_m) - s2;
}

// Closed-form anomaly criterion: anomalous iff v2(a-1) = 1 and
// v2(a+1) > v2(b) - s2; vacuous for horizontal pairs (s2 = 0).
inline bool anomaly_predicate(i64 a, i64 b, int s2) {
    if (b == 0) throw consistency_error("anomaly_predicate: b = 0");
    if (s2 == 0) return false;
    if (a == 1 || v2(a - 1) != 1) return false;
    if (a == -1) return true;  // v2(0) = +inf on the left
    return v2(a + 1) > v2(b) - s2;
}

}  // namespace anomalous
