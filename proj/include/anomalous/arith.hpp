#pragma once

// Exact integer and finite-field primitives: 2-adic valuation, squarefree
// part, factorization, Legendre symbol, modular square roots, and arithmetic
// in F_p and its quadratic extension F_{p^2}.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "anomalous/errors.hpp"
#include "anomalous/rng.hpp"

namespace anomalous {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// ---------------------------------------------------------------------------
// Modular machine arithmetic
// ---------------------------------------------------------------------------

inline u64 addmod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    u64 s = a + b;
    if (s >= m || s < a) s -= m;
    return s;
}

inline u64 submod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    return a >= b ? a - b : a + (m - b);
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Integer helpers
// ---------------------------------------------------------------------------

// Largest k with 2^k | n.  Rejects n = 0: the valuation would be infinite and
// every caller that can meet 0 must branch first (v2(0) = +inf convention is
// handled at the call sites that need it).
inline int v2(i64 n) {
    if (n == 0) throw error("v2(0) is undefined (infinite valuation)");
    return std::countr_zero(static_cast<u64>(n < 0 ? -u64(n) : u64(n)));
}

inline i64 odd_part(i64 n) {
    if (n == 0) throw error("odd_part(0) is undefined");
    return n >> v2(n);
}

inline u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

inline bool is_perfect_square(u64 n, u64* root = nullptr) {
    u64 r = isqrt_u64(n);
    if (root) *root = r;
    return r * r == n;
}

// ---------------------------------------------------------------------------
// Primality and factorization (64-bit)
// ---------------------------------------------------------------------------

namespace detail {

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
    a %= n;
    if (a == 0) return true;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

// Deterministic Miller-Rabin; the base set below is a proven witness set for
// all 64-bit integers.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = std::countr_zero(d);
    d >>= s;
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (!detail::miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

namespace detail {

inline u64 pollard_rho(u64 n, Rng& rng) {
    // Brent's cycle variant with batched gcds.
    while (true) {
        u64 c = rng.below(n - 1) + 1;
        u64 x = rng.below(n);
        u64 y = x, q = 1, g = 1, xs = x;
        const u64 batch = 128;
        for (u64 r = 1; g == 1; r <<= 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = addmod(mulmod(y, y, n), c, n);
            for (u64 k = 0; k < r && g == 1; k += batch) {
                xs = y;
                u64 lim = std::min(batch, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = addmod(mulmod(y, y, n), c, n);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
            }
        }
        if (g == n) {
            // Backtrack one step at a time.
            g = 1;
            while (g == 1) {
                xs = addmod(mulmod(xs, xs, n), c, n);
                g = std::gcd(x > xs ? x - xs : xs - x, n);
            }
        }
        if (g != n) return g;
    }
}

inline void factor_rec(u64 n, std::vector<u64>& out, Rng& rng) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n, rng);
    factor_rec(d, out, rng);
    factor_rec(n / d, out, rng);
}

}  // namespace detail

// Prime factorization with multiplicity, sorted ascending.  Trial division up
// to 10^6, Pollard rho beyond; inputs at desk scale (|t^2-4q| <= 2^63) never
// stress this.
inline std::vector<u64> factor(u64 n) {
    if (n == 0) throw error("factor(0) is undefined");
    std::vector<u64> out;
    int tz = (n == 1) ? 0 : std::countr_zero(n);
    for (int i = 0; i < tz; ++i) out.push_back(2);
    n >>= tz;
    for (u64 d = 3; d <= 1000000 && d * d <= n; d += 2) {
        while (n % d == 0) {
            out.push_back(d);
            n /= d;
        }
    }
    if (n > 1) {
        if (is_prime(n)) {
            out.push_back(n);
        } else {
            Rng rng(0x706f6c6c61726421ULL ^ n);  // fixed seed: deterministic output
            detail::factor_rec(n, out, rng);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Unique squarefree d with n = d*s^2, sign(d) = sign(n).
inline i64 squarefree_part(i64 n) {
    if (n == 0) throw error("squarefree_part(0) is undefined");
    u64 mag = n < 0 ? -u64(n) : u64(n);
    i64 d = 1;
    u64 prev = 0;
    int count = 0;
    auto flush = [&] {
        if (count & 1) d *= static_cast<i64>(prev);
    };
    for (u64 q : factor(mag)) {
        if (q != prev) {
            flush();
            prev = q;
            count = 0;
        }
        ++count;
    }
    flush();
    return n < 0 ? -d : d;
}

// ---------------------------------------------------------------------------
// Legendre symbol and square roots in F_p
// ---------------------------------------------------------------------------

inline int legendre(i64 a, u64 p) {
    i64 pm = static_cast<i64>(p);
    i64 r = a % pm;
    if (r < 0) r += pm;
    if (r == 0) return 0;
    u64 e = powmod(static_cast<u64>(r), (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

struct FpContext {
    u64 p;  // odd prime
};

// Tonelli-Shanks square root mod p, canonicalized to min(r, p-r).
inline std::optional<u64> sqrt_mod(u64 a, const FpContext& ctx) {
    const u64 p = ctx.p;
    a %= p;
    if (a == 0) return 0;
    if (legendre(static_cast<i64>(a), p) != 1) return std::nullopt;
    u64 r;
    if (p % 4 == 3) {
        r = powmod(a, (p + 1) / 4, p);
    } else {
        // Full Tonelli-Shanks with the smallest positive non-residue.
        u64 q = p - 1;
        int s = std::countr_zero(q);
        q >>= s;
        u64 z = 2;
        while (legendre(static_cast<i64>(z), p) != -1) ++z;
        u64 m = s;
        u64 c = powmod(z, q, p);
        u64 t = powmod(a, q, p);
        r = powmod(a, (q + 1) / 2, p);
        while (t != 1) {
            u64 t2 = t;
            u64 i = 0;
            while (t2 != 1) {
                t2 = mulmod(t2, t2, p);
                ++i;
                if (i == m) throw error("sqrt_mod: input not a residue (unreachable)");
            }
            u64 b = powmod(c, u64(1) << (m - i - 1), p);
            m = i;
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            r = mulmod(r, b, p);
        }
    }
    return std::min(r, p - r);
}

// ---------------------------------------------------------------------------
// F_p as a field object (for code generic over F_p / F_{p^2})
// ---------------------------------------------------------------------------

struct FpField {
    using Elem = u64;
    u64 p;

    explicit FpField(u64 p_) : p(p_) {
        if (p < 3) throw error("FpField requires an odd prime");
    }

    u64 size() const { return p; }
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem from_int(i64 v) const {
        i64 pm = static_cast<i64>(p);
        i64 r = v % pm;
        if (r < 0) r += pm;
        return static_cast<u64>(r);
    }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    Elem add(Elem a, Elem b) const { return addmod(a, b, p); }
    Elem sub(Elem a, Elem b) const { return submod(a, b, p); }
    Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
    Elem mul(Elem a, Elem b) const { return mulmod(a, b, p); }
    Elem sqr(Elem a) const { return mulmod(a, a, p); }
    Elem inv(Elem a) const {
        if (a == 0) throw error("division by zero in F_p");
        return powmod(a, p - 2, p);
    }
    Elem pow(Elem a, u64 e) const { return powmod(a, e, p); }
    std::optional<Elem> sqrt(Elem a) const { return sqrt_mod(a, FpContext{p}); }
    // Deterministic total order / hash key used for canonical choices.
    bool less(Elem a, Elem b) const { return a < b; }
    u64 key(Elem a) const { return a; }
    Elem rand(Rng& rng) const { return rng.below(p); }
};

// ---------------------------------------------------------------------------
// F_{p^2} = F_p(sqrt(ns)) with ns the smallest positive non-residue
// ---------------------------------------------------------------------------

struct Fp2Element {
    u64 c0 = 0, c1 = 0;  // c0 + c1*sqrt(ns)
    auto operator<=>(const Fp2Element&) const = default;
};

struct Fp2Context {
    u64 p;
    u64 ns;
};

struct Fp2Field {
    using Elem = Fp2Element;
    u64 p;
    u64 ns;

    explicit Fp2Field(u64 p_) : p(p_) {
        if (p < 3) throw error("Fp2Field requires an odd prime");
        if (p >= (u64(1) << 32)) throw error("Fp2Field limited to p < 2^32 (q must fit in 64 bits)");
        ns = 2;
        while (legendre(static_cast<i64>(ns), p) != -1) ++ns;
    }
    explicit Fp2Field(const Fp2Context& c) : p(c.p), ns(c.ns) {}

    Fp2Context ctx() const { return Fp2Context{p, ns}; }
    u64 size() const { return p * p; }
    Elem zero() const { return {0, 0}; }
    Elem one() const { return {1, 0}; }
    Elem from_int(i64 v) const { return {FpField(p).from_int(v), 0}; }
    Elem make(u64 c0, u64 c1) const { return {c0 % p, c1 % p}; }
    bool is_zero(Elem a) const { return a.c0 == 0 && a.c1 == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    Elem add(Elem a, Elem b) const { return {addmod(a.c0, b.c0, p), addmod(a.c1, b.c1, p)}; }
    Elem sub(Elem a, Elem b) const { return {submod(a.c0, b.c0, p), submod(a.c1, b.c1, p)}; }
    Elem neg(Elem a) const { return {a.c0 == 0 ? 0 : p - a.c0, a.c1 == 0 ? 0 : p - a.c1}; }
    Elem mul(Elem a, Elem b) const {
        u64 t0 = mulmod(a.c0, b.c0, p);
        u64 t1 = mulmod(a.c1, b.c1, p);
        u64 t2 = mulmod(a.c0, b.c1, p);
        u64 t3 = mulmod(a.c1, b.c0, p);
        return {addmod(t0, mulmod(ns, t1, p), p), addmod(t2, t3, p)};
    }
    Elem sqr(Elem a) const { return mul(a, a); }
    u64 norm(Elem a) const { return submod(mulmod(a.c0, a.c0, p), mulmod(ns, mulmod(a.c1, a.c1, p), p), p); }
    Elem inv(Elem a) const {
        if (is_zero(a)) throw error("division by zero in F_{p^2}");
        u64 n = norm(a);
        u64 ninv = powmod(n, p - 2, p);
        return {mulmod(a.c0, ninv, p), a.c1 == 0 ? 0 : mulmod(p - a.c1, ninv, p)};
    }
    Elem pow(Elem a, u64 e) const {
        Elem r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = sqr(a);
            e >>= 1;
        }
        return r;
    }
    // a is a square in F_{p^2} iff its norm is a square in F_p; the root is
    // found by Tonelli-Shanks over F_{p^2} and verified by squaring.
    std::optional<Elem> sqrt(Elem a) const {
        if (is_zero(a)) return zero();
        if (legendre(static_cast<i64>(norm(a)), p) != 1) return std::nullopt;
        const u64 q1 = size() - 1;
        int s = std::countr_zero(q1);
        u64 q = q1 >> s;
        Elem z = nonresidue();
        u64 m = s;
        Elem c = pow(z, q);
        Elem t = pow(a, q);
        Elem r = pow(a, (q + 1) / 2);
        while (!eq(t, one())) {
            Elem t2 = t;
            u64 i = 0;
            while (!eq(t2, one())) {
                t2 = sqr(t2);
                ++i;
                if (i == m) throw error("fp2_sqrt: internal Tonelli-Shanks failure");
            }
            Elem b = c;
            for (u64 j = 0; j + i + 1 < m; ++j) b = sqr(b);
            m = i;
            c = sqr(b);
            t = mul(t, c);
            r = mul(r, b);
        }
        if (!eq(sqr(r), a)) throw error("fp2_sqrt: verification by squaring failed");
        return canon(r);
    }
    bool less(Elem a, Elem b) const { return a.c0 != b.c0 ? a.c0 < b.c0 : a.c1 < b.c1; }
    u64 key(Elem a) const {
        u64 h = a.c0 * 0x9e3779b97f4a7c15ULL;
        h ^= a.c1 + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
    Elem rand(Rng& rng) const { return {rng.below(p), rng.below(p)}; }

private:
    Elem canon(Elem r) const {
        Elem n = neg(r);
        return less(r, n) ? r : n;
    }
    Elem nonresidue() const {
        // Deterministic search for a non-square in F_{p^2}: an element is a
        // square iff its F_p-norm is a square in F_p.
        for (u64 c1 = 1; c1 < p; ++c1) {
            for (u64 c0 = 0; c0 < p; ++c0) {
                Elem g{c0, c1};
                if (legendre(static_cast<i64>(norm(g)), p) == -1) return g;
            }
        }
        throw error("fp2 nonresidue search failed (impossible)");
    }
};

// Convenience wrappers matching the module's operation naming.
inline Fp2Element fp2_add(const Fp2Element& x, const Fp2Element& y, const Fp2Context& c) {
    return Fp2Field(c).add(x, y);
}
inline Fp2Element fp2_sub(const Fp2Element& x, const Fp2Element& y, const Fp2Context& c) {
    return Fp2Field(c).sub(x, y);
}
inline Fp2Element fp2_mul(const Fp2Element& x, const Fp2Element& y, const Fp2Context& c) {
    return Fp2Field(c).mul(x, y);
}
inline Fp2Element fp2_inv(const Fp2Element& x, const Fp2Context& c) {
    return Fp2Field(c).inv(x);
}
inline std::optional<Fp2Element> fp2_sqrt(const Fp2Element& a, const Fp2Context& c) {
    return Fp2Field(c).sqrt(a);
}

}  // namespace anomalous
