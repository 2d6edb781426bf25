#pragma once

// Dense polynomials of small degree over a generic finite field F (the field
// API of arith.hpp).  Only what the curve/isogeny layers need: modular
// exponentiation of x, gcds, and full root extraction for cubics/quartics via
// Cantor-Zassenhaus splitting of the linear-factor part.  This keeps root
// finding at O(log q) field operations instead of O(q) trial evaluation.

#include <algorithm>
#include <vector>

#include "anomalous/arith.hpp"

namespace anomalous {

template <class F>
struct Poly {
    // coeffs[i] is the coefficient of x^i; normalized so back() != 0.
    std::vector<typename F::Elem> c;

    bool is_zero() const { return c.empty(); }
    int deg() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
};

namespace poly {

template <class F>
void normalize(const F& f, Poly<F>& a) {
    while (!a.c.empty() && f.is_zero(a.c.back())) a.c.pop_back();
}

template <class F>
Poly<F> from_coeffs(const F& f, std::vector<typename F::Elem> cs) {
    Poly<F> r{std::move(cs)};
    normalize(f, r);
    return r;
}

template <class F>
Poly<F> x_poly(const F& f) {
    return Poly<F>{{f.zero(), f.one()}};
}

template <class F>
Poly<F> constant(const F& f, typename F::Elem v) {
    Poly<F> r{{v}};
    normalize(f, r);
    return r;
}

template <class F>
Poly<F> add(const F& f, const Poly<F>& a, const Poly<F>& b) {
    Poly<F> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), f.zero());
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = f.add(r.c[i], b.c[i]);
    normalize(f, r);
    return r;
}

template <class F>
Poly<F> sub(const F& f, const Poly<F>& a, const Poly<F>& b) {
    Poly<F> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), f.zero());
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = f.sub(r.c[i], b.c[i]);
    normalize(f, r);
    return r;
}

template <class F>
Poly<F> mul(const F& f, const Poly<F>& a, const Poly<F>& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Poly<F> r;
    r.c.assign(a.c.size() + b.c.size() - 1, f.zero());
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = f.add(r.c[i + j], f.mul(a.c[i], b.c[j]));
    normalize(f, r);
    return r;
}

// Remainder of a modulo b (b != 0).
template <class F>
Poly<F> rem(const F& f, Poly<F> a, const Poly<F>& b) {
    if (b.is_zero()) throw error("poly rem by zero");
    auto binv = f.inv(b.c.back());
    while (a.deg() >= b.deg()) {
        auto q = f.mul(a.c.back(), binv);
        int shift = a.deg() - b.deg();
        for (int i = 0; i <= b.deg(); ++i)
            a.c[i + shift] = f.sub(a.c[i + shift], f.mul(q, b.c[i]));
        normalize(f, a);
        if (a.is_zero()) break;
    }
    return a;
}

template <class F>
Poly<F> quot(const F& f, Poly<F> a, const Poly<F>& b) {
    if (b.is_zero()) throw error("poly quot by zero");
    if (a.deg() < b.deg()) return {};
    auto binv = f.inv(b.c.back());
    Poly<F> q;
    q.c.assign(a.deg() - b.deg() + 1, f.zero());
    while (a.deg() >= b.deg()) {
        auto coef = f.mul(a.c.back(), binv);
        int shift = a.deg() - b.deg();
        q.c[shift] = coef;
        for (int i = 0; i <= b.deg(); ++i)
            a.c[i + shift] = f.sub(a.c[i + shift], f.mul(coef, b.c[i]));
        normalize(f, a);
        if (a.is_zero()) break;
    }
    normalize(f, q);
    return q;
}

template <class F>
Poly<F> make_monic(const F& f, Poly<F> a) {
    if (a.is_zero()) return a;
    auto inv = f.inv(a.c.back());
    for (auto& v : a.c) v = f.mul(v, inv);
    return a;
}

template <class F>
Poly<F> gcd(const F& f, Poly<F> a, Poly<F> b) {
    while (!b.is_zero()) {
        auto r = rem(f, a, b);
        a = b;
        b = r;
    }
    return make_monic(f, a);
}

template <class F>
Poly<F> derivative(const F& f, const Poly<F>& a) {
    Poly<F> r;
    if (a.deg() < 1) return r;
    r.c.resize(a.c.size() - 1);
    for (int i = 1; i <= a.deg(); ++i) {
        auto k = f.from_int(i);
        r.c[i - 1] = f.mul(a.c[i], k);
    }
    normalize(f, r);
    return r;
}

// base^e mod m in F[x].
template <class F>
Poly<F> powmod(const F& f, Poly<F> base, u64 e, const Poly<F>& m) {
    Poly<F> r = constant(f, f.one());
    base = rem(f, base, m);
    while (e) {
        if (e & 1) r = rem(f, mul(f, r, base), m);
        base = rem(f, mul(f, base, base), m);
        e >>= 1;
    }
    return r;
}

template <class F>
typename F::Elem eval(const F& f, const Poly<F>& a, typename F::Elem x) {
    auto r = f.zero();
    for (int i = a.deg(); i >= 0; --i) r = f.add(f.mul(r, x), a.c[i]);
    return r;
}

// Product of the distinct linear factors of a: gcd(x^q - x, a).
template <class F>
Poly<F> linear_part(const F& f, const Poly<F>& a) {
    auto xq = powmod(f, x_poly(f), f.size(), a);
    auto xq_minus_x = sub(f, xq, x_poly(f));
    return gcd(f, xq_minus_x, a);
}

namespace detail {

// Equal-degree splitting of a monic product of distinct linear factors.
template <class F>
void split_linear(const F& f, const Poly<F>& g, Rng& rng, std::vector<typename F::Elem>& out) {
    if (g.deg() <= 0) return;
    if (g.deg() == 1) {
        out.push_back(f.neg(g.c[0]));  // monic: x + c0
        return;
    }
    for (;;) {
        // gcd((x+d)^((q-1)/2) - 1, g) splits g with probability ~1/2.
        Poly<F> shifted{{f.rand(rng), f.one()}};
        auto h = powmod(f, shifted, (f.size() - 1) / 2, g);
        h = sub(f, h, constant(f, f.one()));
        auto d = gcd(f, h, g);
        if (d.deg() > 0 && d.deg() < g.deg()) {
            split_linear(f, d, rng, out);
            split_linear(f, quot(f, g, d), rng, out);
            return;
        }
    }
}

}  // namespace detail

// All roots of a in F, sorted by the field's deterministic order.
// Repeated roots are reported once.
template <class F>
std::vector<typename F::Elem> roots(const F& f, const Poly<F>& a, Rng& rng) {
    std::vector<typename F::Elem> out;
    if (a.deg() < 1) return out;
    auto lin = linear_part(f, a);
    detail::split_linear(f, lin, rng, out);
    std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) { return f.less(x, y); });
    return out;
}

// True iff the squarefree part of a factors into linear terms over F, i.e.
// every root of a lies in F (repeated roots allowed).
template <class F>
bool splits_completely(const F& f, const Poly<F>& a) {
    if (a.deg() < 1) return true;
    auto sf = quot(f, a, gcd(f, a, derivative(f, a)));
    auto lin = linear_part(f, sf);
    return lin.deg() == sf.deg();
}

}  // namespace poly
}  // namespace anomalous
