#pragma once

// Per-prime classification of a rationally 2-isogenous pair: skip rules,
// 2-Sylow shapes over F_p and F_{p^2}, anomaly detection, defect, volcano
// geometry, and a battery of cross-checks that abort the scan on any internal
// contradiction (these are bug detectors, not data).

#include <optional>
#include <utility>

#include "anomalous/pairs.hpp"

namespace anomalous {

enum class Status {
    bad,
    supersingular,
    skip_3mod4,
    skip_2mod4,
    nonisomorphic,  // not isomorphic already over F_p
    isomorphic,     // isomorphic over F_p and over F_{p^2}
    anomalous,      // isomorphic over F_p, not over F_{p^2}
};

inline const char* status_name(Status s) {
    switch (s) {
        case Status::bad: return "bad";
        case Status::supersingular: return "supersingular";
        case Status::skip_3mod4: return "skip_3mod4";
        case Status::skip_2mod4: return "skip_2mod4";
        case Status::nonisomorphic: return "nonisomorphic";
        case Status::isomorphic: return "isomorphic";
        case Status::anomalous: return "anomalous";
    }
    return "?";
}

struct PrimeRecord {
    u64 p = 0;
    Status status = Status::bad;
    std::optional<i64> t;
    std::optional<VolcanoProfile> profile;
    std::optional<int> level_E, level_Ep;
    std::optional<SylowShape> sE_p, sEp_p;    // 2-Sylow shapes over F_p
    std::optional<SylowShape> sE_p2, sEp_p2;  // ... and over F_{p^2}
    std::optional<std::pair<int, int>> defect;
    std::optional<int> m;  // v2(beta), anomalous records only
    bool crosscheck_ok = false;
    bool audited = false;

    bool operator==(const PrimeRecord&) const = default;

    // True when both F_p shapes are present and equal (every good prime).
    bool iso_fp() const { return sE_p && sEp_p && *sE_p == *sEp_p; }
};

struct ClassifyOptions {
    double audit_rate = 0.01;  // fraction of skip/supersingular primes re-checked over F_{p^2}
};

namespace detail {

// Sylow shapes of both curves over F_{p^2}, given the common group order.
inline std::pair<SylowShape, SylowShape> sylows_p2(const RationalPair& pair, u64 p, u64 n2,
                                                   Rng& rng) {
    Fp2Field f2(p);
    auto rp2 = reduce_pair(pair, f2);
    if (!rp2) throw consistency_error("classify: good prime failed to reduce over F_p^2");
    return {two_sylow(rp2->E.ec, n2, rng), two_sylow(rp2->Ep.ec, n2, rng)};
}

}  // namespace detail

inline PrimeRecord classify_prime(const RationalPair& pair, u64 p, u64 seed,
                                  const ClassifyOptions& opt = {}) {
    PrimeRecord rec;
    rec.p = p;
    if (p < 5) {
        rec.status = Status::bad;
        rec.crosscheck_ok = true;
        return rec;
    }
    Rng rng(mix_seed(seed, p, 0xC1A55));
    rec.audited = rng.below(1u << 20) < static_cast<u64>(opt.audit_rate * (1u << 20));

    FpField f(p);
    auto rp = reduce_pair(pair, f);
    if (!rp) {
        rec.status = Status::bad;
        rec.crosscheck_ok = true;
        return rec;
    }

    const u64 N = count_points_fp(rp->E.ec, rng);
    if (count_points_fp(rp->Ep.ec, rng) != N)
        throw consistency_error("classify: isogenous curves with different point counts");
    const i64 t = static_cast<i64>(p) + 1 - static_cast<i64>(N);
    rec.t = t;
    rec.sE_p = two_sylow(rp->E.ec, N, rng);
    rec.sEp_p = two_sylow(rp->Ep.ec, N, rng);
    if (N % 2 != 0)
        throw consistency_error("classify: rational kernel point forces even order");

    if (t == 0) {
        // Supersingular: never anomalous; the F_p comparison still feeds the
        // isomorphic/non-isomorphic tally.  Audited primes get the direct
        // F_{p^2} confirmation (shapes equal and of the (v, v) split form).
        rec.status = Status::supersingular;
        if (rec.audited) {
            auto [sE2, sEp2] = detail::sylows_p2(pair, p, (p + 1) * (p + 1), rng);
            int v = v2(static_cast<i64>(p) + 1);
            if (!(sE2 == sEp2) || sE2.a != v || sE2.b != v)
                throw consistency_error("classify: supersingular F_p^2 structure violated");
            rec.sE_p2 = sE2;
            rec.sEp_p2 = sEp2;
        }
        rec.crosscheck_ok = true;
        return rec;
    }

    // Ordinary good prime: full volcano bookkeeping, cheap at every prime.
    auto vp = volcano_profile(t, p);
    rec.profile = vp;
    rec.level_E = level_above_floor(rp->E.ec, vp.h, rng);
    rec.level_Ep = level_above_floor(rp->Ep.ec, vp.h, rng);

    // Conductors from levels: v2(g) = h - level; the odd part (taken equal to
    // odd(f)) cancels from every 2-adic comparison below.
    i64 odd_f = odd_part(vp.f);
    i64 g_E = odd_f << (vp.h - *rec.level_E);
    i64 g_Ep = odd_f << (vp.h - *rec.level_Ep);
    auto rep = frobenius_in_order(t, p, g_E, g_Ep);
    const bool iso_fp = rec.iso_fp();

    // Heuberger's criterion must reproduce the direct F_p comparison.
    if (heuberger_iso(rep.a, rep.b, rep.s2) != iso_fp)
        throw consistency_error("classify: Heuberger m=1 disagrees with direct Sylow comparison");

    // Lemma: the volcano over F_{p^2} is exactly one level taller when
    // t = 2 (mod 4), recomputed from scratch from the F_{p^2} trace.
    if (((t % 4) + 4) % 4 == 2) {
        auto vp2 = volcano_profile(t * t - 2 * static_cast<i64>(p), p * p);
        if (vp2.h != vp.h + 1)
            throw consistency_error("classify: height over F_p^2 is not h+1 despite t = 2 mod 4");
    }

    const bool predicate = anomaly_predicate(rep.a, rep.b, rep.s2);

    auto check_p2 = [&](bool expect_iso) {
        u64 n2 = order_ext(t, p, 2);
        auto [sE2, sEp2] = detail::sylows_p2(pair, p, n2, rng);
        if ((sE2 == sEp2) != expect_iso)
            throw consistency_error("classify: direct F_p^2 comparison contradicts prediction");
        rec.sE_p2 = sE2;
        rec.sEp_p2 = sEp2;
    };

    if (p % 4 == 3) {
        rec.status = Status::skip_3mod4;
        if (iso_fp && predicate)
            throw consistency_error("classify: anomaly predicate fired at p = 3 mod 4");
        if (rec.audited && iso_fp) check_p2(true);
        rec.crosscheck_ok = true;
        return rec;
    }
    if (N % 4 == 2) {
        if (!iso_fp)
            throw consistency_error("classify: N = 2 mod 4 but F_p groups differ");
        if (predicate)
            throw consistency_error("classify: anomaly predicate fired at N = 2 mod 4");
        rec.status = Status::skip_2mod4;
        if (rec.audited) check_p2(true);
        rec.crosscheck_ok = true;
        return rec;
    }
    if (!iso_fp) {
        rec.status = Status::nonisomorphic;
        rec.crosscheck_ok = true;
        return rec;
    }

    // Isomorphic over F_p with 4 | N and p = 1 mod 4: decide over F_{p^2}.
    u64 n2 = order_ext(t, p, 2);
    auto [sE2, sEp2] = detail::sylows_p2(pair, p, n2, rng);
    rec.sE_p2 = sE2;
    rec.sEp_p2 = sEp2;
    const bool iso_fp2 = sE2 == sEp2;
    auto [a2, b2] = pi_power(rep, 2);
    if (heuberger_iso(a2, b2, rep.s2) != iso_fp2)
        throw consistency_error("classify: Heuberger m=2 disagrees with direct Sylow comparison");
    if (predicate != !iso_fp2)
        throw consistency_error("classify: anomaly predicate disagrees with F_p^2 comparison");

    if (iso_fp2) {
        rec.status = Status::isomorphic;
        rec.crosscheck_ok = true;
        return rec;
    }

    // Anomalous.  Defect from the curve side; m from the Frobenius side.
    rec.status = Status::anomalous;
    rec.defect = std::make_pair(sE2.a, sEp2.a);
    int m = v2(rep.beta);
    rec.m = m;
    if (t % 4 != 2 && t % 4 != -2)
        throw consistency_error("classify: anomalous prime with t != 2 mod 4");
    if (!(*rec.sE_p == SylowShape{1, 1}) || !(*rec.sEp_p == SylowShape{1, 1}))
        throw consistency_error("classify: anomalous prime without (1,1) Sylow shapes over F_p");
    if (m < 2) throw consistency_error("classify: anomalous prime with m < 2");
    int dhi = std::max(sE2.a, sEp2.a), dlo = std::min(sE2.a, sEp2.a);
    if (dhi != m + 1 || dlo != m)
        throw consistency_error("classify: defect is not {m+1, m}");
    if (*rec.level_E == *rec.level_Ep ||
        ((*rec.level_E > *rec.level_Ep) != (sE2.a > sEp2.a)))
        throw consistency_error("classify: defect orientation disagrees with volcano levels");
    if (std::max(*rec.level_E, *rec.level_Ep) != m)
        throw consistency_error("classify: upper level differs from v2(beta)");
    rec.crosscheck_ok = true;
    return rec;
}

}  // namespace anomalous
