// Acceptance gate: one line per criterion, PASS / FAIL (criterion 5 may WARN).
// Exit code is the number of failed criteria.  The heavy scans are shared:
// the 69a sweep to 2e6 feeds criteria 3, 4, 5 and 9.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "anomalous/catalog.hpp"
#include "anomalous/model.hpp"
#include "anomalous/scan.hpp"

using namespace anomalous;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, bool warn_only = false) {
    const char* verdict = ok ? "PASS" : (warn_only ? "WARN" : "FAIL");
    if (!ok && !warn_only) ++failures;
    std::printf("criterion %d: %s - %s\n", n, verdict, what.c_str());
    std::fflush(stdout);
}

bool within_rel(double x, double target, double rel) {
    return std::abs(x - target) <= rel * target;
}

// Shared cross-check ledger for criterion 9.
u64 records_seen = 0, crosscheck_bad = 0, anomalous_seen = 0;

ScanSummary tracked_scan(const RationalPair& pair, const ScanLimit& limit) {
    auto progress = [&](u64 done, u64 total) {
        if (done % 4096 == 0 || done == total)
            std::fprintf(stderr, "\r%s: %llu/%llu", pair.label.c_str(),
                         static_cast<unsigned long long>(done),
                         static_cast<unsigned long long>(total));
    };
    auto sum = scan(pair, limit, 1, default_workers(), {},
                    [&](const PrimeRecord& r) {
                        ++records_seen;
                        if (!r.crosscheck_ok) ++crosscheck_bad;
                        if (r.status == Status::anomalous) ++anomalous_seen;
                    },
                    progress);
    std::fprintf(stderr, "\n");
    return sum;
}

}  // namespace

int main() {
    // 1. Exact paper-scale counts for 10608y.
    {
        auto s1k = tracked_scan(builtin_pair("10608y"), {ScanLimit::Kind::num_primes, 1000});
        auto s10k = tracked_scan(builtin_pair("10608y"), {ScanLimit::Kind::num_primes, 10000});
        bool ok = s1k.noniso_fp_good == 539 && s1k.iso_fp_good == 457 && s1k.anomalous() == 30 &&
                  s10k.noniso_fp_good == 5324 && s10k.iso_fp_good == 4672 &&
                  s10k.anomalous() == 335;
        report(1, ok,
               "10608y counts 539/457/30 at 1000 primes and 5324/4672/335 at 10000 (got " +
                   std::to_string(s1k.noniso_fp_good) + "/" + std::to_string(s1k.iso_fp_good) +
                   "/" + std::to_string(s1k.anomalous()) + ", " +
                   std::to_string(s10k.noniso_fp_good) + "/" + std::to_string(s10k.iso_fp_good) +
                   "/" + std::to_string(s10k.anomalous()) + ")");
    }

    // 2. The worked example at p = 17.
    {
        auto r = classify_prime(builtin_pair("example1.1"), 17, 1);
        ++records_seen;
        if (!r.crosscheck_ok) ++crosscheck_bad;
        bool ok = r.status == Status::anomalous && r.sE_p == SylowShape{1, 1} &&
                  r.sEp_p == SylowShape{1, 1} && r.sE_p2 == SylowShape{3, 3} &&
                  r.sEp_p2 == SylowShape{2, 4} && r.defect == std::make_pair(3, 2) && r.m == 2 &&
                  r.profile && r.profile->h == 2 && r.profile->crater_class == 4 &&
                  r.level_E == 2 && r.level_Ep == 1 && r.crosscheck_ok;
        report(2, ok, "worked example at p=17: defect (3,2), Sylows (1,1)/(1,1) and (3,3)/(2,4), "
                      "m=2, h=2, crater 4, levels 2/1");
    }

    // 3-5. One scaled 69a sweep.
    {
        auto s = tracked_scan(builtin_pair("69a"), {ScanLimit::Kind::max_prime, 2000000});
        double p_of_x = s.p_of_x();
        bool ok3 = std::abs(p_of_x - 1.0 / 30.0) <= 0.004;
        char buf[160];
        std::snprintf(buf, sizeof buf, "69a to 2e6: P(X) = %.6f vs 1/30 = %.6f (tol 0.004)",
                      p_of_x, 1.0 / 30.0);
        report(3, ok3, buf);

        u64 d32 = s.by_defect.count({3, 2}) ? s.by_defect.at({3, 2}) : 0;
        u64 d23 = s.by_defect.count({2, 3}) ? s.by_defect.at({2, 3}) : 0;
        double lead = double(d32 + d23) / double(s.anomalous());
        double per_defect = double(d32) / double(s.primes_seen);
        bool ok4 = lead >= 0.91 && lead <= 0.96 && within_rel(per_defect, 1.0 / 64.0, 0.15);
        std::snprintf(buf, sizeof buf,
                      "defect decay: (3,2)+(2,3) fraction %.4f in [0.91,0.96]; "
                      "per-(3,2) freq %.6f vs 1/64 = %.6f (rel tol 15%%)",
                      lead, per_defect, 1.0 / 64.0);
        report(4, ok4, buf);

        auto geom = [&](int cc, int h) -> u64 {
            auto it = s.by_defect_geometry.find({3, 2, cc, h});
            return it == s.by_defect_geometry.end() ? 0 : it->second;
        };
        double s12 = d32 ? double(geom(1, 2)) / double(d32) : 0.0;
        double s02 = d32 ? double(geom(0, 2)) / double(d32) : 0.0;
        bool ok5 = s12 >= 0.21 && s12 <= 0.29 && s02 >= 0.095 && s02 <= 0.155;
        std::snprintf(buf, sizeof buf,
                      "crater/height shape: S'2(1,2) = %.4f vs 0.25, S'2(0,2) = %.4f vs 0.125",
                      s12, s02);
        report(5, ok5, buf, /*warn_only=*/true);
    }

    // 6. Model exactness in rational arithmetic.
    {
        bool ok = true;
        auto d = enumerate_model(10);
        for (int k = 0; k <= 5 && ok; ++k)
            for (SqfClass c : kAllSqfClasses) {
                auto it = d.mass.find(ModelKey{k, c});
                rat got = it == d.mass.end() ? rat(0) : it->second;
                if (got != prob_valuation_class(k, c)) ok = false;
            }
        for (int k = 0; k <= 12 && ok; ++k)
            for (SqfClass c : kAllSqfClasses)
                if (regime_total(k, c) != prob_valuation_class(k, c)) ok = false;
        // total mass: partial sum to k = 41 plus exact geometric tails
        rat total = 0;
        for (int k = 0; k <= 41; ++k)
            for (SqfClass c : kAllSqfClasses) total += prob_valuation_class(k, c);
        total += 2 * (pow2r(-42) / 3) + pow2r(-41) / 3 + pow2r(-41) / 3;
        if (total != 1) ok = false;
        for (int crater : {0, 1, 4, 5}) {
            rat sum = 0;
            for (int H = 2; H <= 40; ++H) sum += height_model_prob(2, H, crater);
            sum += height_model_prob(2, 40, crater) / 3;
            if (sum != ((crater == 1 || crater == 5) ? rat(1, 3) : rat(1, 6))) ok = false;
        }
        report(6, ok, "K=10 enumeration == closed form for k<=5; regime sums match for k<=12; "
                      "total mass 1; height class sums exactly 1/3,1/3,1/6,1/6");
    }

    // 7. Group oracle.
    {
        auto g4 = group_order_oracle(2);
        auto g8 = group_order_oracle(3);
        bool ok = g4.group_order == 32 && g8.group_order == 512 && g4.neg_i_full == 1 &&
                  g8.neg_i_full == 1 && oracle_series_total() == rat(1, 30) &&
                  oracle_discrepancy_note(2).find("4m+2") != std::string::npos;
        report(7, ok, "|G(4)| = 32, |G(8)| = 512, one -I per level, series total exactly 1/30, "
                      "exponent discrepancy documented");
    }

    // 8. Negative controls.
    {
        auto s210 = tracked_scan(builtin_pair("210e"), {ScanLimit::Kind::num_primes, 10000});
        auto s1200 = tracked_scan(builtin_pair("1200e"), {ScanLimit::Kind::num_primes, 20000});
        bool only32 =
            s1200.by_defect.size() == 1 && s1200.by_defect.begin()->first == std::make_pair(3, 2);
        double freq = double(s1200.anomalous()) / double(s1200.good);
        bool ok = s210.anomalous() == 0 && only32 && within_rel(freq, 0.25, 0.10);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "210e: %llu anomalous in 1e4 primes (want 0); 1200e: only defect (3,2) "
                      "%s, freq %.4f vs 1/4 (rel tol 10%%)",
                      static_cast<unsigned long long>(s210.anomalous()),
                      only32 ? "yes" : "NO", freq);
        report(8, ok, buf);
    }

    // 9. Property ledger over everything scanned above (the classifier
    // cross-checks the closed-form isomorphism criterion against the directly
    // computed Sylow shapes, and the height-increment identity on every
    // anomalous prime; any violation raises or clears crosscheck_ok).
    {
        bool ok = crosscheck_bad == 0 && records_seen > 0;
        report(9, ok,
               "cross-checks green on all " + std::to_string(records_seen) +
                   " scanned records (" + std::to_string(anomalous_seen) + " anomalous); " +
                   std::to_string(crosscheck_bad) + " failures");
    }

    std::printf("%s (%d criterion failures)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures;
}
