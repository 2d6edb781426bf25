#pragma once

// Prime sweep: deterministic, data-parallel classification of every prime up
// to a bound (or the first n primes), folded into a ScanSummary.  Identical
// results for any worker count: per-prime seeds depend only on (seed, p) and
// the fold runs in prime order.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>
#include <vector>

#include "anomalous/classify.hpp"

namespace anomalous {

// Primes as classified (all of them, from 2), in increasing order.
inline std::vector<u64> primes_up_to(u64 x) {
    std::vector<u64> out;
    if (x < 2) return out;
    std::vector<bool> comp(x + 1, false);
    for (u64 i = 2; i * i <= x; ++i)
        if (!comp[i])
            for (u64 j = i * i; j <= x; j += i) comp[j] = true;
    for (u64 i = 2; i <= x; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

inline std::vector<u64> first_n_primes(u64 n) {
    if (n == 0) return {};
    // Rosser-style overestimate of the nth prime, then sieve.
    double nn = static_cast<double>(std::max<u64>(n, 6));
    u64 bound = static_cast<u64>(nn * (std::log(nn) + std::log(std::log(nn)))) + 16;
    for (;;) {
        auto ps = primes_up_to(bound);
        if (ps.size() >= n) {
            ps.resize(n);
            return ps;
        }
        bound = bound * 2;
    }
}

struct ScanSummary {
    u64 primes_seen = 0;
    u64 max_p = 0;
    u64 status_counts[7] = {0, 0, 0, 0, 0, 0, 0};  // indexed by Status
    u64 good = 0;                                  // primes_seen - bad
    u64 iso_fp_good = 0, noniso_fp_good = 0;       // F_p comparison over all good primes
    u64 audited = 0;
    std::map<std::pair<int, int>, u64> by_defect;
    // (defect_hi, defect_lo, crater_class, height) -> count, for the per-defect tables.
    std::map<std::tuple<int, int, int, int>, u64> by_defect_geometry;

    u64 count(Status s) const { return status_counts[static_cast<int>(s)]; }
    u64 anomalous() const { return count(Status::anomalous); }
    double p_of_x() const {
        return primes_seen ? static_cast<double>(anomalous()) / static_cast<double>(primes_seen) : 0.0;
    }

    void add(const PrimeRecord& rec) {
        ++primes_seen;
        max_p = std::max(max_p, rec.p);
        ++status_counts[static_cast<int>(rec.status)];
        if (rec.audited) ++audited;
        if (rec.status == Status::bad) return;
        ++good;
        if (rec.iso_fp())
            ++iso_fp_good;
        else
            ++noniso_fp_good;
        if (rec.status == Status::anomalous) {
            ++by_defect[*rec.defect];
            ++by_defect_geometry[{rec.defect->first, rec.defect->second,
                                  rec.profile->crater_class, rec.profile->h}];
        }
    }

    ScanSummary& operator+=(const ScanSummary& o) {
        primes_seen += o.primes_seen;
        max_p = std::max(max_p, o.max_p);
        for (int i = 0; i < 7; ++i) status_counts[i] += o.status_counts[i];
        good += o.good;
        iso_fp_good += o.iso_fp_good;
        noniso_fp_good += o.noniso_fp_good;
        audited += o.audited;
        for (auto& [k, v] : o.by_defect) by_defect[k] += v;
        for (auto& [k, v] : o.by_defect_geometry) by_defect_geometry[k] += v;
        return *this;
    }

    bool operator==(const ScanSummary&) const = default;
};

struct ScanLimit {
    enum class Kind { max_prime, num_primes } kind = Kind::max_prime;
    u64 value = 0;
};

inline int default_workers() {
    if (const char* env = std::getenv("ANOMALOUS_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Classify every prime in the limit.  Records are delivered to `sink` (if
// set) in increasing-p order after all workers finish; the summary is the
// in-order fold of the same records.
inline ScanSummary scan(const RationalPair& pair, const ScanLimit& limit, u64 seed, int workers,
                        const ClassifyOptions& opts = {},
                        const std::function<void(const PrimeRecord&)>& sink = nullptr,
                        const std::function<void(u64, u64)>& progress = nullptr) {
    if (limit.value < 5) throw error("scan: limit must be at least 5");
    std::vector<u64> primes = (limit.kind == ScanLimit::Kind::max_prime)
                                  ? primes_up_to(limit.value)
                                  : first_n_primes(limit.value);
    std::vector<PrimeRecord> records(primes.size());
    if (workers < 1) workers = 1;
    if (static_cast<size_t>(workers) > primes.size() && !primes.empty())
        workers = static_cast<int>(primes.size());

    constexpr size_t kBlock = 32;
    std::atomic<size_t> next_block{0};
    std::atomic<size_t> done_count{0};
    std::mutex err_mu;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            size_t blk = next_block.fetch_add(1);
            size_t begin = blk * kBlock;
            if (begin >= primes.size()) return;
            size_t end = std::min(begin + kBlock, primes.size());
            for (size_t i = begin; i < end; ++i) {
                {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (first_error) return;
                }
                try {
                    records[i] = classify_prime(pair, primes[i], seed, opts);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
            size_t done = done_count.fetch_add(end - begin) + (end - begin);
            if (progress) progress(done, primes.size());
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ScanSummary sum;
    for (const auto& rec : records) {
        sum.add(rec);
        if (sink) sink(rec);
    }
    return sum;
}

}  // namespace anomalous
