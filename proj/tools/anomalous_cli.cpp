// Command-line front end: scan pairs, aggregate tables, run the model suite.
//
// Exit codes: 0 success, 2 usage/input error, 3 scientific inconsistency.
// All data goes to standard output (or --out files, written atomically);
// progress and diagnostics go to standard error only.

#include <atomic>
#include <climits>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "anomalous/catalog.hpp"
#include "anomalous/io.hpp"
#include "anomalous/model.hpp"

namespace {

using namespace anomalous;

constexpr int kExitUsage = 2;
constexpr int kExitInconsistent = 3;

// --pair builtin:LABEL, or a path to a pair JSON file.
RationalPair resolve_pair(const std::string& src) {
    if (src.rfind("builtin:", 0) == 0) return builtin_pair(src.substr(8));
    RationalPair pair = load_pair_file(src);
    verify_pair(pair);
    return pair;
}

// Default seed is fixed so published numbers are reproducible; --seed random
// opts out.
u64 parse_seed(const std::string& s) {
    if (s == "random") {
        std::random_device rd;
        return (u64(rd()) << 32) ^ rd();
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw error("--seed must be a nonnegative integer or 'random'");
    }
}

double to_double(const rat& r) { return r.convert_to<double>(); }

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        atomic_write_file(out_path, text);
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanArgs {
    std::string pair_src;
    u64 max_prime = 0, num_primes = 0;
    std::string seed = "1";
    int workers = 0;
    double audit_rate = 0.01;
    std::string records_path, summary_path;
};

int cmd_scan(const ScanArgs& a) {
    if ((a.max_prime == 0) == (a.num_primes == 0))
        throw error("scan: exactly one of --max-prime / --num-primes is required");
    RationalPair pair = resolve_pair(a.pair_src);
    ScanLimit limit = a.max_prime ? ScanLimit{ScanLimit::Kind::max_prime, a.max_prime}
                                  : ScanLimit{ScanLimit::Kind::num_primes, a.num_primes};
    u64 seed = parse_seed(a.seed);
    int workers = a.workers > 0 ? a.workers : default_workers();
    ClassifyOptions opts;
    opts.audit_rate = a.audit_rate;

    std::ostringstream csv;
    csv << kRecordsCsvHeader << '\n';
    u64 crosscheck_failures = 0;
    auto sink = [&](const PrimeRecord& r) {
        if (!r.crosscheck_ok) ++crosscheck_failures;
        if (!a.records_path.empty()) csv << record_to_csv(r) << '\n';
    };
    std::atomic<int> last_pct{-1};
    auto progress = [&](u64 done, u64 total) {
        int pct = static_cast<int>(100 * done / total);
        int prev = last_pct.load();
        while (pct > prev && last_pct.compare_exchange_weak(prev, pct)) {
            std::cerr << "scan " << pair.label << ": " << done << "/" << total << " primes (" << pct
                      << "%)\n";
            return;
        }
    };

    std::cerr << "scanning pair " << pair.label << " with " << workers << " worker(s), seed "
              << seed << "\n";
    ScanSummary sum = scan(pair, limit, seed, workers, opts, sink, progress);

    if (!a.records_path.empty()) atomic_write_file(a.records_path, csv.str());
    std::string summary_text = summary_to_json(sum).dump(2) + "\n";
    if (!a.summary_path.empty()) atomic_write_file(a.summary_path, summary_text);
    std::cout << summary_text;

    if (crosscheck_failures) {
        std::cerr << "error: " << crosscheck_failures << " record(s) failed the cross-check\n";
        return kExitInconsistent;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

struct TablesArgs {
    std::string records_path;
    bool predict = false;
    int m = 2;
    int h_max = 0;
    std::string out_path;
};

int cmd_tables(const TablesArgs& a) {
    auto records = load_records_file(a.records_path);
    ScanSummary sum;
    for (const auto& r : records) sum.add(r);

    std::ostringstream out;
    out << std::fixed;

    out << "Defect histogram (" << sum.anomalous() << " anomalous / " << sum.primes_seen
        << " primes):\n";
    for (const auto& [d, n] : sum.by_defect)
        out << "  (" << d.first << "," << d.second << ")  " << std::setw(10) << n << "  "
            << std::setprecision(6) << double(n) / double(std::max<u64>(sum.anomalous(), 1))
            << '\n';
    out << "  Total: " << sum.anomalous() << "   P(X) = " << std::setprecision(6) << sum.p_of_x()
        << "\n\n";

    for (const auto& [d, n] : sum.by_defect) {
        out << "Defect (" << d.first << "," << d.second << "): crater_class x height counts\n";
        out << "  h \\ class" << std::setw(10) << 0 << std::setw(10) << 1 << std::setw(10) << 4
            << std::setw(10) << 5 << '\n';
        int h_lo = INT_MAX, h_hi = 0;
        for (const auto& [k, v] : sum.by_defect_geometry)
            if (std::get<0>(k) == d.first && std::get<1>(k) == d.second) {
                h_lo = std::min(h_lo, std::get<3>(k));
                h_hi = std::max(h_hi, std::get<3>(k));
            }
        for (int h = h_lo; h <= h_hi; ++h) {
            out << "  " << std::setw(9) << h;
            for (int cc : {0, 1, 4, 5}) {
                auto it = sum.by_defect_geometry.find({d.first, d.second, cc, h});
                out << std::setw(10) << (it == sum.by_defect_geometry.end() ? 0 : it->second);
            }
            out << '\n';
        }
        out << '\n';
    }

    out << "Running P(X):\n  primes      anomalous   P(X)\n";
    u64 seen = 0, anom = 0, next_mark = 100;
    for (const auto& r : records) {
        ++seen;
        if (r.status == Status::anomalous) ++anom;
        if (seen == next_mark || seen == records.size()) {
            out << "  " << std::setw(10) << seen << "  " << std::setw(9) << anom << "   "
                << std::setprecision(6) << double(anom) / double(seen) << '\n';
            next_mark *= 10;
        }
    }
    out << '\n';

    if (a.predict) {
        const int m = a.m;
        const std::pair<int, int> defect{m + 1, m};
        u64 total = sum.by_defect.count(defect) ? sum.by_defect.at(defect) : 0;
        int h_max = a.h_max > 0 ? a.h_max : m + 4;
        auto table = conjecture_table(m, h_max);
        out << "Defect (" << defect.first << "," << defect.second
            << ") crater/height proportions vs prediction (m=" << m << "):\n";
        out << "  crater   H    observed   predicted\n";
        for (int crater : {0, 1, 4, 5})
            for (int H = m; H <= h_max; ++H) {
                auto it = sum.by_defect_geometry.find({defect.first, defect.second, crater, H});
                u64 n = it == sum.by_defect_geometry.end() ? 0 : it->second;
                double obs = total ? double(n) / double(total) : 0.0;
                out << "  " << std::setw(6) << crater << std::setw(4) << H << "  "
                    << std::setprecision(6) << std::setw(9) << obs << "   " << std::setw(9)
                    << to_double(table.predicted.at(crater)[H - m]) << '\n';
            }
        out << '\n';
    }

    emit(out.str(), a.out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

std::string distribution_csv(const ModelDistribution& d) {
    std::ostringstream out;
    out << "kind,K,n,seed,k,class,mass,mass_exact\n";
    std::string kind, K, n, seed;
    switch (d.kind) {
        case ModelDistribution::Kind::closed_form: kind = "closed_form"; break;
        case ModelDistribution::Kind::enumerated:
            kind = "enumerated";
            K = std::to_string(d.K);
            break;
        case ModelDistribution::Kind::sampled:
            kind = "sampled";
            K = std::to_string(d.K);
            n = std::to_string(d.samples);
            seed = std::to_string(d.seed);
            break;
    }
    auto row = [&](const std::string& k, const std::string& cls, const rat& mass) {
        out << kind << ',' << K << ',' << n << ',' << seed << ',' << k << ',' << cls << ','
            << std::setprecision(12) << to_double(mass) << ','
            << boost::multiprecision::numerator(mass) << '/'
            << boost::multiprecision::denominator(mass) << '\n';
    };
    for (const auto& [key, mass] : d.mass)
        row(std::to_string(key.k), sqf_class_name(key.c), mass);
    row("", "deep", d.deep);
    return out.str();
}

int model_verify(const ModelDistribution& d) {
    for (int k = 0; k <= d.K - 5; ++k)
        for (SqfClass c : kAllSqfClasses) {
            auto it = d.mass.find(ModelKey{k, c});
            rat got = it == d.mass.end() ? rat(0) : it->second;
            if (got != prob_valuation_class(k, c)) {
                std::cerr << "verify FAILED at k=" << k << " class=" << sqf_class_name(c) << "\n";
                return kExitInconsistent;
            }
        }
    std::cerr << "verify ok: enumeration equals closed form for all k <= " << d.K - 5 << "\n";
    return 0;
}

std::string heights_csv(int m, int h_max) {
    auto t = conjecture_table(m, h_max);
    std::ostringstream out;
    out << "m,H,crater,predicted,predicted_exact\n";
    out << std::setprecision(12);
    for (int crater : {0, 1, 4, 5}) {
        for (int H = m; H <= h_max; ++H) {
            const rat& p = t.predicted.at(crater)[H - m];
            out << m << ',' << H << ',' << crater << ',' << to_double(p) << ','
                << boost::multiprecision::numerator(p) << '/'
                << boost::multiprecision::denominator(p) << '\n';
        }
        out << m << ",tail," << crater << ',' << to_double(t.tail.at(crater)) << ','
            << boost::multiprecision::numerator(t.tail.at(crater)) << '/'
            << boost::multiprecision::denominator(t.tail.at(crater)) << '\n';
    }
    return out.str();
}

std::string oracle_report(int m) {
    auto rep = group_order_oracle(m);
    std::ostringstream out;
    out << "m: " << rep.m << '\n'
        << "gl2_order: " << rep.gl2_order << '\n'
        << "group_order: " << rep.group_order << '\n'
        << "neg_i_mod_half: " << rep.neg_i_mod_half << '\n'
        << "neg_i_full: " << rep.neg_i_full << '\n'
        << "per_defect: " << rep.per_defect << '\n'
        << "series_total: " << oracle_series_total() << '\n'
        << oracle_discrepancy_note(m) << '\n';
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anomalous primes of rationally 2-isogenous elliptic curve pairs"};
    app.require_subcommand(1);

    ScanArgs sa;
    auto* scan_cmd = app.add_subcommand("scan", "classify every prime up to a limit");
    scan_cmd->add_option("--pair", sa.pair_src, "builtin:LABEL or path to a pair JSON file")
        ->required();
    scan_cmd->add_option("--max-prime", sa.max_prime, "scan all primes <= this bound");
    scan_cmd->add_option("--num-primes", sa.num_primes, "scan the first n primes");
    scan_cmd->add_option("--seed", sa.seed, "audit seed (integer, or 'random')");
    scan_cmd->add_option("--workers", sa.workers,
                         "worker threads (default: ANOMALOUS_WORKERS or hardware)");
    scan_cmd->add_option("--audit-rate", sa.audit_rate, "fraction of skip primes re-checked");
    scan_cmd->add_option("--records", sa.records_path, "write per-prime records CSV here");
    scan_cmd->add_option("--summary", sa.summary_path, "write summary JSON here");

    TablesArgs ta;
    auto* tables_cmd = app.add_subcommand("tables", "aggregate a records CSV into tables");
    tables_cmd->add_option("--records", ta.records_path, "records CSV from a scan")->required();
    tables_cmd->add_flag("--predict", ta.predict, "add predicted crater/height proportions");
    tables_cmd->add_option("--m", ta.m, "defect parameter for --predict")->check(CLI::Range(2, 8));
    tables_cmd->add_option("--h-max", ta.h_max, "largest height row for --predict");
    tables_cmd->add_option("--out", ta.out_path, "write tables here instead of stdout");

    auto* model_cmd = app.add_subcommand("model", "the 2-adic probabilistic model");
    model_cmd->require_subcommand(1);
    int k_max = 8, bits = 8, oracle_m = 2, hm = 2, h_max = 6;
    u64 nsamples = 100000;
    std::string model_seed = "1", out_path;
    bool verify = false, full = false;
    auto* cf = model_cmd->add_subcommand("closed-form", "closed-form valuation/class table");
    cf->add_option("--k-max", k_max, "largest valuation row")->check(CLI::Range(0, 60));
    cf->add_option("--out", out_path);
    auto* en = model_cmd->add_subcommand("enumerate", "exact enumeration over Z/2^K");
    en->add_option("--bits", bits, "truncation K")->check(CLI::Range(6, 14));
    en->add_flag("--verify", verify, "check enumeration against the closed form");
    en->add_flag("--full", full, "run the full y-loop instead of the unit-coset collapse");
    en->add_option("--out", out_path);
    auto* sm = model_cmd->add_subcommand("sample", "Monte Carlo realization");
    sm->add_option("--n", nsamples, "sample count")->check(CLI::PositiveNumber);
    sm->add_option("--seed", model_seed, "sampling seed (integer, or 'random')");
    sm->add_option("--bits", bits, "truncation K")->check(CLI::Range(6, 62));
    sm->add_option("--out", out_path);
    auto* hts = model_cmd->add_subcommand("heights", "crater/height prediction table");
    hts->add_option("--m", hm, "defect parameter")->check(CLI::Range(2, 8));
    hts->add_option("--h-max", h_max, "largest height row");
    hts->add_option("--out", out_path);
    auto* orc = model_cmd->add_subcommand("oracle", "group-order oracle over GL2(Z/2^m)");
    orc->add_option("--m", oracle_m, "level 2^m")->check(CLI::Range(2, 3));
    orc->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*scan_cmd) return cmd_scan(sa);
        if (*tables_cmd) return cmd_tables(ta);
        if (*cf) {
            emit(distribution_csv(closed_form_model(k_max)), out_path);
            return 0;
        }
        if (*en) {
            auto d = enumerate_model(bits, !full);
            emit(distribution_csv(d), out_path);
            return verify ? model_verify(d) : 0;
        }
        if (*sm) {
            emit(distribution_csv(sample_model(nsamples, parse_seed(model_seed), bits)), out_path);
            return 0;
        }
        if (*hts) {
            if (h_max < hm) throw error("heights: --h-max must be >= --m");
            emit(heights_csv(hm, h_max), out_path);
            return 0;
        }
        if (*orc) {
            emit(oracle_report(oracle_m), out_path);
            return 0;
        }
    } catch (const consistency_error& e) {
        std::cerr << "inconsistency: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
