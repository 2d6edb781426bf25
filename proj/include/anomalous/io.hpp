#pragma once

// Serialization: pair files (JSON), per-prime records (CSV), scan summaries
// (JSON).  Every writer has a matching reader and files round-trip exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anomalous/scan.hpp"

namespace anomalous {

// ---------------------------------------------------------------------------
// Atomic file writes: temp + rename so readers never observe partial output.
// ---------------------------------------------------------------------------

inline void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open for writing: " + tmp);
        out << content;
        if (!out.flush()) throw error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw error("rename failed: " + tmp + " -> " + path);
}

// ---------------------------------------------------------------------------
// Pair files
// ---------------------------------------------------------------------------

namespace detail {

inline bigint json_to_bigint(const nlohmann::json& j) {
    if (j.is_string()) return bigint(j.get<std::string>());
    if (j.is_number_integer()) return bigint(j.get<long long>());
    throw error("pair file: expected integer or string, got " + j.dump());
}

}  // namespace detail

inline RationalPair pair_from_json(const nlohmann::json& j) {
    auto model = [](const nlohmann::json& arr) {
        if (!arr.is_array() || arr.size() != 5)
            throw error("pair file: curve must be [a1,a2,a3,a4,a6]");
        RationalModel m;
        m.a1 = detail::json_to_bigint(arr[0]);
        m.a2 = detail::json_to_bigint(arr[1]);
        m.a3 = detail::json_to_bigint(arr[2]);
        m.a4 = detail::json_to_bigint(arr[3]);
        m.a6 = detail::json_to_bigint(arr[4]);
        return m;
    };
    RationalPair pair;
    pair.label = j.at("label").get<std::string>();
    pair.E = model(j.at("E"));
    pair.Ep = model(j.at("Eprime"));
    std::string kx = j.at("kernel_x").is_string() ? j.at("kernel_x").get<std::string>()
                                                  : j.at("kernel_x").dump();
    auto slash = kx.find('/');
    pair.kernel_num = bigint(kx.substr(0, slash));
    pair.kernel_den = (slash == std::string::npos) ? bigint(1) : bigint(kx.substr(slash + 1));
    if (pair.kernel_den == 0) throw error("pair file: kernel_x denominator is zero");
    return pair;
}

inline nlohmann::json pair_to_json(const RationalPair& pair) {
    auto model = [](const RationalModel& m) {
        return nlohmann::json::array({m.a1.str(), m.a2.str(), m.a3.str(), m.a4.str(), m.a6.str()});
    };
    return nlohmann::json{{"label", pair.label},
                          {"E", model(pair.E)},
                          {"Eprime", model(pair.Ep)},
                          {"kernel_x", pair.kernel_num.str() + "/" + pair.kernel_den.str()}};
}

inline RationalPair load_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read pair file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw error("malformed pair file " + path + ": " + e.what());
    }
    return pair_from_json(j);
}

// ---------------------------------------------------------------------------
// Records CSV
// ---------------------------------------------------------------------------

inline const char* kRecordsCsvHeader =
    "p,status,t,D,dK,f,h,crater_class,level_E,level_Ep,"
    "sE_p,sEp_p,sE_p2,sEp_p2,defect_E,defect_Ep,m,crosscheck";

inline std::string record_to_csv(const PrimeRecord& r) {
    std::ostringstream out;
    auto opt_int = [&](auto&& v) {
        if (v) out << *v;
        out << ',';
    };
    auto opt_sylow = [&](const std::optional<SylowShape>& s) {
        if (s) out << s->a << ':' << s->b;
        out << ',';
    };
    out << r.p << ',' << status_name(r.status) << ',';
    opt_int(r.t);
    if (r.profile)
        out << r.profile->D << ',' << r.profile->dK << ',' << r.profile->f << ',' << r.profile->h
            << ',' << r.profile->crater_class << ',';
    else
        out << ",,,,,";
    opt_int(r.level_E);
    opt_int(r.level_Ep);
    opt_sylow(r.sE_p);
    opt_sylow(r.sEp_p);
    opt_sylow(r.sE_p2);
    opt_sylow(r.sEp_p2);
    if (r.defect) out << r.defect->first;
    out << ',';
    if (r.defect) out << r.defect->second;
    out << ',';
    opt_int(r.m);
    out << (r.crosscheck_ok ? 1 : 0);
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline Status status_from_name(const std::string& s) {
    for (int i = 0; i < 7; ++i)
        if (s == status_name(static_cast<Status>(i))) return static_cast<Status>(i);
    throw error("records CSV: unknown status '" + s + "'");
}

}  // namespace detail

inline PrimeRecord record_from_csv(const std::string& line) {
    auto f = detail::split_csv_line(line);
    if (f.size() != 18) throw error("records CSV: expected 18 fields, got line: " + line);
    PrimeRecord r;
    size_t i = 0;
    auto next = [&]() { return f.at(i++); };
    auto to_i64 = [](const std::string& s) { return static_cast<i64>(std::stoll(s)); };
    r.p = std::stoull(next());
    r.status = detail::status_from_name(next());
    std::string t = next();
    if (!t.empty()) r.t = to_i64(t);
    std::string D = next(), dK = next(), fc = next(), h = next(), cc = next();
    if (!D.empty()) {
        VolcanoProfile vp;
        vp.t = *r.t;
        vp.D = to_i64(D);
        vp.dK = to_i64(dK);
        vp.f = to_i64(fc);
        vp.h = static_cast<int>(to_i64(h));
        vp.crater_class = static_cast<int>(to_i64(cc));
        r.profile = vp;
    }
    auto opt_int = [&](std::optional<int>& dst) {
        std::string s = next();
        if (!s.empty()) dst = static_cast<int>(to_i64(s));
    };
    opt_int(r.level_E);
    opt_int(r.level_Ep);
    auto opt_sylow = [&](std::optional<SylowShape>& dst) {
        std::string s = next();
        if (s.empty()) return;
        auto colon = s.find(':');
        if (colon == std::string::npos) throw error("records CSV: bad Sylow field " + s);
        dst = SylowShape{static_cast<int>(std::stoll(s.substr(0, colon))),
                         static_cast<int>(std::stoll(s.substr(colon + 1)))};
    };
    opt_sylow(r.sE_p);
    opt_sylow(r.sEp_p);
    opt_sylow(r.sE_p2);
    opt_sylow(r.sEp_p2);
    std::string dE = next(), dEp = next();
    if (!dE.empty()) r.defect = std::make_pair(static_cast<int>(to_i64(dE)), static_cast<int>(to_i64(dEp)));
    opt_int(r.m);
    r.crosscheck_ok = next() == "1";
    return r;
}

inline std::vector<PrimeRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw error("records CSV: empty file");
    if (detail::split_csv_line(line) != detail::split_csv_line(kRecordsCsvHeader))
        throw error("records CSV: unexpected header: " + line);
    std::vector<PrimeRecord> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        out.push_back(record_from_csv(line));
    }
    return out;
}

inline std::vector<PrimeRecord> load_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read records file: " + path);
    return read_records_csv(in);
}

// ---------------------------------------------------------------------------
// Summary JSON
// ---------------------------------------------------------------------------

inline nlohmann::json summary_to_json(const ScanSummary& s) {
    nlohmann::json status = nlohmann::json::object();
    for (int i = 0; i < 7; ++i)
        status[status_name(static_cast<Status>(i))] = s.status_counts[i];
    nlohmann::json defects = nlohmann::json::array();
    for (auto& [k, v] : s.by_defect)
        defects.push_back({{"defect", {k.first, k.second}}, {"count", v}});
    nlohmann::json geom = nlohmann::json::array();
    for (auto& [k, v] : s.by_defect_geometry)
        geom.push_back({{"defect", {std::get<0>(k), std::get<1>(k)}},
                        {"crater_class", std::get<2>(k)},
                        {"h", std::get<3>(k)},
                        {"count", v}});
    return nlohmann::json{{"primes_seen", s.primes_seen},
                          {"max_p", s.max_p},
                          {"status_counts", status},
                          {"good", s.good},
                          {"iso_fp_good", s.iso_fp_good},
                          {"noniso_fp_good", s.noniso_fp_good},
                          {"audited", s.audited},
                          {"anomalous", s.anomalous()},
                          {"p_of_x", s.p_of_x()},
                          {"by_defect", defects},
                          {"by_defect_geometry", geom}};
}

inline ScanSummary summary_from_json(const nlohmann::json& j) {
    ScanSummary s;
    s.primes_seen = j.at("primes_seen").get<u64>();
    s.max_p = j.at("max_p").get<u64>();
    for (int i = 0; i < 7; ++i)
        s.status_counts[i] = j.at("status_counts").at(status_name(static_cast<Status>(i))).get<u64>();
    s.good = j.at("good").get<u64>();
    s.iso_fp_good = j.at("iso_fp_good").get<u64>();
    s.noniso_fp_good = j.at("noniso_fp_good").get<u64>();
    s.audited = j.at("audited").get<u64>();
    for (auto& d : j.at("by_defect"))
        s.by_defect[{d.at("defect")[0].get<int>(), d.at("defect")[1].get<int>()}] =
            d.at("count").get<u64>();
    for (auto& d : j.at("by_defect_geometry"))
        s.by_defect_geometry[{d.at("defect")[0].get<int>(), d.at("defect")[1].get<int>(),
                              d.at("crater_class").get<int>(), d.at("h").get<int>()}] =
            d.at("count").get<u64>();
    return s;
}

}  // namespace anomalous
