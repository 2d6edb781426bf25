#pragma once

// Built-in catalog of rationally 2-isogenous pairs.  Every entry is verified
// at load time (Velu quotient and point-count agreement at five good primes).

#include <array>
#include <vector>

#include "anomalous/pairs.hpp"

namespace anomalous {

inline std::vector<RationalPair> builtin_pairs() {
    auto pair = [](const char* label, std::array<long long, 5> e, std::array<long long, 5> ep,
                   long long kx_num, long long kx_den) {
        RationalPair p;
        p.label = label;
        p.E = RationalModel{e[0], e[1], e[2], e[3], e[4]};
        p.Ep = RationalModel{ep[0], ep[1], ep[2], ep[3], ep[4]};
        p.kernel_num = kx_num;
        p.kernel_den = kx_den;
        return p;
    };
    std::vector<RationalPair> out = {
        // E: y^2 = x(x+6)(x+12) read as an integral model, with E' its global
        // quotient by (0,0): y^2 = x(x^2 - 36x + 36).  Mod 17 these reduce to
        // the curves y^2 = x(x+6)(x+12) and (up to isomorphism) its printed
        // partner y^2 = (x+1)(x+4)(x-4).
        pair("example1.1", {0, 18, 0, 72, 0}, {0, -36, 0, 36, 0}, 0, 1),
        // Conductor 69, the two-curve class with E(Q) = E'(Q) = Z/2.  E' is
        // the global quotient of E by (0,0).
        pair("69a", {0, 13, 0, 48, 0}, {0, -26, 0, -23, 0}, 0, 1),
        // Conductor 10608, two-curve class with E(Q) = E'(Q) = Z/2; the
        // quotient model (0,4,0,208,0) is the u=2 scaling of (0,1,0,13,0).
        pair("10608y", {0, -2, 0, -51, 0}, {0, 4, 0, 208, 0}, 0, 1),
        // Conductor 210: E has torsion Z/2 x Z/8 and its quotient by (0,0)
        // has torsion Z/2 x Z/4.  No anomalous primes for this pair.
        pair("210e", {0, 337, 0, 20736, 0}, {0, -674, 0, 30625, 0}, 0, 1),
        // Conductor 1200: every 4-torsion point of E has rational
        // x-coordinate up to one conjugate pair (mod-4 image diag(+-1));
        // every anomalous prime has defect (3,2), density 1/4.
        pair("1200e", {0, -205, 0, 10000, 0}, {0, 410, 0, 2025, 0}, 0, 1),
    };
    for (const auto& p : out) verify_pair(p);
    return out;
}

inline RationalPair builtin_pair(const std::string& label) {
    for (auto& p : builtin_pairs())
        if (p.label == label) return p;
    throw error("unknown builtin pair: " + label);
}

}  // namespace anomalous
