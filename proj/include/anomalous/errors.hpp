#pragma once

#include <stdexcept>
#include <string>

namespace anomalous {

// Generic library failure (bad arguments, unsupported ranges, I/O trouble).
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical cross-check failed.  These are bug detectors: the theory
// guarantees the checked identities, so a violation means the computation
// (not the data) is wrong, and scans abort rather than emit the record.
struct consistency_error : error {
    explicit consistency_error(const std::string& what) : error(what) {}
};

}  // namespace anomalous
