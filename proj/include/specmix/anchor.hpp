#pragma once

#include <string>
#include <vector>

#include "specmix/exact.hpp"

namespace specmix {

// one checked condition together with the exact quantity that was inspected
struct CertItem {
    std::string condition;
    std::string detail;
    Rational witness;
    bool ok = true;
};

struct AnchorEntry {
    Int n;
    std::vector<CertItem> certificate;
};

struct AnchorSequence {
    Int n0;
    std::vector<AnchorEntry> entries;
    std::string kind;
};

}  // namespace specmix
