#pragma once

#include "fullerlab/jsonio.hpp"
#include "fullerlab/system.hpp"

#include <cstdint>
#include <vector>

namespace fullerlab {

struct AnalyzeOptions {
    uint64_t seed = 0;
    std::vector<double> point; // candidate singular point; empty = origin
    double tau_rank = 1e-9;
    double tau_eig = 1e-9;
    int max_depth = 12;
    int perturbations = 8;
    double perturbation_magnitude = 1e-2;
};

/// End-to-end symbolic analysis: ladder, GLC at the candidate point,
/// cone ranks at the candidate plus seeded perturbations, certificate.
/// The returned JSON embeds the resolved options under "config".
Json analysis_report(const AffineSystem& sys, const AnalyzeOptions& opts);

} // namespace fullerlab
