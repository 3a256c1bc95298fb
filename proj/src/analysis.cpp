#include "fullerlab/analysis.hpp"

#include "fullerlab/liecone.hpp"
#include "fullerlab/rng.hpp"

#include <stdexcept>

namespace fullerlab {

Json analysis_report(const AffineSystem& sys, const AnalyzeOptions& opts) {
    AugmentedSystem aug = augment(sys);

    std::vector<double> point = opts.point;
    if (point.empty()) point.assign(static_cast<size_t>(aug.N), 0.0);
    if (static_cast<int>(point.size()) != aug.N)
        throw std::invalid_argument("analysis point needs the augmented dimension " +
                                    std::to_string(aug.N));

    Json config;
    config["seed"] = opts.seed;
    config["point"] = point;
    config["tau_rank"] = opts.tau_rank;
    config["tau_eig"] = opts.tau_eig;
    config["max_depth"] = opts.max_depth;
    config["perturbations"] = opts.perturbations;
    config["perturbation_magnitude"] = opts.perturbation_magnitude;
    if (!sys.name.empty()) config["problem"] = sys.name;

    CertificateOptions copts;
    copts.singular_point = point;
    copts.tau_rank = opts.tau_rank;
    copts.max_depth = opts.max_depth;
    CertificateResult cert = fuller_certificate(aug, copts);

    std::vector<std::vector<double>> points{point};
    SplitMix64 rng(opts.seed);
    for (int i = 0; i < opts.perturbations; ++i) {
        std::vector<double> p(point);
        for (auto& v : p) v += opts.perturbation_magnitude * (2.0 * rng.uniform() - 1.0);
        points.push_back(std::move(p));
    }
    std::vector<BracketField> basis = delta_basis(aug, cert.ladder);
    DeltaReport sampled = delta_rank(basis, points, opts.tau_rank);

    Json report;
    report["config"] = config;
    report["certificate"] = certificate_to_json(cert);
    report["delta_sampled"] = delta_to_json(sampled);

    if (cert.ladder.k >= 0 && !cert.ladder.k_odd) {
        std::vector<double> p_dir(static_cast<size_t>(aug.N), 0.0);
        p_dir[0] = -1.0;
        if (cert.delta.annihilator) p_dir = *cert.delta.annihilator;
        GlcVerdict glc = glc_check(cert.ladder, point, p_dir, opts.tau_eig);
        Json gj;
        gj["verdict"] = to_string(glc);
        gj["point"] = point;
        gj["p"] = p_dir;
        report["glc"] = gj;
    } else {
        Json gj;
        gj["verdict"] = to_string(GlcVerdict::inapplicable);
        report["glc"] = gj;
    }
    return report;
}

} // namespace fullerlab
