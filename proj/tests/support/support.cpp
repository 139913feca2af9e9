#include "support.hpp"

namespace testing_support {

FitAudit& audit() {
    static FitAudit a;
    return a;
}

hierlag::SolverConfig audited(hierlag::SolverConfig config) {
    auto previous = config.observer;
    config.observer = [previous](const hierlag::HierGroupStructure& s, const hierlag::CoefVector& beta) {
        audit().fits.fetch_add(1);
        if (!hierlag::zero_groups_suffix_closed(s, beta)) audit().violations.fetch_add(1);
        if (previous) previous(s, beta);
    };
    return config;
}

} // namespace testing_support
