#pragma once

#include "sesim/market.hpp"

namespace sesim {

/// Contract threshold: both sides must be satisfied, so the binding one wins.
inline double contract_threshold(double xi_pro, double xi_esp) {
    if (xi_pro < 0.0 || xi_pro > 1.0 || xi_esp < 0.0 || xi_esp > 1.0)
        throw ConfigError("contract thresholds must be in [0,1]");
    return std::max(xi_pro, xi_esp);
}

struct MatchOutcome {
    double threshold = 0.0;
    std::vector<double> ratio;  // R_bill,j / B^ORI_j over the trial window
    std::vector<int> retained;
    std::vector<int> exited;
};

/// Mutual selection after the trial window: a prosumer stays when its mean
/// bill-reduction ratio clears the threshold. xi = 0 is the vacuous contract
/// and keeps everyone. Zero-baseline prosumers stay iff they did not lose.
inline MatchOutcome evaluate_matching(const std::vector<BillStatement>& construction_totals,
                                      double xi) {
    MatchOutcome out;
    out.threshold = xi;
    out.ratio.resize(construction_totals.size());
    for (std::size_t j = 0; j < construction_totals.size(); ++j) {
        const auto& b = construction_totals[j];
        bool keep;
        if (b.baseline_bill > 0.0) {
            out.ratio[j] = b.reduction / b.baseline_bill;
            keep = xi == 0.0 || out.ratio[j] >= xi;
        } else {
            out.ratio[j] = 0.0;
            keep = xi == 0.0 || b.reduction >= 0.0;
        }
        (keep ? out.retained : out.exited).push_back(static_cast<int>(j));
    }
    return out;
}

struct Allocation {
    double esp_share = 0.0;        // R^SV_ESP
    double prosumer_pool = 0.0;    // R^SV_pro
    std::vector<double> per_prosumer;
};

/// Two-player Shapley split of the grand-coalition value between the
/// operator and the prosumer block.
inline Allocation shapley_split(double v_empty, double v_esp_alone, double v_pro_alone,
                                double v_grand) {
    for (double v : {v_empty, v_esp_alone, v_pro_alone, v_grand})
        if (!std::isfinite(v)) throw ConfigError("characteristic values must be finite");
    Allocation a;
    a.esp_share = 0.5 * (v_esp_alone - v_empty) + 0.5 * (v_grand - v_pro_alone);
    a.prosumer_pool = 0.5 * (v_pro_alone - v_empty) + 0.5 * (v_grand - v_esp_alone);
    return a;
}

/// Pro-rata allocation of the prosumer pool by contributed battery capacity.
inline std::vector<double> allocate_by_capacity(double pool,
                                                const std::vector<const Prosumer*>& prosumers) {
    double total = 0.0;
    for (const Prosumer* p : prosumers) total += p->ess_capacity_kwh;
    if (total <= 0.0) throw ConfigError("allocate_by_capacity: zero total capacity");
    std::vector<double> shares(prosumers.size());
    for (std::size_t j = 0; j < prosumers.size(); ++j)
        shares[j] = pool * prosumers[j]->ess_capacity_kwh / total;
    return shares;
}

}  // namespace sesim
