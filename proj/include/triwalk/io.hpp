#pragma once

#include <string>

#include "json.hpp"
#include "triwalk/kernel.hpp"

namespace triwalk {

inline nlohmann::json geometry_to_json(const WedgeGeometry& g) {
    return {
        {"alpha", g.angles.alpha},
        {"beta", g.angles.beta},
        {"n_left", g.lattice.n_left},
        {"n_right", g.lattice.n_right},
        {"phi", g.lattice.phi},
        {"psi", g.lattice.psi},
        {"u", g.dims.u},
        {"v", g.dims.v},
        {"h", g.dims.h},
        {"a", g.probs.a},
        {"b", g.probs.b},
        {"c", g.probs.c},
        {"lambda", g.probs.lambda},
        {"sigma2", g.probs.sigma2},
        {"band_left", g.band_left},
        {"band_right", g.band_right},
        {"first_full_row", g.first_full},
        {"row_growth", g.row_growth},
    };
}

inline nlohmann::json entries_to_json(const TransitionList& list) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : list)
        entries.push_back({{"dk", e.dk}, {"dj", e.dj}, {"p", e.prob}});
    return entries;
}

/// Kernel dump: geometry echo, absorbing row and one entry list per
/// vertex class (band classes carry their band index; the short top rows
/// are listed per vertex).
inline nlohmann::json kernel_to_json(const WalkKernel& kernel) {
    nlohmann::json classes = nlohmann::json::array();
    classes.push_back({{"class", "apex"}, {"entries", entries_to_json(kernel.apex)}});
    classes.push_back({{"class", "interior"}, {"entries", entries_to_json(kernel.interior)}});
    for (std::size_t j = 0; j < kernel.left_band.size(); ++j)
        classes.push_back({{"class", "left"},
                           {"band", j},
                           {"entries", entries_to_json(kernel.left_band[j])}});
    for (std::size_t r = 0; r < kernel.right_band.size(); ++r)
        classes.push_back({{"class", "right"},
                           {"band", r},
                           {"entries", entries_to_json(kernel.right_band[r])}});
    for (int k = 1; k < kernel.geom.first_full; ++k)
        for (std::size_t j = 0; j < kernel.top_rows[k].size(); ++j)
            classes.push_back({{"class", "top_block"},
                               {"row", k},
                               {"position", j},
                               {"entries", entries_to_json(kernel.top_rows[k][j])}});
    return {{"geometry", geometry_to_json(kernel.geom)},
            {"M", kernel.absorbing_row},
            {"classes", classes}};
}

}  // namespace triwalk
