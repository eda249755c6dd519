#pragma once

#include <vector>

#include "ecosim/core.hpp"

namespace testutil {

// Alphabet of `size` one-attribute agents {1}, {2}, ...; sequences given as indices.
inline ecosim::Population make_population(std::size_t size, std::vector<ecosim::Genome> seqs) {
    ecosim::Population pop;
    for (std::size_t i = 0; i < size; ++i) {
        pop.alphabet.add(ecosim::Agent({static_cast<int>(i) + 1}));
    }
    pop.sequences = std::move(seqs);
    pop.validate();
    return pop;
}

inline std::vector<ecosim::Genome> repeat(const ecosim::Genome& g, std::size_t n) {
    return std::vector<ecosim::Genome>(n, g);
}

inline std::vector<ecosim::Genome> concat(std::vector<ecosim::Genome> a, const std::vector<ecosim::Genome>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace testutil
