#pragma once

// Slow, direct re-implementations used as test oracles. Nothing here calls
// into the library's metric code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "ecosim/core.hpp"

namespace oracle {

using ecosim::Genome;

inline std::size_t count_reaching(const std::vector<Genome>& seqs, std::size_t site) {
    std::size_t n = 0;
    for (const auto& s : seqs) {
        if (s.size() >= site) {
            ++n;
        }
    }
    return n;
}

inline double entropy_at(const std::vector<Genome>& seqs, std::size_t alphabet, std::size_t site) {
    std::map<ecosim::AgentIndex, double> freq;
    double n = 0;
    for (const auto& s : seqs) {
        if (s.size() >= site) {
            freq[s[site - 1]] += 1;
            n += 1;
        }
    }
    if (alphabet < 2) {
        return 0.0;
    }
    double h = 0.0;
    for (const auto& [c, k] : freq) {
        const double p = k / n;
        h -= p * std::log(p) / std::log(static_cast<double>(alphabet));
    }
    return h;
}

// Linear scan from the longest sequence down.
inline std::size_t effective_length(const std::vector<Genome>& seqs, std::size_t alphabet) {
    std::size_t lmax = 0;
    for (const auto& s : seqs) {
        lmax = std::max(lmax, s.size());
    }
    for (std::size_t l = lmax; l >= 1; --l) {
        if (static_cast<double>(count_reaching(seqs, l)) >= static_cast<double>(alphabet * l)) {
            return l;
        }
    }
    return 0;
}

struct Measures {
    std::size_t lv = 0;
    double cv = 0.0;
    double e = 0.0;
};

inline Measures measure(const std::vector<Genome>& seqs, std::size_t alphabet) {
    Measures m;
    m.lv = effective_length(seqs, alphabet);
    double h = 0.0;
    for (std::size_t i = 1; i <= m.lv; ++i) {
        h += entropy_at(seqs, alphabet, i);
    }
    m.cv = static_cast<double>(m.lv) - h;
    m.e = m.lv ? m.cv / static_cast<double>(m.lv) : 0.0;
    return m;
}

inline int distance(const std::vector<ecosim::Agent>& agents, const std::vector<int>& required) {
    int total = 0;
    for (int r : required) {
        int best = std::numeric_limits<int>::max();
        for (const auto& a : agents) {
            for (int x : a.attributes()) {
                best = std::min(best, std::abs(r - x));
            }
        }
        total += best;
    }
    return total;
}

// Minimum distance over every agent subset of size 1..max_len.
inline int brute_optimum(const std::vector<ecosim::Agent>& alphabet, const std::vector<int>& required,
                         std::size_t max_len) {
    int best = std::numeric_limits<int>::max();
    std::vector<ecosim::Agent> chosen;
    auto rec = [&](auto& self, std::size_t from) -> void {
        if (!chosen.empty()) {
            best = std::min(best, distance(chosen, required));
        }
        if (chosen.size() == max_len) {
            return;
        }
        for (std::size_t i = from; i < alphabet.size(); ++i) {
            chosen.push_back(alphabet[i]);
            self(self, i + 1);
            chosen.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

// Regularized lower incomplete gamma P(a, x) by its power series.
inline double gamma_p(double a, double x) {
    if (x <= 0) {
        return 0.0;
    }
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double chi2_quantile(std::size_t dof, double q) {
    double lo = 0.0;
    double hi = 10.0 * static_cast<double>(dof) + 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (gamma_p(dof / 2.0, mid / 2.0) < q ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

}  // namespace oracle
