#pragma once

// Independent reference computations. These deliberately avoid the library's
// scoring and chunking code paths; they share only the stopword list and the
// embedding function, which have their own tests.

#include "icls/scribe.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace icls::support {

struct OracleScore {
    std::size_t ordinal;
    double cosine;
    double keyword;
    double hybrid;
};

inline std::set<std::string> oracle_terms(const std::string& text) {
    std::set<std::string> out;
    std::string cur;
    auto stop = scribe::stopwords();
    auto flush = [&] {
        if (!cur.empty() && std::find(stop.begin(), stop.end(), cur) == stop.end()) out.insert(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80)
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        else
            flush();
    }
    flush();
    return out;
}

/// Scores every record from scratch and orders by (score desc, ordinal asc).
inline std::vector<OracleScore> brute_force_rank(const scribe::Embedder& embedder,
                                                 const std::vector<scribe::VectorRecord>& records,
                                                 const std::string& query, double alpha) {
    auto q_vec = embedder.embed(query).values;
    auto q_terms = oracle_terms(query);
    double q_sq = 0;
    for (double v : q_vec) q_sq += v * v;

    std::vector<OracleScore> out;
    for (const auto& r : records) {
        const auto& c_vec = r.embedding.values;
        double c_sq = 0, dot = 0;
        for (std::size_t i = 0; i < c_vec.size(); ++i) {
            c_sq += c_vec[i] * c_vec[i];
            dot += q_vec[i] * c_vec[i];
        }
        double cosine = 0.5;
        if (q_sq > 0 && c_sq > 0) cosine = (1.0 + std::clamp(dot / (std::sqrt(q_sq) * std::sqrt(c_sq)), -1.0, 1.0)) / 2.0;
        double keyword = 0;
        if (!q_terms.empty()) {
            auto c_terms = oracle_terms(r.text);
            std::size_t shared = 0;
            for (const auto& t : q_terms) shared += c_terms.count(t);
            keyword = static_cast<double>(shared) / static_cast<double>(q_terms.size());
        }
        out.push_back({r.ordinal, cosine, keyword, alpha * cosine + (1 - alpha) * keyword});
    }
    std::sort(out.begin(), out.end(), [](const OracleScore& a, const OracleScore& b) {
        return a.hybrid != b.hybrid ? a.hybrid > b.hybrid : a.ordinal < b.ordinal;
    });
    return out;
}

/// Sliding-window count: 1 when the text fits one window, otherwise
/// ceil((n - overlap) / (size - overlap)).
inline std::size_t window_count(std::size_t n, std::size_t size, std::size_t overlap) {
    if (n <= size) return 1;
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n - overlap) / static_cast<double>(size - overlap)));
}

} // namespace icls::support
