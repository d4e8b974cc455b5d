#include "icls/scribe.hpp"

#include <algorithm>
#include <cmath>

namespace icls::scribe {

QueryFeatures make_query(const Embedder& embedder, std::string_view query) {
    return QueryFeatures{embedder.embed(query), term_set(query)};
}

namespace kernels {

double cosine_component(const EmbeddingVector& query, const EmbeddingVector& chunk) noexcept {
    if (query.degenerate() || chunk.degenerate() || query.values.size() != chunk.values.size()) return 0.5;
    double dot = 0.0;
    for (std::size_t i = 0; i < query.values.size(); ++i) dot += query.values[i] * chunk.values[i];
    double cos = std::clamp(dot / (query.norm * chunk.norm), -1.0, 1.0);
    return (1.0 + cos) / 2.0;
}

double keyword_component(std::span<const std::string> query_terms, std::span<const std::string> chunk_terms) noexcept {
    if (query_terms.empty()) return 0.0;
    std::size_t shared = 0;
    auto q = query_terms.begin();
    auto c = chunk_terms.begin();
    while (q != query_terms.end() && c != chunk_terms.end()) {
        if (*q < *c) {
            ++q;
        } else if (*c < *q) {
            ++c;
        } else {
            ++shared;
            ++q;
            ++c;
        }
    }
    return static_cast<double>(shared) / static_cast<double>(query_terms.size());
}

ScoredChunk score_record(const VectorRecord& record, const QueryFeatures& query, double alpha) noexcept {
    ScoredChunk s;
    s.chunk_id = record.chunk_id;
    s.ordinal = record.ordinal;
    s.cosine_component = cosine_component(query.embedding, record.embedding);
    s.keyword_component = keyword_component(query.terms, record.term_set);
    s.hybrid_score = alpha * s.cosine_component + (1.0 - alpha) * s.keyword_component;
    return s;
}

std::vector<ScoredChunk> score_serial(std::span<const VectorRecord> records, const QueryFeatures& query,
                                      double alpha) {
    std::vector<ScoredChunk> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(score_record(r, query, alpha));
    return out;
}

std::vector<ScoredChunk> score_parallel(std::span<const VectorRecord> records, const QueryFeatures& query,
                                        double alpha) {
    std::vector<ScoredChunk> out(records.size());
    const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = score_record(records[static_cast<std::size_t>(i)], query, alpha);
    return out;
}

void rank(std::vector<ScoredChunk>& scored) {
    std::sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.hybrid_score != b.hybrid_score) return a.hybrid_score > b.hybrid_score;
        return a.ordinal < b.ordinal;
    });
}

} // namespace kernels

} // namespace icls::scribe
