#include "icls/hash.hpp"
#include "icls/scribe.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace icls::scribe {

EmbeddingVector make_embedding(std::vector<double> values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    EmbeddingVector e;
    e.values = std::move(values);
    e.norm = std::sqrt(sum);
    return e;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::size_t HashingEmbedder::bucket(std::string_view term) const noexcept {
    return static_cast<std::size_t>(fnv1a64(term) % dimension_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
    std::vector<double> tf(dimension_, 0.0);
    for (const auto& term : normalize_terms(text)) tf[bucket(term)] += 1.0;
    double sum = 0.0;
    for (double v : tf) sum += v * v;
    if (sum > 0.0) {
        const double inv = 1.0 / std::sqrt(sum);
        for (double& v : tf) v *= inv;
    }
    return make_embedding(std::move(tf));
}

std::string encode_embedding(const EmbeddingVector& v) {
    static_assert(sizeof(double) == 8);
    std::string bytes(v.values.size() * sizeof(double), '\0');
    if (!v.values.empty()) std::memcpy(bytes.data(), v.values.data(), bytes.size());
    return bytes;
}

EmbeddingVector decode_embedding(std::string_view bytes) {
    if (bytes.size() % sizeof(double) != 0) throw std::invalid_argument("embedding blob length is not a multiple of 8");
    std::vector<double> values(bytes.size() / sizeof(double));
    if (!values.empty()) std::memcpy(values.data(), bytes.data(), bytes.size());
    return make_embedding(std::move(values));
}

std::string encode_terms(const std::vector<std::string>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out.push_back(' ');
        out.append(t);
    }
    return out;
}

std::vector<std::string> decode_terms(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto sp = text.find(' ', pos);
        if (sp == std::string_view::npos) sp = text.size();
        if (sp > pos) out.emplace_back(text.substr(pos, sp - pos));
        pos = sp + 1;
    }
    return out;
}

} // namespace icls::scribe
