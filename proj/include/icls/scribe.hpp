#pragma once

#include "icls/ids.hpp"
#include "icls/ingestion.hpp"
#include "icls/llm.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icls::scribe {

inline constexpr std::size_t kDefaultDimension = 256;
inline constexpr std::size_t kDefaultTopK = 4;
inline constexpr double kDefaultAlpha = 0.7;

// --- terms ------------------------------------------------------------------

/// Sorted English stopword list used by both the embedder and the keyword
/// component.
std::span<const std::string_view> stopwords() noexcept;
bool is_stopword(std::string_view term) noexcept;

/// Lowercased word terms in order of appearance, stopwords removed. Words are
/// maximal runs of ASCII alphanumerics or non-ASCII bytes.
std::vector<std::string> normalize_terms(std::string_view text);

/// Sorted, deduplicated normalize_terms.
std::vector<std::string> term_set(std::string_view text);

// --- embeddings -------------------------------------------------------------

struct EmbeddingVector {
    std::vector<double> values;
    double norm{0.0};  ///< sqrt of the sum of squares of values

    bool degenerate() const noexcept { return norm == 0.0; }
    bool operator==(const EmbeddingVector&) const = default;
};

/// Wraps values and caches their Euclidean norm.
EmbeddingVector make_embedding(std::vector<double> values);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const noexcept = 0;
};

/// Term-frequency feature hashing into `dimension` buckets followed by L2
/// normalization. Text without terms yields the zero vector.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);
    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dimension() const noexcept override { return dimension_; }

    /// Bucket a term hashes into.
    std::size_t bucket(std::string_view term) const noexcept;

private:
    std::size_t dimension_;
};

// --- records and scoring ----------------------------------------------------

struct VectorRecord {
    ChunkId chunk_id;
    UnitId unit_id;
    std::size_t ordinal{0};
    std::string text;
    EmbeddingVector embedding;
    std::vector<std::string> term_set;

    bool operator==(const VectorRecord&) const = default;
};

struct ScoredChunk {
    ChunkId chunk_id;
    std::size_t ordinal{0};
    double cosine_component{0.0};
    double keyword_component{0.0};
    double hybrid_score{0.0};
};

struct QueryFeatures {
    EmbeddingVector embedding;
    std::vector<std::string> terms;  ///< sorted, unique
};

QueryFeatures make_query(const Embedder& embedder, std::string_view query);

namespace kernels {

/// (1 + cos) / 2, or 0.5 when either side is the zero vector.
double cosine_component(const EmbeddingVector& query, const EmbeddingVector& chunk) noexcept;

/// Fraction of query terms present in the chunk; 0 for a term-less query.
double keyword_component(std::span<const std::string> query_terms,
                         std::span<const std::string> chunk_terms) noexcept;

ScoredChunk score_record(const VectorRecord& record, const QueryFeatures& query, double alpha) noexcept;

/// Reference implementation: one record at a time in index order.
std::vector<ScoredChunk> score_serial(std::span<const VectorRecord> records, const QueryFeatures& query,
                                      double alpha);

/// OpenMP-parallel over records; output is element-for-element identical to
/// score_serial.
std::vector<ScoredChunk> score_parallel(std::span<const VectorRecord> records, const QueryFeatures& query,
                                        double alpha);

/// Hybrid score descending, chunk ordinal ascending on ties.
void rank(std::vector<ScoredChunk>& scored);

} // namespace kernels

// --- store ------------------------------------------------------------------

using RecordSet = std::vector<VectorRecord>;

/// Embeds and term-sets each chunk. Throws unit_not_chunked when empty.
RecordSet build_records(const Embedder& embedder, UnitId unit, const std::vector<ingestion::Chunk>& chunks);

/// Per-unit record sets behind shared pointers. Re-indexing builds the new set
/// off-lock and swaps it in, so a concurrent reader sees either the old or
/// the new set in full.
class VectorStore {
public:
    explicit VectorStore(std::shared_ptr<const Embedder> embedder = std::make_shared<HashingEmbedder>());

    /// Embeds every chunk and replaces the unit's records. Throws
    /// unit_not_chunked for an empty chunk list.
    std::size_t index_unit(UnitId unit, const std::vector<ingestion::Chunk>& chunks);

    /// Installs records loaded from persistence verbatim.
    void restore(UnitId unit, RecordSet records);

    void remove_unit(UnitId unit);
    bool is_indexed(UnitId unit) const;
    std::shared_ptr<const RecordSet> records(UnitId unit) const;
    std::vector<UnitId> units() const;

    /// Top min(k, records) chunks of the unit by hybrid score
    /// alpha*cosine + (1-alpha)*keyword. Throws unit_not_indexed,
    /// empty_query or invalid_params.
    std::vector<ScoredChunk> retrieve(UnitId unit, std::string_view query, std::size_t k = kDefaultTopK,
                                      double alpha = kDefaultAlpha) const;

    const Embedder& embedder() const noexcept { return *embedder_; }

private:
    std::shared_ptr<const Embedder> embedder_;
    mutable std::shared_mutex mutex_;
    std::map<UnitId, std::shared_ptr<const RecordSet>> units_;
};

/// Scores and ranks one record set; the work behind VectorStore::retrieve.
std::vector<ScoredChunk> retrieve_from(const Embedder& embedder, const RecordSet& records, std::string_view query,
                                       std::size_t k = kDefaultTopK, double alpha = kDefaultAlpha);

struct ChatAnswer {
    std::string answer_text;
    std::vector<ChunkId> used_chunk_ids;
    std::string question;
};

/// retrieve -> chat prompt over the top chunks in score order -> completion.
ChatAnswer chat(const VectorStore& store, llm::Gateway& gateway, UnitId unit, std::string_view question,
                std::size_t k = kDefaultTopK);

// --- serialization ----------------------------------------------------------

/// Raw IEEE-754 little-endian doubles, 8 bytes per component.
std::string encode_embedding(const EmbeddingVector& v);
EmbeddingVector decode_embedding(std::string_view bytes);

std::string encode_terms(const std::vector<std::string>& terms);
std::vector<std::string> decode_terms(std::string_view text);

} // namespace icls::scribe
