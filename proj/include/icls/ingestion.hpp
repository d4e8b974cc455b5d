#pragma once

#include "icls/ids.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace icls::ingestion {

/// Raw bytes of a text/plain upload; must decode as UTF-8.
struct PlainText {
    std::string bytes;
};

/// Line-oriented transcript, one "MM:SS text" record per line.
struct TranscriptLines {
    std::vector<std::string> lines;
};

/// Text already pulled out of a PDF/.doc by an external adapter.
struct PdfTextAdapterOutput {
    std::string text;
};

using Source = std::variant<PlainText, TranscriptLines, PdfTextAdapterOutput>;

/// Swappable token estimator. The default counts Unicode code points and
/// divides by four, rounding up.
class TokenEstimator {
public:
    virtual ~TokenEstimator() = default;
    virtual std::int64_t estimate(std::string_view text) const = 0;
};

class CharHeuristicEstimator final : public TokenEstimator {
public:
    std::int64_t estimate(std::string_view text) const override;
};

const TokenEstimator& default_estimator();

/// ceil(code_points / 4)
std::int64_t estimate_tokens(std::string_view text);

/// Number of UTF-8 code points; the input is assumed valid.
std::size_t code_point_count(std::string_view text) noexcept;

bool is_valid_utf8(std::string_view bytes) noexcept;

/// Collapses whitespace runs to one space, drops control characters and trims.
std::string normalize_text(std::string_view text);

/// Removes a leading "MM:SS", "H:MM:SS" or "[MM:SS]" stamp from a transcript
/// line. Lines without a stamp are returned unchanged.
std::string_view strip_timestamp(std::string_view line) noexcept;

struct DocumentText {
    UnitId unit_id;
    std::string text;
    std::int64_t token_estimate{0};
};

/// Throws empty_source or undecodable_bytes.
DocumentText extract_text(const Source& source, UnitId unit_id);

struct Chunk {
    ChunkId chunk_id;
    UnitId unit_id;
    std::size_t ordinal{0};
    std::string text;
    std::int64_t token_estimate{0};
    /// Code points at the front of this chunk that repeat the tail of the
    /// previous chunk. Zero for the first chunk.
    std::size_t leading_overlap{0};

    bool operator==(const Chunk&) const = default;
};

struct ChunkParams {
    std::int64_t chunk_size{256};
    std::int64_t overlap{64};
};

/// Sliding token window over the document. Chunk i nominally starts at
/// i*(size-overlap) tokens; chunk ends are pulled back to a space and the next
/// chunk's start pushed forward to a word start, both only within the overlap
/// region, so the chunk count always equals
///   1                                   if tokens <= size
///   ceil((tokens-overlap)/(size-overlap)) otherwise
/// Chunk ids are left unset; the caller assigns them. Throws invalid_params.
std::vector<Chunk> chunk(const DocumentText& doc, ChunkParams params = {});

/// Expected chunk count for a text of `code_points` characters.
std::size_t expected_chunk_count(std::size_t code_points, ChunkParams params);

/// Reassembles the source by dropping each chunk's leading overlap.
std::string stitch(const std::vector<Chunk>& chunks);

/// True iff prompt_tokens + reply_reserve <= model_window.
constexpr bool fits_context(std::int64_t prompt_tokens, std::int64_t model_window,
                            std::int64_t reply_reserve = 1024) noexcept {
    return prompt_tokens + reply_reserve <= model_window;
}

} // namespace icls::ingestion
