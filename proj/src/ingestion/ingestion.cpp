#include "icls/ingestion.hpp"

#include "icls/error.hpp"

#include <algorithm>

namespace icls::ingestion {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

/// Byte offset of every code point, plus a trailing entry equal to size().
std::vector<std::size_t> code_point_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    offsets.reserve(text.size() + 1);
    for (std::size_t i = 0; i < text.size(); ++i)
        if (!is_continuation(static_cast<unsigned char>(text[i]))) offsets.push_back(i);
    offsets.push_back(text.size());
    return offsets;
}

bool is_space_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

} // namespace

std::int64_t CharHeuristicEstimator::estimate(std::string_view text) const {
    return ceil_div(static_cast<std::int64_t>(code_point_count(text)), 4);
}

const TokenEstimator& default_estimator() {
    static const CharHeuristicEstimator estimator;
    return estimator;
}

std::int64_t estimate_tokens(std::string_view text) { return default_estimator().estimate(text); }

std::size_t code_point_count(std::string_view text) noexcept {
    return static_cast<std::size_t>(std::count_if(
        text.begin(), text.end(), [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

bool is_valid_utf8(std::string_view s) noexcept {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if (!is_continuation(cc)) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates and out-of-range values
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += len;
    }
    return true;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto c = static_cast<unsigned char>(text[i]);
        if (is_space_char(static_cast<char>(c))) {
            pending_space = true;
            continue;
        }
        if (c < 0x20 || c == 0x7F) continue;
        // C1 controls U+0080..U+009F are encoded as C2 80..C2 9F
        if (c == 0xC2 && i + 1 < text.size()) {
            auto n = static_cast<unsigned char>(text[i + 1]);
            if (n >= 0x80 && n <= 0x9F) {
                ++i;
                continue;
            }
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

std::string_view strip_timestamp(std::string_view line) noexcept {
    std::size_t i = 0;
    while (i < line.size() && is_space_char(line[i])) ++i;
    bool bracketed = i < line.size() && line[i] == '[';
    if (bracketed) ++i;
    // one to three colon-separated digit groups: MM:SS or H:MM:SS
    std::size_t groups = 0;
    std::size_t j = i;
    while (true) {
        std::size_t start = j;
        while (j < line.size() && is_digit(line[j])) ++j;
        if (j == start || j - start > 2) return line;
        ++groups;
        if (j < line.size() && line[j] == ':' && groups < 3) {
            ++j;
            continue;
        }
        break;
    }
    if (groups < 2) return line;
    // optional fractional seconds
    if (j < line.size() && line[j] == '.') {
        std::size_t k = j + 1;
        while (k < line.size() && is_digit(line[k])) ++k;
        if (k > j + 1) j = k;
    }
    if (bracketed) {
        if (j >= line.size() || line[j] != ']') return line;
        ++j;
    }
    if (j < line.size() && !is_space_char(line[j])) return line;
    return line.substr(j);
}

DocumentText extract_text(const Source& source, UnitId unit_id) {
    std::string raw;
    if (const auto* plain = std::get_if<PlainText>(&source)) {
        if (!is_valid_utf8(plain->bytes)) throw Error(Errc::undecodable_bytes, "source is not valid UTF-8");
        raw = plain->bytes;
    } else if (const auto* transcript = std::get_if<TranscriptLines>(&source)) {
        for (const auto& line : transcript->lines) {
            if (!is_valid_utf8(line)) throw Error(Errc::undecodable_bytes, "transcript line is not valid UTF-8");
            raw.append(strip_timestamp(line));
            raw.push_back('\n');
        }
    } else {
        const auto& adapted = std::get<PdfTextAdapterOutput>(source);
        if (!is_valid_utf8(adapted.text)) throw Error(Errc::undecodable_bytes, "adapter output is not valid UTF-8");
        raw = adapted.text;
    }
    DocumentText doc{unit_id, normalize_text(raw), 0};
    if (doc.text.empty()) throw Error(Errc::empty_source, "source contains no text");
    doc.token_estimate = estimate_tokens(doc.text);
    return doc;
}

std::size_t expected_chunk_count(std::size_t code_points, ChunkParams params) {
    auto window = static_cast<std::size_t>(params.chunk_size) * 4;
    auto overlap = static_cast<std::size_t>(params.overlap) * 4;
    if (code_points <= window) return 1;
    auto stride = window - overlap;
    return (code_points - overlap + stride - 1) / stride;
}

std::vector<Chunk> chunk(const DocumentText& doc, ChunkParams params) {
    if (params.chunk_size <= 0 || params.overlap < 0 || params.overlap >= params.chunk_size)
        throw Error(Errc::invalid_params, "require 0 <= overlap < chunk_size");

    const std::string& text = doc.text;
    auto offsets = code_point_offsets(text);
    const std::size_t n = offsets.size() - 1;
    const auto window = static_cast<std::size_t>(params.chunk_size) * 4;
    const auto overlap = static_cast<std::size_t>(params.overlap) * 4;
    const auto stride = window - overlap;
    const std::size_t count = expected_chunk_count(n, params);

    auto char_at = [&](std::size_t cp) { return text[offsets[cp]]; };

    // Chunk i spans code points [begin_i, end_i). Grid position g_i = i*stride.
    // end_i is pulled back to a space within [max(g_{i+1}, end_{i-1}+1, begin_i+1), g_i+window];
    // begin_{i+1} is pushed forward to a word start within [max(g_{i+1}, begin_i+1), end_i].
    std::vector<Chunk> chunks;
    chunks.reserve(count);
    std::size_t begin = 0;
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t grid_end = i * stride + window;
        std::size_t end;
        if (i + 1 == count) {
            end = n;
        } else {
            std::size_t next_grid = (i + 1) * stride;
            std::size_t lo = std::max({next_grid, (i == 0 ? 0 : prev_end + 1), begin + 1});
            end = grid_end;
            for (std::size_t p = grid_end; p >= lo; --p) {
                if (char_at(p) == ' ') {
                    end = p;
                    break;
                }
            }
        }
        Chunk c;
        c.unit_id = doc.unit_id;
        c.ordinal = i;
        c.text = text.substr(offsets[begin], offsets[end] - offsets[begin]);
        c.token_estimate = estimate_tokens(c.text);
        c.leading_overlap = i == 0 ? 0 : prev_end - begin;
        chunks.push_back(std::move(c));

        if (i + 1 < count) {
            std::size_t next_grid = (i + 1) * stride;
            std::size_t lo = std::max(next_grid, begin + 1);
            std::size_t next_begin = lo;
            for (std::size_t p = lo; p < end; ++p) {
                if (char_at(p - 1) == ' ') {
                    next_begin = p;
                    break;
                }
            }
            begin = next_begin;
        }
        prev_end = end;
    }
    return chunks;
}

std::string stitch(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        auto offsets = code_point_offsets(c.text);
        auto skip = std::min(c.leading_overlap, offsets.size() - 1);
        out.append(c.text, offsets[skip], std::string::npos);
    }
    return out;
}

} // namespace icls::ingestion
