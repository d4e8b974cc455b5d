#pragma once

#include "icls/error.hpp"
#include "icls/ids.hpp"
#include "icls/llm.hpp"
#include "icls/time.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace icls::treasury {

inline constexpr std::size_t kMinSummaryWords = 200;
inline constexpr std::string_view kLengthReminder = "The summary should be at least 200 words long";

enum class Strategy { single_pass, map_reduce };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

struct Summary {
    SummaryId summary_id;
    UnitId unit_id;
    std::string text;
    std::size_t word_count{0};
    Strategy strategy{Strategy::single_pass};
    Timestamp generated_at;

    bool operator==(const Summary&) const = default;
};

/// Whitespace-delimited token count.
std::size_t word_count(std::string_view text) noexcept;

struct Validation {
    bool accepted{false};
    std::string reason;  ///< "empty" or "too-short" when rejected
};

Validation validate_summary(std::string_view text);

/// Raised when both the first generation and the length-reminder retry come
/// back under the word minimum. Carries the longest candidate seen.
class SummaryTooShort : public Error {
public:
    SummaryTooShort(std::string longest, std::size_t words)
        : Error(Errc::generation_too_short,
                "summary has " + std::to_string(words) + " words, need " + std::to_string(kMinSummaryWords)),
          longest_(std::move(longest)) {}

    const std::string& longest_candidate() const noexcept { return longest_; }

private:
    std::string longest_;
};

/// True iff the single-pass summary prompt does not fit the gateway's window.
bool needs_map_reduce(const llm::Gateway& gateway, std::string_view raw_text, std::string_view instruction);

/// Single pass when the prompt fits, otherwise summarize window-sized chunks
/// and then summarize the joined partial summaries with the same template
/// (repeating until the joined text fits). The final step is validated and
/// retried once with the length reminder appended to the instruction.
/// summary_id and generated_at are left for the caller.
Summary generate_summary(llm::Gateway& gateway, UnitId unit, std::string_view raw_text,
                         std::string_view admin_instruction);

} // namespace icls::treasury
