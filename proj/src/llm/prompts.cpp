#include "icls/error.hpp"
#include "icls/ingestion.hpp"
#include "icls/llm.hpp"

namespace icls::llm {

namespace {

// Template wording is kept exactly as deployed, irregular spacing and
// asterisks included; the quiz parser is written against model output for
// this exact wording.
constexpr std::string_view kSummaryHead =
    "Instruction: You are a summary generator, your job is to generate a summary of the given data.\n"
    "You have to follow the instructions given on how to generate the summary.\n"
    "If no instruction is given,then just generate the summary.\n"
    "Data: ";
constexpr std::string_view kSummaryMid = " User Instruction: ";
constexpr std::string_view kSummaryTail =
    "\n"
    "Instruction: The summary should be at least 200 words long\n"
    "Summary:";

constexpr std::string_view kQuizHead = "Generate a quiz based on the following information: Data: ";
constexpr std::string_view kQuizTail =
    "\n"
    "Instructions :\n"
    "1. Generate a quiz based on the given information.\n"
    "2. The quiz should be at least 10 questions long.\n"
    "3. The quiz should be in the form of a list of questions and options.\n"
    "Format of the quiz:\n"
    "Each question should be start with *Question :**\n"
    "Option should be start with *Option :**\n"
    "Each answer should be like *Answer :** and only give the option number for the answer\n"
    "Options: 1, 2, 3, 4\n"
    "Answer: Answer";

constexpr std::string_view kChatHead =
    "Role: You are a Question Answer solver. Here is the information:\n"
    "Data: ";
constexpr std::string_view kChatMid =
    "\n"
    "Using this information, answer the following question:\n"
    "Question: ";
constexpr std::string_view kChatTail =
    "\n"
    "Instruction: Answer the question using information provided in data.\n"
    "Answer::";

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

} // namespace

std::string_view to_string(PromptKind kind) noexcept {
    switch (kind) {
    case PromptKind::summary: return "summary";
    case PromptKind::quiz: return "quiz";
    case PromptKind::chat: return "chat";
    }
    return "chat";
}

double default_temperature(PromptKind kind) noexcept { return kind == PromptKind::summary ? 0.7 : 0.2; }

std::string render_summary_prompt(std::string_view combined_text, std::string_view user_instruction) {
    if (combined_text.empty()) throw Error(Errc::empty_data, "summary prompt needs data");
    std::string out;
    out.reserve(kSummaryHead.size() + combined_text.size() + kSummaryMid.size() + user_instruction.size() +
                kSummaryTail.size());
    out.append(kSummaryHead).append(combined_text).append(kSummaryMid).append(user_instruction).append(kSummaryTail);
    return out;
}

std::string render_quiz_prompt(std::string_view combined_text) {
    if (combined_text.empty()) throw Error(Errc::empty_data, "quiz prompt needs data");
    std::string out;
    out.reserve(kQuizHead.size() + combined_text.size() + kQuizTail.size());
    out.append(kQuizHead).append(combined_text).append(kQuizTail);
    return out;
}

std::string render_chat_prompt(const std::vector<std::string>& context_chunks, std::string_view user_question) {
    if (context_chunks.empty()) throw Error(Errc::no_context, "chat prompt needs at least one chunk");
    if (blank(user_question)) throw Error(Errc::empty_question, "chat prompt needs a question");
    std::string out{kChatHead};
    for (std::size_t i = 0; i < context_chunks.size(); ++i) {
        if (i > 0) out.append("\n\n");
        out.append(context_chunks[i]);
    }
    out.append(kChatMid).append(user_question).append(kChatTail);
    return out;
}

std::int64_t template_overhead_tokens(PromptKind kind) {
    switch (kind) {
    case PromptKind::summary:
        return ingestion::estimate_tokens(kSummaryHead) + ingestion::estimate_tokens(kSummaryMid) +
               ingestion::estimate_tokens(kSummaryTail);
    case PromptKind::quiz:
        return ingestion::estimate_tokens(kQuizHead) + ingestion::estimate_tokens(kQuizTail);
    case PromptKind::chat:
        return ingestion::estimate_tokens(kChatHead) + ingestion::estimate_tokens(kChatMid) +
               ingestion::estimate_tokens(kChatTail);
    }
    return 0;
}

} // namespace icls::llm
