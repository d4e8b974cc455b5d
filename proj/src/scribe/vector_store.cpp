#include "icls/error.hpp"
#include "icls/scribe.hpp"

#include <algorithm>
#include <mutex>

namespace icls::scribe {

VectorStore::VectorStore(std::shared_ptr<const Embedder> embedder) : embedder_(std::move(embedder)) {}

RecordSet build_records(const Embedder& embedder, UnitId unit, const std::vector<ingestion::Chunk>& chunks) {
    if (chunks.empty()) throw Error(Errc::unit_not_chunked, "unit has no chunks to index");
    RecordSet records;
    records.reserve(chunks.size());
    for (const auto& c : chunks) {
        VectorRecord r;
        r.chunk_id = c.chunk_id;
        r.unit_id = unit;
        r.ordinal = c.ordinal;
        r.text = c.text;
        r.embedding = embedder.embed(c.text);
        r.term_set = term_set(c.text);
        records.push_back(std::move(r));
    }
    return records;
}

std::size_t VectorStore::index_unit(UnitId unit, const std::vector<ingestion::Chunk>& chunks) {
    auto records = std::make_shared<const RecordSet>(build_records(*embedder_, unit, chunks));
    const auto count = records->size();
    std::unique_lock lock(mutex_);
    units_[unit] = std::move(records);
    return count;
}

void VectorStore::restore(UnitId unit, RecordSet records) {
    auto ptr = std::make_shared<const RecordSet>(std::move(records));
    std::unique_lock lock(mutex_);
    units_[unit] = std::move(ptr);
}

void VectorStore::remove_unit(UnitId unit) {
    std::unique_lock lock(mutex_);
    units_.erase(unit);
}

bool VectorStore::is_indexed(UnitId unit) const {
    std::shared_lock lock(mutex_);
    return units_.count(unit) != 0;
}

std::shared_ptr<const RecordSet> VectorStore::records(UnitId unit) const {
    std::shared_lock lock(mutex_);
    auto it = units_.find(unit);
    return it == units_.end() ? nullptr : it->second;
}

std::vector<UnitId> VectorStore::units() const {
    std::shared_lock lock(mutex_);
    std::vector<UnitId> out;
    out.reserve(units_.size());
    for (const auto& [id, _] : units_) out.push_back(id);
    return out;
}

std::vector<ScoredChunk> retrieve_from(const Embedder& embedder, const RecordSet& records, std::string_view query,
                                       std::size_t k, double alpha) {
    if (query.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error(Errc::empty_query, "query must not be empty");
    if (k == 0) throw Error(Errc::invalid_params, "k must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::invalid_params, "alpha must be in [0,1]");
    auto features = make_query(embedder, query);
    auto scored = kernels::score_parallel(records, features, alpha);
    kernels::rank(scored);
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<ScoredChunk> VectorStore::retrieve(UnitId unit, std::string_view query, std::size_t k,
                                               double alpha) const {
    auto records = this->records(unit);
    if (!records) {
        if (query.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw Error(Errc::empty_query, "query must not be empty");
        throw Error(Errc::unit_not_indexed, "unit " + std::to_string(unit.value) + " is not indexed");
    }
    return retrieve_from(*embedder_, *records, query, k, alpha);
}

ChatAnswer chat(const VectorStore& store, llm::Gateway& gateway, UnitId unit, std::string_view question,
                std::size_t k) {
    auto records = store.records(unit);
    if (!records) throw Error(Errc::unit_not_indexed, "unit " + std::to_string(unit.value) + " is not indexed");
    auto top = retrieve_from(store.embedder(), *records, question, k, kDefaultAlpha);

    std::vector<std::string> context;
    ChatAnswer answer;
    answer.question = std::string(question);
    for (const auto& s : top) {
        auto it = std::find_if(records->begin(), records->end(),
                               [&](const VectorRecord& r) { return r.ordinal == s.ordinal; });
        context.push_back(it->text);
        answer.used_chunk_ids.push_back(s.chunk_id);
    }
    auto prompt = llm::render_chat_prompt(context, question);
    answer.answer_text = gateway.complete(gateway.make_request(std::move(prompt), llm::PromptKind::chat)).text;
    return answer;
}

} // namespace icls::scribe
