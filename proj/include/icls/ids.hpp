#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace icls {

/// Opaque integer identifier tagged by the entity it names, so a LessonId can
/// never be passed where a UnitId is expected.
template <typename Tag>
struct Id {
    std::int64_t value{0};

    constexpr Id() = default;
    constexpr explicit Id(std::int64_t v) : value(v) {}

    constexpr bool valid() const { return value > 0; }
    constexpr auto operator<=>(const Id&) const = default;
};

template <typename Tag>
std::ostream& operator<<(std::ostream& os, Id<Tag> id) {
    return os << id.value;
}

using LearnerId = Id<struct LearnerTag>;
using CountryId = Id<struct CountryTag>;
using CategoryId = Id<struct CategoryTag>;
using LessonId = Id<struct LessonTag>;
using UnitId = Id<struct UnitTag>;
using SummaryId = Id<struct SummaryTag>;
using QuizId = Id<struct QuizTag>;
using ChunkId = Id<struct ChunkTag>;
using FriendRequestId = Id<struct FriendRequestTag>;
using StoryId = Id<struct StoryTag>;

} // namespace icls

template <typename Tag>
struct std::hash<icls::Id<Tag>> {
    std::size_t operator()(icls::Id<Tag> id) const noexcept {
        return std::hash<std::int64_t>{}(id.value);
    }
};
