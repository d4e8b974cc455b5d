#include "icls/domain.hpp"
#include "icls/error.hpp"

#include <gtest/gtest.h>

using namespace icls;
using namespace icls::domain;

namespace {

ProfileFields valid_fields() {
    ProfileFields f;
    f.name = "A";
    f.email = "a@x.io";
    f.password = "correct horse";
    f.immersion_country = CountryId{1};
    f.self_rated_knowledge = 3;
    f.daily_goal_minutes = 15;
    return f;
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an icls::Error";
    return Errc::validation;
}

} // namespace

TEST(CategoryCatalog, HasElevenFixedNames) {
    EXPECT_EQ(kCategoryCatalog.size(), 11u);
    for (auto name : kCategoryCatalog) EXPECT_TRUE(is_catalog_category(name));
    EXPECT_FALSE(is_catalog_category("History"));
    EXPECT_FALSE(is_catalog_category("art"));
}

TEST(ProfileValidation, AcceptsValidFields) { EXPECT_NO_THROW(validate_profile_fields(valid_fields())); }

TEST(ProfileValidation, RatingOutOfRangeIsInvalidField) {
    auto f = valid_fields();
    f.self_rated_knowledge = 6;
    EXPECT_EQ(code_of([&] { validate_profile_fields(f); }), Errc::invalid_field);
    f.self_rated_knowledge = 0;
    EXPECT_EQ(code_of([&] { validate_profile_fields(f); }), Errc::invalid_field);
}

TEST(ProfileValidation, EmptyNameAndBadGoalRejected) {
    auto f = valid_fields();
    f.name = "   ";
    EXPECT_EQ(code_of([&] { validate_profile_fields(f); }), Errc::invalid_field);
    f = valid_fields();
    f.daily_goal_minutes = 0;
    EXPECT_EQ(code_of([&] { validate_profile_fields(f); }), Errc::invalid_field);
    f = valid_fields();
    f.email = "no-at-sign";
    EXPECT_EQ(code_of([&] { validate_profile_fields(f); }), Errc::invalid_field);
}

TEST(ProfileValidation, EmailIsTrimmedAndLowercased) { EXPECT_EQ(normalize_email("  A@X.Io "), "a@x.io"); }

TEST(ProgressLadder, OneRungAtATime) {
    EXPECT_NO_THROW(check_advance(ProgressState::not_started, ProgressState::watched));
    EXPECT_NO_THROW(check_advance(ProgressState::watched, ProgressState::summary_tested));
    EXPECT_NO_THROW(check_advance(ProgressState::summary_tested, ProgressState::practice_tested));
}

TEST(ProgressLadder, SkippingIsRejected) {
    EXPECT_EQ(code_of([] { check_advance(ProgressState::not_started, ProgressState::summary_tested); }),
              Errc::skipped_rung);
    EXPECT_EQ(code_of([] { check_advance(ProgressState::watched, ProgressState::practice_tested); }),
              Errc::skipped_rung);
}

TEST(ProgressLadder, RepeatOrRegressionIsRejected) {
    EXPECT_EQ(code_of([] { check_advance(ProgressState::watched, ProgressState::watched); }),
              Errc::regression_attempt);
    EXPECT_EQ(code_of([] { check_advance(ProgressState::practice_tested, ProgressState::watched); }),
              Errc::regression_attempt);
}

TEST(ProgressLadder, StateNamesRoundTrip) {
    for (auto s : {ProgressState::not_started, ProgressState::watched, ProgressState::summary_tested,
                   ProgressState::practice_tested})
        EXPECT_EQ(parse_progress_state(to_string(s)), s);
    EXPECT_FALSE(parse_progress_state("done"));
}

TEST(Enrollment, UnknownUnitsAreNotStarted) {
    Enrollment e;
    e.unit_progress[UnitId{1}] = ProgressState::watched;
    EXPECT_EQ(e.state_of(UnitId{1}), ProgressState::watched);
    EXPECT_EQ(e.state_of(UnitId{2}), ProgressState::not_started);
}

TEST(Rfc3339, FormatsAndParsesUtc) {
    auto t = parse_rfc3339("2024-07-01T12:30:05Z");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_rfc3339(*t), "2024-07-01T12:30:05Z");
    auto ms = parse_rfc3339("2024-07-01T00:00:00.250Z");
    ASSERT_TRUE(ms);
    EXPECT_EQ(format_rfc3339(*ms), "2024-07-01T00:00:00.250Z");
    EXPECT_FALSE(parse_rfc3339("2024-07-01 12:30:05"));
    EXPECT_FALSE(parse_rfc3339("2024-13-01T00:00:00Z"));
    EXPECT_EQ(format_date(utc_date(*t)), "2024-07-01");
}
