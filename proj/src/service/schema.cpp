#include "schema.hpp"

namespace icls::service {

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta (
    key   TEXT PRIMARY KEY,
    value TEXT NOT NULL
);

CREATE TABLE IF NOT EXISTS countries (
    id   INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL UNIQUE CHECK (length(trim(name)) > 0)
);

CREATE TABLE IF NOT EXISTS categories (
    id         INTEGER PRIMARY KEY AUTOINCREMENT,
    country_id INTEGER NOT NULL REFERENCES countries(id) ON DELETE CASCADE,
    name       TEXT NOT NULL CHECK (name IN ('Art','Music','Cinema','Literature','Festivals','Fashion',
                                             'Cuisine','Beverage','Customs','Dance','Travel')),
    UNIQUE (country_id, name)
);

CREATE TABLE IF NOT EXISTS lessons (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    category_id INTEGER NOT NULL REFERENCES categories(id) ON DELETE CASCADE,
    title       TEXT NOT NULL CHECK (length(trim(title)) > 0),
    UNIQUE (category_id, title)
);

CREATE TABLE IF NOT EXISTS units (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    lesson_id   INTEGER NOT NULL REFERENCES lessons(id) ON DELETE CASCADE,
    kind        TEXT NOT NULL CHECK (kind IN ('document','video_transcript')),
    source_name TEXT NOT NULL,
    raw_text    TEXT NOT NULL CHECK (length(raw_text) > 0),
    instruction TEXT NOT NULL DEFAULT '',
    status      TEXT NOT NULL CHECK (status IN ('draft','published')),
    indexed     INTEGER NOT NULL CHECK (indexed IN (0,1)),
    errors      TEXT NOT NULL DEFAULT '[]',
    created_at  INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS summaries (
    id           INTEGER PRIMARY KEY AUTOINCREMENT,
    unit_id      INTEGER NOT NULL UNIQUE REFERENCES units(id) ON DELETE CASCADE,
    text         TEXT NOT NULL,
    word_count   INTEGER NOT NULL CHECK (word_count >= 200),
    strategy     TEXT NOT NULL CHECK (strategy IN ('single_pass','map_reduce')),
    generated_at INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS quizzes (
    id         INTEGER PRIMARY KEY AUTOINCREMENT,
    unit_id    INTEGER NOT NULL UNIQUE REFERENCES units(id) ON DELETE CASCADE,
    created_at INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS questions (
    quiz_id      INTEGER NOT NULL REFERENCES quizzes(id) ON DELETE CASCADE,
    ordinal      INTEGER NOT NULL CHECK (ordinal >= 0),
    stem         TEXT NOT NULL CHECK (length(stem) > 0),
    option1      TEXT NOT NULL CHECK (length(option1) > 0),
    option2      TEXT NOT NULL CHECK (length(option2) > 0),
    option3      TEXT NOT NULL CHECK (length(option3) > 0),
    option4      TEXT NOT NULL CHECK (length(option4) > 0),
    answer_index INTEGER NOT NULL CHECK (answer_index BETWEEN 1 AND 4),
    PRIMARY KEY (quiz_id, ordinal)
);

CREATE TABLE IF NOT EXISTS quiz_rejects (
    quiz_id    INTEGER NOT NULL REFERENCES quizzes(id) ON DELETE CASCADE,
    ordinal    INTEGER NOT NULL,
    block_text TEXT NOT NULL,
    reason     TEXT NOT NULL,
    PRIMARY KEY (quiz_id, ordinal)
);

CREATE TABLE IF NOT EXISTS vector_records (
    chunk_id  INTEGER PRIMARY KEY AUTOINCREMENT,
    unit_id   INTEGER NOT NULL REFERENCES units(id) ON DELETE CASCADE,
    ordinal   INTEGER NOT NULL CHECK (ordinal >= 0),
    text      TEXT NOT NULL,
    embedding BLOB NOT NULL,
    terms     TEXT NOT NULL,
    UNIQUE (unit_id, ordinal)
);

CREATE TABLE IF NOT EXISTS learners (
    id                    INTEGER PRIMARY KEY AUTOINCREMENT,
    name                  TEXT NOT NULL CHECK (length(trim(name)) > 0),
    email                 TEXT NOT NULL UNIQUE CHECK (email = lower(email)),
    password_digest       TEXT NOT NULL,
    immersion_country     INTEGER NOT NULL REFERENCES countries(id) ON DELETE RESTRICT,
    learning_motivation   TEXT NOT NULL,
    self_rated_knowledge  INTEGER NOT NULL CHECK (self_rated_knowledge BETWEEN 1 AND 5),
    daily_goal_minutes    INTEGER NOT NULL CHECK (daily_goal_minutes > 0),
    notifications_opt_in  INTEGER NOT NULL CHECK (notifications_opt_in IN (0,1)),
    org_id                TEXT,
    created_at            INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS enrollments (
    learner_id  INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    country_id  INTEGER NOT NULL REFERENCES countries(id) ON DELETE RESTRICT,
    enrolled_at INTEGER NOT NULL,
    PRIMARY KEY (learner_id, country_id)
);

CREATE TABLE IF NOT EXISTS unit_progress (
    learner_id INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    unit_id    INTEGER NOT NULL REFERENCES units(id) ON DELETE RESTRICT,
    state      INTEGER NOT NULL CHECK (state BETWEEN 1 AND 3),
    updated_at INTEGER NOT NULL,
    PRIMARY KEY (learner_id, unit_id)
);

CREATE TABLE IF NOT EXISTS xp_ledger (
    id         INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    unit_id    INTEGER NOT NULL,
    tier       INTEGER NOT NULL CHECK (tier IN (5,7,12)),
    amount     INTEGER NOT NULL CHECK (amount > 0),
    at         INTEGER NOT NULL,
    UNIQUE (learner_id, unit_id, tier)
);

CREATE TABLE IF NOT EXISTS coin_ledger (
    id            INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id    INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    amount        INTEGER NOT NULL CHECK (amount > 0),
    reason        TEXT NOT NULL CHECK (reason IN ('daily_challenge','quiz_correct')),
    correct_count INTEGER NOT NULL DEFAULT 0 CHECK (correct_count >= 0),
    at            INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS learner_totals (
    learner_id INTEGER PRIMARY KEY REFERENCES learners(id) ON DELETE CASCADE,
    xp_total   INTEGER NOT NULL CHECK (xp_total >= 0),
    coin_total INTEGER NOT NULL CHECK (coin_total >= 0)
);

CREATE TABLE IF NOT EXISTS badges (
    learner_id INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    kind       TEXT NOT NULL CHECK (kind IN ('country','category')),
    subject_id INTEGER NOT NULL,
    awarded_at INTEGER NOT NULL,
    seq        INTEGER NOT NULL,
    PRIMARY KEY (learner_id, kind, subject_id)
);

CREATE TABLE IF NOT EXISTS streaks (
    learner_id       INTEGER PRIMARY KEY REFERENCES learners(id) ON DELETE CASCADE,
    current_length   INTEGER NOT NULL CHECK (current_length >= 0),
    last_active_date TEXT
);

CREATE TABLE IF NOT EXISTS daily_challenges (
    learner_id INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    day        TEXT NOT NULL,
    completed  INTEGER NOT NULL CHECK (completed IN (0,1)),
    claimed    INTEGER NOT NULL CHECK (claimed IN (0,1)),
    CHECK (claimed <= completed),
    PRIMARY KEY (learner_id, day)
);

CREATE TABLE IF NOT EXISTS engagement_events (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id  INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    country_id  INTEGER NOT NULL REFERENCES countries(id) ON DELETE RESTRICT,
    category_id INTEGER,
    kind        TEXT NOT NULL CHECK (kind IN ('time_spent','quiz_attempt','quiz_result')),
    seconds     INTEGER,
    score       REAL,
    at          INTEGER NOT NULL,
    CHECK (kind <> 'time_spent' OR seconds > 0),
    CHECK (kind <> 'quiz_result' OR (score >= 0 AND score <= 1))
);

CREATE TABLE IF NOT EXISTS quiz_submissions (
    id            INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id    INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    quiz_id       INTEGER NOT NULL REFERENCES quizzes(id) ON DELETE RESTRICT,
    answers       TEXT NOT NULL,
    correct_count INTEGER NOT NULL,
    total         INTEGER NOT NULL,
    score         REAL NOT NULL CHECK (score >= 0 AND score <= 1),
    submitted_at  INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS practice_answers (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id  INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    unit_id     INTEGER NOT NULL REFERENCES units(id) ON DELETE RESTRICT,
    ordinal     INTEGER NOT NULL,
    correct     INTEGER NOT NULL CHECK (correct IN (0,1)),
    answered_at INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS sessions (
    token_digest TEXT PRIMARY KEY,
    learner_id   INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    expires_at   INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS friend_requests (
    id           INTEGER PRIMARY KEY AUTOINCREMENT,
    from_learner INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    to_learner   INTEGER NOT NULL REFERENCES learners(id) ON DELETE CASCADE,
    state        TEXT NOT NULL CHECK (state IN ('pending','accepted','declined')),
    created_at   INTEGER NOT NULL,
    CHECK (from_learner <> to_learner)
);

CREATE UNIQUE INDEX IF NOT EXISTS friend_pair_open
    ON friend_requests (min(from_learner, to_learner), max(from_learner, to_learner))
    WHERE state <> 'declined';

CREATE TABLE IF NOT EXISTS stories (
    id         INTEGER PRIMARY KEY AUTOINCREMENT,
    country_id INTEGER NOT NULL REFERENCES countries(id) ON DELETE CASCADE,
    title      TEXT NOT NULL CHECK (length(trim(title)) > 0),
    url        TEXT NOT NULL CHECK (length(url) > 0)
);
)sql";

} // namespace

void apply_schema(sql::Database& db) {
    db.exec(kSchema);
    auto st = db.prepare("INSERT OR IGNORE INTO meta(key, value) VALUES ('schema_version', ?1)");
    st.bind(1, std::to_string(kSchemaVersion)).run();
}

} // namespace icls::service
