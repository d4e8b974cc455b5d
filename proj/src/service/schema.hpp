#pragma once

#include "icls/sqlite.hpp"

namespace icls::service {

inline constexpr int kSchemaVersion = 1;

/// Creates every table and index when absent.
void apply_schema(sql::Database& db);

} // namespace icls::service
