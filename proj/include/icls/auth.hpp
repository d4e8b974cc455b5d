#pragma once

#include <string>
#include <string_view>

namespace icls::auth {

enum class HashStrength { interactive, minimal };

/// Salted Argon2id digest in the libsodium string format.
std::string hash_password(std::string_view password, HashStrength strength = HashStrength::interactive);
bool verify_password(std::string_view digest, std::string_view password);

/// 256 random bits, hex encoded.
std::string new_token();

/// Keyed-free BLAKE2b digest of a token, hex encoded; sessions are stored
/// under this so a database leak does not expose live tokens.
std::string token_digest(std::string_view token);

/// Constant-time comparison.
bool equal_secret(std::string_view a, std::string_view b);

} // namespace icls::auth
