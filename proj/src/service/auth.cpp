#include "icls/auth.hpp"

#include <sodium.h>

#include <array>
#include <stdexcept>

namespace icls::auth {

namespace {

void ensure_init() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialization failed");
}

std::string to_hex(const unsigned char* data, std::size_t n) {
    std::string out(n * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data, n);
    out.pop_back();
    return out;
}

} // namespace

std::string hash_password(std::string_view password, HashStrength strength) {
    ensure_init();
    char out[crypto_pwhash_STRBYTES];
    auto ops = strength == HashStrength::interactive ? crypto_pwhash_OPSLIMIT_INTERACTIVE : crypto_pwhash_OPSLIMIT_MIN;
    auto mem = strength == HashStrength::interactive ? crypto_pwhash_MEMLIMIT_INTERACTIVE : crypto_pwhash_MEMLIMIT_MIN;
    if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0)
        throw std::runtime_error("password hashing ran out of memory");
    return out;
}

bool verify_password(std::string_view digest, std::string_view password) {
    ensure_init();
    std::string d(digest);
    return crypto_pwhash_str_verify(d.c_str(), password.data(), password.size()) == 0;
}

std::string new_token() {
    ensure_init();
    std::array<unsigned char, 32> bytes{};
    randombytes_buf(bytes.data(), bytes.size());
    return to_hex(bytes.data(), bytes.size());
}

std::string token_digest(std::string_view token) {
    ensure_init();
    std::array<unsigned char, crypto_generichash_BYTES> out{};
    crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(token.data()), token.size(),
                       nullptr, 0);
    return to_hex(out.data(), out.size());
}

bool equal_secret(std::string_view a, std::string_view b) {
    ensure_init();
    if (a.size() != b.size()) return false;
    return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

} // namespace icls::auth
