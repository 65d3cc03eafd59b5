#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cvsskit {

/// FIPS 180-4 SHA-256. Used for embedding-cache keys and dataset/bundle
/// manifests; no external crypto dependency wanted for that.
class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view text) { update(text.data(), text.size()); }

    /// Finalizes and returns the 64-char lowercase hex digest.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
    std::uint64_t total_len_ = 0;
};

std::string sha256_hex(std::string_view text);

} // namespace cvsskit
