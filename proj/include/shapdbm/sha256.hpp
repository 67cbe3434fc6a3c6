#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace shapdbm {

/// Incremental SHA-256 (FIPS 180-4).  Used for artifact digests in run
/// manifests; self-contained so the library carries no crypto dependency.
class Sha256 {
  public:
    Sha256();
    void update(const void* data, std::size_t size);
    /// Finishes the computation and returns the lowercase hex digest.
    std::string hex_digest();

  private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint8_t buffer_[64];
    std::size_t buffered_ = 0;
    std::uint64_t total_bytes_ = 0;
};

std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace shapdbm
