#pragma once

#include "dioph/spectrum.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dioph {

std::string sha256_hex(std::string_view data);

// DIOPH_CACHE_DIR wins over the flag when set and nonempty.
std::string resolve_cache_dir(const std::string& flag);

// One file per key: a checksum line followed by the hexfloat spectrum text.
class SpectrumCache {
public:
    explicit SpectrumCache(std::string dir);

    // Key of a canonical description (config text plus anything else that shapes the spectrum).
    static std::string key(std::string_view description);

    std::string path(const std::string& key) const;
    // Miss on absent file; a checksum mismatch or unreadable body is a miss
    // with a warning appended.
    std::optional<SparseSpectrum> lookup(const std::string& key, std::vector<std::string>* warnings = nullptr) const;
    void store(const std::string& key, const SparseSpectrum& s) const;

private:
    std::string dir_;
};

}  // namespace dioph
