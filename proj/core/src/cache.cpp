#include "dioph/cache.hpp"
#include "dioph/errors.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dioph {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::CorruptCache, "cli", "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string resolve_cache_dir(const std::string& flag)
{
    if (const char* env = std::getenv("DIOPH_CACHE_DIR"); env && *env) return env;
    return flag;
}

SpectrumCache::SpectrumCache(std::string dir) : dir_(std::move(dir)) {}

std::string SpectrumCache::key(std::string_view description) { return sha256_hex(description); }

std::string SpectrumCache::path(const std::string& key) const { return (fs::path(dir_) / (key + ".spec")).string(); }

std::optional<SparseSpectrum> SpectrumCache::lookup(const std::string& key, std::vector<std::string>* warnings) const
{
    std::ifstream in(path(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    auto warn = [&](const std::string& why) {
        if (warnings) warnings->push_back(kind_name(ErrorKind::CorruptCache) + std::string(": ") + key + ": " + why);
        return std::nullopt;
    };
    const auto nl = text.find('\n');
    if (nl == std::string::npos || text.compare(0, 7, "sha256=") != 0) return warn("missing checksum line");
    const std::string body = text.substr(nl + 1);
    if (text.substr(7, nl - 7) != sha256_hex(body)) return warn("checksum mismatch");
    try {
        std::istringstream bs(body);
        return read_spectrum(bs);
    } catch (const Error& e) {
        return warn(e.detail());
    }
}

void SpectrumCache::store(const std::string& key, const SparseSpectrum& s) const
{
    fs::create_directories(dir_);
    std::ostringstream body;
    write_spectrum(body, s);
    const std::string b = body.str();
    // Write beside the target and rename, so readers never see half a file.
    const std::string final_path = path(key), tmp = final_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << "sha256=" << sha256_hex(b) << "\n" << b;
        if (!out) throw Error(ErrorKind::CorruptCache, "cli", "cannot write " + tmp);
    }
    fs::rename(tmp, final_path);
}

}  // namespace dioph
