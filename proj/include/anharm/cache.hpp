#pragma once

// Line-oriented coefficient cache. One record per order:
//
//   c1 <M> <k> <dps> <guard> <value>
//
// where <value> is the shortest decimal string that reloads bit-identically
// at the stored working precision. Records are appended in order and flushed
// periodically, so an interrupted run leaves a usable partial cache.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anharm/precision.hpp"

namespace anharm {

inline constexpr const char* kCacheSchema = "c1";

class CacheError : public std::runtime_error {
public:
    CacheError(const std::filesystem::path& file, const std::string& what)
        : std::runtime_error("coefficient cache " + file.string() + ": " + what), file_(file) {}
    const std::filesystem::path& file() const { return file_; }

private:
    std::filesystem::path file_;
};

struct CachedSeries {
    int M = 0;
    int dps = 0;
    int guard = 0;
    std::vector<BigReal> coeffs;  // a_0 ... a_k for a contiguous prefix
};

/// Loads a cache file. Returns nullopt if the file does not exist. Throws
/// CacheError on malformed records or on (M, dps, guard) mismatch.
inline std::optional<CachedSeries> load_coefficient_cache(const std::filesystem::path& file,
                                                          int M, int dps, int guard) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    CachedSeries out;
    out.M = M;
    out.dps = dps;
    out.guard = guard;
    mpfr_prec_t bits = PrecisionContext(dps, guard).bits();
    std::string line;
    int expected_k = 0;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string schema, value;
        int m = 0, k = 0, d = 0, g = 0;
        if (!(ls >> schema >> m >> k >> d >> g >> value)) {
            throw CacheError(file, "malformed record at line " + std::to_string(lineno));
        }
        if (schema != kCacheSchema) throw CacheError(file, "unknown schema '" + schema + "'");
        if (m != M) throw CacheError(file, "oscillator degree mismatch (file has M=" + std::to_string(m) + ")");
        if (d != dps || g != guard) {
            throw CacheError(file, "precision mismatch (file has dps=" + std::to_string(d) +
                                       " guard=" + std::to_string(g) + ")");
        }
        if (k != expected_k) {
            throw CacheError(file, "non-contiguous order " + std::to_string(k) + " at line " +
                                       std::to_string(lineno));
        }
        try {
            out.coeffs.push_back(BigReal::parse(value, bits));
        } catch (const std::invalid_argument&) {
            throw CacheError(file, "unparseable value at line " + std::to_string(lineno));
        }
        ++expected_k;
    }
    if (out.coeffs.empty()) return std::nullopt;
    return out;
}

/// Incremental cache writer; truncates any existing file.
class CacheWriter {
public:
    CacheWriter(const std::filesystem::path& file, int M, int dps, int guard, int flush_interval = 10)
        : file_(file), M_(M), dps_(dps), guard_(guard),
          flush_interval_(flush_interval > 0 ? flush_interval : 1) {
        if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
        out_.open(file, std::ios::trunc);
        if (!out_) throw CacheError(file, "cannot open for writing");
    }

    void put(int k, const BigReal& value) {
        out_ << kCacheSchema << ' ' << M_ << ' ' << k << ' ' << dps_ << ' ' << guard_ << ' '
             << value.to_string_exact() << '\n';
        if (++since_flush_ >= flush_interval_) {
            out_.flush();
            since_flush_ = 0;
        }
    }

    void finish() { out_.flush(); }

private:
    std::filesystem::path file_;
    int M_;
    int dps_;
    int guard_;
    int flush_interval_;
    int since_flush_ = 0;
    std::ofstream out_;
};

}  // namespace anharm
