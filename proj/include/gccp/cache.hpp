#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "backend.hpp"

namespace gccp {

/// Canonical identity of a request: (model, mode, prompt, targets).
/// Metadata is not part of it.
std::string cache_key(ScoreRequest const& request);

struct CacheStats {
    std::size_t entries = 0;
    std::uint64_t total_hits = 0;
    std::uint64_t total_misses = 0;
    std::uint64_t last_hits = 0;
    std::uint64_t last_misses = 0;
};

/// Persistent response cache in front of another backend.
///
/// The store is an append-only JSONL file of
/// {"key_hash", "request_digest", "response"} records; a truncated last line
/// is ignored on load. Hits are tallied as cache hits and never reach the
/// inner backend; misses are tallied as remote calls.
class CachedBackend final : public Backend {
  public:
    CachedBackend(std::shared_ptr<Backend> inner, std::filesystem::path path,
                  std::shared_ptr<CallCounter> counter);

    ScoreResponse score(ScoreRequest const& request) override;
    [[nodiscard]] std::string name() const override { return "cached:" + m_inner->name(); }

    [[nodiscard]] std::size_t entries() const;

    /// Rewrites the store without duplicates (temp file then rename).
    void compact() const;

    /// Folds this session's counts into "<path>.stats.json" (temp file then rename).
    void save_stats() const;

  private:
    void load();

    std::shared_ptr<Backend> m_inner;
    std::filesystem::path m_path;
    std::shared_ptr<CallCounter> m_counter;
    mutable std::shared_mutex m_mutex;
    struct Entry {
        std::string key_hash;
        ScoreResponse response;
    };
    std::unordered_map<std::string, Entry> m_entries;  // keyed by request digest
    std::atomic<std::uint64_t> m_session_hits{0};
    std::atomic<std::uint64_t> m_session_misses{0};
};

/// Reads the stats sidecar and counts entries of a cache file.
CacheStats read_cache_stats(std::filesystem::path const& path);

}  // namespace gccp
