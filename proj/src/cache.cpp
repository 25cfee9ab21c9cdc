#include "gccp/cache.hpp"

#include <fstream>
#include <iterator>
#include <map>

#include "gccp/error.hpp"
#include "gccp/hashing.hpp"
#include "gccp/text.hpp"

namespace gccp {

std::string cache_key(ScoreRequest const& request)
{
    nlohmann::json targets = request.mode == ScoreMode::continuation
                                 ? nlohmann::json(request.continuation)
                                 : nlohmann::json(request.labels);
    return nlohmann::json::array({request.model, to_string(request.mode), request.prompt, targets})
        .dump();
}

namespace {

std::filesystem::path stats_path(std::filesystem::path const& cache)
{
    auto p = cache;
    p += ".stats.json";
    return p;
}

void write_atomically(std::filesystem::path const& path, std::string const& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

struct Record {
    std::string key_hash;
    ScoreResponse response;
};

/// Reads records keyed by digest, tolerating a torn final line.
std::map<std::string, Record> read_records(std::filesystem::path const& path)
{
    std::map<std::string, Record> records;
    std::ifstream in(path);
    if (!in) {
        return records;
    }
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!trim(line).empty()) {
            lines.push_back(std::move(line));
        }
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            auto j = nlohmann::json::parse(lines[i]);
            records.insert_or_assign(j.at("request_digest").get<std::string>(),
                                     Record{j.at("key_hash").get<std::string>(),
                                            j.at("response").get<ScoreResponse>()});
        } catch (nlohmann::json::exception const& e) {
            if (i + 1 == lines.size()) {
                break;
            }
            throw parse_error(std::string("corrupt cache record: ") + e.what(), i + 1);
        }
    }
    return records;
}

/// Makes the file end on a record boundary so appends start on a fresh line:
/// a complete unterminated record gets its newline, a torn one is cut off.
void repair_tail(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    if (text.empty() || text.back() == '\n') {
        return;
    }
    auto cut = text.rfind('\n');
    auto start = cut == std::string::npos ? 0 : cut + 1;
    bool complete = true;
    try {
        auto j = nlohmann::json::parse(text.substr(start));
        (void)j.at("request_digest").get<std::string>();
        (void)j.at("response").get<ScoreResponse>();
    } catch (nlohmann::json::exception const&) {
        complete = false;
    }
    if (complete) {
        std::ofstream(path, std::ios::binary | std::ios::app) << '\n';
    } else {
        std::filesystem::resize_file(path, start);
    }
}

std::string record_line(std::string const& key_hash, std::string const& digest,
                        ScoreResponse const& response)
{
    nlohmann::json rec{{"key_hash", key_hash}, {"request_digest", digest}, {"response", response}};
    return rec.dump() + "\n";
}

}  // namespace

CachedBackend::CachedBackend(std::shared_ptr<Backend> inner, std::filesystem::path path,
                             std::shared_ptr<CallCounter> counter)
    : m_inner(std::move(inner)), m_path(std::move(path)), m_counter(std::move(counter))
{
    load();
}

void CachedBackend::load()
{
    repair_tail(m_path);
    for (auto& [digest, record] : read_records(m_path)) {
        m_entries.emplace(digest, Entry{std::move(record.key_hash), std::move(record.response)});
    }
}

ScoreResponse CachedBackend::score(ScoreRequest const& request)
{
    auto key = cache_key(request);
    auto digest = sha256_hex(key);
    {
        std::shared_lock lock(m_mutex);
        if (auto it = m_entries.find(digest); it != m_entries.end()) {
            m_counter->record_hit();
            m_session_hits.fetch_add(1);
            return it->second.response;
        }
    }
    auto response = m_inner->score(request);
    m_counter->record_remote(response.usage);
    m_session_misses.fetch_add(1);
    {
        std::unique_lock lock(m_mutex);
        auto key_hash = hex64(fnv1a64(key));
        if (m_entries.emplace(digest, Entry{key_hash, response}).second) {
            if (m_path.has_parent_path()) {
                std::filesystem::create_directories(m_path.parent_path());
            }
            std::ofstream out(m_path, std::ios::binary | std::ios::app);
            if (!out) {
                throw std::runtime_error("cannot append to cache " + m_path.string());
            }
            out << record_line(key_hash, digest, response);
            out.flush();
        }
    }
    return response;
}

std::size_t CachedBackend::entries() const
{
    std::shared_lock lock(m_mutex);
    return m_entries.size();
}

void CachedBackend::compact() const
{
    std::shared_lock lock(m_mutex);
    std::map<std::string, Entry const*> sorted;
    for (auto const& [digest, entry] : m_entries) {
        sorted.emplace(digest, &entry);
    }
    std::string text;
    for (auto const& [digest, entry] : sorted) {
        text += record_line(entry->key_hash, digest, entry->response);
    }
    write_atomically(m_path, text);
}

void CachedBackend::save_stats() const
{
    auto stats = read_cache_stats(m_path);
    stats.last_hits = m_session_hits.load();
    stats.last_misses = m_session_misses.load();
    stats.total_hits += stats.last_hits;
    stats.total_misses += stats.last_misses;
    nlohmann::json j{{"total_hits", stats.total_hits},
                     {"total_misses", stats.total_misses},
                     {"last_hits", stats.last_hits},
                     {"last_misses", stats.last_misses}};
    write_atomically(stats_path(m_path), j.dump(2) + "\n");
}

CacheStats read_cache_stats(std::filesystem::path const& path)
{
    CacheStats stats;
    stats.entries = read_records(path).size();
    std::ifstream in(stats_path(path));
    if (in) {
        auto j = nlohmann::json::parse(in);
        stats.total_hits = j.value("total_hits", std::uint64_t{0});
        stats.total_misses = j.value("total_misses", std::uint64_t{0});
        stats.last_hits = j.value("last_hits", std::uint64_t{0});
        stats.last_misses = j.value("last_misses", std::uint64_t{0});
    }
    return stats;
}

}  // namespace gccp
