#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gccp {

struct Query {
    std::string id;
    std::string text;
};

struct Document {
    std::string id;
    std::string text;
};

/// Documents keyed by id. Ordered so iteration is deterministic.
using Corpus = std::map<std::string, Document>;

/// Graded judgments: query id -> doc id -> grade (>= 0).
class Qrels {
  public:
    using grades_type = std::map<std::string, int>;

    /// Throws std::invalid_argument on a negative grade or a duplicate key.
    void add(std::string const& query_id, std::string const& doc_id, int grade);

    [[nodiscard]] int grade(std::string const& query_id, std::string const& doc_id) const;
    [[nodiscard]] grades_type const* for_query(std::string const& query_id) const;
    [[nodiscard]] bool contains(std::string const& query_id) const;
    [[nodiscard]] int max_grade() const noexcept { return m_max_grade; }
    [[nodiscard]] std::size_t size() const noexcept { return m_size; }
    [[nodiscard]] std::map<std::string, grades_type> const& queries() const noexcept
    {
        return m_grades;
    }

  private:
    std::map<std::string, grades_type> m_grades;
    int m_max_grade = 0;
    std::size_t m_size = 0;
};

/// JSONL, one {"id": ..., "contents": ...} object per line.
Corpus load_corpus(std::filesystem::path const& path);

/// "id<TAB>text" per line; blank lines skipped.
std::vector<Query> load_queries(std::filesystem::path const& path);

/// TREC qrels: "qid 0 docid grade".
Qrels load_qrels(std::filesystem::path const& path);

}  // namespace gccp
