#include "gccp/corpus.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "gccp/error.hpp"
#include "gccp/text.hpp"

namespace gccp {

void Qrels::add(std::string const& query_id, std::string const& doc_id, int grade)
{
    if (grade < 0) {
        throw std::invalid_argument("negative grade for (" + query_id + ", " + doc_id + ")");
    }
    auto [it, inserted] = m_grades[query_id].emplace(doc_id, grade);
    if (!inserted) {
        throw std::invalid_argument("duplicate judgment for (" + query_id + ", " + doc_id + ")");
    }
    m_max_grade = std::max(m_max_grade, grade);
    ++m_size;
}

int Qrels::grade(std::string const& query_id, std::string const& doc_id) const
{
    auto q = m_grades.find(query_id);
    if (q == m_grades.end()) {
        return 0;
    }
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

Qrels::grades_type const* Qrels::for_query(std::string const& query_id) const
{
    auto q = m_grades.find(query_id);
    return q == m_grades.end() ? nullptr : &q->second;
}

bool Qrels::contains(std::string const& query_id) const
{
    return m_grades.contains(query_id);
}

namespace {

std::ifstream open(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open " + path.string());
    }
    return in;
}

}  // namespace

Corpus load_corpus(std::filesystem::path const& path)
{
    auto in = open(path);
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (nlohmann::json::parse_error const& e) {
            throw parse_error(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
            throw parse_error("missing string field \"id\"", lineno);
        }
        if (!j.contains("contents") || !j["contents"].is_string()) {
            throw parse_error("missing string field \"contents\"", lineno);
        }
        Document doc{j["id"].get<std::string>(), j["contents"].get<std::string>()};
        if (doc.id.empty()) {
            throw parse_error("empty document id", lineno);
        }
        auto id = doc.id;
        if (!corpus.emplace(id, std::move(doc)).second) {
            throw parse_error("duplicate document id " + id, lineno);
        }
    }
    return corpus;
}

std::vector<Query> load_queries(std::filesystem::path const& path)
{
    auto in = open(path);
    std::vector<Query> queries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw parse_error("expected id<TAB>text", lineno);
        }
        Query q{std::string(trim(line.substr(0, tab))), std::string(trim(line.substr(tab + 1)))};
        if (q.id.empty()) {
            throw parse_error("empty query id", lineno);
        }
        if (q.text.empty()) {
            throw parse_error("empty query text for " + q.id, lineno);
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

Qrels load_qrels(std::filesystem::path const& path)
{
    auto in = open(path);
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 4) {
            throw parse_error("expected \"qid 0 docid grade\"", lineno);
        }
        auto const& g = fields[3];
        int grade = 0;
        auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
        if (ec != std::errc{} || ptr != g.data() + g.size()) {
            throw parse_error("non-integer grade \"" + g + "\"", lineno);
        }
        try {
            qrels.add(fields[0], fields[2], grade);
        } catch (std::invalid_argument const& e) {
            throw parse_error(e.what(), lineno);
        }
    }
    return qrels;
}

}  // namespace gccp
