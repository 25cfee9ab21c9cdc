#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gccp/backend.hpp"

namespace test {

inline std::filesystem::path data_dir() { return GCCP_TEST_DATA; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        std::random_device rd;
        m_path = std::filesystem::temp_directory_path() /
                 ("gccp_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(m_path);
    }
    TempDir(TempDir const&) = delete;
    TempDir& operator=(TempDir const&) = delete;
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(m_path, ec);
    }

    [[nodiscard]] std::filesystem::path const& path() const noexcept { return m_path; }
    [[nodiscard]] std::filesystem::path operator/(std::string const& name) const
    {
        return m_path / name;
    }

    std::filesystem::path write(std::string const& name, std::string const& contents) const
    {
        auto p = m_path / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << contents;
        return p;
    }

  private:
    std::filesystem::path m_path;
};

inline std::string slurp(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Returns fixed label logits and token logprobs; counts calls.
class StubBackend final : public gccp::Backend {
  public:
    std::vector<double> logits;
    std::vector<double> token_logprobs;
    std::atomic<int> calls{0};

    gccp::ScoreResponse score(gccp::ScoreRequest const& request) override
    {
        request.validate();
        ++calls;
        gccp::ScoreResponse r;
        if (request.mode == gccp::ScoreMode::labels) {
            r.label_logits = logits;
        } else {
            for (auto lp : token_logprobs) {
                r.tokens.push_back({"t", lp});
            }
        }
        return r;
    }
    [[nodiscard]] std::string name() const override { return "stub"; }
};

}  // namespace test
