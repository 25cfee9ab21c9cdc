#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gccp {

/// Malformed input file. Carries the 1-based line number when one applies.
class parse_error : public std::runtime_error {
  public:
    parse_error(std::string const& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          m_line(line)
    {}

    [[nodiscard]] std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

class config_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The spectral anchor cannot be built (too few sentences or an edgeless graph).
class anchor_unavailable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eigensolver ran out of iterations.
class convergence_error : public std::runtime_error {
  public:
    convergence_error(std::string const& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          m_residual(residual)
    {}

    [[nodiscard]] double residual() const noexcept { return m_residual; }

  private:
    double m_residual;
};

/// Transport failure, or a non-retryable provider error.
class backend_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The provider cannot return the log-probabilities a scorer needs.
class capability_error : public backend_error {
    using backend_error::backend_error;
};

}  // namespace gccp
