#ifndef H2RED_ERROR_HPP
#define H2RED_ERROR_HPP

#include <stdexcept>
#include <string>

namespace h2red
{

/// Broad failure classes. The CLI maps each one to its own exit code.
enum class ErrorKind
{
    InvalidInput, // malformed or out-of-domain arguments
    Validation,   // input system violates a standing assumption
    Numerical,    // eigen extraction, conditioning, residual checks
    NoAdmissible, // pipeline ran but no real Hurwitz critical point survived
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), m_kind(kind)
    {
    }

    ErrorKind kind() const noexcept
    {
        return m_kind;
    }

private:
    ErrorKind m_kind;
};

} // namespace h2red

#endif // H2RED_ERROR_HPP
