///
/// \file cli.hpp
///
/// Batch front end: system description files, job options, text and JSON
/// reports, and the relaxation-system generator.
///
/// Input file format, one `key: values` entry per line, `#` starts a comment,
/// indented lines continue the previous key:
///
///     numerator:   8.48 -2.5942 153.535
///     denominator: 1 2.1179 16.1278 25.6052
///
/// or, in pole-residue form with complex entries written `re,im`:
///
///     poles:    -1 -2,1 -2,-1
///     residues:  3 0.5,0.25 0.5,-0.25
///

#ifndef H2RED_CLI_HPP
#define H2RED_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2red/reduce.hpp"
#include "h2red/tf.hpp"

namespace h2red::cli
{

enum class InputForm
{
    Coefficients,
    PoleResidue,
};

struct SystemInput
{
    InputForm form = InputForm::Coefficients;
    std::vector<double> numerator; // descending
    std::vector<double> denominator;
    std::vector<Complex> poles;
    std::vector<Complex> residues;
};

/// Throws InvalidInput naming the line and field at fault.
SystemInput parse_system(std::string_view text);

struct Relaxation
{
    int n        = 0;
    double alpha = 0.0;
};

/// Parses the two tokens "N=<int>" and "alpha=<real>" in either order.
Relaxation parse_relaxation(const std::vector<std::string>& tokens);

/// sum_{j=1}^n alpha^{2j} / (s + alpha^{2j}) as one rational function.
TransferFunction generate_relaxation(int n, double alpha);

enum class OutputFormat
{
    Text,
    Structured,
};

enum class Profile
{
    Strict,
    Default,
    Loose,
};

/// Tolerance bundle for a profile; individual flags override it afterwards.
SolveOptions profile_options(Profile p);

inline constexpr int kDefaultCap = 9;
inline constexpr int kHardCap    = 14;

struct JobSpec
{
    /// Exactly one of these describes the system.
    std::optional<std::string> input_path;
    std::optional<std::string> inline_text;
    std::optional<Relaxation> relaxation;

    SolveOptions options    = profile_options(Profile::Default);
    bool strip_feedthrough  = false;
    OutputFormat output     = OutputFormat::Text;
};

enum ExitCode : int
{
    kExitOk           = 0,
    kExitBadInput     = 1,
    kExitNoAdmissible = 2,
    kExitValidation   = 3,
    kExitNumerical    = 4,
};

int exit_code(ErrorKind kind) noexcept;

/// Runs one job; the report goes to `out`, error messages to `err`.
int run(const JobSpec& job, std::ostream& out, std::ostream& err);

/// Approximant numerator / denominator parsed back from a structured report.
struct Approximant
{
    std::vector<double> numerator;
    std::vector<double> denominator;
};
Approximant approximant_from_json(std::string_view report);

} // namespace h2red::cli

#endif // H2RED_CLI_HPP
