#include "h2red/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "h2red/error.hpp"

namespace h2red::cli
{

namespace
{

using json = nlohmann::ordered_json;

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok)
    {
        out.push_back(tok);
    }
    return out;
}

std::optional<double> to_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
    {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    {
        return std::nullopt;
    }
    return v;
}

[[noreturn]] void bad_field(int line, const std::string& key, const std::string& msg)
{
    throw Error(ErrorKind::InvalidInput,
                "line " + std::to_string(line) + ", field '" + key + "': " + msg);
}

struct Entry
{
    int line = 0;
    std::string values;
};

std::vector<double> parse_reals(const std::string& key, const Entry& e)
{
    std::string v = e.values;
    for (auto& c : v)
    {
        if (c == ',')
        {
            c = ' ';
        }
    }
    std::vector<double> out;
    for (const auto& tok : split_ws(v))
    {
        const auto x = to_double(tok);
        if (!x)
        {
            bad_field(e.line, key, "'" + tok + "' is not a number");
        }
        out.push_back(*x);
    }
    if (out.empty())
    {
        bad_field(e.line, key, "no values");
    }
    return out;
}

std::vector<Complex> parse_complex(const std::string& key, const Entry& e)
{
    std::vector<Complex> out;
    for (const auto& tok : split_ws(e.values))
    {
        const auto comma = tok.find(',');
        const auto re    = to_double(std::string_view(tok).substr(0, comma));
        std::optional<double> im = 0.0;
        if (comma != std::string::npos)
        {
            im = to_double(std::string_view(tok).substr(comma + 1));
        }
        if (!re || !im)
        {
            bad_field(e.line, key, "'" + tok + "' is not a complex number re,im");
        }
        out.emplace_back(*re, *im);
    }
    if (out.empty())
    {
        bad_field(e.line, key, "no values");
    }
    return out;
}

} // namespace

SystemInput parse_system(std::string_view text)
{
    static const char* const known[] = {"numerator", "denominator", "poles", "residues"};
    std::map<std::string, Entry> entries;
    std::string current;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
        {
            raw.erase(hash);
        }
        if (trim(raw).empty())
        {
            continue;
        }
        if (raw.front() == ' ' || raw.front() == '\t')
        {
            if (current.empty())
            {
                throw Error(ErrorKind::InvalidInput,
                            "line " + std::to_string(line) + ": continuation line without a key");
            }
            entries[current].values += " " + trim(raw);
            continue;
        }
        const auto colon = raw.find(':');
        if (colon == std::string::npos)
        {
            throw Error(ErrorKind::InvalidInput,
                        "line " + std::to_string(line) + ": expected 'key: values'");
        }
        const std::string key = trim(std::string_view(raw).substr(0, colon));
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
        {
            bad_field(line, key, "unknown key");
        }
        if (entries.count(key) != 0)
        {
            bad_field(line, key, "given twice");
        }
        entries[key] = Entry{line, trim(std::string_view(raw).substr(colon + 1))};
        current      = key;
    }

    const bool coeff = entries.count("numerator") + entries.count("denominator") > 0;
    const bool pr    = entries.count("poles") + entries.count("residues") > 0;
    if (coeff == pr)
    {
        throw Error(ErrorKind::InvalidInput,
                    coeff ? "give either numerator/denominator or poles/residues, not both"
                          : "no system given: expected numerator/denominator or poles/residues");
    }
    SystemInput out;
    if (coeff)
    {
        for (const char* k : {"numerator", "denominator"})
        {
            if (entries.count(k) == 0)
            {
                throw Error(ErrorKind::InvalidInput, std::string("field '") + k + "' missing");
            }
        }
        out.form        = InputForm::Coefficients;
        out.numerator   = parse_reals("numerator", entries["numerator"]);
        out.denominator = parse_reals("denominator", entries["denominator"]);
    }
    else
    {
        for (const char* k : {"poles", "residues"})
        {
            if (entries.count(k) == 0)
            {
                throw Error(ErrorKind::InvalidInput, std::string("field '") + k + "' missing");
            }
        }
        out.form     = InputForm::PoleResidue;
        out.poles    = parse_complex("poles", entries["poles"]);
        out.residues = parse_complex("residues", entries["residues"]);
        if (out.poles.size() != out.residues.size())
        {
            bad_field(entries["residues"].line, "residues",
                      "expected " + std::to_string(out.poles.size()) + " values, got "
                          + std::to_string(out.residues.size()));
        }
    }
    return out;
}

Relaxation parse_relaxation(const std::vector<std::string>& tokens)
{
    Relaxation r;
    bool has_n = false;
    bool has_alpha = false;
    for (const auto& tok : tokens)
    {
        const auto eq = tok.find('=');
        const std::string key = tok.substr(0, eq);
        const std::string val = eq == std::string::npos ? "" : tok.substr(eq + 1);
        if (key == "N" || key == "n")
        {
            int n = 0;
            const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), n);
            if (ec != std::errc() || ptr != val.data() + val.size())
            {
                throw Error(ErrorKind::InvalidInput, "relaxation: bad N '" + val + "'");
            }
            r.n   = n;
            has_n = true;
        }
        else if (key == "alpha")
        {
            const auto a = to_double(val);
            if (!a)
            {
                throw Error(ErrorKind::InvalidInput, "relaxation: bad alpha '" + val + "'");
            }
            r.alpha   = *a;
            has_alpha = true;
        }
        else
        {
            throw Error(ErrorKind::InvalidInput, "relaxation: unknown parameter '" + tok + "'");
        }
    }
    if (!has_n || !has_alpha)
    {
        throw Error(ErrorKind::InvalidInput, "relaxation: expected N=<int> alpha=<real>");
    }
    return r;
}

namespace
{

void check_relaxation(int n, double alpha)
{
    if (n < 1)
    {
        throw Error(ErrorKind::InvalidInput, "relaxation: N must be at least 1");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha))
    {
        throw Error(ErrorKind::InvalidInput, "relaxation: alpha must be positive");
    }
    if (alpha == 1.0)
    {
        throw Error(ErrorKind::InvalidInput, "degenerate relaxation system (first order)");
    }
}

std::vector<double> relaxation_rates(int n, double alpha)
{
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
    {
        q[static_cast<std::size_t>(j - 1)] = std::pow(alpha, 2 * j);
    }
    return q;
}

} // namespace

TransferFunction generate_relaxation(int n, double alpha)
{
    check_relaxation(n, alpha);
    const auto q = relaxation_rates(n, alpha);
    Polynomial den{1.0};
    for (double qj : q)
    {
        den = den * Polynomial{1.0, qj};
    }
    Polynomial num;
    for (std::size_t j = 0; j < q.size(); ++j)
    {
        Polynomial term = Polynomial::constant(q[j]);
        for (std::size_t k = 0; k < q.size(); ++k)
        {
            if (k != j)
            {
                term = term * Polynomial{1.0, q[k]};
            }
        }
        num += term;
    }
    return TransferFunction::make(num, den);
}

SolveOptions profile_options(Profile p)
{
    SolveOptions o;
    o.cap = kDefaultCap;
    switch (p)
    {
    case Profile::Strict:
        o.recovery.real     = 1e-8;
        o.recovery.hurwitz  = 1e-8;
        o.eigen.residual_tol = 1e-9;
        o.ls_tol            = 1e-8;
        break;
    case Profile::Default:
        break;
    case Profile::Loose:
        o.recovery.real     = 1e-4;
        o.recovery.hurwitz  = 1e-11;
        o.eigen.residual_tol = 1e-5;
        o.ls_tol            = 1e-4;
        break;
    }
    return o;
}

int exit_code(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::InvalidInput:
        return kExitBadInput;
    case ErrorKind::NoAdmissible:
        return kExitNoAdmissible;
    case ErrorKind::Validation:
        return kExitValidation;
    case ErrorKind::Numerical:
        return kExitNumerical;
    }
    return kExitNumerical;
}

namespace
{

struct Loaded
{
    ValidatedSystem sys;
    std::string source;
    double feedthrough = 0.0;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorKind::InvalidInput, "cannot open input file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Loaded load(const JobSpec& job)
{
    const int given = static_cast<int>(job.input_path.has_value())
                      + static_cast<int>(job.inline_text.has_value())
                      + static_cast<int>(job.relaxation.has_value());
    if (given != 1)
    {
        throw Error(ErrorKind::InvalidInput,
                    "exactly one system source required (--input or --relaxation)");
    }
    if (job.relaxation)
    {
        const auto [n, alpha] = *job.relaxation;
        check_relaxation(n, alpha);
        // The poles are known exactly, so skip root finding.
        const auto q = relaxation_rates(n, alpha);
        std::vector<Complex> poles;
        std::vector<Complex> residues;
        for (double qj : q)
        {
            poles.emplace_back(-qj, 0.0);
            residues.emplace_back(qj, 0.0);
        }
        std::ostringstream src;
        src << "relaxation N=" << n << " alpha=" << std::setprecision(17) << alpha;
        return {validate_pole_residue(poles, residues), src.str(), 0.0};
    }

    const std::string text = job.input_path ? read_file(*job.input_path) : *job.inline_text;
    const SystemInput in   = parse_system(text);
    const std::string source = job.input_path ? *job.input_path : std::string("inline");
    if (in.form == InputForm::PoleResidue)
    {
        return {validate_pole_residue(in.poles, in.residues), source, 0.0};
    }
    TransferFunction tf = TransferFunction::make(in.numerator, in.denominator);
    double feedthrough  = 0.0;
    if (job.strip_feedthrough)
    {
        tf = strip_feedthrough(tf, &feedthrough);
    }
    return {validate(tf), source, feedthrough};
}

json complex_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

json complex_list(const std::vector<Complex>& v)
{
    json out = json::array();
    for (const auto& z : v)
    {
        out.push_back(complex_json(z));
    }
    return out;
}

json poly_json(const Polynomial& p)
{
    return p.real_coeffs();
}

json candidate_json(const CandidateRecord& c)
{
    json j;
    j["status"]          = to_string(c.rejection);
    j["xi"]              = complex_list(c.point.xi);
    j["criterion"]       = complex_json(c.point.criterion);
    j["system_residual"] = c.system_residual;
    j["eigen_residual"]  = c.eigen_residual;
    j["multiplicity_hint"] = c.multiplicity_hint;
    if (c.rejection != Rejection::DegenerateQ0)
    {
        j["q0"]           = complex_json(c.point.q0);
        j["imag_margin"]  = c.point.imag_margin;
        j["ls_residual"]  = c.point.ls_residual;
        j["foc_residual"] = c.point.foc_residual;
    }
    if (c.point.is_real && c.rejection != Rejection::DegenerateQ0)
    {
        j["max_pole_real"] = c.point.max_pole_real;
    }
    if (c.admissible())
    {
        j["numerator"]     = poly_json(c.point.b);
        j["denominator"]   = poly_json(c.point.a);
        j["h2_error"]      = c.h2_error;
        j["crosscheck_ok"] = c.crosscheck_ok;
    }
    return j;
}

json diagnostics_json(const Diagnostics& d)
{
    json j;
    j["seed"]                = d.seed_used;
    j["eigen_attempts"]      = d.eigen_attempts;
    j["vandermonde_cond"]    = d.vandermonde_cond;
    j["m_norm_inf"]          = d.m_norm;
    j["m_residual"]          = d.m_residual;
    j["commutation_defect"]  = d.commutation_defect;
    j["annihilation_defect"] = d.annihilation_defect;
    j["defects_exact"]       = d.defects_exact;
    j["solutions"]           = d.solutions;
    j["rejected_eigenvectors"] = d.rejected_eigvecs;
    j["zero_solutions"]      = d.zero_solutions;
    j["zero_threshold"]      = d.zero_threshold;
    j["degenerate_q0"]       = d.degenerate_q0;
    j["crosscheck_failures"] = d.crosscheck_failures;
    j["method"] = d.method == SelectionMethod::Enumeration ? "enum" : "cvm";
    if (d.method == SelectionMethod::CriticalValueMatrix)
    {
        j["cvm_levels_visited"] = d.cvm_levels_visited;
        j["cvm_agrees"]         = d.cvm_agrees;
    }
    j["timings_s"] = {{"foc_matrix", d.t_foc_matrix}, {"matrices", d.t_matrices},
                      {"eigen", d.t_eigen},           {"recovery", d.t_recovery},
                      {"selection", d.t_selection},   {"total", d.t_total}};
    return j;
}

json report_json(const Loaded& in, const ReductionReport& r, const std::string& status)
{
    json j;
    j["format"]      = "h2reduce-report";
    j["version"]     = 1;
    j["status"]      = status;
    j["source"]      = in.source;
    j["order"]       = in.sys.order();
    j["numerator"]   = poly_json(in.sys.tf().numerator);
    j["denominator"] = poly_json(in.sys.tf().denominator);
    j["feedthrough"] = in.feedthrough;
    j["poles"]       = complex_list(in.sys.poles());
    j["system_norm"] = r.system_norm;
    j["candidates"]  = json::array();
    for (const auto& c : r.candidates)
    {
        j["candidates"].push_back(candidate_json(c));
    }
    j["admissible"]             = r.admissible;
    j["critical_values_sorted"] = r.critical_values_sorted;
    if (const auto* g = r.global_candidate())
    {
        j["global"] = {{"index", *r.global},
                       {"numerator", poly_json(g->point.b)},
                       {"denominator", poly_json(g->point.a)},
                       {"criterion", g->point.criterion.real()},
                       {"absolute_error", r.global_error},
                       {"relative_error", r.relative_error}};
    }
    j["diagnostics"] = diagnostics_json(r.diagnostics);
    return j;
}

void print_poly(std::ostream& out, const Polynomial& p)
{
    out << "[";
    const auto c = p.real_coeffs();
    for (std::size_t k = 0; k < c.size(); ++k)
    {
        out << (k ? ", " : "") << c[k];
    }
    out << "]";
}

void print_text(std::ostream& out, const Loaded& in, const ReductionReport& r)
{
    out << std::setprecision(10);
    out << "system: " << in.source << ", order " << in.sys.order() << "\n";
    if (in.feedthrough != 0.0)
    {
        out << "feedthrough removed: " << in.feedthrough << "\n";
    }
    out << "H2 norm: " << r.system_norm << "\n";
    out << "critical points (nonzero): " << r.candidates.size()
        << ", admissible: " << r.admissible.size() << "\n\n";

    out << "  #   status          Re phi            Im phi        max|xi|       eig res   ls res\n";
    for (std::size_t k = 0; k < r.candidates.size(); ++k)
    {
        const auto& c = r.candidates[k];
        double xmax   = 0.0;
        for (const auto& z : c.point.xi)
        {
            xmax = std::max(xmax, std::abs(z));
        }
        out << std::setw(3) << k << "   " << std::left << std::setw(14) << to_string(c.rejection)
            << std::right << std::setprecision(6) << std::setw(14) << c.point.criterion.real()
            << std::setw(14) << c.point.criterion.imag() << std::setw(14) << xmax
            << std::setw(10) << std::setprecision(2) << c.eigen_residual << std::setw(10)
            << c.point.ls_residual << "\n";
    }
    out << std::setprecision(10) << "\nadmissible approximants:\n";
    for (std::size_t k : r.admissible)
    {
        const auto& c = r.candidates[k];
        out << "  #" << k << "  error " << c.h2_error << "  phi " << c.point.criterion.real()
            << (c.crosscheck_ok ? "" : "  (cross-check FAILED)") << "\n    numerator:   ";
        print_poly(out, c.point.b);
        out << "\n    denominator: ";
        print_poly(out, c.point.a);
        out << "\n";
    }
    if (const auto* g = r.global_candidate())
    {
        out << "\nglobal approximant: #" << *r.global << "\n  numerator:   ";
        print_poly(out, g->point.b);
        out << "\n  denominator: ";
        print_poly(out, g->point.a);
        out << "\nabsolute error: " << r.global_error << "\nrelative error: "
            << 100.0 * r.relative_error << " %\n";
    }
    const auto& d = r.diagnostics;
    out << "\ndiagnostics:\n"
        << "  seed " << d.seed_used << ", eigen attempts " << d.eigen_attempts
        << ", rejected eigenvectors " << d.rejected_eigvecs << "\n"
        << std::setprecision(3) << "  cond V(-p) " << d.vandermonde_cond << ", ||M||_inf "
        << d.m_norm << ", M residual " << d.m_residual << "\n"
        << "  commutation defect " << d.commutation_defect << ", annihilation defect "
        << d.annihilation_defect << (d.defects_exact ? "" : " (probed)") << "\n"
        << "  solutions " << d.solutions << ", zero " << d.zero_solutions << " (threshold "
        << d.zero_threshold << "), degenerate q0 " << d.degenerate_q0
        << ", cross-check failures " << d.crosscheck_failures << "\n";
    if (d.method == SelectionMethod::CriticalValueMatrix)
    {
        out << "  critical value matrix walk: " << d.cvm_levels_visited << " levels, "
            << (d.cvm_agrees ? "agrees" : "DISAGREES") << " with enumeration\n";
    }
    out << "  time " << d.t_total << " s (eigen " << d.t_eigen << " s)\n";
}

void emit(std::ostream& out, const JobSpec& job, const Loaded& in, const ReductionReport& r,
          const std::string& status)
{
    if (job.output == OutputFormat::Structured)
    {
        out << report_json(in, r, status).dump(2) << "\n";
    }
    else
    {
        print_text(out, in, r);
        if (status != "ok")
        {
            out << "\nresult: " << status << "\n";
        }
    }
}

} // namespace

int run(const JobSpec& job, std::ostream& out, std::ostream& err)
{
    try
    {
        if (job.options.cap > kHardCap || job.options.cap < 1)
        {
            throw Error(ErrorKind::InvalidInput,
                        "--cap must lie in [1, " + std::to_string(kHardCap) + "]");
        }
        const Loaded in = load(job);
        try
        {
            const ReductionReport r = solve_reduction(in.sys, job.options);
            emit(out, job, in, r, "ok");
            return kExitOk;
        }
        catch (const NoAdmissibleError& e)
        {
            emit(out, job, in, e.report(), "no admissible critical point");
            err << "error: " << e.what() << "\n";
            return kExitNoAdmissible;
        }
    }
    catch (const Error& e)
    {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        if (job.output == OutputFormat::Structured)
        {
            out << json{{"format", "h2reduce-report"},
                        {"version", 1},
                        {"status", to_string(e.kind())},
                        {"message", e.what()}}
                       .dump(2)
                << "\n";
        }
        return exit_code(e.kind());
    }
}

Approximant approximant_from_json(std::string_view report)
{
    json j;
    try
    {
        j = json::parse(report);
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorKind::InvalidInput, std::string("report is not valid JSON: ") + e.what());
    }
    if (!j.contains("global"))
    {
        throw Error(ErrorKind::InvalidInput, "report has no global approximant");
    }
    return {j["global"]["numerator"].get<std::vector<double>>(),
            j["global"]["denominator"].get<std::vector<double>>()};
}

} // namespace h2red::cli
