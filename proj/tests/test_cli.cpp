#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "h2red/cli.hpp"
#include "h2red/error.hpp"
#include "support.hpp"

using namespace h2red;
using namespace h2red::cli;

namespace
{

std::string parse_error(std::string_view text)
{
    try
    {
        parse_system(text);
    }
    catch (const Error& e)
    {
        CHECK(e.kind() == ErrorKind::InvalidInput);
        return e.what();
    }
    return {};
}

bool contains(const std::string& s, const std::string& part)
{
    return s.find(part) != std::string::npos;
}

struct RunResult
{
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run_job(const JobSpec& job)
{
    std::ostringstream out, err;
    const int code = run(job, out, err);
    return {code, out.str(), err.str()};
}

JobSpec inline_job(const std::string& text, OutputFormat fmt = OutputFormat::Structured)
{
    JobSpec job;
    job.inline_text = text;
    job.output      = fmt;
    return job;
}

int shell_exit(const std::string& args)
{
    const std::string cmd = std::string(H2REDUCE_EXE) + " " + args + " > /dev/null 2>&1";
    const int status      = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string join(const std::vector<double>& v)
{
    std::ostringstream os;
    os.precision(17);
    for (double x : v)
    {
        os << ' ' << x;
    }
    return os.str();
}

} // namespace

TEST_CASE("parse_system accepts both forms")
{
    const auto c = parse_system("# comment\nnumerator: 1 2\ndenominator: 1 3\n  2  # continued\n");
    CHECK(c.form == InputForm::Coefficients);
    CHECK(c.numerator == std::vector<double>{1.0, 2.0});
    CHECK(c.denominator == std::vector<double>{1.0, 3.0, 2.0});

    const auto p = parse_system("poles: -1,2 -1,-2 -0.5\nresidues: 1,1 1,-1 3\n");
    CHECK(p.form == InputForm::PoleResidue);
    REQUIRE(p.poles.size() == 3);
    CHECK(p.poles[0] == Complex(-1.0, 2.0));
    CHECK(p.residues[2] == Complex(3.0, 0.0));
}

TEST_CASE("parse_system errors point at the field")
{
    CHECK(contains(parse_error("numerator: 1 x\ndenominator: 1 1\n"), "line 1, field 'numerator'"));
    CHECK(contains(parse_error("numerator: 1\ndenominator: 1 abc\n"), "line 2, field 'denominator'"));
    CHECK(contains(parse_error("numerator: 1\nbogus: 1\n"), "field 'bogus'"));
    CHECK(contains(parse_error("numerator: 1\n"), "field 'denominator' missing"));
    CHECK(contains(parse_error("poles: -1 -2\nresidues: 1\n"), "field 'residues'"));
    CHECK(contains(parse_error("numerator: 1\ndenominator: 1 1\npoles: -1\nresidues: 1\n"), "not both"));
    CHECK(contains(parse_error("  1 2\n"), "continuation line without a key"));
    CHECK_FALSE(parse_error("").empty());
}

TEST_CASE("parse_relaxation")
{
    const auto r = parse_relaxation({"N=5", "alpha=0.78"});
    CHECK(r.n == 5);
    CHECK(r.alpha == 0.78);
    CHECK_THROWS_AS(parse_relaxation({"N=5"}), Error);
    CHECK_THROWS_AS(parse_relaxation({"N=five", "alpha=1"}), Error);
    CHECK_THROWS_AS(parse_relaxation({"N=5", "beta=1"}), Error);
}

TEST_CASE("generate_relaxation")
{
    const auto one = generate_relaxation(1, 2.0);
    CHECK(one.numerator == Polynomial{4.0});
    CHECK(one.denominator == Polynomial{1.0, 4.0});

    const auto two = generate_relaxation(2, 2.0);
    CHECK(two.numerator == Polynomial{20.0, 128.0});
    CHECK(two.denominator == Polynomial{1.0, 20.0, 64.0});

    const auto five = validate(generate_relaxation(5, 0.78));
    CHECK(h2_norm(five) == doctest::Approx(1.6980).epsilon(0.5e-4 / 1.6980));
    for (int j = 1; j <= 5; ++j)
    {
        const double q = std::pow(0.78, 2 * j);
        const bool hit = std::any_of(five.poles().begin(), five.poles().end(),
                                     [&](Complex p) { return std::abs(p + q) <= 1e-10; });
        CHECK(hit);
    }

    try
    {
        generate_relaxation(4, 1.0);
        FAIL("expected an error");
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()) == "degenerate relaxation system (first order)");
    }
    CHECK_THROWS_AS(generate_relaxation(3, -0.5), Error);
    CHECK_THROWS_AS(generate_relaxation(0, 0.5), Error);
}

TEST_CASE("exit codes from run")
{
    CHECK(exit_code(ErrorKind::InvalidInput) == kExitBadInput);
    CHECK(exit_code(ErrorKind::NoAdmissible) == kExitNoAdmissible);
    CHECK(exit_code(ErrorKind::Validation) == kExitValidation);
    CHECK(exit_code(ErrorKind::Numerical) == kExitNumerical);

    SUBCASE("repeated pole is a validation failure")
    {
        const auto r = run_job(inline_job("numerator: 1\ndenominator: 1 2 1\n", OutputFormat::Text));
        CHECK(r.code == kExitValidation);
        CHECK(contains(r.err + r.out, "repeated pole"));
    }
    SUBCASE("malformed field")
    {
        const auto r = run_job(inline_job("numerator: 1 ?\ndenominator: 1 2\n", OutputFormat::Text));
        CHECK(r.code == kExitBadInput);
        CHECK(contains(r.err + r.out, "field 'numerator'"));
    }
    SUBCASE("relaxation failure region gives a typed failure")
    {
        JobSpec job;
        job.relaxation = Relaxation{5, 0.30};
        const auto r   = run_job(job);
        CHECK((r.code == kExitNoAdmissible || r.code == kExitNumerical));
    }
    SUBCASE("degenerate relaxation")
    {
        JobSpec job;
        job.relaxation = Relaxation{3, 1.0};
        CHECK(run_job(job).code == kExitBadInput);
    }
    SUBCASE("feedthrough needs the explicit flag")
    {
        const std::string text = "numerator: 2 7 3\ndenominator: 1 3 2\n";
        CHECK(run_job(inline_job(text)).code == kExitValidation);
        auto job              = inline_job(text);
        job.strip_feedthrough = true;
        const auto r          = run_job(job);
        REQUIRE(r.code == kExitOk);
        CHECK(nlohmann::json::parse(r.out)["feedthrough"].get<double>() == doctest::Approx(2.0));
    }
}

TEST_CASE("executable exit codes")
{
    CHECK(shell_exit("--relaxation N=3 alpha=0.6") == kExitOk);
    CHECK(shell_exit("--relaxation N=5 alpha=0.30") == kExitNoAdmissible);
    CHECK(shell_exit("-i /nonexistent/file.sys") == kExitBadInput);
    CHECK(shell_exit("--relaxation N=3 alpha=1") == kExitBadInput);
}

TEST_CASE("structured report round trip is bit-exact")
{
    std::mt19937_64 gen(314);
    for (int t = 0; t < 6; ++t)
    {
        const auto p  = support::random_poles(gen, 2 + t % 4, -3.0, -0.5, 0.3);
        const auto tf = support::random_tf(gen, p);
        const std::string text = "numerator:" + join(tf.numerator.real_coeffs()) + "\ndenominator:"
                                 + join(tf.denominator.real_coeffs()) + "\n";
        const auto r = run_job(inline_job(text));
        REQUIRE(r.code == kExitOk);
        const auto approx = approximant_from_json(r.out);

        const auto in     = parse_system(text);
        const auto report = solve_reduction(validate(TransferFunction::make(in.numerator, in.denominator)),
                                            profile_options(Profile::Default));
        const auto* g     = report.global_candidate();
        REQUIRE(g != nullptr);
        CHECK(approx.numerator == g->point.b.real_coeffs());
        CHECK(approx.denominator == g->point.a.real_coeffs());

        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["status"] == "ok");
        CHECK(j["global"]["absolute_error"].get<double>() == report.global_error);
        CHECK(j["system_norm"].get<double>() == report.system_norm);
    }
}

TEST_CASE("coefficient and pole-residue inputs agree")
{
    std::mt19937_64 gen(2718);
    for (int t = 0; t < 6; ++t)
    {
        const auto p   = support::random_poles(gen, 2 + t % 4, -3.0, -0.5, 0.3);
        const auto tf  = support::random_tf(gen, p);
        const auto pr  = partial_fractions(tf);
        std::ostringstream poles, residues;
        poles.precision(17);
        residues.precision(17);
        for (std::size_t k = 0; k < pr.poles.size(); ++k)
        {
            poles << ' ' << pr.poles[k].real() << ',' << pr.poles[k].imag();
            residues << ' ' << pr.residues[k].real() << ',' << pr.residues[k].imag();
        }
        const std::string coeff_text = "numerator:" + join(tf.numerator.real_coeffs()) + "\ndenominator:"
                                       + join(tf.denominator.real_coeffs()) + "\n";
        const std::string pr_text = "poles:" + poles.str() + "\nresidues:" + residues.str() + "\n";
        const auto a = run_job(inline_job(coeff_text));
        const auto b = run_job(inline_job(pr_text));
        REQUIRE(a.code == kExitOk);
        REQUIRE(b.code == kExitOk);
        const double ea = nlohmann::json::parse(a.out)["global"]["absolute_error"].get<double>();
        const double eb = nlohmann::json::parse(b.out)["global"]["absolute_error"].get<double>();
        CHECK(ea == doctest::Approx(eb).epsilon(1e-6));
    }
}

TEST_CASE("ninth-order benchmark file through the command line")
{
    JobSpec job;
    job.input_path = std::string(H2RED_DATA_DIR) + "/ninth_order.sys";
    job.output     = OutputFormat::Structured;
    const auto r   = run_job(job);
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["admissible"].size() == 8);
    CHECK(j["global"]["absolute_error"].get<double>() == doctest::Approx(0.0344).epsilon(0.5e-3 / 0.0344));
    CHECK(j["system_norm"].get<double>() == doctest::Approx(8.8261).epsilon(1e-3 / 8.8261));
}

TEST_CASE("malformed report")
{
    CHECK_THROWS_AS(approximant_from_json("{not json"), Error);
    CHECK_THROWS_AS(approximant_from_json("{\"status\": \"no-admissible\"}"), Error);
}
