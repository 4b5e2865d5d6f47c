// h2reduce: optimal H2 reduction of a SISO system by one degree.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "h2red/cli.hpp"

int main(int argc, char** argv)
{
    using namespace h2red;
    using cli::Profile;

    CLI::App app{"Global H2-optimal reduction of a stable SISO transfer function by one degree"};

    std::string input;
    std::uint64_t seed = 0;
    std::string method = "enum";
    std::string output = "text";
    std::string profile = "default";
    std::optional<double> tol_real;
    std::optional<double> tol_hurwitz;
    std::optional<double> tol_eig;
    bool strip = false;
    std::vector<std::string> relaxation;
    int cap = cli::kDefaultCap;

    const SolveOptions defaults = cli::profile_options(Profile::Default);

    app.add_option("-i,--input", input, "System file (numerator/denominator or poles/residues)");
    app.add_option("--relaxation", relaxation, "Relaxation test system, e.g. N=5 alpha=0.78")
        ->expected(2);
    app.add_option("--seed", seed, "Seed for the random eigenvector combination")
        ->capture_default_str();
    app.add_option("--method", method, "Global selection: enum (all critical points) or cvm "
                                        "(critical value matrix walk)")
        ->check(CLI::IsMember({"enum", "cvm"}))
        ->capture_default_str();
    app.add_option("--tol-real", tol_real,
                   "Realness tolerance on approximant coefficients (default "
                       + std::to_string(defaults.recovery.real) + ")");
    app.add_option("--tol-hurwitz", tol_hurwitz,
                   "Required stability margin of approximant poles (default "
                       + std::to_string(defaults.recovery.hurwitz) + ")");
    app.add_option("--tol-eig", tol_eig,
                   "Relative common-eigenvector residual tolerance (default "
                       + std::to_string(defaults.eigen.residual_tol) + ")");
    app.add_option("--profile", profile, "Tolerance bundle: strict, default or loose")
        ->check(CLI::IsMember({"strict", "default", "loose"}))
        ->capture_default_str();
    app.add_flag("--strip-feedthrough", strip, "Remove a direct feedthrough term first");
    app.add_option("--output", output, "Report format: text or structured (JSON)")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
    app.add_option("--cap", cap, "Largest accepted system order (hard limit "
                                     + std::to_string(cli::kHardCap) + ")")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    static const std::map<std::string, Profile> profiles{
        {"strict", Profile::Strict}, {"default", Profile::Default}, {"loose", Profile::Loose}};

    cli::JobSpec job;
    job.options = cli::profile_options(profiles.at(profile));
    job.options.seed   = seed;
    job.options.cap    = cap;
    job.options.method = method == "cvm" ? SelectionMethod::CriticalValueMatrix
                                         : SelectionMethod::Enumeration;
    if (tol_real)
    {
        job.options.recovery.real = *tol_real;
    }
    if (tol_hurwitz)
    {
        job.options.recovery.hurwitz = *tol_hurwitz;
    }
    if (tol_eig)
    {
        job.options.eigen.residual_tol = *tol_eig;
    }
    job.strip_feedthrough = strip;
    job.output = output == "structured" ? cli::OutputFormat::Structured : cli::OutputFormat::Text;
    try
    {
        if (!input.empty())
        {
            job.input_path = input;
        }
        if (!relaxation.empty())
        {
            job.relaxation = cli::parse_relaxation(relaxation);
        }
    }
    catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitBadInput;
    }
    return cli::run(job, std::cout, std::cerr);
}
