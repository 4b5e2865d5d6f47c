#include "h2red/stetter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "balance.hpp"
#include "h2red/error.hpp"

namespace h2red
{

namespace
{

Eigen::VectorXcd random_probe(std::mt19937_64& gen, Eigen::Index n)
{
    std::normal_distribution<double> dist;
    Eigen::VectorXcd r(n);
    for (Eigen::Index k = 0; k < n; ++k)
    {
        r(k) = Complex(dist(gen), dist(gen));
    }
    return r;
}

void measure_defects(MultiplicationMatrices& mm, const MatrixBuildOptions& opts)
{
    const int n = mm.n_vars;
    const auto d = static_cast<Eigen::Index>(mm.dim);
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        norms[static_cast<std::size_t>(i)] = mm.matrices[static_cast<std::size_t>(i)].norm();
    }
    const auto& a = mm.matrices;
    auto at       = [](int i) { return static_cast<std::size_t>(i); };

    mm.defects_exact = mm.dim <= opts.exact_check_dim;
    if (mm.defects_exact)
    {
        for (int i = 0; i < n; ++i)
        {
            for (int j = i + 1; j < n; ++j)
            {
                const double def = (a[at(i)] * a[at(j)] - a[at(j)] * a[at(i)]).norm()
                                   / (norms[at(i)] * norms[at(j)]);
                mm.commutation_defect = std::max(mm.commutation_defect, def);
            }
            Eigen::MatrixXcd g = a[at(i)] * a[at(i)];
            double scale       = norms[at(i)] * norms[at(i)];
            for (int k = 0; k < n; ++k)
            {
                g -= mm.m(i, k) * a[at(k)];
                scale += std::abs(mm.m(i, k)) * norms[at(k)];
            }
            g.diagonal().array() -= mm.mu(i);
            scale += std::abs(mm.mu(i)) * std::sqrt(static_cast<double>(d));
            mm.annihilation_defect = std::max(mm.annihilation_defect, g.norm() / scale);
        }
        return;
    }

    std::mt19937_64 gen(opts.probe_seed);
    for (int p = 0; p < opts.probes; ++p)
    {
        const Eigen::VectorXcd r = random_probe(gen, d);
        const double rn          = r.norm();
        std::vector<Eigen::VectorXcd> ar(at(n));
        for (int i = 0; i < n; ++i)
        {
            ar[at(i)] = a[at(i)] * r;
        }
        for (int i = 0; i < n; ++i)
        {
            for (int j = i + 1; j < n; ++j)
            {
                const double def = (a[at(i)] * ar[at(j)] - a[at(j)] * ar[at(i)]).norm()
                                   / (norms[at(i)] * norms[at(j)] * rn);
                mm.commutation_defect = std::max(mm.commutation_defect, def);
            }
            Eigen::VectorXcd g = a[at(i)] * ar[at(i)] - mm.mu(i) * r;
            double scale       = norms[at(i)] * norms[at(i)]
                           + std::abs(mm.mu(i)) * std::sqrt(static_cast<double>(d));
            for (int k = 0; k < n; ++k)
            {
                g -= mm.m(i, k) * ar[at(k)];
                scale += std::abs(mm.m(i, k)) * norms[at(k)];
            }
            mm.annihilation_defect = std::max(mm.annihilation_defect, g.norm() / (scale * rn));
        }
    }
}

} // namespace

MultiplicationMatrices build_multiplication_matrices(const DiagQuadSystem& sys,
                                                     const MatrixBuildOptions& opts)
{
    const int n       = sys.n_vars();
    const std::size_t dim = sys.dim();
    const double bytes =
        static_cast<double>(n) * static_cast<double>(dim) * static_cast<double>(dim) * sizeof(Complex);
    if (bytes > static_cast<double>(opts.max_bytes))
    {
        throw Error(ErrorKind::InvalidInput,
                    "multiplication matrices need " + std::to_string(bytes / (1 << 20))
                        + " MiB, above the memory cap");
    }

    MultiplicationMatrices mm;
    mm.n_vars = n;
    mm.dim    = dim;
    mm.m      = sys.m();
    mm.mu     = sys.mu();
    const auto d = static_cast<Eigen::Index>(dim);
    mm.matrices.assign(static_cast<std::size_t>(n), Eigen::MatrixXcd::Zero(d, d));

    // Column b of A_i only depends on columns with a smaller bitmask, so one
    // pass in increasing order fills everything.
    for (Bitmask mask = 0; mask < dim; ++mask)
    {
        for (int i = 0; i < n; ++i)
        {
            auto& a           = mm.matrices[static_cast<std::size_t>(i)];
            const Bitmask bit = Bitmask{1} << i;
            if ((mask & bit) == 0)
            {
                a(mask | bit, mask) = Complex(1.0);
                continue;
            }
            const Bitmask rest = mask & ~bit;
            a(rest, mask) += sys.mu()(i);
            for (int j = 0; j < n; ++j)
            {
                const Complex mij = sys.m()(i, j);
                if (mij != Complex(0.0))
                {
                    a.col(mask) += mij * mm.matrices[static_cast<std::size_t>(j)].col(rest);
                }
            }
        }
    }

    measure_defects(mm, opts);
    if (!(mm.commutation_defect <= opts.defect_tol)
        || !(mm.annihilation_defect <= opts.defect_tol))
    {
        throw Error(ErrorKind::Numerical,
                    "commutation defect exceeds tolerance (commutation "
                        + std::to_string(mm.commutation_defect) + ", annihilation "
                        + std::to_string(mm.annihilation_defect) + ")");
    }
    return mm;
}

namespace
{

struct Attempt
{
    std::vector<EigenSolution> accepted;
    std::vector<EigenSolution> rejected;
};

Attempt extract(const MultiplicationMatrices& mm, const EigenOptions& opts, std::uint64_t seed)
{
    const int n  = mm.n_vars;
    const auto d = static_cast<Eigen::Index>(mm.dim);
    auto at      = [](int i) { return static_cast<std::size_t>(i); };

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> magnitude(0.5, 1.5);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> c(at(n));
    for (auto& ci : c)
    {
        ci = sign(gen) ? magnitude(gen) : -magnitude(gen);
    }

    Eigen::MatrixXcd t0 = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < n; ++i)
    {
        t0 += (c[at(i)] / mm.matrices[at(i)].norm()) * mm.matrices[at(i)];
    }
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(d);
    if (opts.balance)
    {
        scale = detail::balance(t0);
    }

    std::vector<Eigen::MatrixXcd> a(at(n));
    std::vector<double> norms(at(n));
    for (int i = 0; i < n; ++i)
    {
        a[at(i)] = scale.cwiseInverse().asDiagonal() * mm.matrices[at(i)] * scale.asDiagonal();
        norms[at(i)] = a[at(i)].norm();
    }

    Eigen::MatrixXcd t;
    if (opts.method == EigenMethod::FirstMatrix)
    {
        t = a[0];
    }
    else
    {
        t = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < n; ++i)
        {
            t += (c[at(i)] / norms[at(i)]) * a[at(i)];
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(t, true);
    if (es.info() != Eigen::Success)
    {
        throw Error(ErrorKind::Numerical, "eigenvalue iteration did not converge");
    }
    const Eigen::MatrixXcd& v = es.eigenvectors();

    const double ratio_tol = opts.residual_tol * std::sqrt(static_cast<double>(d));
    Attempt out;
    std::vector<Eigen::MatrixXcd> av(at(n));
    for (int i = 0; i < n; ++i)
    {
        av[at(i)] = a[at(i)] * v;
    }
    for (Eigen::Index col = 0; col < d; ++col)
    {
        const auto vc   = v.col(col);
        const double vn = vc.norm();
        Eigen::Index peak = 0;
        vc.cwiseAbs().maxCoeff(&peak);

        EigenSolution sol;
        sol.xi.resize(at(n));
        sol.residuals.resize(at(n));
        bool ok = vn > 0.0;
        for (int i = 0; i < n && ok; ++i)
        {
            const auto w     = av[at(i)].col(col);
            const Complex rq = vc.dot(w) / (vn * vn);
            const double res = (w - rq * vc).norm() / (vn * norms[at(i)]);
            const Complex ratio = w(peak) / vc(peak);
            sol.xi[at(i)]        = rq;
            sol.residuals[at(i)] = res;
            if (!(res <= opts.residual_tol)
                || !(std::abs(ratio - rq) <= ratio_tol * norms[at(i)]))
            {
                ok = false;
            }
        }
        (ok ? out.accepted : out.rejected).push_back(std::move(sol));
    }
    return out;
}

double inf_norm(const std::vector<Complex>& x)
{
    double m = 0.0;
    for (const auto& z : x)
    {
        m = std::max(m, std::abs(z));
    }
    return m;
}

std::vector<EigenSolution> cluster(std::vector<EigenSolution> raw, double tol)
{
    std::vector<EigenSolution> out;
    for (auto& s : raw)
    {
        auto same = std::find_if(out.begin(), out.end(), [&](const EigenSolution& o) {
            double diff = 0.0;
            for (std::size_t k = 0; k < s.xi.size(); ++k)
            {
                diff = std::max(diff, std::abs(s.xi[k] - o.xi[k]));
            }
            return diff <= tol * (1.0 + std::max(inf_norm(s.xi), inf_norm(o.xi)));
        });
        if (same == out.end())
        {
            out.push_back(std::move(s));
            continue;
        }
        const int mult = same->multiplicity_hint + 1;
        if (*std::max_element(s.residuals.begin(), s.residuals.end())
            < *std::max_element(same->residuals.begin(), same->residuals.end()))
        {
            *same = std::move(s);
        }
        same->multiplicity_hint = mult;
    }
    return out;
}

} // namespace

EigenSolutionSet common_eigen_solutions(const MultiplicationMatrices& mm, const EigenOptions& opts)
{
    if (mm.n_vars < 1 || mm.matrices.size() != static_cast<std::size_t>(mm.n_vars))
    {
        throw Error(ErrorKind::InvalidInput, "empty multiplication matrix family");
    }
    EigenSolutionSet result;
    std::uint64_t seed = opts.seed;
    for (int attempt = 1; attempt <= std::max(1, opts.max_attempts); ++attempt)
    {
        Attempt a         = extract(mm, opts, seed);
        result.attempts   = attempt;
        result.seed_used  = seed;
        result.rejected   = std::move(a.rejected);
        result.solutions  = cluster(std::move(a.accepted), opts.cluster_tol);
        if (result.rejected.empty())
        {
            return result;
        }
        // next seed from a splitmix64 step
        seed += 0x9e3779b97f4a7c15ULL;
        seed = (seed ^ (seed >> 30)) * 0xbf58476d1ce4e5b9ULL;
        seed = (seed ^ (seed >> 27)) * 0x94d049bb133111ebULL;
        seed ^= seed >> 31;
    }
    throw Error(ErrorKind::Numerical,
                "defective eigenstructure suspected: " + std::to_string(result.rejected.size())
                    + " eigenvectors fail the common-eigenvector residual test");
}

Eigen::MatrixXcd evaluate_poly_at_matrices(const SparsePoly& f, const MultiplicationMatrices& mm)
{
    const auto d = static_cast<Eigen::Index>(mm.dim);
    if (f.n_vars() != mm.n_vars)
    {
        throw Error(ErrorKind::InvalidInput, "polynomial and matrix family differ in variable count");
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [alpha, c] : f.terms())
    {
        Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(d, d) * c;
        for (std::size_t k = 0; k < alpha.size(); ++k)
        {
            for (int e = 0; e < alpha[k]; ++e)
            {
                term = mm.matrices[k] * term;
            }
        }
        out += term;
    }
    return out;
}

Eigen::MatrixXcd build_critical_value_matrix(const MultiplicationMatrices& mm,
                                             const std::vector<Complex>& weights)
{
    if (weights.size() != static_cast<std::size_t>(mm.n_vars))
    {
        throw Error(ErrorKind::InvalidInput, "weight count does not match variable count");
    }
    const auto d = static_cast<Eigen::Index>(mm.dim);
    Eigen::MatrixXcd af = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        if (weights[i] == Complex(0.0))
        {
            continue;
        }
        const auto& a = mm.matrices[i];
        af += weights[i] * (a * (a * a));
    }
    return af;
}

Eigen::MatrixXcd build_critical_value_matrix(const DiagQuadSystem& sys,
                                             const std::vector<Complex>& weights)
{
    return build_critical_value_matrix(build_multiplication_matrices(sys), weights);
}

std::vector<Complex> critical_value_spectrum(const MultiplicationMatrices& mm,
                                             const std::vector<Complex>& weights)
{
    // Scaling found on A_F, then A_F rebuilt from the scaled A_i: polynomials
    // commute with similarity, and cubing the balanced matrices loses less.
    Eigen::MatrixXcd af       = build_critical_value_matrix(mm, weights);
    const Eigen::VectorXd sc  = detail::balance(af);
    MultiplicationMatrices scaled = mm;
    for (auto& a : scaled.matrices)
    {
        a = sc.cwiseInverse().asDiagonal() * a * sc.asDiagonal();
    }
    af = build_critical_value_matrix(scaled, weights);
    detail::balance(af);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(af, false);
    if (es.info() != Eigen::Success)
    {
        throw Error(ErrorKind::Numerical, "critical value matrix: eigenvalue iteration did not converge");
    }
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

} // namespace h2red
