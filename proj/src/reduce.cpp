#include "h2red/reduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "balance.hpp"

namespace h2red
{

const char* to_string(Rejection r) noexcept
{
    switch (r)
    {
    case Rejection::None:
        return "admissible";
    case Rejection::Complex:
        return "complex";
    case Rejection::NonHurwitz:
        return "non-hurwitz";
    case Rejection::DegenerateQ0:
        return "degenerate-q0";
    case Rejection::HighResidual:
        return "high-residual";
    }
    return "unknown";
}

NoAdmissibleError::NoAdmissibleError(ReductionReport report)
    : Error(ErrorKind::NoAdmissible, "no admissible critical point found"),
      m_report(std::move(report))
{
}

std::vector<Complex> criterion_weights(const ValidatedSystem& sys)
{
    std::vector<Complex> w(static_cast<std::size_t>(sys.order()));
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        w[i] = 1.0 / (sys.e_at_poles()[i] * sys.dprime_at_poles()[i] * sys.d_at_minus_poles()[i]);
    }
    return w;
}

Complex critical_value(const ValidatedSystem& sys, std::span<const Complex> xi)
{
    const auto w = criterion_weights(sys);
    if (xi.size() != w.size())
    {
        throw Error(ErrorKind::InvalidInput, "solution vector length does not match system order");
    }
    Complex phi(0.0);
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        phi += xi[i] * xi[i] * xi[i] * w[i];
    }
    return phi;
}

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_real_value(Complex phi, double tol)
{
    return std::abs(phi.imag()) <= tol * (1.0 + std::abs(phi));
}

double system_residual(const Eigen::MatrixXcd& m, std::span<const Complex> xi)
{
    const Eigen::VectorXcd x =
        Eigen::Map<const Eigen::VectorXcd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    const Eigen::VectorXcd mx = m * x;
    const Eigen::VectorXd scale =
        x.cwiseAbs2() + m.cwiseAbs() * x.cwiseAbs();
    double r = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        if (scale(i) > 0.0)
        {
            r = std::max(r, std::abs(x(i) * x(i) - mx(i)) / scale(i));
        }
    }
    return r;
}

// Newton on F(x) = x.^2 - M x, J = 2 diag(x) - M.
std::vector<Complex> polish(const Eigen::MatrixXcd& m, const std::vector<Complex>& xi, int steps)
{
    Eigen::VectorXcd x =
        Eigen::Map<const Eigen::VectorXcd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    auto residual = [&m](const Eigen::VectorXcd& y) {
        return (y.cwiseProduct(y) - m * y).norm();
    };
    double r = residual(x);
    for (int k = 0; k < steps && r > 0.0; ++k)
    {
        Eigen::MatrixXcd jac = -m;
        jac.diagonal() += 2.0 * x;
        const Eigen::VectorXcd step = jac.partialPivLu().solve(x.cwiseProduct(x) - m * x);
        if (!step.allFinite())
        {
            break;
        }
        const Eigen::VectorXcd next = x - step;
        const double rn             = residual(next);
        if (!(rn < r))
        {
            break;
        }
        x = next;
        r = rn;
    }
    return std::vector<Complex>(x.data(), x.data() + x.size());
}

CandidateRecord make_record(const ValidatedSystem& sys, const Eigen::MatrixXcd& m,
                            const std::vector<Complex>& xi, const SolveOptions& opts)
{
    CandidateRecord rec;
    rec.system_residual = system_residual(m, xi);
    try
    {
        rec.point = recover_candidate(sys, xi, opts.recovery);
    }
    catch (const Error& e)
    {
        if (e.kind() != ErrorKind::Numerical)
        {
            throw;
        }
        rec.point.xi = xi;
        rec.rejection = Rejection::DegenerateQ0;
    }
    rec.point.criterion = critical_value(sys, xi);
    if (rec.rejection == Rejection::DegenerateQ0)
    {
        return rec;
    }
    if (!rec.point.is_real)
    {
        rec.rejection = Rejection::Complex;
    }
    else if (!rec.point.is_hurwitz)
    {
        rec.rejection = Rejection::NonHurwitz;
    }
    else if (!(rec.point.ls_residual <= opts.ls_tol))
    {
        rec.rejection = Rejection::HighResidual;
    }
    if (rec.admissible())
    {
        try
        {
            rec.h2_error = h2_distance(sys, TransferFunction::make(rec.point.b, rec.point.a));
            const double phi = rec.point.criterion.real();
            rec.crosscheck_ok =
                std::abs(phi - rec.h2_error * rec.h2_error) <= opts.crosscheck_tol * (1.0 + std::abs(phi))
                && is_real_value(rec.point.criterion, opts.value_real_tol);
        }
        catch (const Error&)
        {
            rec.h2_error      = std::numeric_limits<double>::quiet_NaN();
            rec.crosscheck_ok = false;
        }
    }
    return rec;
}

std::vector<double> cluster_levels(std::vector<double> values, double tol)
{
    std::sort(values.begin(), values.end());
    std::vector<double> levels;
    for (double v : values)
    {
        if (levels.empty() || v - levels.back() > tol * std::max(1e-300, std::abs(v)))
        {
            levels.push_back(v);
        }
    }
    return levels;
}

double max_abs(std::span<const Complex> x)
{
    double m = 0.0;
    for (const auto& z : x)
    {
        m = std::max(m, std::abs(z));
    }
    return m;
}

struct CvmResult
{
    std::optional<CandidateRecord> found;
    int levels_visited = 0;
};

// Levels from the eigenvalues of A_F; xi from the matching eigenvectors.
CvmResult cvm_walk(const ValidatedSystem& sys, const Eigen::MatrixXcd& m,
                   const MultiplicationMatrices& mm, const SolveOptions& opts)
{
    const auto w      = criterion_weights(sys);
    Eigen::MatrixXcd af = build_critical_value_matrix(mm, w);
    const Eigen::VectorXd scale = detail::balance(af);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(af, true);
    if (es.info() != Eigen::Success)
    {
        throw Error(ErrorKind::Numerical, "critical value matrix: eigenvalue iteration did not converge");
    }
    const auto& lambda = es.eigenvalues();
    const auto& vecs   = es.eigenvectors();

    // Eigenvalue errors scale with the whole spectrum, so realness is judged
    // against the largest eigenvalue and small negative values are kept.
    const double spread = opts.value_real_tol * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    auto on_real_axis   = [spread](Complex z) {
        return std::abs(z.imag()) <= spread && z.real() > -spread;
    };
    std::vector<double> real_positive;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
    {
        if (on_real_axis(lambda(k)))
        {
            real_positive.push_back(lambda(k).real());
        }
    }
    const auto levels = cluster_levels(real_positive, opts.level_tol);

    std::vector<Eigen::MatrixXcd> a(mm.matrices.size());
    std::vector<double> norms(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        a[i]     = scale.cwiseInverse().asDiagonal() * mm.matrices[i] * scale.asDiagonal();
        norms[i] = a[i].norm();
    }

    CvmResult out;
    for (double level : levels)
    {
        ++out.levels_visited;
        std::optional<CandidateRecord> best;
        for (Eigen::Index k = 0; k < lambda.size(); ++k)
        {
            if (!on_real_axis(lambda(k))
                || std::abs(lambda(k).real() - level) > opts.level_tol * std::abs(level))
            {
                continue;
            }
            const Eigen::VectorXcd v = vecs.col(k);
            const double vn          = v.norm();
            std::vector<Complex> xi(a.size());
            bool ok = true;
            for (std::size_t i = 0; i < a.size() && ok; ++i)
            {
                const Eigen::VectorXcd av = a[i] * v;
                xi[i]                     = v.dot(av) / (vn * vn);
                ok = (av - xi[i] * v).norm() / (vn * norms[i]) <= opts.eigen.residual_tol;
            }
            if (!ok || max_abs(xi) == 0.0)
            {
                continue;
            }
            CandidateRecord rec = make_record(sys, m, polish(m, xi, opts.newton_steps), opts);
            if (rec.admissible()
                && (!best || rec.point.criterion.real() < best->point.criterion.real()))
            {
                best = std::move(rec);
            }
        }
        if (best)
        {
            out.found = std::move(best);
            return out;
        }
    }
    return out;
}

double xi_distance(const std::vector<Complex>& x, const std::vector<Complex>& y)
{
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        d = std::max(d, std::abs(x[k] - y[k]));
    }
    return d / (1.0 + std::max(max_abs(x), max_abs(y)));
}

} // namespace

std::vector<double> critical_levels(const std::vector<CandidateRecord>& candidates,
                                    double level_tol, double value_real_tol)
{
    std::vector<double> values;
    for (const auto& c : candidates)
    {
        const Complex phi = c.point.criterion;
        if (is_real_value(phi, value_real_tol) && phi.real() > 0.0)
        {
            values.push_back(phi.real());
        }
    }
    return cluster_levels(std::move(values), level_tol);
}

std::optional<std::size_t> select_global(const std::vector<CandidateRecord>& candidates,
                                         double level_tol, double value_real_tol)
{
    for (double level : critical_levels(candidates, level_tol, value_real_tol))
    {
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < candidates.size(); ++k)
        {
            const auto& c     = candidates[k];
            const Complex phi = c.point.criterion;
            if (!c.admissible() || !is_real_value(phi, value_real_tol)
                || std::abs(phi.real() - level) > level_tol * level)
            {
                continue;
            }
            if (!best || phi.real() < candidates[*best].point.criterion.real())
            {
                best = k;
            }
        }
        if (best)
        {
            return best;
        }
    }
    return std::nullopt;
}

ReductionReport solve_reduction(const ValidatedSystem& sys, const SolveOptions& opts)
{
    const auto t_start = Clock::now();
    const int n        = sys.order();
    if (n > opts.cap)
    {
        throw Error(ErrorKind::InvalidInput, "system order " + std::to_string(n)
                                                 + " exceeds the order cap "
                                                 + std::to_string(opts.cap));
    }

    ReductionReport report;
    auto& diag          = report.diagnostics;
    diag.method         = opts.method;
    report.system_norm  = h2_norm(sys);

    auto t0                   = Clock::now();
    const Eigen::MatrixXcd m  = build_foc_matrix(sys, &diag.m_residual);
    {
        std::vector<Complex> minus(sys.poles().size());
        std::transform(sys.poles().begin(), sys.poles().end(), minus.begin(),
                       [](const Complex& p) { return -p; });
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vandermonde_matrix(minus));
        const auto& sv        = svd.singularValues();
        diag.vandermonde_cond = sv(0) / sv(sv.size() - 1);
    }
    diag.m_norm       = m.cwiseAbs().rowwise().sum().maxCoeff();
    diag.t_foc_matrix = seconds_since(t0);

    t0 = Clock::now();
    const MultiplicationMatrices mm =
        build_multiplication_matrices(DiagQuadSystem(m, std::max(opts.cap, n)), opts.matrices);
    diag.commutation_defect  = mm.commutation_defect;
    diag.annihilation_defect = mm.annihilation_defect;
    diag.defects_exact       = mm.defects_exact;
    diag.t_matrices          = seconds_since(t0);

    t0                  = Clock::now();
    EigenOptions eopts  = opts.eigen;
    eopts.seed          = opts.seed;
    const auto solutions = common_eigen_solutions(mm, eopts);
    diag.seed_used        = solutions.seed_used;
    diag.eigen_attempts   = solutions.attempts;
    diag.rejected_eigvecs = solutions.rejected.size();
    diag.solutions        = solutions.solutions.size();
    diag.t_eigen          = seconds_since(t0);

    t0 = Clock::now();
    double largest = 0.0;
    for (const auto& s : solutions.solutions)
    {
        largest = std::max(largest, max_abs(s.xi));
    }
    diag.zero_threshold = opts.zero_tol * (1.0 + largest);
    for (const auto& s : solutions.solutions)
    {
        if (max_abs(s.xi) <= diag.zero_threshold)
        {
            ++diag.zero_solutions;
            continue;
        }
        CandidateRecord rec = make_record(sys, m, polish(m, s.xi, opts.newton_steps), opts);
        rec.eigen_residual  = *std::max_element(s.residuals.begin(), s.residuals.end());
        rec.multiplicity_hint = s.multiplicity_hint;
        report.candidates.push_back(std::move(rec));
    }
    if (diag.zero_solutions == 0)
    {
        throw Error(ErrorKind::Numerical, "zero solution missing from the computed spectrum");
    }
    const std::size_t bound = (std::size_t{1} << n) - 1;
    if (report.candidates.size() > bound)
    {
        throw Error(ErrorKind::Numerical,
                    "solution count " + std::to_string(report.candidates.size())
                        + " exceeds the bound 2^N - 1");
    }
    for (std::size_t k = 0; k < report.candidates.size(); ++k)
    {
        const auto& c = report.candidates[k];
        if (c.rejection == Rejection::DegenerateQ0)
        {
            ++diag.degenerate_q0;
        }
        if (c.admissible())
        {
            report.admissible.push_back(k);
            if (!c.crosscheck_ok)
            {
                ++diag.crosscheck_failures;
            }
        }
    }
    report.critical_values_sorted =
        critical_levels(report.candidates, opts.level_tol, opts.value_real_tol);
    diag.t_recovery = seconds_since(t0);

    t0 = Clock::now();
    const auto enumerated = select_global(report.candidates, opts.level_tol, opts.value_real_tol);
    if (opts.method == SelectionMethod::Enumeration)
    {
        report.global = enumerated;
    }
    else
    {
        CvmResult walk          = cvm_walk(sys, m, mm, opts);
        diag.cvm_levels_visited = walk.levels_visited;
        if (walk.found)
        {
            std::optional<std::size_t> match;
            for (std::size_t k = 0; k < report.candidates.size(); ++k)
            {
                if (xi_distance(report.candidates[k].point.xi, walk.found->point.xi) <= 1e-6)
                {
                    match = k;
                    break;
                }
            }
            if (!match)
            {
                report.candidates.push_back(std::move(*walk.found));
                match = report.candidates.size() - 1;
            }
            report.global = match;
        }
        diag.cvm_agrees = report.global == enumerated;
    }
    diag.t_selection = seconds_since(t0);
    diag.t_total     = seconds_since(t_start);

    if (!report.global)
    {
        throw NoAdmissibleError(std::move(report));
    }
    const auto& g         = report.candidates[*report.global];
    report.global_error   = g.h2_error;
    report.relative_error = report.system_norm > 0.0 ? g.h2_error / report.system_norm : 0.0;
    return report;
}

} // namespace h2red
