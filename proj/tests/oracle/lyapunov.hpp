// H2 inner products through state-space Sylvester equations, and a
// multi-start search for the best stable approximant of order r <= 2.

#ifndef H2RED_TESTS_ORACLE_LYAPUNOV_HPP
#define H2RED_TESTS_ORACLE_LYAPUNOV_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle
{

struct StateSpace
{
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::RowVectorXd c;
};

// Controllable canonical form of num/den (descending, deg num < deg den).
inline StateSpace realize(const std::vector<double>& num_desc, const std::vector<double>& den_desc)
{
    const auto n    = static_cast<Eigen::Index>(den_desc.size() - 1);
    const double d0 = den_desc[0];
    StateSpace ss{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), Eigen::RowVectorXd::Zero(n)};
    for (Eigen::Index i = 0; i + 1 < n; ++i)
    {
        ss.a(i, i + 1) = 1.0;
    }
    // last row: -a_0 ... -a_{n-1} (ascending, monic)
    for (Eigen::Index k = 0; k < n; ++k)
    {
        ss.a(n - 1, k) = -den_desc[static_cast<std::size_t>(n - k)] / d0;
    }
    ss.b(n - 1) = 1.0;
    const auto m = static_cast<Eigen::Index>(num_desc.size());
    for (Eigen::Index k = 0; k < m; ++k)
    {
        // num_desc[k] multiplies s^{m-1-k}
        ss.c(m - 1 - k) = num_desc[static_cast<std::size_t>(k)] / d0;
    }
    return ss;
}

// <F, G> = C_f X C_g^T with A_f X + X A_g^T + B_f B_g^T = 0.
inline double inner(const StateSpace& f, const StateSpace& g)
{
    const auto n = f.a.rows();
    const auto m = g.a.rows();
    const Eigen::MatrixXd k = Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(m, m), f.a).eval()
                              + Eigen::kroneckerProduct(g.a, Eigen::MatrixXd::Identity(n, n)).eval();
    const Eigen::MatrixXd rhs = -(f.b * g.b.transpose());
    const Eigen::VectorXd vx = k.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * m));
    const Eigen::Map<const Eigen::MatrixXd> x(vx.data(), n, m);
    return (f.c * x * g.c.transpose())(0, 0);
}

inline double h2_norm(const StateSpace& f)
{
    return std::sqrt(std::max(0.0, inner(f, f)));
}

// Best squared error over numerators for a fixed monic denominator
// (descending), and that numerator.
inline double projected_error(const StateSpace& g, double g_norm_sq,
                              const std::vector<double>& den_desc,
                              std::vector<double>* num_out = nullptr)
{
    const std::size_t r = den_desc.size() - 1;
    std::vector<StateSpace> basis;
    for (std::size_t k = 0; k < r; ++k)
    {
        std::vector<double> num(r, 0.0);
        num[r - 1 - k] = 1.0; // s^k
        basis.push_back(realize(num, den_desc));
    }
    Eigen::MatrixXd h(r, r);
    Eigen::VectorXd v(r);
    for (std::size_t i = 0; i < r; ++i)
    {
        v(i) = inner(g, basis[i]);
        for (std::size_t j = 0; j < r; ++j)
        {
            h(i, j) = inner(basis[i], basis[j]);
        }
    }
    const Eigen::VectorXd coef = h.ldlt().solve(v);
    if (num_out != nullptr)
    {
        num_out->assign(r, 0.0);
        for (std::size_t k = 0; k < r; ++k)
        {
            (*num_out)[r - 1 - k] = coef(k);
        }
    }
    return g_norm_sq - v.dot(coef);
}

inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, int iters = 4000)
{
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
    {
        s[i + 1][i] += step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
    {
        fv[i] = f(s[i]);
    }
    for (int it = 0; it < iters; ++it)
    {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
        {
            idx[i] = i;
        }
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
        if (std::abs(fv[worst] - fv[best]) <= 1e-16 * (std::abs(fv[best]) + 1e-300))
        {
            double spread = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                spread = std::max(spread, std::abs(s[worst][i] - s[best][i]));
            }
            if (spread < 1e-12)
            {
                break;
            }
        }
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
        {
            if (i != worst)
            {
                for (std::size_t k = 0; k < n; ++k)
                {
                    c[k] += s[i][k] / static_cast<double>(n);
                }
            }
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
            {
                p[k] = c[k] + t * (s[worst][k] - c[k]);
            }
            return p;
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fv[best])
        {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr)
            {
                s[worst] = xe;
                fv[worst] = fe;
            }
            else
            {
                s[worst] = xr;
                fv[worst] = fr;
            }
        }
        else if (fr < fv[second])
        {
            s[worst] = xr;
            fv[worst] = fr;
        }
        else
        {
            const auto xc = along(0.5);
            const double fc = f(xc);
            if (fc < fv[worst])
            {
                s[worst] = xc;
                fv[worst] = fc;
            }
            else
            {
                for (std::size_t i = 0; i <= n; ++i)
                {
                    if (i != best)
                    {
                        for (std::size_t k = 0; k < n; ++k)
                        {
                            s[i][k] = s[best][k] + 0.5 * (s[i][k] - s[best][k]);
                        }
                        fv[i] = f(s[i]);
                    }
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
    {
        if (fv[i] < fv[best])
        {
            best = i;
        }
    }
    return s[best];
}

struct BestApproximant
{
    double error_sq = std::numeric_limits<double>::infinity();
    std::vector<double> numerator;
    std::vector<double> denominator;
};

// Global search over stable monic denominators of order r in {1, 2}:
// a = s + e^{t0} or s^2 + e^{t1} s + e^{t0}, a dense start grid in t, each
// start refined by Nelder-Mead on the projected error.
inline BestApproximant best_stable_approximant(const std::vector<double>& num_desc,
                                               const std::vector<double>& den_desc, int r)
{
    const StateSpace g = realize(num_desc, den_desc);
    const double gn    = inner(g, g);
    auto den_of = [r](const std::vector<double>& t) {
        if (r == 1)
        {
            return std::vector<double>{1.0, std::exp(t[0])};
        }
        return std::vector<double>{1.0, std::exp(t[1]), std::exp(t[0])};
    };
    auto cost = [&](const std::vector<double>& t) {
        for (double x : t)
        {
            if (std::abs(x) > 30.0)
            {
                return std::numeric_limits<double>::infinity();
            }
        }
        return projected_error(g, gn, den_of(t));
    };
    BestApproximant best;
    const int grid = r == 1 ? 41 : 17;
    std::vector<std::vector<double>> starts;
    for (int i = 0; i < grid; ++i)
    {
        const double ti = -6.0 + 12.0 * i / (grid - 1);
        if (r == 1)
        {
            starts.push_back({ti});
            continue;
        }
        for (int j = 0; j < grid; ++j)
        {
            starts.push_back({ti, -6.0 + 12.0 * j / (grid - 1)});
        }
    }
    // refine only the most promising starts
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t k = 0; k < starts.size(); ++k)
    {
        ranked.emplace_back(cost(starts[k]), k);
    }
    std::sort(ranked.begin(), ranked.end());
    const std::size_t keep = std::min<std::size_t>(ranked.size(), 12);
    for (std::size_t q = 0; q < keep; ++q)
    {
        auto t = nelder_mead(cost, starts[ranked[q].second], 0.3);
        t      = nelder_mead(cost, t, 0.01);
        const double v = cost(t);
        if (v < best.error_sq)
        {
            best.error_sq    = v;
            best.denominator = den_of(t);
            projected_error(g, gn, best.denominator, &best.numerator);
        }
    }
    return best;
}

} // namespace oracle

#endif
