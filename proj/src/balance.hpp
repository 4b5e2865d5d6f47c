#ifndef H2RED_SRC_BALANCE_HPP
#define H2RED_SRC_BALANCE_HPP

#include <cmath>

#include <Eigen/Dense>

namespace h2red::detail
{

///
/// Parlett-Reinsch balancing by powers of two. On return `a` holds
/// S^{-1} A S and the diagonal of S is returned. Scaling is exact in binary
/// floating point (barring over/underflow).
///
template <typename Matrix>
Eigen::VectorXd balance(Matrix& a, int max_sweeps = 100)
{
    constexpr double gamma = 0.95;
    const Eigen::Index n   = a.rows();
    Eigen::VectorXd scale  = Eigen::VectorXd::Ones(n);
    bool changed           = true;
    int sweeps             = 0;
    while (changed && sweeps++ < max_sweeps)
    {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            double col = 0.0;
            double row = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    col += std::abs(a(j, i));
                    row += std::abs(a(i, j));
                }
            }
            if (col == 0.0 || row == 0.0)
            {
                continue;
            }
            int exponent = 0;
            std::frexp(row / col, &exponent);
            exponent /= 2;
            if (exponent == 0)
            {
                continue;
            }
            const double scaled_col = std::ldexp(col, exponent);
            const double scaled_row = std::ldexp(row, -exponent);
            if (scaled_col + scaled_row < gamma * (col + row))
            {
                a.row(i) *= std::ldexp(1.0, -exponent);
                a.col(i) *= std::ldexp(1.0, exponent);
                scale(i) *= std::ldexp(1.0, exponent);
                changed = true;
            }
        }
    }
    return scale;
}

} // namespace h2red::detail

#endif // H2RED_SRC_BALANCE_HPP
