///
/// \file stetter.hpp
///
/// Multiplication matrices of the quotient ring of a diagonal-quadratic
/// system and extraction of its solutions as common eigenvectors.
///

#ifndef H2RED_STETTER_HPP
#define H2RED_STETTER_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "h2red/dqideal.hpp"

namespace h2red
{

struct MatrixBuildOptions
{
    /// Relative Frobenius bound on commutation and annihilation defects.
    double defect_tol = 1e-10;
    /// Above this dimension the defects are estimated with random probes
    /// instead of full products.
    std::size_t exact_check_dim = 64;
    int probes                  = 4;
    std::uint64_t probe_seed    = 0x5eed;
    /// Storage cap for the N dense D x D complex matrices.
    std::size_t max_bytes = std::size_t{2} << 30;
};

///
/// A_i is the matrix of multiplication by x_i on span{x^b}, column b holding
/// the normal form of x_i x^b.
///
struct MultiplicationMatrices
{
    int n_vars      = 0;
    std::size_t dim = 0;
    std::vector<Eigen::MatrixXcd> matrices;
    Eigen::MatrixXcd m;
    Eigen::VectorXcd mu;
    /// max_{i<j} ||A_i A_j - A_j A_i||_F / (||A_i||_F ||A_j||_F)
    double commutation_defect = 0.0;
    /// max_i ||A_i^2 - sum_k m_ik A_k - mu_i I||_F / (||A_i||_F^2 + sum_k |m_ik| ||A_k||_F + |mu_i| sqrt(D))
    double annihilation_defect = 0.0;
    bool defects_exact         = true;
};

/// Throws Numerical "commutation defect exceeds tolerance" when a defect
/// check fails, InvalidInput when the storage cap would be exceeded.
MultiplicationMatrices build_multiplication_matrices(const DiagQuadSystem& sys,
                                                     const MatrixBuildOptions& opts = {});

enum class EigenMethod
{
    /// Eigenvectors of a seeded random combination sum_i c_i A_i.
    RandomCombination,
    /// Eigenvectors of A_0 alone; breaks down when A_0 has repeated
    /// eigenvalues. Kept for comparison.
    FirstMatrix,
};

struct EigenOptions
{
    std::uint64_t seed  = 0;
    double residual_tol = 1e-7; // relative to ||A_i||_F
    double cluster_tol  = 1e-8; // relative to 1 + ||xi||_inf
    EigenMethod method  = EigenMethod::RandomCombination;
    int max_attempts    = 2;
    bool balance        = true;
};

struct EigenSolution
{
    std::vector<Complex> xi;
    /// ||A_i v - xi_i v|| / (||v|| ||A_i||_F) per variable, measured in the
    /// balanced basis.
    std::vector<double> residuals;
    int multiplicity_hint = 1;
};

struct EigenSolutionSet
{
    std::vector<EigenSolution> solutions;
    /// Eigenvectors of the last attempt that failed the residual test.
    std::vector<EigenSolution> rejected;
    std::uint64_t seed_used = 0;
    int attempts            = 0;
};

///
/// All distinct common eigenvalue tuples of the A_i. Each eigenvector of the
/// combination matrix yields xi_i as a Rayleigh quotient, cross-checked by the
/// component ratio at the largest entry. When some eigenvector fails the
/// residual test the extraction is repeated with a derived seed; a second
/// failure throws Numerical "defective eigenstructure suspected".
///
EigenSolutionSet common_eigen_solutions(const MultiplicationMatrices& mm,
                                        const EigenOptions& opts = {});

/// f(A_0, ..., A_{N-1}); the constant polynomial maps to a multiple of I.
Eigen::MatrixXcd evaluate_poly_at_matrices(const SparsePoly& f,
                                           const MultiplicationMatrices& mm);

/// A_F = sum_i w_i A_i^3
Eigen::MatrixXcd build_critical_value_matrix(const MultiplicationMatrices& mm,
                                             const std::vector<Complex>& weights);
Eigen::MatrixXcd build_critical_value_matrix(const DiagQuadSystem& sys,
                                             const std::vector<Complex>& weights);

///
/// Eigenvalues of A_F, computed after power-of-two balancing. These are the
/// critical values phi(xi) over all common eigenvalue tuples.
///
std::vector<Complex> critical_value_spectrum(const MultiplicationMatrices& mm,
                                             const std::vector<Complex>& weights);

} // namespace h2red

#endif // H2RED_STETTER_HPP
