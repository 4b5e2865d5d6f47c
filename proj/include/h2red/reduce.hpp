///
/// \file reduce.hpp
///
/// H2 optimal reduction of a stable SISO system by one degree: builds the
/// first-order system, enumerates all its solutions through the
/// multiplication matrices, recovers the candidate approximants and picks the
/// global minimizer.
///

#ifndef H2RED_REDUCE_HPP
#define H2RED_REDUCE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "h2red/error.hpp"
#include "h2red/foc.hpp"
#include "h2red/stetter.hpp"
#include "h2red/tf.hpp"

namespace h2red
{

enum class SelectionMethod
{
    /// Pointwise criterion values of all enumerated solutions.
    Enumeration,
    /// Levels read from the eigenvalues of the critical value matrix.
    CriticalValueMatrix,
};

struct SolveOptions
{
    std::uint64_t seed     = 0;
    SelectionMethod method = SelectionMethod::Enumeration;
    RecoveryTolerances recovery;
    MatrixBuildOptions matrices;
    /// seed is overwritten by `seed` above.
    EigenOptions eigen;
    /// Relative least-squares residual above which a candidate is rejected.
    double ls_tol = 1e-6;
    /// |phi - ||e/d - b/a||^2| <= crosscheck_tol * (1 + |phi|)
    double crosscheck_tol = 1e-6;
    /// ||xi||_inf <= zero_tol * (1 + max ||xi||_inf) marks the zero solution.
    double zero_tol = 1e-8;
    /// Relative clustering of critical values into levels.
    double level_tol = 1e-8;
    /// |Im phi| <= value_real_tol * (1 + |phi|) counts as a real level.
    double value_real_tol = 1e-8;
    /// Newton steps on x_i^2 = (M x)_i applied to each extracted solution;
    /// a step is kept only when it lowers the residual.
    int newton_steps = 4;
    /// Largest accepted system order.
    int cap = 9;
};

enum class Rejection
{
    None,
    Complex,
    NonHurwitz,
    DegenerateQ0,
    HighResidual,
};

const char* to_string(Rejection r) noexcept;

struct CandidateRecord
{
    /// Always carries xi and criterion; a, b and q0 stay empty for
    /// DegenerateQ0.
    CriticalPoint point;
    Rejection rejection = Rejection::None;
    /// max_i |xi_i^2 - (M xi)_i| / (|xi_i|^2 + (|M| |xi|)_i)
    double system_residual = 0.0;
    double eigen_residual  = 0.0;
    int multiplicity_hint  = 1;
    /// ||e/d - b/a||_2 recomputed from residues (admissible candidates only).
    double h2_error    = 0.0;
    bool crosscheck_ok = true;

    bool admissible() const noexcept
    {
        return rejection == Rejection::None;
    }
};

struct Diagnostics
{
    std::uint64_t seed_used  = 0;
    int eigen_attempts       = 0;
    double vandermonde_cond  = 0.0;
    double m_norm            = 0.0; // ||M||_inf
    double m_residual        = 0.0;
    double commutation_defect  = 0.0;
    double annihilation_defect = 0.0;
    bool defects_exact         = true;
    std::size_t solutions          = 0; // distinct common eigenvalue tuples
    std::size_t rejected_eigvecs   = 0;
    std::size_t zero_solutions     = 0;
    double zero_threshold          = 0.0;
    std::size_t degenerate_q0      = 0;
    std::size_t crosscheck_failures = 0;
    SelectionMethod method = SelectionMethod::Enumeration;
    /// Critical value matrix path: levels visited and whether it agreed with
    /// the enumeration minimum.
    int cvm_levels_visited = 0;
    bool cvm_agrees        = true;
    double t_foc_matrix  = 0.0;
    double t_matrices    = 0.0;
    double t_eigen       = 0.0;
    double t_recovery    = 0.0;
    double t_selection   = 0.0;
    double t_total       = 0.0;
};

struct ReductionReport
{
    double system_norm = 0.0;
    /// Every nonzero solution, admissible or not.
    std::vector<CandidateRecord> candidates;
    /// Indices into `candidates`.
    std::vector<std::size_t> admissible;
    std::optional<std::size_t> global;
    double global_error   = 0.0;
    double relative_error = 0.0;
    /// Distinct real positive criterion values m_1 < ... < m_k.
    std::vector<double> critical_values_sorted;
    Diagnostics diagnostics;

    const CandidateRecord* global_candidate() const
    {
        return global ? &candidates[*global] : nullptr;
    }
};

/// Thrown by solve_reduction when no candidate is admissible; the report is
/// complete apart from the global fields.
class NoAdmissibleError : public Error
{
public:
    explicit NoAdmissibleError(ReductionReport report);
    const ReductionReport& report() const noexcept
    {
        return m_report;
    }

private:
    ReductionReport m_report;
};

/// w_i = 1 / (e(p_i) d'(p_i) d(-p_i))
std::vector<Complex> criterion_weights(const ValidatedSystem& sys);

/// phi(xi) = sum_i w_i xi_i^3, the squared H2 error at a real critical point.
Complex critical_value(const ValidatedSystem& sys, std::span<const Complex> xi);

ReductionReport solve_reduction(const ValidatedSystem& sys, const SolveOptions& opts = {});

///
/// Walks the distinct real positive criterion values in increasing order and
/// returns the index of the best admissible candidate on the first level that
/// has one.
///
std::optional<std::size_t> select_global(const std::vector<CandidateRecord>& candidates,
                                         double level_tol = 1e-8,
                                         double value_real_tol = 1e-8);

/// Distinct real positive values among the candidates' criteria, ascending.
std::vector<double> critical_levels(const std::vector<CandidateRecord>& candidates,
                                    double level_tol = 1e-8, double value_real_tol = 1e-8);

} // namespace h2red

#endif // H2RED_REDUCE_HPP
