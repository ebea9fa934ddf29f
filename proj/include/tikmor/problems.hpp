#ifndef TIKMOR_PROBLEMS_HPP
#define TIKMOR_PROBLEMS_HPP

#include "tikmor/linop.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>

namespace tikmor
{

///
/// Reproducible random stream.
///
/// Uniforms are the top 53 bits of a std::mt19937_64 draw scaled by 2^-53;
/// normals use the Box-Muller transform on pairs of those uniforms, returning
/// the cosine branch first and the sine branch on the next call. Both rules
/// are fixed so that a seed identifies a problem independently of the
/// standard library in use.
///
class SeededStream
{
public:
    explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

    /// uniform on [0, 1)
    double uniform();
    /// uniform on [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian();

private:
    std::mt19937_64 engine_;
    double          spare_     = 0.0;
    bool            has_spare_ = false;
};

/// Linear inverse problem b = A x_ex + e with noise level epsilon.
struct InverseProblem
{
    InverseProblem(LinearOperator a, Vector b, double eps)
        : op(std::move(a)), rhs(std::move(b)), noise_level(eps)
    {
    }

    LinearOperator        op;
    Vector                rhs;
    /// epsilon, the assumed noise norm
    double                noise_level = 0.0;
    /// tolerance factor eta >= 1 in ||Ax - b|| = eta * epsilon
    double                eta         = 1.0;
    std::optional<Vector> ground_truth;

    // Noise bookkeeping, informative only.
    double        sigma          = 0.0;
    double        noise_norm     = 0.0; // realized ||e||
    double        noise_fraction = 0.0;
    double        exact_rhs_norm = 0.0; // ||b_ex||
    std::uint64_t seed           = 0;
    std::string   generator;

    /// eta * epsilon, the residual norm the solvers aim for
    double discrepancy() const noexcept { return eta * noise_level; }
};

///
/// A and x_ex with i.i.d. U(-1,1) entries, Gaussian noise with
/// sigma = noise_fraction ||b_ex|| / sqrt(m) and epsilon = sigma sqrt(m).
///
/// Draw order from the stream: A column-major, then x_ex, then e.
///
InverseProblem random_uniform_problem(Index m, Index n, double noise_fraction, std::uint64_t seed);

/// x_ex,i = sin(i h), h = 2 pi / (n + 1), i = 1..n; b = A x_ex + e as above.
InverseProblem sine_wave_problem(LinearOperator A, double noise_fraction, std::uint64_t seed);

/// Adds noise to A x_ex using the same recipe as the generators.
InverseProblem make_noisy_problem(LinearOperator A, Vector x_exact, double noise_fraction,
                                  std::uint64_t seed);

///
/// Standard form of the general-form problem with regularization matrix L and
/// shift x0: operator A L^{-1}, rhs b - A x0, same noise level. Solutions z
/// map back through op.priorconditioned()->recover(z).
///
InverseProblem standard_form(const InverseProblem& p, const RegularizationMatrix& L,
                             const Vector& x0);

struct RelativeStats
{
    /// ||x - x_ex|| / ||x_ex||; absent without a usable ground truth
    std::optional<double> rel_error;
    /// ||Ax - b|| / ||b||
    double rel_residual    = 0.0;
    /// epsilon / ||b||
    double rel_discrepancy = 0.0;
};

RelativeStats relative_stats(const InverseProblem& p, const Vector& x);

//
// Problem directories: A.mtx (Matrix Market), b.txt and optional x_true.txt
// (one value per line), meta.txt (flat key=value).
//
void           save_problem(const std::filesystem::path& dir, const InverseProblem& p);
InverseProblem load_problem(const std::filesystem::path& dir);

void   write_vector(const std::filesystem::path& path, const Vector& v);
Vector read_vector(const std::filesystem::path& path);

} // namespace tikmor

#endif // TIKMOR_PROBLEMS_HPP
