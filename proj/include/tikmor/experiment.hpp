#ifndef TIKMOR_EXPERIMENT_HPP
#define TIKMOR_EXPERIMENT_HPP

#include "tikmor/problems.hpp"
#include "tikmor/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tikmor
{

//
// Experiment configuration. The file format is INI-like:
//
//   [problem]
//   generator = random_uniform     ; random_uniform | sine_wave | matrix_market | directory
//   m = 700
//   n = 500
//   noise = 0.1
//
//   [experiment]
//   repetitions = 20
//   seed = 1
//   output = out/table1
//
//   [solver.case2]
//   method = ntm                   ; ntm | pntm | gbit | sirt | cgls-pc
//   step_rule = case2
//
//   [curve]
//   alpha_min = 1e-3
//   alpha_max = 1e3
//   points = 20
//
// Comments start with ';'. Unknown sections and keys are rejected.
//

struct ProblemSpec
{
    std::string           generator = "random_uniform";
    Index                 m         = 0;
    Index                 n         = 0;
    double                noise     = 0.1;
    double                eta       = 1.0;
    std::filesystem::path matrix; // matrix_market
    std::filesystem::path dir;    // directory
    /// rhs policy for matrix_market: "sine" (sine ground truth plus noise) or "file"
    std::string           rhs = "sine";
    std::filesystem::path rhs_file;
    std::optional<double> epsilon; // required with rhs = file
    /// optional image shape of x for SSIM reporting
    Index                 image_width  = 0;
    Index                 image_height = 0;
};

struct SolverSpec
{
    std::string                        name;
    std::string                        method;
    std::map<std::string, std::string> params;
};

struct CurveSpec
{
    double alpha_min = 1e-3;
    double alpha_max = 1e3;
    Index  points    = 20;
};

struct ExperimentConfig
{
    ProblemSpec             problem;
    std::vector<SolverSpec> solvers;
    Index                   repetitions = 1;
    std::uint64_t           seed        = 1;
    std::filesystem::path   output      = "out";
    CurveSpec               curve;
    /// every key as read, "section.key" -> value, in file order
    std::vector<std::pair<std::string, std::string>> echo;
};

/// Throws ConfigError on malformed input, unknown keys or invalid values.
ExperimentConfig parse_config(std::istream& in);
/// As parse_config; relative paths in the file resolve against its directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Problem instance for one seed.
InverseProblem build_problem(const ProblemSpec& spec, std::uint64_t seed);

struct RunRecord
{
    std::string           solver;
    std::string           method;
    std::uint64_t         seed = 0;
    std::string           status; // solver status, or "error"
    std::string           message;
    bool                  converged  = false;
    Index                 iterations = 0;
    std::optional<double> alpha;
    double                res_norm        = 0.0;
    double                rel_residual    = 0.0;
    double                rel_discrepancy = 0.0;
    std::optional<double> rel_error;
    std::optional<double> ssim;
    double                seconds = 0.0;
};

struct MethodSummary
{
    std::string           solver;
    Index                 runs      = 0;
    Index                 converged = 0;
    // statistics over converged runs; sample standard deviation
    std::optional<double> mean_iters, sd_iters, mean_alpha, sd_alpha;
    std::optional<double> mean_rel_residual, mean_rel_error;
};

struct ExperimentSummary
{
    std::vector<RunRecord>     runs;
    std::vector<MethodSummary> methods;

    bool all_converged() const noexcept;
};

/// Runs one solver; fills `trace` and `schema` for the trace CSV.
RunRecord run_solver(const SolverSpec& solver, const ProblemSpec& spec,
                     const InverseProblem& problem, SolveTrace& trace, TraceSchema& schema);

/// Rejects unknown methods and parameters without running anything.
void validate_solver(const SolverSpec& solver);

std::vector<MethodSummary> summarize(const std::vector<SolverSpec>& solvers,
                                     std::vector<RunRecord> runs);

///
/// Runs every solver on `repetitions` problem instances (seeds seed, seed+1, ...)
/// and writes under config.output:
///   traces/<solver>_seed<seed>.csv, runs.csv, summary.csv, manifest.txt
///
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// method, mean_iters, sd_iters, mean_alpha, sd_alpha, then counts and quality columns
void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& methods);
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);

struct CurvePoint
{
    double alpha    = 0.0;
    double res_norm = 0.0;
};

///
/// ||A x_a - b|| on a positive ascending grid. Throws Error if the sampled
/// residuals decrease beyond rounding.
///
std::vector<CurvePoint> sample_discrepancy_curve(const InverseProblem& problem,
                                                 const std::vector<double>& grid);

/// Log-spaced grid from the [curve] section.
std::vector<double> curve_grid(const CurveSpec& spec);

/// Samples the curve for the first seed and writes curve.csv; returns the points.
std::vector<CurvePoint> run_curve(const ExperimentConfig& config);

/// Writes the first-seed problem as a problem directory under config.output.
InverseProblem run_gen(const ExperimentConfig& config);

} // namespace tikmor

#endif // TIKMOR_EXPERIMENT_HPP
