#include "tikmor/experiment.hpp"

#include "tikmor/matrix_market.hpp"
#include "tikmor/metrics.hpp"
#include "tikmor/ntm.hpp"
#include "tikmor/pntm.hpp"
#include "tikmor/reference.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

namespace tikmor
{

namespace
{

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& v)
{
    try
    {
        std::size_t pos = 0;
        double      d   = std::stod(v, &pos);
        if (pos == v.size() && std::isfinite(d))
            return d;
    }
    catch (const std::exception&)
    {
    }
    throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    auto [p, ec]  = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

const std::map<std::string, std::set<std::string>>& solver_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"ntm", {"alpha0", "tol", "max_iter", "step_rule", "omega", "dinv", "regularizer"}},
        {"pntm",
         {"alpha0", "tol", "outer_iter_max", "inner_cap_small", "inner_cap_large", "step_rule",
          "omega", "dinv", "regularizer", "hold_unattainable"}},
        {"gbit", {"alpha0", "tol", "max_iter", "regularizer"}},
        {"sirt", {"max_iter", "stop_at_discrepancy"}},
        {"cgls-pc", {"max_iter", "regularizer"}},
    };
    return keys;
}

struct Params
{
    const SolverSpec& s;

    std::optional<std::string> get(const std::string& key) const
    {
        auto it = s.params.find(key);
        if (it == s.params.end())
            return std::nullopt;
        return it->second;
    }
    std::string full(const std::string& key) const { return "solver." + s.name + "." + key; }
    double real(const std::string& key, double fallback) const
    {
        auto v = get(key);
        return v ? to_double(full(key), *v) : fallback;
    }
    Index integer(const std::string& key, Index fallback) const
    {
        auto v = get(key);
        return v ? static_cast<Index>(to_int(full(key), *v)) : fallback;
    }
    bool flag(const std::string& key, bool fallback) const
    {
        auto v = get(key);
        return v ? to_bool(full(key), *v) : fallback;
    }
};

StepRule step_rule_of(const Params& p)
{
    StepRule rule;
    if (auto v = p.get("step_rule"))
    {
        if (*v == "case1")
            rule.variant = StepVariant::Case1;
        else if (*v == "case2")
            rule.variant = StepVariant::Case2;
        else
            throw ConfigError(p.full("step_rule") + ": expected case1 or case2");
    }
    if (auto v = p.get("dinv"))
    {
        if (*v == "exact")
            rule.dinv = DInvMode::Exact;
        else if (*v == "bound")
            rule.dinv = DInvMode::Bound;
        else
            throw ConfigError(p.full("dinv") + ": expected exact or bound");
    }
    rule.omega = p.real("omega", rule.omega);
    if (!(rule.omega > 0.0 && rule.omega < 1.0))
        throw ConfigError(p.full("omega") + ": must lie in (0, 1)");
    return rule;
}

std::optional<RegularizationMatrix> regularizer_of(const Params& p, Index n,
                                                   const std::string& fallback)
{
    std::string v = p.get("regularizer").value_or(fallback);
    if (v == "none")
        return std::nullopt;
    if (v == "identity")
        return RegularizationMatrix::identity(n);
    if (v == "first_difference")
        return RegularizationMatrix::first_difference(n);
    throw ConfigError(p.full("regularizer") + ": expected none, identity or first_difference");
}

void check_positive(const Params& p, const std::string& key, double v)
{
    if (!(v > 0.0))
        throw ConfigError(p.full(key) + ": must be positive");
}

void check_at_least_one(const Params& p, const std::string& key, Index v)
{
    if (v < 1)
        throw ConfigError(p.full(key) + ": must be at least 1");
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::pair<double, double> mean_sd(const std::vector<double>& v)
{
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss   = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return {mean, sd};
}

void resolve(std::filesystem::path& p, const std::filesystem::path& base)
{
    if (!p.empty() && p.is_relative())
        p = (base / p).lexically_normal();
}

} // namespace

//
// Config
//

ExperimentConfig parse_config(std::istream& in)
{
    const std::string text(std::istreambuf_iterator<char>(in), {});
    pt::ptree         tree;
    try
    {
        std::istringstream ss(text);
        pt::read_ini(ss, tree);
    }
    catch (const pt::ini_parser_error& e)
    {
        throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    // read_ini drops sections without keys; restore them so they are validated.
    {
        std::istringstream ss(text);
        std::string        line;
        while (std::getline(ss, line))
        {
            const auto first = line.find_first_not_of(" \t");
            const auto last  = line.find_last_not_of(" \t\r");
            if (first == std::string::npos || line[first] != '[' || line[last] != ']')
                continue;
            std::string name = line.substr(first + 1, last - first - 1);
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (tree.find(name) == tree.not_found())
                tree.push_back({name, pt::ptree()});
        }
    }

    ExperimentConfig cfg;
    bool             have_problem = false;

    for (const auto& [section, body] : tree)
    {
        if (body.empty() && !body.data().empty())
            throw ConfigError("config: key '" + section + "' outside of a section");
        for (const auto& [key, value] : body)
            cfg.echo.emplace_back(section + "." + key, value.data());

        if (section == "problem")
        {
            have_problem = true;
            ProblemSpec& p = cfg.problem;
            for (const auto& [key, node] : body)
            {
                const std::string& v    = node.data();
                const std::string  full = "problem." + key;
                if (key == "generator")
                    p.generator = v;
                else if (key == "m")
                    p.m = static_cast<Index>(to_int(full, v));
                else if (key == "n")
                    p.n = static_cast<Index>(to_int(full, v));
                else if (key == "noise")
                    p.noise = to_double(full, v);
                else if (key == "eta")
                    p.eta = to_double(full, v);
                else if (key == "matrix")
                    p.matrix = v;
                else if (key == "dir")
                    p.dir = v;
                else if (key == "rhs")
                    p.rhs = v;
                else if (key == "rhs_file")
                    p.rhs_file = v;
                else if (key == "epsilon")
                    p.epsilon = to_double(full, v);
                else if (key == "image_width")
                    p.image_width = static_cast<Index>(to_int(full, v));
                else if (key == "image_height")
                    p.image_height = static_cast<Index>(to_int(full, v));
                else
                    throw ConfigError("config: unknown key '" + full + "'");
            }
        }
        else if (section == "experiment")
        {
            for (const auto& [key, node] : body)
            {
                const std::string& v    = node.data();
                const std::string  full = "experiment." + key;
                if (key == "repetitions")
                    cfg.repetitions = static_cast<Index>(to_int(full, v));
                else if (key == "seed")
                {
                    long long s = to_int(full, v);
                    if (s < 0)
                        throw ConfigError(full + ": must be nonnegative");
                    cfg.seed = static_cast<std::uint64_t>(s);
                }
                else if (key == "output")
                    cfg.output = v;
                else
                    throw ConfigError("config: unknown key '" + full + "'");
            }
        }
        else if (section == "curve")
        {
            for (const auto& [key, node] : body)
            {
                const std::string& v    = node.data();
                const std::string  full = "curve." + key;
                if (key == "alpha_min")
                    cfg.curve.alpha_min = to_double(full, v);
                else if (key == "alpha_max")
                    cfg.curve.alpha_max = to_double(full, v);
                else if (key == "points")
                    cfg.curve.points = static_cast<Index>(to_int(full, v));
                else
                    throw ConfigError("config: unknown key '" + full + "'");
            }
        }
        else if (section.rfind("solver.", 0) == 0 && section.size() > 7)
        {
            SolverSpec s;
            s.name = section.substr(7);
            for (const auto& [key, node] : body)
            {
                if (key == "method")
                    s.method = node.data();
                else
                    s.params[key] = node.data();
            }
            if (s.method.empty())
                throw ConfigError("config: [" + section + "] needs a method");
            validate_solver(s);
            cfg.solvers.push_back(std::move(s));
        }
        else
            throw ConfigError("config: unknown section [" + section + "]");
    }

    if (!have_problem)
        throw ConfigError("config: missing [problem] section");
    if (cfg.repetitions < 1)
        throw ConfigError("experiment.repetitions: must be at least 1");

    const ProblemSpec& p = cfg.problem;
    if (p.generator == "random_uniform" || p.generator == "sine_wave")
    {
        if (p.n < 1 || p.m < 1)
            throw ConfigError("problem: m and n must be at least 1");
        if (p.generator == "random_uniform" && p.m < p.n)
            throw ConfigError("problem: random_uniform needs m >= n");
    }
    else if (p.generator == "matrix_market")
    {
        if (p.matrix.empty())
            throw ConfigError("problem.matrix: required for generator matrix_market");
        if (p.rhs != "sine" && p.rhs != "file")
            throw ConfigError("problem.rhs: expected sine or file");
        if (p.rhs == "file" && (p.rhs_file.empty() || !p.epsilon))
            throw ConfigError("problem: rhs = file needs rhs_file and epsilon");
    }
    else if (p.generator == "directory")
    {
        if (p.dir.empty())
            throw ConfigError("problem.dir: required for generator directory");
    }
    else
        throw ConfigError("problem.generator: unknown generator '" + p.generator + "'");
    if (p.noise < 0.0)
        throw ConfigError("problem.noise: must be nonnegative");
    if (!(p.eta >= 1.0))
        throw ConfigError("problem.eta: must be at least 1");
    if (p.image_width < 0 || p.image_height < 0)
        throw ConfigError("problem: image dimensions must be nonnegative");

    if (!(cfg.curve.alpha_min > 0.0) || !(cfg.curve.alpha_max >= cfg.curve.alpha_min) ||
        cfg.curve.points < 1)
        throw ConfigError("curve: need 0 < alpha_min <= alpha_max and points >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    ExperimentConfig cfg  = parse_config(in);
    auto             base = path.parent_path();
    resolve(cfg.problem.matrix, base);
    resolve(cfg.problem.dir, base);
    resolve(cfg.problem.rhs_file, base);
    resolve(cfg.output, base);
    for (const auto* f : {&cfg.problem.matrix, &cfg.problem.dir, &cfg.problem.rhs_file})
        if (!f->empty() && !std::filesystem::exists(*f))
            throw ConfigError("config: no such file or directory " + f->string());
    return cfg;
}

void validate_solver(const SolverSpec& solver)
{
    auto it = solver_keys().find(solver.method);
    if (it == solver_keys().end())
        throw ConfigError("solver." + solver.name + ": unknown method '" + solver.method +
                          "' (expected ntm, pntm, gbit, sirt or cgls-pc)");
    for (const auto& [key, value] : solver.params)
        if (!it->second.count(key))
            throw ConfigError("config: unknown key 'solver." + solver.name + "." + key +
                              "' for method " + solver.method);

    // Parse every value once so that bad numbers fail before any work.
    Params p{solver};
    for (const char* key : {"alpha0", "tol", "omega"})
        if (p.get(key))
            check_positive(p, key, p.real(key, 1.0));
    for (const char* key :
         {"max_iter", "outer_iter_max", "inner_cap_small", "inner_cap_large"})
        if (p.get(key))
            check_at_least_one(p, key, p.integer(key, 1));
    if (p.get("step_rule") || p.get("dinv") || p.get("omega"))
        step_rule_of(p);
    if (p.get("regularizer"))
        regularizer_of(p, 1, "none");
    p.flag("stop_at_discrepancy", true);
    p.flag("hold_unattainable", true);
    if (p.integer("inner_cap_small", 10) > p.integer("inner_cap_large", 10000))
        throw ConfigError("solver." + solver.name + ": inner_cap_small exceeds inner_cap_large");
}

InverseProblem build_problem(const ProblemSpec& spec, std::uint64_t seed)
{
    InverseProblem p = [&] {
        if (spec.generator == "random_uniform")
            return random_uniform_problem(spec.m, spec.n, spec.noise, seed);
        if (spec.generator == "sine_wave")
        {
            SeededStream stream(seed);
            Matrix       A(spec.m, spec.n);
            for (Index j = 0; j < spec.n; ++j)
                for (Index i = 0; i < spec.m; ++i)
                    A(i, j) = stream.uniform(-1.0, 1.0);
            // Noise comes from a separate seed so it is independent of A.
            return sine_wave_problem(LinearOperator(std::move(A)), spec.noise, seed + 0x9e3779b9ULL);
        }
        if (spec.generator == "matrix_market")
        {
            LinearOperator A = load_matrix_market(spec.matrix);
            if (spec.rhs == "sine")
                return sine_wave_problem(std::move(A), spec.noise, seed);
            InverseProblem q(std::move(A), read_vector(spec.rhs_file), *spec.epsilon);
            if (q.rhs.size() != q.op.rows())
                throw DimensionError("rhs_file length does not match the matrix");
            q.generator = "matrix_market";
            return q;
        }
        return load_problem(spec.dir);
    }();
    if (spec.generator != "directory")
        p.eta = spec.eta;
    return p;
}

//
// Runs
//

RunRecord run_solver(const SolverSpec& solver, const ProblemSpec& spec,
                     const InverseProblem& problem, SolveTrace& trace, TraceSchema& schema)
{
    RunRecord rec;
    rec.solver = solver.name;
    rec.method = solver.method;
    rec.seed   = problem.seed;

    Params     p{solver};
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        const Index n = problem.op.cols();
        Vector      x;
        SolveStatus status = SolveStatus::MaxIterations;

        // Solvers that accept a regularizer run on the standard-form problem.
        auto with_form = [&](const std::string& fallback, auto&& solve) {
            auto L = regularizer_of(p, n, fallback);
            if (!L)
                return solve(problem);
            InverseProblem sf = standard_form(problem, *L, Vector::Zero(n));
            Vector         z  = solve(sf);
            return Vector(sf.op.priorconditioned()->recover(z));
        };

        if (solver.method == "ntm")
        {
            NtmConfig c;
            c.alpha0    = p.real("alpha0", c.alpha0);
            c.tol       = p.real("tol", c.tol);
            c.max_iter  = p.integer("max_iter", c.max_iter);
            c.step_rule = step_rule_of(p);
            schema      = TraceSchema::Newton;
            x           = with_form("none", [&](const InverseProblem& q) {
                NtmResult r    = ntm_solve(q, c);
                status         = r.status;
                rec.iterations = r.iterations;
                rec.alpha      = r.alpha;
                trace          = std::move(r.trace);
                return r.x;
            });
        }
        else if (solver.method == "pntm")
        {
            PntmConfig c;
            c.alpha0          = p.real("alpha0", c.alpha0);
            c.tol             = p.real("tol", c.tol);
            c.outer_iter_max  = p.integer("outer_iter_max", c.outer_iter_max);
            c.inner_cap_small = p.integer("inner_cap_small", c.inner_cap_small);
            c.inner_cap_large = p.integer("inner_cap_large", c.inner_cap_large);
            c.hold_unattainable = p.flag("hold_unattainable", c.hold_unattainable);
            c.step_rule       = step_rule_of(p);
            schema            = TraceSchema::Extended;
            x                 = with_form("none", [&](const InverseProblem& q) {
                PntmResult r   = pntm_solve(q, c);
                status         = r.status;
                rec.iterations = r.outer_iterations;
                rec.alpha      = r.alpha;
                trace          = std::move(r.trace);
                return r.x;
            });
        }
        else if (solver.method == "gbit")
        {
            GbitConfig c;
            c.alpha0   = p.real("alpha0", c.alpha0);
            c.tol      = p.real("tol", c.tol);
            c.max_iter = p.integer("max_iter", c.max_iter);
            schema     = TraceSchema::Extended;
            x          = with_form("none", [&](const InverseProblem& q) {
                GbitResult r   = gbit_solve(q, c);
                status         = r.status;
                rec.iterations = r.iterations;
                rec.alpha      = r.alpha;
                trace          = std::move(r.trace);
                return r.x;
            });
        }
        else if (solver.method == "sirt")
        {
            IterativeResult r = sirt_solve(problem, p.integer("max_iter", 1000),
                                           p.flag("stop_at_discrepancy", true));
            status            = r.status;
            rec.iterations    = r.iterations;
            trace             = std::move(r.trace);
            schema            = TraceSchema::Newton;
            x                 = std::move(r.x);
        }
        else // cgls-pc
        {
            auto L = regularizer_of(p, n, "first_difference");
            if (!L)
                L = RegularizationMatrix::identity(n);
            IterativeResult r =
                cgls_priorconditioned(problem, *L, Vector::Zero(n), p.integer("max_iter", 1000));
            status         = r.status;
            rec.iterations = r.iterations;
            trace          = std::move(r.trace);
            schema         = TraceSchema::Newton;
            x              = std::move(r.x);
        }

        rec.status           = std::string(to_string(status));
        rec.converged        = status == SolveStatus::Converged || status == SolveStatus::Completed;
        RelativeStats stats  = relative_stats(problem, x);
        rec.res_norm         = (problem.op.apply(x) - problem.rhs).norm();
        rec.rel_residual     = stats.rel_residual;
        rec.rel_discrepancy  = stats.rel_discrepancy;
        rec.rel_error        = stats.rel_error;
        if (problem.ground_truth && spec.image_width > 0 &&
            spec.image_width * spec.image_height == n)
            rec.ssim = ssim(ImageView(x, spec.image_width, spec.image_height),
                            ImageView(*problem.ground_truth, spec.image_width, spec.image_height));
    }
    catch (const std::exception& e)
    {
        rec.status    = "error";
        rec.message   = e.what();
        rec.converged = false;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

bool ExperimentSummary::all_converged() const noexcept
{
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.converged; });
}

std::vector<MethodSummary> summarize(const std::vector<SolverSpec>& solvers,
                                     std::vector<RunRecord> runs)
{
    std::stable_sort(runs.begin(), runs.end(),
                     [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
    std::vector<MethodSummary> out;
    for (const auto& s : solvers)
    {
        MethodSummary       m;
        m.solver = s.name;
        std::vector<double> iters, alphas, rres, rerr;
        for (const auto& r : runs)
        {
            if (r.solver != s.name)
                continue;
            ++m.runs;
            if (!r.converged)
                continue;
            ++m.converged;
            iters.push_back(static_cast<double>(r.iterations));
            if (r.alpha)
                alphas.push_back(*r.alpha);
            rres.push_back(r.rel_residual);
            if (r.rel_error)
                rerr.push_back(*r.rel_error);
        }
        if (!iters.empty())
            std::tie(m.mean_iters, m.sd_iters) = mean_sd(iters);
        if (!alphas.empty())
            std::tie(m.mean_alpha, m.sd_alpha) = mean_sd(alphas);
        if (!rres.empty())
            m.mean_rel_residual = mean_sd(rres).first;
        if (!rerr.empty())
            m.mean_rel_error = mean_sd(rerr).first;
        out.push_back(m);
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& methods)
{
    out << "method,mean_iters,sd_iters,mean_alpha,sd_alpha,runs,converged,mean_rel_residual,"
           "mean_rel_error\n";
    for (const auto& m : methods)
        out << m.solver << ',' << fmt(m.mean_iters) << ',' << fmt(m.sd_iters) << ','
            << fmt(m.mean_alpha) << ',' << fmt(m.sd_alpha) << ',' << m.runs << ',' << m.converged
            << ',' << fmt(m.mean_rel_residual) << ',' << fmt(m.mean_rel_error) << '\n';
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs)
{
    out << "solver,method,seed,status,iterations,alpha,res_norm,rel_residual,rel_discrepancy,"
           "rel_error,ssim,message\n";
    for (const auto& r : runs)
    {
        std::string msg = r.message;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << r.solver << ',' << r.method << ',' << r.seed << ',' << r.status << ','
            << r.iterations << ',' << fmt(r.alpha) << ',' << fmt(r.res_norm) << ','
            << fmt(r.rel_residual) << ',' << fmt(r.rel_discrepancy) << ',' << fmt(r.rel_error)
            << ',' << fmt(r.ssim) << ",\"" << msg << "\"\n";
    }
}

namespace
{

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

std::string timestamp()
{
    std::time_t t = std::time(nullptr);
    char        buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra)
{
    auto out = open_out(cfg.output / "manifest.txt");
    out << "tool=tikmor\n"
        << "version=" << TIKMOR_VERSION << '\n'
        << "command=" << command << '\n'
        << "timestamp=" << timestamp() << '\n'
        << "eigen=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
        << EIGEN_MINOR_VERSION << '\n'
        << "repetitions=" << cfg.repetitions << '\n'
        << "seed=" << cfg.seed << '\n';
    out << "seeds=";
    for (Index r = 0; r < cfg.repetitions; ++r)
        out << (r ? "," : "") << cfg.seed + static_cast<std::uint64_t>(r);
    out << '\n';
    for (const auto& [k, v] : extra)
        out << k << '=' << v << '\n';
    for (const auto& [k, v] : cfg.echo)
        out << "config." << k << '=' << v << '\n';
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config)
{
    if (config.solvers.empty())
        throw ConfigError("config: no [solver.<name>] section");
    for (const auto& s : config.solvers)
        validate_solver(s);

    std::filesystem::create_directories(config.output / "traces");

    const auto        t0 = std::chrono::steady_clock::now();
    ExperimentSummary summary;
    for (Index rep = 0; rep < config.repetitions; ++rep)
    {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(rep);
        std::optional<InverseProblem> problem;
        std::string                   problem_error;
        try
        {
            problem = build_problem(config.problem, seed);
        }
        catch (const std::exception& e)
        {
            problem_error = e.what();
        }

        for (const auto& s : config.solvers)
        {
            if (!problem)
            {
                RunRecord rec;
                rec.solver  = s.name;
                rec.method  = s.method;
                rec.seed    = seed;
                rec.status  = "error";
                rec.message = problem_error;
                summary.runs.push_back(rec);
                continue;
            }
            SolveTrace  trace;
            TraceSchema schema = TraceSchema::Newton;
            RunRecord   rec    = run_solver(s, config.problem, *problem, trace, schema);
            rec.seed           = seed;
            auto out = open_out(config.output / "traces" /
                                (s.name + "_seed" + std::to_string(seed) + ".csv"));
            write_trace_csv(out, trace, schema);
            summary.runs.push_back(std::move(rec));
        }
    }
    summary.methods = summarize(config.solvers, summary.runs);

    {
        auto out = open_out(config.output / "runs.csv");
        write_runs_csv(out, summary.runs);
    }
    {
        auto out = open_out(config.output / "summary.csv");
        write_summary_csv(out, summary.methods);
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Index  failed  = std::count_if(summary.runs.begin(), summary.runs.end(),
                                   [](const RunRecord& r) { return !r.converged; });
    write_manifest(config, "run",
                   {{"runs", std::to_string(summary.runs.size())},
                    {"failed_runs", std::to_string(failed)},
                    {"wall_seconds", fmt(seconds)}});
    return summary;
}

//
// Discrepancy curve
//

std::vector<double> curve_grid(const CurveSpec& spec)
{
    std::vector<double> grid;
    if (spec.points == 1)
        return {spec.alpha_min};
    const double lo = std::log10(spec.alpha_min);
    const double hi = std::log10(spec.alpha_max);
    for (Index i = 0; i < spec.points; ++i)
        grid.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(spec.points - 1)));
    return grid;
}

std::vector<CurvePoint> sample_discrepancy_curve(const InverseProblem& problem,
                                                 const std::vector<double>& grid)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!(grid[i] > 0.0))
            throw Error("discrepancy curve: grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw Error("discrepancy curve: grid must be strictly ascending");
    }
    std::vector<CurvePoint> out;
    for (double a : grid)
    {
        Vector x = normal_equation_solve(problem.op, problem.rhs, a);
        out.push_back({a, (problem.op.apply(x) - problem.rhs).norm()});
    }
    const double slack = 1e-10 * problem.rhs.norm();
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].res_norm < out[i - 1].res_norm - slack)
            throw Error("discrepancy curve decreased between alpha=" + fmt(out[i - 1].alpha) +
                        " and alpha=" + fmt(out[i].alpha));
    return out;
}

std::vector<CurvePoint> run_curve(const ExperimentConfig& config)
{
    InverseProblem problem = build_problem(config.problem, config.seed);
    auto           points  = sample_discrepancy_curve(problem, curve_grid(config.curve));
    std::filesystem::create_directories(config.output);
    auto out = open_out(config.output / "curve.csv");
    out << "alpha,res_norm,discrepancy\n";
    for (const auto& pt : points)
        out << fmt(pt.alpha) << ',' << fmt(pt.res_norm) << ',' << fmt(problem.discrepancy())
            << '\n';
    write_manifest(config, "curve", {{"points", std::to_string(points.size())}});
    return points;
}

InverseProblem run_gen(const ExperimentConfig& config)
{
    InverseProblem problem = build_problem(config.problem, config.seed);
    std::filesystem::create_directories(config.output);
    save_problem(config.output, problem);
    return problem;
}

} // namespace tikmor
