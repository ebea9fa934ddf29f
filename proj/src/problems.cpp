#include "tikmor/problems.hpp"

#include "tikmor/matrix_market.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace tikmor
{

double SeededStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededStream::gaussian()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    double u1     = 1.0 - uniform();
    double u2     = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle  = 2.0 * std::numbers::pi * u2;
    spare_        = radius * std::sin(angle);
    has_spare_    = true;
    return radius * std::cos(angle);
}

namespace
{

InverseProblem add_noise(LinearOperator A, Vector x_exact, double noise_fraction,
                         SeededStream& stream)
{
    if (noise_fraction < 0.0)
        throw Error("noise fraction must be nonnegative");
    if (x_exact.size() != A.cols())
        throw DimensionError("ground truth length does not match operator columns");

    InverseProblem p{A, Vector(), 0.0};
    Vector         b_exact = A.apply(x_exact);
    const double   m       = static_cast<double>(A.rows());

    p.exact_rhs_norm = b_exact.norm();
    p.noise_fraction = noise_fraction;
    p.noise_level    = noise_fraction * p.exact_rhs_norm;
    p.sigma          = p.noise_level / std::sqrt(m);

    Vector e(A.rows());
    for (Index i = 0; i < e.size(); ++i)
        e[i] = p.sigma * stream.gaussian();
    if (noise_fraction == 0.0)
        e.setZero();
    p.noise_norm   = e.norm();
    p.rhs          = b_exact + e;
    p.ground_truth = std::move(x_exact);
    return p;
}

} // namespace

InverseProblem random_uniform_problem(Index m, Index n, double noise_fraction, std::uint64_t seed)
{
    if (n < 1 || m < n)
        throw DimensionError("random_uniform_problem requires m >= n >= 1 (got m=" +
                             std::to_string(m) + ", n=" + std::to_string(n) + ")");
    SeededStream stream(seed);
    Matrix       A(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            A(i, j) = stream.uniform(-1.0, 1.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i)
        x[i] = stream.uniform(-1.0, 1.0);

    InverseProblem p = add_noise(LinearOperator(std::move(A)), std::move(x), noise_fraction, stream);
    p.seed           = seed;
    p.generator      = "random_uniform";
    return p;
}

InverseProblem make_noisy_problem(LinearOperator A, Vector x_exact, double noise_fraction,
                                  std::uint64_t seed)
{
    SeededStream   stream(seed);
    InverseProblem p = add_noise(std::move(A), std::move(x_exact), noise_fraction, stream);
    p.seed           = seed;
    p.generator      = "custom";
    return p;
}

InverseProblem sine_wave_problem(LinearOperator A, double noise_fraction, std::uint64_t seed)
{
    const Index  n = A.cols();
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n + 1);
    Vector       x(n);
    for (Index i = 0; i < n; ++i)
        x[i] = std::sin(static_cast<double>(i + 1) * h);
    InverseProblem p = make_noisy_problem(std::move(A), std::move(x), noise_fraction, seed);
    p.generator      = "sine_wave";
    return p;
}

InverseProblem standard_form(const InverseProblem& p, const RegularizationMatrix& L,
                             const Vector& x0)
{
    LinearOperator Abar = make_priorconditioned(p.op, L, x0);
    InverseProblem out(Abar, Abar.priorconditioned()->effective_rhs(p.rhs), p.noise_level);
    out.eta            = p.eta;
    out.sigma          = p.sigma;
    out.noise_norm     = p.noise_norm;
    out.noise_fraction = p.noise_fraction;
    out.exact_rhs_norm = p.exact_rhs_norm;
    out.seed           = p.seed;
    out.generator      = p.generator;
    // ground truth in z coordinates is L (x_ex - x0)
    if (p.ground_truth)
        out.ground_truth = L.apply(*p.ground_truth - x0);
    return out;
}

RelativeStats relative_stats(const InverseProblem& p, const Vector& x)
{
    RelativeStats s;
    const double  bnorm = p.rhs.norm();
    s.rel_residual      = (p.op.apply(x) - p.rhs).norm() / bnorm;
    s.rel_discrepancy   = p.noise_level / bnorm;
    if (p.ground_truth)
    {
        double xnorm = p.ground_truth->norm();
        if (xnorm > 0.0)
            s.rel_error = (x - *p.ground_truth).norm() / xnorm;
    }
    return s;
}

//
// Serialization
//

void write_vector(const std::filesystem::path& path, const Vector& v)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << std::setprecision(17);
    for (Index i = 0; i < v.size(); ++i)
        out << v[i] << '\n';
}

Vector read_vector(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<double> values;
    std::string         line;
    std::size_t         lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::istringstream ss(line);
        double             v = 0.0;
        if (!(ss >> v))
        {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            throw ParseError("malformed value in " + path.string(), lineno);
        }
        values.push_back(v);
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void save_problem(const std::filesystem::path& dir, const InverseProblem& p)
{
    std::filesystem::create_directories(dir);
    write_matrix_market(dir / "A.mtx", p.op);
    write_vector(dir / "b.txt", p.rhs);
    if (p.ground_truth)
        write_vector(dir / "x_true.txt", *p.ground_truth);

    std::ofstream meta(dir / "meta.txt");
    meta << std::setprecision(17);
    meta << "generator=" << p.generator << '\n'
         << "m=" << p.op.rows() << '\n'
         << "n=" << p.op.cols() << '\n'
         << "epsilon=" << p.noise_level << '\n'
         << "sigma=" << p.sigma << '\n'
         << "eta=" << p.eta << '\n'
         << "seed=" << p.seed << '\n'
         << "noise_fraction=" << p.noise_fraction << '\n'
         << "noise_norm=" << p.noise_norm << '\n'
         << "exact_rhs_norm=" << p.exact_rhs_norm << '\n';
}

InverseProblem load_problem(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> meta;
    {
        std::ifstream in(dir / "meta.txt");
        if (!in)
            throw Error("missing meta.txt in " + dir.string());
        std::string line;
        while (std::getline(in, line))
        {
            auto eq = line.find('=');
            if (eq != std::string::npos)
                meta[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    auto number = [&](const std::string& key, double fallback) {
        auto it = meta.find(key);
        return it == meta.end() ? fallback : std::stod(it->second);
    };

    InverseProblem p{load_matrix_market(dir / "A.mtx"), read_vector(dir / "b.txt"),
                     number("epsilon", 0.0)};
    if (p.rhs.size() != p.op.rows())
        throw DimensionError("b.txt length does not match the matrix in " + dir.string());
    if (std::filesystem::exists(dir / "x_true.txt"))
        p.ground_truth = read_vector(dir / "x_true.txt");
    p.eta            = number("eta", 1.0);
    p.sigma          = number("sigma", 0.0);
    p.noise_fraction = number("noise_fraction", 0.0);
    p.noise_norm     = number("noise_norm", 0.0);
    p.exact_rhs_norm = number("exact_rhs_norm", 0.0);
    if (auto it = meta.find("seed"); it != meta.end())
        p.seed = std::stoull(it->second);
    if (auto it = meta.find("generator"); it != meta.end())
        p.generator = it->second;
    return p;
}

} // namespace tikmor
