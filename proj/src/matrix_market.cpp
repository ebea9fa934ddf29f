#include "tikmor/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace tikmor
{

namespace
{

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

enum class Symmetry
{
    General,
    Symmetric,
    SkewSymmetric
};

struct Header
{
    bool     coordinate = true;
    Symmetry symmetry   = Symmetry::General;
};

Header parse_banner(const std::string& line)
{
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw ParseError("missing %%MatrixMarket banner", 1);
    object   = lower(object);
    format   = lower(format);
    field    = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix")
        throw UnsupportedFormat("Matrix Market object '" + object + "' is not supported");

    Header h;
    if (format == "coordinate")
        h.coordinate = true;
    else if (format == "array")
        h.coordinate = false;
    else
        throw ParseError("unknown Matrix Market format '" + format + "'", 1);

    if (field == "complex" || field == "pattern")
        throw UnsupportedFormat("Matrix Market field '" + field + "' is not supported");
    if (field != "real" && field != "integer" && field != "double")
        throw ParseError("unknown Matrix Market field '" + field + "'", 1);

    if (symmetry == "general")
        h.symmetry = Symmetry::General;
    else if (symmetry == "symmetric")
        h.symmetry = Symmetry::Symmetric;
    else if (symmetry == "skew-symmetric")
        h.symmetry = Symmetry::SkewSymmetric;
    else if (symmetry == "hermitian")
        throw UnsupportedFormat("hermitian Matrix Market files are not supported");
    else
        throw ParseError("unknown Matrix Market symmetry '" + symmetry + "'", 1);
    return h;
}

bool is_blank_or_comment(const std::string& line)
{
    auto it = std::find_if(line.begin(), line.end(),
                           [](unsigned char c) { return !std::isspace(c); });
    return it == line.end() || *it == '%';
}

// Reads the next meaningful line, tracking the 1-based line number.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno)
{
    while (std::getline(in, line))
    {
        ++lineno;
        if (!is_blank_or_comment(line))
            return true;
    }
    return false;
}

} // namespace

LinearOperator read_matrix_market(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("empty Matrix Market stream", 1);
    ++lineno;
    Header h = parse_banner(line);

    if (!next_line(in, line, lineno))
        throw ParseError("missing size line", lineno + 1);

    long long rows = 0, cols = 0, nnz = 0;
    {
        std::istringstream ss(line);
        if (h.coordinate)
        {
            if (!(ss >> rows >> cols >> nnz))
                throw ParseError("malformed coordinate size line", lineno);
        }
        else if (!(ss >> rows >> cols))
            throw ParseError("malformed array size line", lineno);
    }
    if (rows < 1 || cols < 1 || nnz < 0)
        throw ParseError("non-positive matrix dimensions", lineno);
    if (h.symmetry != Symmetry::General && rows != cols)
        throw ParseError("symmetric storage requires a square matrix", lineno);

    const double mirror = h.symmetry == Symmetry::SkewSymmetric ? -1.0 : 1.0;

    if (h.coordinate)
    {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(
            h.symmetry == Symmetry::General ? nnz : 2 * nnz));
        for (long long k = 0; k < nnz; ++k)
        {
            if (!next_line(in, line, lineno))
                throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                                     std::to_string(k),
                                 lineno + 1);
            std::istringstream ss(line);
            long long i = 0, j = 0;
            double    v = 0.0;
            if (!(ss >> i >> j >> v))
                throw ParseError("malformed coordinate entry", lineno);
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError("entry index out of range", lineno);
            if (h.symmetry != Symmetry::General && j > i)
                throw ParseError("symmetric storage must list the lower triangle", lineno);
            triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
            if (h.symmetry != Symmetry::General && i != j)
                triplets.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1),
                                      mirror * v);
        }
        SparseMatrix A(static_cast<Index>(rows), static_cast<Index>(cols));
        A.setFromTriplets(triplets.begin(), triplets.end());
        return LinearOperator(std::move(A));
    }

    Matrix A = Matrix::Zero(static_cast<Index>(rows), static_cast<Index>(cols));
    // Column-major; symmetric storage lists the lower triangle column by column.
    for (Index j = 0; j < A.cols(); ++j)
    {
        Index first = 0;
        if (h.symmetry == Symmetry::Symmetric)
            first = j;
        else if (h.symmetry == Symmetry::SkewSymmetric)
            first = j + 1;
        for (Index i = first; i < A.rows(); ++i)
        {
            if (!next_line(in, line, lineno))
                throw ParseError("array data ended early", lineno + 1);
            std::istringstream ss(line);
            double             v = 0.0;
            if (!(ss >> v))
                throw ParseError("malformed array value", lineno);
            A(i, j) = v;
            if (i != j && h.symmetry != Symmetry::General)
                A(j, i) = mirror * v;
        }
    }
    return LinearOperator(std::move(A));
}

LinearOperator load_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open Matrix Market file " + path.string());
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
    out << std::setprecision(17);
    for (Index j = 0; j < A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(std::ostream& out, const Matrix& A)
{
    out << "%%MatrixMarket matrix array real general\n";
    out << A.rows() << ' ' << A.cols() << '\n';
    out << std::setprecision(17);
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            out << A(i, j) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const LinearOperator& A)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write Matrix Market file " + path.string());
    if (auto s = A.sparse())
        write_matrix_market(out, *s);
    else
        write_matrix_market(out, A.to_dense());
}

} // namespace tikmor
