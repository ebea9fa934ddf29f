#ifndef TIKMOR_MATRIX_MARKET_HPP
#define TIKMOR_MATRIX_MARKET_HPP

#include "tikmor/linop.hpp"

#include <filesystem>
#include <iosfwd>

namespace tikmor
{

//
// Matrix Market exchange format, real-valued only.
//
// Supported: "matrix coordinate|array real|integer general|symmetric|skew-symmetric".
// Coordinate files load as sparse operators, array files as dense ones.
// Symmetric storage is expanded on load. Complex and pattern fields are
// rejected with UnsupportedFormat; malformed content raises ParseError with
// the offending line number.
//

LinearOperator load_matrix_market(const std::filesystem::path& path);
LinearOperator read_matrix_market(std::istream& in);

void write_matrix_market(const std::filesystem::path& path, const LinearOperator& A);
void write_matrix_market(std::ostream& out, const SparseMatrix& A);
void write_matrix_market(std::ostream& out, const Matrix& A);

} // namespace tikmor

#endif // TIKMOR_MATRIX_MARKET_HPP
