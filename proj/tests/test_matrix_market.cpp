#include "tikmor/matrix_market.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <filesystem>
#include <sstream>

using namespace tikmor;

namespace
{

LinearOperator parse(const std::string& text)
{
    std::istringstream in(text);
    return read_matrix_market(in);
}

} // namespace

TEST(MatrixMarket, CoordinateDiagonal)
{
    auto A = parse("%%MatrixMarket matrix coordinate real general\n"
                   "% comment\n"
                   "2 2 2\n"
                   "1 1 2\n"
                   "2 2 1\n");
    EXPECT_EQ(A.kind(), LinearOperator::Kind::Sparse);
    Vector y = A.apply(Vector::Ones(2));
    EXPECT_DOUBLE_EQ(y[0], 2.0);
    EXPECT_DOUBLE_EQ(y[1], 1.0);
}

TEST(MatrixMarket, ArrayIsColumnMajor)
{
    auto A = parse("%%MatrixMarket matrix array real general\n3 2\n1\n2\n3\n4\n5\n6\n");
    EXPECT_EQ(A.kind(), LinearOperator::Kind::Dense);
    Matrix D = A.to_dense();
    EXPECT_EQ(D.rows(), 3);
    EXPECT_EQ(D.cols(), 2);
    EXPECT_DOUBLE_EQ(D(0, 1), 4.0);
    EXPECT_DOUBLE_EQ(D(1, 1), 5.0);
}

TEST(MatrixMarket, SymmetricIsExpanded)
{
    auto A = parse("%%MatrixMarket matrix coordinate integer symmetric\n"
                   "3 3 3\n1 1 4\n2 1 -1\n3 2 7\n");
    Matrix D = A.to_dense();
    EXPECT_EQ(D, D.transpose());
    EXPECT_DOUBLE_EQ(D(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(D(1, 2), 7.0);
}

TEST(MatrixMarket, SkewSymmetric)
{
    auto A = parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n");
    Matrix D = A.to_dense();
    EXPECT_DOUBLE_EQ(D(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(D(0, 1), -3.0);
}

TEST(MatrixMarket, UnsupportedFields)
{
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                 UnsupportedFormat);
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
                 UnsupportedFormat);
}

TEST(MatrixMarket, ParseErrorCarriesLine)
{
    try
    {
        parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n3 1 1\n");
        FAIL() << "expected ParseError";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.line(), 4u);
    }
    EXPECT_THROW(parse("not a header\n"), ParseError);
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n"),
                 ParseError);
}

TEST(MatrixMarket, WriteReadRoundTrip)
{
    Matrix D(3, 2);
    D << 1.0 / 3.0, 0, -2.5, 1e-300, 0, 7;
    auto dir = std::filesystem::temp_directory_path() / "tikmor_mm_test";
    std::filesystem::create_directories(dir);

    write_matrix_market(dir / "dense.mtx", LinearOperator(D));
    EXPECT_EQ(load_matrix_market(dir / "dense.mtx").to_dense(), D);

    write_matrix_market(dir / "sparse.mtx", LinearOperator(SparseMatrix(D.sparseView())));
    auto S = load_matrix_market(dir / "sparse.mtx");
    EXPECT_EQ(S.kind(), LinearOperator::Kind::Sparse);
    EXPECT_EQ(S.to_dense(), D);
    std::filesystem::remove_all(dir);
}

TEST(MatrixMarket, Fixtures)
{
    auto A = load_matrix_market(TIKMOR_FIXTURE_DIR "/ls219.mtx");
    EXPECT_EQ(A.rows(), 219);
    EXPECT_EQ(A.cols(), 85);
    ASSERT_NE(A.sparse(), nullptr);
    EXPECT_EQ(A.sparse()->nonZeros(), 438);

    auto W = load_matrix_market(TIKMOR_FIXTURE_DIR "/wl1033.mtx");
    EXPECT_EQ(W.rows(), 1033);
    EXPECT_EQ(W.cols(), 320);
}
