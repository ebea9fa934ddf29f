#include "tikmor/metrics.hpp"
#include "tikmor/problems.hpp"

#include <gtest/gtest.h>

using namespace tikmor;

TEST(Ssim, IdenticalImages)
{
    SeededStream s(1);
    Vector       v(12);
    for (Index i = 0; i < 12; ++i)
        v[i] = s.uniform();
    ImageView x(v, 4, 3);
    EXPECT_DOUBLE_EQ(ssim(x, x), 1.0);
}

TEST(Ssim, ConstantZero)
{
    ImageView z(Vector::Zero(6), 3, 2);
    EXPECT_DOUBLE_EQ(ssim(z, z), 1.0);
}

TEST(Ssim, HandExample)
{
    ImageView    x(Eigen::Vector2d(0, 1), 2, 1), y(Eigen::Vector2d(1, 0), 2, 1);
    const double C2 = 0.03 * 0.03;
    EXPECT_NEAR(ssim(x, y), (-0.5 + C2) / (0.5 + C2), 1e-15);
    EXPECT_NEAR(ssim(x, y), -0.996406, 1e-6);
}

TEST(Ssim, SymmetricAndBounded)
{
    SeededStream s(2);
    for (int t = 0; t < 100; ++t)
    {
        Vector a(20), b(20);
        for (Index i = 0; i < 20; ++i)
        {
            a[i] = s.uniform(-1, 1);
            b[i] = s.uniform(-1, 1);
        }
        ImageView x(a, 5, 4), y(b, 5, 4);
        EXPECT_EQ(ssim(x, y), ssim(y, x));
        EXPECT_LE(std::abs(ssim(x, y)), 1.0);
    }
}

TEST(Ssim, DimensionErrors)
{
    EXPECT_THROW(ImageView(Vector::Zero(5), 2, 2), DimensionError);
    ImageView a(Vector::Zero(4), 2, 2), b(Vector::Zero(4), 4, 1);
    EXPECT_THROW(ssim(a, b), DimensionError);
}
