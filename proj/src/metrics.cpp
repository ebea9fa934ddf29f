#include "tikmor/metrics.hpp"

namespace tikmor
{

ImageView::ImageView(Vector d, Index w, Index h) : data(std::move(d)), width(w), height(h)
{
    if (w < 0 || h < 0 || w * h != data.size())
        throw DimensionError("image size does not match width x height");
}

double ssim(const ImageView& x, const ImageView& y)
{
    if (x.width != y.width || x.height != y.height || x.data.size() != y.data.size())
        throw DimensionError("SSIM needs images of identical dimensions");
    if (x.data.size() == 0)
        throw DimensionError("SSIM of empty images");

    constexpr double C1 = 0.01 * 0.01;
    constexpr double C2 = 0.03 * 0.03;

    const double n   = static_cast<double>(x.data.size());
    const double mx  = x.data.mean();
    const double my  = y.data.mean();
    const auto   dx  = x.data.array() - mx;
    const auto   dy  = y.data.array() - my;
    const double vx  = dx.square().sum() / n;
    const double vy  = dy.square().sum() / n;
    const double cxy = (dx * dy).sum() / n;

    return ((2.0 * mx * my + C1) * (2.0 * cxy + C2)) /
           ((mx * mx + my * my + C1) * (vx + vy + C2));
}

} // namespace tikmor
