#ifndef TIKMOR_METRICS_HPP
#define TIKMOR_METRICS_HPP

#include "tikmor/core.hpp"

namespace tikmor
{

/// Row-major image of width x height pixels.
struct ImageView
{
    Vector data;
    Index  width  = 0;
    Index  height = 0;

    ImageView() = default;
    ImageView(Vector d, Index w, Index h);
};

///
/// Global structural similarity with C1 = 0.01^2, C2 = 0.03^2 and population
/// (1/N) statistics. Identical images score 1; higher is more similar.
///
double ssim(const ImageView& x, const ImageView& y);

} // namespace tikmor

#endif // TIKMOR_METRICS_HPP
