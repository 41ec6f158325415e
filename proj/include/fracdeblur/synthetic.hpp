#pragma once

#include "fracdeblur/grid.hpp"

namespace fracdeblur {

/// Deterministic piecewise-smooth test scene: shaded background, a disc,
/// a rectangle, a triangle and a striped patch. Colour scenes give each
/// shape a different hue.
PixelGrid make_synthetic_image(int height, int width, int channels = 1);

} // namespace fracdeblur
