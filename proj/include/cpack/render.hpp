#pragma once

// SVG rendering of developed complexes.

#include <complex>
#include <string>

#include "cpack/develop.hpp"
#include "cpack/io.hpp"

namespace cpack {

struct Viewport {
  std::complex<double> center{0.5, 0.0};
  double half_width = 2.0;  // world units; the view is square
  double stroke = 1.0;      // pixels
  int px = 800;
};

// Throws std::invalid_argument unless every dimension is positive.
void validate(const Viewport& vp);

// One element per distinct cline meeting the view, in record order (address,
// then corner). Circles keep the record's center and radius verbatim; lines
// are clipped to the view and carry class="line".
std::string render_svg(const Dump& dump, const Viewport& vp);
std::string render_svg(const DevelopedComplex& dc, const Viewport& vp);

}  // namespace cpack
