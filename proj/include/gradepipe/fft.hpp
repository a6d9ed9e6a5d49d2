#pragma once

#include <complex>
#include <span>

#include "gradepipe/raster.hpp"

namespace gradepipe {

using Complex = std::complex<double>;
using ComplexGrid = Raster<Complex>;

/// In-place unnormalized DFT of any length >= 1. Power-of-two lengths use an
/// iterative radix-2 kernel; other lengths go through Bluestein's chirp-z
/// reduction onto a power-of-two convolution.
void fft_inplace(std::span<Complex> data, bool inverse);

/// Forward 2-D DFT, unnormalized.
ComplexGrid fft2(const ComplexGrid& grid);
/// Inverse 2-D DFT including the 1/(M*N) factor.
ComplexGrid ifft2(const ComplexGrid& grid);

ComplexGrid to_complex(const GridF& grid);

}  // namespace gradepipe
