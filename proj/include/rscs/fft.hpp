#pragma once

#include <complex>
#include <vector>

namespace rscs::fft {

/// Half-spectrum of a real 2-D array: rows x (cols/2 + 1) complex bins.
struct Spectrum {
    int rows = 0;
    int cols = 0; // real-domain columns
    std::vector<std::complex<double>> bins;

    int ccols() const { return cols / 2 + 1; }
    std::size_t size() const { return bins.size(); }
};

/// Forward r2c transform of a row-major rows x cols real array.
Spectrum forward(const double* in, int rows, int cols);

/// Inverse c2r transform, normalized so backward(forward(x)) == x.
void backward(const Spectrum& spec, double* out);

/// Largest bin modulus (the spectral norm of the circular convolution
/// operator with this kernel).
double max_modulus(const Spectrum& spec);

} // namespace rscs::fft
