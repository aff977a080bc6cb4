#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Thin wrapper over FFTW double-precision transforms. Plan creation is
// serialized internally (FFTW plans are not thread-safe to create).
namespace roomac::fft {

// Forward transform of a real sequence; returns the n/2+1 one-sided bins,
// unnormalized (bin 0 = sum of the input).
std::vector<std::complex<double>> real_forward(const std::vector<double>& x);

// Inverse of real_forward for an original length n; scaled by 1/n so
// real_inverse(real_forward(x), x.size()) == x.
std::vector<double> real_inverse(const std::vector<std::complex<double>>& spec, std::size_t n);

// Unnormalized complex forward transform.
std::vector<std::complex<double>> complex_forward(const std::vector<std::complex<double>>& x);

// Complex inverse scaled by 1/n.
std::vector<std::complex<double>> complex_inverse(const std::vector<std::complex<double>>& x);

std::size_t next_pow2(std::size_t n);

}  // namespace roomac::fft
