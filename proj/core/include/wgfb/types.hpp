#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace wgfb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Raised for invalid parameters, unsupported configurations and
/// numerical failures that make a run meaningless.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wgfb
