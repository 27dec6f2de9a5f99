#pragma once

#include <complex>
#include <string_view>

namespace selberg {

using cplx = std::complex<double>;

enum class PointKind { non_trivial, trivial, boundary_flagged };

inline std::string_view to_string(PointKind k) {
  switch (k) {
    case PointKind::non_trivial: return "non-trivial";
    case PointKind::trivial: return "trivial";
    case PointKind::boundary_flagged: return "boundary-flagged";
  }
  return "non-trivial";
}

/// A solution beta + i*gamma of L(s) = alpha together with how it was refined.
struct AlphaPoint {
  cplx alpha{};
  double beta = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // |L(rho) - alpha|
  int iterations = 0;
  PointKind kind = PointKind::non_trivial;

  cplx rho() const { return {beta, gamma}; }
};

}  // namespace selberg
