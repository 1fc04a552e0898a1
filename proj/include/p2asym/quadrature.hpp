#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace p2asym::quad {

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (61 points); throws QuadratureFailure when the
// error estimate exceeds max(abs_tol, rel_tol*|I|) by more than 1e3.
double adaptive(const Fn& f, double a, double b, double rel_tol = 1e-13, double* err = nullptr, double abs_tol = 0.0);

// Composite 20-point Gauss-Legendre on `panels` equal panels.
double composite_gauss(const Fn& f, double a, double b, int panels);

// Hadamard finite part of the integral over [a, b] of
//   regular(z) + sum_j c_j (z - z0)^{m_j},  with all m_j <= -1,
// where z0 lies in [a, b] (endpoints allowed). Pure-power parts are
// integrated in closed form; log terms use log|z - z0| with the log of
// the cutoff discarded.
double finite_part(const Fn& regular, double a, double b, double z0,
                   const std::vector<std::pair<int, double>>& pole_terms);

}  // namespace p2asym::quad
