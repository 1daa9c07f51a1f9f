#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bjj/errors.hpp"

namespace bjj::detail {

template <typename Real>
struct QuadratureResult {
  Real value;
  Real error;
  int intervals;
};

template <typename Real, typename F>
std::pair<Real, Real> gauss_kronrod_15(const F& f, Real a, Real b) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights at the odd Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7]
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const Real center = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = f(center);
  Real kronrod = fc * Real(wgk[7]);
  Real gauss = fc * Real(wg[3]);
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * Real(xgk[j]);
    const Real sum = f(center - dx) + f(center + dx);
    kronrod += Real(wgk[j]) * sum;
    if (j % 2 == 1) gauss += Real(wg[j / 2]) * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

/// Integrates f over [a, b] until the error estimate is below max(rel_tol |I|, abs_tol).
template <typename Real, typename F>
QuadratureResult<Real> integrate(const F& f, Real a, Real b, Real rel_tol, Real abs_tol = 0,
                                 int max_intervals = 4000) {
  struct Piece {
    Real a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::vector<Piece> pieces;
  auto [v, e] = gauss_kronrod_15<Real>(f, a, b);
  pieces.push_back({a, b, v, e});
  Real total = v;
  Real total_error = e;
  while (total_error > std::max(rel_tol * std::abs(total), abs_tol)) {
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "adaptive quadrature did not converge on [" << a << ", " << b << "]: estimate " << total
          << ", error " << total_error << " after " << pieces.size() << " intervals (rel_tol "
          << rel_tol << ")";
      throw NumericalError(msg.str());
    }
    std::pop_heap(pieces.begin(), pieces.end());
    const Piece worst = pieces.back();
    pieces.pop_back();
    const Real mid = (worst.a + worst.b) / 2;
    auto [lv, le] = gauss_kronrod_15<Real>(f, worst.a, mid);
    auto [rv, re] = gauss_kronrod_15<Real>(f, mid, worst.b);
    pieces.push_back({worst.a, mid, lv, le});
    std::push_heap(pieces.begin(), pieces.end());
    pieces.push_back({mid, worst.b, rv, re});
    std::push_heap(pieces.begin(), pieces.end());
    // Re-summed from scratch; repeated subtraction would drift.
    total = 0;
    total_error = 0;
    for (const auto& p : pieces) {
      total += p.value;
      total_error += p.error;
    }
  }
  const int count = static_cast<int>(pieces.size());
  return {total, total_error, count};
}

}  // namespace bjj::detail
