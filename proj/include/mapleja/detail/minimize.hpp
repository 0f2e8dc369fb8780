#pragma once

#include <cmath>
#include <utility>

namespace mapleja::detail {

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for a maximum of a unimodal f on [a, b].
template <class F>
Extremum golden_maximize(F&& f, double a, double b, double xtol = 1e-15) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

/// Bounded scalar minimization: Brent's method (golden section with
/// parabolic interpolation), same scheme as the classic fminbound.
template <class F>
Extremum brent_minimize(F&& f, double a, double b, double xatol) {
  constexpr double golden = 0.3819660112501051;
  const double sqrt_eps = std::sqrt(2.2e-16);
  double fulc = a + golden * (b - a);
  double nfc = fulc, xf = fulc;
  double rat = 0.0, e = 0.0;
  double x = xf;
  double fx = f(x);
  double ffulc = fx, fnfc = fx;
  double xm = 0.5 * (a + b);
  double tol1 = sqrt_eps * std::abs(xf) + xatol / 3.0;
  double tol2 = 2.0 * tol1;

  for (int it = 0; it < 500 && std::abs(xf - xm) > (tol2 - 0.5 * (b - a)); ++it) {
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      golden_step = false;
      double r = (xf - nfc) * (fx - ffulc);
      double q = (xf - fulc) * (fx - fnfc);
      double p = (xf - fulc) * q - (xf - nfc) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = rat;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - xf) && p < q * (b - xf)) {
        rat = p / q;
        x = xf + rat;
        if ((x - a) < tol2 || (b - x) < tol2) rat = xm >= xf ? tol1 : -tol1;
      } else {
        golden_step = true;
      }
    }
    if (golden_step) {
      e = xf >= xm ? a - xf : b - xf;
      rat = golden * e;
    }
    x = xf + (std::abs(rat) >= tol1 ? rat : (rat >= 0 ? tol1 : -tol1));
    double fu = f(x);
    if (fu <= fx) {
      if (x >= xf)
        a = xf;
      else
        b = xf;
      fulc = nfc;
      ffulc = fnfc;
      nfc = xf;
      fnfc = fx;
      xf = x;
      fx = fu;
    } else {
      if (x < xf)
        a = x;
      else
        b = x;
      if (fu <= fnfc || nfc == xf) {
        fulc = nfc;
        ffulc = fnfc;
        nfc = x;
        fnfc = fu;
      } else if (fu <= ffulc || fulc == xf || fulc == nfc) {
        fulc = x;
        ffulc = fu;
      }
    }
    xm = 0.5 * (a + b);
    tol1 = sqrt_eps * std::abs(xf) + xatol / 3.0;
    tol2 = 2.0 * tol1;
  }
  return {xf, fx};
}

}  // namespace mapleja::detail
