#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mapleja/errors.hpp"

namespace mapleja {

/// One tabulated optical constant: refractive index n and extinction kappa.
struct OpticalSample {
  double frequency_thz;
  double n;
  double kappa;
};

/// Johnson and Christy data for gold and silver at three frequencies (THz).
inline constexpr std::array<OpticalSample, 3> kGoldJohnsonChristy{{
    {396.55, 0.14, 4.542},
    {425.57, 0.13, 4.103},
    {454.58, 0.14, 3.697},
}};
inline constexpr std::array<OpticalSample, 3> kSilverJohnsonChristy{{
    {396.55, 0.03, 5.242},
    {425.57, 0.04, 4.838},
    {454.58, 0.05, 4.483},
}};

struct InterpResult {
  double value;
  bool extrapolated;
};

/// Quadratic Lagrange interpolation through three (x, v) samples. Returns the
/// sample value itself at a sample abscissa.
inline InterpResult material_interp(std::span<const double, 3> x, std::span<const double, 3> v,
                                    double query) {
  if (x[0] == x[1] || x[0] == x[2] || x[1] == x[2])
    throw ContractError("material samples need three distinct frequencies");
  const double lo = std::min({x[0], x[1], x[2]});
  const double hi = std::max({x[0], x[1], x[2]});
  const bool outside = query < lo || query > hi;
  for (int i = 0; i < 3; ++i)
    if (query == x[i]) return {v[i], false};
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    double l = 1.0;
    for (int k = 0; k < 3; ++k)
      if (k != i) l *= (query - x[k]) / (x[i] - x[k]);
    sum += v[i] * l;
  }
  return {sum, outside};
}

struct OpticalConstants {
  InterpResult n;
  InterpResult kappa;
};

inline OpticalConstants material_interp(std::span<const OpticalSample, 3> table,
                                        double frequency_thz) {
  const std::array<double, 3> f{table[0].frequency_thz, table[1].frequency_thz,
                                table[2].frequency_thz};
  const std::array<double, 3> n{table[0].n, table[1].n, table[2].n};
  const std::array<double, 3> k{table[0].kappa, table[1].kappa, table[2].kappa};
  return {material_interp(f, n, frequency_thz), material_interp(f, k, frequency_thz)};
}

/// Relative complex permittivity n^2 - kappa^2 - 2 i n kappa.
inline std::complex<double> permittivity(double n, double kappa) {
  return {n * n - kappa * kappa, -2.0 * n * kappa};
}

/// Reads three rows "frequency_THz,n,kappa" (an optional header line is
/// skipped).
inline std::array<OpticalSample, 3> read_material_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open material file");
  std::array<OpticalSample, 3> rows{};
  std::size_t count = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::array<double, 3> vals{};
    std::string cell;
    std::size_t c = 0;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      if (c >= 3) throw ParseError(path + ":" + std::to_string(line_no), "more than 3 columns");
      try {
        std::size_t used = 0;
        vals[c] = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      ++c;
    }
    if (!numeric && line_no == 1 && count == 0) continue;
    if (!numeric || c != 3)
      throw ParseError(path + ":" + std::to_string(line_no), "expected frequency_THz,n,kappa");
    if (count == 3) throw ParseError(path + ":" + std::to_string(line_no), "more than 3 rows");
    rows[count++] = {vals[0], vals[1], vals[2]};
  }
  if (count != 3) throw ParseError(path, "expected exactly 3 data rows");
  return rows;
}

}  // namespace mapleja
