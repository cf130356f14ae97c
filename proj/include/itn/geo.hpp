#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace itn {

inline constexpr double earth_radius_km = 6371.0;

/// Haversine great-circle distance in km between two points given in degrees.
inline double great_circle_km(double lat1, double lon1, double lat2, double lon2,
                              double radius_km = earth_radius_km) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = lat1 * deg, phi2 = lat2 * deg;
  const double dphi = (lat2 - lat1) * deg;
  const double dlambda = (lon2 - lon1) * deg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace itn
