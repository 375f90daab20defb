#include "lmgeo/geo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmgeo/error.hpp"

namespace lmgeo {

namespace {

double to_rad(double deg) { return deg * kPi / 180.0; }

double normalize_lon(double lon) {
  double r = std::fmod(lon, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

}  // namespace

GeoCoordinate::GeoCoordinate(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw InputError("coordinate is not finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw InputError("latitude out of range: " + std::to_string(lat));
  }
  lat_ = lat;
  lon_ = normalize_lon(lon);
}

DistanceKm::DistanceKm(double km) : km_(km) {
  if (!std::isfinite(km) || km < 0.0) {
    throw InputError("distance must be finite and non-negative");
  }
}

void MeasurementConstants::validate() const {
  if (!(converting_factor > 0.0 && converting_factor <= 2.0 / 3.0)) {
    throw ConfigError("converting_factor must lie in (0, 2/3]");
  }
  if (!(light_speed_km_s > 0.0) || !std::isfinite(light_speed_km_s)) {
    throw ConfigError("light_speed must be positive");
  }
  if (!(sphere_radius_km > 0.0) || !std::isfinite(sphere_radius_km)) {
    throw ConfigError("sphere_radius must be positive");
  }
}

DistanceKm great_circle_distance(const GeoCoordinate& a, const GeoCoordinate& b,
                                 double sphere_radius_km) {
  const double phi1 = to_rad(a.lat());
  const double phi2 = to_rad(b.lat());
  const double dphi = phi2 - phi1;
  const double dlambda = to_rad(b.lon() - a.lon());
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return DistanceKm(2.0 * sphere_radius_km * std::asin(std::sqrt(h)));
}

DistanceKm delay_to_distance(double rtt_ms, const MeasurementConstants& consts) {
  if (!std::isfinite(rtt_ms) || rtt_ms < 0.0) {
    throw InputError("rtt must be finite and non-negative");
  }
  const double one_way_s = rtt_ms / 2.0 / 1000.0;
  return DistanceKm(one_way_s * consts.converting_factor *
                    consts.light_speed_km_s);
}

GeoCoordinate offset_km(const GeoCoordinate& from, double east_km,
                        double north_km, double sphere_radius_km) {
  const double km_per_deg = sphere_radius_km * kPi / 180.0;
  const double lat = from.lat() + north_km / km_per_deg;
  const double lon =
      from.lon() + east_km / (km_per_deg * std::cos(to_rad(from.lat())));
  return GeoCoordinate(std::clamp(lat, -90.0, 90.0), lon);
}

}  // namespace lmgeo
