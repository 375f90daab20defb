#pragma once

#include <compare>

namespace lmgeo {

inline constexpr double kPi = 3.14159265358979323846;

// Latitude/longitude in degrees. Longitude is normalized into (-180, 180].
class GeoCoordinate {
 public:
  GeoCoordinate() = default;
  // Throws InputError when lat is outside [-90, 90] or either value is not
  // finite.
  GeoCoordinate(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GeoCoordinate&, const GeoCoordinate&) = default;
  friend auto operator<=>(const GeoCoordinate&, const GeoCoordinate&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

// Non-negative finite kilometers.
class DistanceKm {
 public:
  constexpr DistanceKm() = default;
  explicit DistanceKm(double km);

  double value() const { return km_; }

  friend bool operator==(const DistanceKm&, const DistanceKm&) = default;
  friend auto operator<=>(const DistanceKm&, const DistanceKm&) = default;

 private:
  double km_ = 0.0;
};

struct MeasurementConstants {
  // Fraction of light speed used to turn one-way delay into distance.
  double converting_factor = 4.0 / 9.0;
  double light_speed_km_s = 299792.458;
  double sphere_radius_km = 6371.0088;

  // Throws ConfigError unless 0 < f <= 2/3 and the other two are positive.
  void validate() const;
};

// Haversine distance on a sphere of the given radius.
DistanceKm great_circle_distance(const GeoCoordinate& a, const GeoCoordinate& b,
                                 double sphere_radius_km = 6371.0088);

// (rtt / 2) * f * c. Throws InputError on negative or non-finite rtt.
DistanceKm delay_to_distance(double rtt_ms, const MeasurementConstants& consts);

// Moves `from` by the given planar offsets (km east, km north) using a local
// equirectangular approximation. Used for building small synthetic regions.
GeoCoordinate offset_km(const GeoCoordinate& from, double east_km,
                        double north_km, double sphere_radius_km = 6371.0088);

}  // namespace lmgeo
