#include <cmath>

#include "doctest.h"
#include "lmgeo/error.hpp"
#include "lmgeo/geo.hpp"
#include "lmgeo/random.hpp"

using namespace lmgeo;

namespace {

// Chord-length route: 3-D unit vectors, d = 2R asin(|p - q| / 2).
double chord_distance(const GeoCoordinate& a, const GeoCoordinate& b, double r) {
  auto unit = [](const GeoCoordinate& g) {
    const double la = g.lat() * kPi / 180.0;
    const double lo = g.lon() * kPi / 180.0;
    return std::array<double, 3>{std::cos(la) * std::cos(lo),
                                 std::cos(la) * std::sin(lo), std::sin(la)};
  };
  const auto p = unit(a);
  const auto q = unit(b);
  const double chord = std::sqrt((p[0] - q[0]) * (p[0] - q[0]) +
                                 (p[1] - q[1]) * (p[1] - q[1]) +
                                 (p[2] - q[2]) * (p[2] - q[2]));
  return 2.0 * r * std::asin(std::min(1.0, chord / 2.0));
}

GeoCoordinate random_coordinate(Rng& rng) {
  return GeoCoordinate(rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0));
}

}  // namespace

TEST_CASE("longitude is normalized on construction") {
  CHECK(GeoCoordinate(10, 190).lon() == doctest::Approx(-170));
  CHECK(GeoCoordinate(10, -180).lon() == doctest::Approx(180));
  CHECK(GeoCoordinate(10, 540).lon() == doctest::Approx(180));
  CHECK(GeoCoordinate(10, 180).lon() == doctest::Approx(180));
  CHECK_THROWS_AS(GeoCoordinate(90.5, 0), InputError);
  CHECK_THROWS_AS(GeoCoordinate(NAN, 0), InputError);
  CHECK_THROWS_AS(DistanceKm(-1.0), InputError);
}

TEST_CASE("great circle distance fixed points") {
  const GeoCoordinate origin(0, 0);
  CHECK(great_circle_distance(origin, origin).value() == 0.0);
  // A quarter of the circumference: (pi / 2) * R.
  const double quarter = kPi / 2.0 * 6371.0088;
  CHECK(great_circle_distance(origin, GeoCoordinate(0, 90)).value() ==
        doctest::Approx(quarter).epsilon(1e-12));
  CHECK(quarter == doctest::Approx(10007.5576).epsilon(1e-7));
}

TEST_CASE("great circle distance is a metric and agrees with the chord route") {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_coordinate(rng);
    const auto b = random_coordinate(rng);
    const auto c = random_coordinate(rng);
    const double ab = great_circle_distance(a, b).value();
    const double ba = great_circle_distance(b, a).value();
    const double bc = great_circle_distance(b, c).value();
    const double ac = great_circle_distance(a, c).value();
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab >= 0.0);
    const double oracle = chord_distance(a, b, 6371.0088);
    CHECK(std::abs(ab - oracle) <= 0.005 * oracle + 1e-9);
  }
}

TEST_CASE("delay to distance") {
  MeasurementConstants consts;
  CHECK(delay_to_distance(0.0, consts).value() == 0.0);
  const double expected = 0.015 * (4.0 / 9.0) * 299792.458;
  CHECK(delay_to_distance(30.0, consts).value() == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(1998.6).epsilon(1e-4));

  MeasurementConstants loose = consts;
  loose.converting_factor = 2.0 / 3.0;
  const double wide = delay_to_distance(30.0, loose).value();
  CHECK(wide == doctest::Approx(2997.9).epsilon(1e-4));
  CHECK(wide > expected);

  // Linear in rtt.
  CHECK(delay_to_distance(60.0, consts).value() ==
        doctest::Approx(2.0 * expected));
  CHECK_THROWS_AS(delay_to_distance(-1.0, consts), InputError);
}

TEST_CASE("measurement constants bounds") {
  MeasurementConstants c;
  CHECK_NOTHROW(c.validate());
  c.converting_factor = 0.7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.converting_factor = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.converting_factor = 2.0 / 3.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("offset_km moves by roughly the requested distance") {
  const GeoCoordinate base(40.0, -100.0);
  const auto east = offset_km(base, 10.0, 0.0);
  const auto north = offset_km(base, 0.0, 10.0);
  CHECK(great_circle_distance(base, east).value() == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(great_circle_distance(base, north).value() == doctest::Approx(10.0).epsilon(1e-6));
}
