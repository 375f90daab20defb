#pragma once

// Landmark-density experiment: median error distance of geolocation in the
// simulator as the number of landmarks grows.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lmgeo/geolocate.hpp"
#include "lmgeo/netsim.hpp"

namespace lmgeo {

struct MedBenchConfig {
  SimConfig sim;  // landmarks is overridden per row
  std::vector<std::size_t> landmark_counts = {10, 100, 1000};
  std::size_t trials = 30;
  GeolocateConfig geolocate;
  // Error thresholds (km) at which the CDF is reported.
  std::vector<double> cdf_km = {1, 2, 5, 10, 20, 50, 100, 200};

  MedBenchConfig();
  void validate() const;
};

struct MedRow {
  std::size_t landmarks = 0;
  std::size_t trials = 0;
  std::vector<double> errors_km;   // one per geolocated target, all trials
  std::vector<double> nearest_km;  // distance to the closest landmark, same order
  std::size_t failures = 0;        // targets that could not be geolocated

  double med_km() const;
  double nearest_median_km() const;
};

double median(std::vector<double> values);  // NaN when empty

std::vector<MedRow> run_med_bench(const MedBenchConfig& config);

// One MED row per landmark count, then the CDF of error distances.
void write_med_table(std::ostream& out, const MedBenchConfig& config,
                     const std::vector<MedRow>& rows);

}  // namespace lmgeo
