#pragma once

// Geolocation of an arbitrary target against a landmark database: pick the
// probes nearest the target, score every landmark, and report the best
// landmark's position.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmgeo/geo.hpp"
#include "lmgeo/measurement.hpp"
#include "lmgeo/selection.hpp"

namespace lmgeo {

// How a landmark's position was obtained, best first.
enum class LandmarkSource { kManual, kFullAddress, kOrgRegion, kOrgSelection };

std::string_view landmark_source_name(LandmarkSource s);
LandmarkSource parse_landmark_source(std::string_view s);  // FormatError when unknown
// Ordinal tier; higher wins when two records share an ip.
int confidence_tier(LandmarkSource s);

struct Landmark {
  std::string ip;
  GeoCoordinate position;
  LandmarkSource source = LandmarkSource::kFullAddress;

  int confidence() const { return confidence_tier(source); }
  friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct ProbeSelection {
  std::vector<ProbeId> probes;  // ascending rtt, then id
  bool truncated = false;       // fewer probes available than requested
};

// The k probes with the smallest rtt. Throws InputError when k is 0 or the
// vector is empty.
ProbeSelection select_probes(const DelayVector& target, std::size_t k);

// Keeps only the listed probes.
DelayVector restrict_to(const DelayVector& v, std::span<const ProbeId> probes);

// Delay vector and traceroutes of one host from the given probes.
LandmarkObservation observe_host(const MeasurementSource& source, const std::string& ip,
                                 std::span<const ProbeId> probes);

struct GeolocateConfig {
  std::size_t k_probes = 200;
  std::size_t k_candidates = 1000;
  SelectionWeights weights;
  // Traceroutes come from the probes chosen for the delay stage; when false
  // every probe of the source is used.
  bool reuse_probes_for_routes = true;

  void validate() const;
};

struct GeolocationResult {
  std::string target_ip;
  GeoCoordinate position;        // the chosen landmark's
  std::size_t landmark = 0;      // index into the database
  std::string landmark_ip;
  std::vector<ProbeId> probes;   // used for delay scoring
  std::vector<LandmarkScore> scores;  // the kept candidates; index is into the database
  std::size_t excluded = 0;      // landmarks without usable delay data
  std::vector<std::string> warnings;
};

// Highest s, then smallest (lat, lon), then lowest index.
std::size_t best_landmark(std::span<const LandmarkScore> scores,
                          std::span<const Landmark> landmarks);

// Throws InputError on an empty database, MeasurementError when the target
// is unknown or unreachable, and SelectionError when no landmark is usable.
GeolocationResult geolocate_target(const std::string& target_ip,
                                   std::span<const Landmark> landmarks,
                                   const MeasurementSource& source,
                                   const GeolocateConfig& config = {});

// key=value summary followed by the per-landmark score table.
void write_result(std::ostream& out, const GeolocationResult& r, bool with_scores);

}  // namespace lmgeo
