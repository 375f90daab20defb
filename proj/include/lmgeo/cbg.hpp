#pragma once

// Constraint circles from probe RTTs, iterative candidate filtering against
// them, and single-linkage merging of nearby candidates.

#include <span>
#include <string>
#include <vector>

#include "lmgeo/geo.hpp"

namespace lmgeo {

struct ConstraintCircle {
  GeoCoordinate center;
  DistanceKm radius;
  std::size_t probe_index = 0;  // position in the caller's probe list
};

struct CandidateCoordinate {
  GeoCoordinate position;
  std::string label;
  std::size_t merged_count = 1;
};

// One circle per probe, radius = delay_to_distance(rtt). Sorted by radius;
// ties keep probe order. Throws InputError on empty or mismatched input.
std::vector<ConstraintCircle> build_circles(std::span<const GeoCoordinate> probes,
                                            std::span<const double> rtts_ms,
                                            const MeasurementConstants& consts = {});

// Boundary counts as inside.
bool inside(const ConstraintCircle& circle, const GeoCoordinate& p,
            double sphere_radius_km = 6371.0088);

// Drops, circle by circle, the candidates outside it. The survivors are the
// candidates inside every circle; may be empty.
std::vector<CandidateCoordinate> filter_candidates(std::span<const ConstraintCircle> circles,
                                                   std::vector<CandidateCoordinate> candidates,
                                                   double sphere_radius_km = 6371.0088);

// Single-linkage clusters at `threshold_km` (pairs at distance < threshold
// are linked). Each cluster becomes the lat/lon mean of its members, keeps
// the first member's label and sums merged_count. Clusters are ordered by
// their first member.
std::vector<CandidateCoordinate> merge_close(std::span<const CandidateCoordinate> candidates,
                                             double threshold_km = 1.0,
                                             double sphere_radius_km = 6371.0088);

struct RegionHint {
  GeoCoordinate center;
  DistanceKm radius;
};

// The smallest circle. Throws InputError on an empty list.
RegionHint region_hint(std::span<const ConstraintCircle> circles);

}  // namespace lmgeo
