#include "lmgeo/cbg.hpp"

#include <algorithm>

#include "lmgeo/error.hpp"

namespace lmgeo {

std::vector<ConstraintCircle> build_circles(std::span<const GeoCoordinate> probes,
                                            std::span<const double> rtts_ms,
                                            const MeasurementConstants& consts) {
  if (probes.empty()) throw InputError("no probes to build constraint circles from");
  if (probes.size() != rtts_ms.size()) {
    throw InputError("probe and rtt lists differ in length");
  }
  consts.validate();
  std::vector<ConstraintCircle> circles;
  circles.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    circles.push_back({probes[i], delay_to_distance(rtts_ms[i], consts), i});
  }
  std::stable_sort(circles.begin(), circles.end(),
                   [](const ConstraintCircle& a, const ConstraintCircle& b) {
                     return a.radius < b.radius;
                   });
  return circles;
}

bool inside(const ConstraintCircle& circle, const GeoCoordinate& p, double sphere_radius_km) {
  return great_circle_distance(circle.center, p, sphere_radius_km) <= circle.radius;
}

std::vector<CandidateCoordinate> filter_candidates(std::span<const ConstraintCircle> circles,
                                                   std::vector<CandidateCoordinate> candidates,
                                                   double sphere_radius_km) {
  for (const auto& circle : circles) {
    if (candidates.empty()) break;
    std::erase_if(candidates, [&](const CandidateCoordinate& c) {
      return !inside(circle, c.position, sphere_radius_km);
    });
  }
  return candidates;
}

std::vector<CandidateCoordinate> merge_close(std::span<const CandidateCoordinate> candidates,
                                             double threshold_km, double sphere_radius_km) {
  const std::size_t n = candidates.size();
  std::vector<int> cluster(n, -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (cluster[seed] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.push_back({seed});
    cluster[seed] = id;
    // Breadth-first over the "closer than threshold" graph.
    for (std::size_t head = 0; head < members.back().size(); ++head) {
      const auto& from = candidates[members.back()[head]].position;
      for (std::size_t j = 0; j < n; ++j) {
        if (cluster[j] >= 0) continue;
        if (great_circle_distance(from, candidates[j].position, sphere_radius_km).value() <
            threshold_km) {
          cluster[j] = id;
          members.back().push_back(j);
        }
      }
    }
  }

  std::vector<CandidateCoordinate> out;
  out.reserve(members.size());
  for (auto& group : members) {
    std::sort(group.begin(), group.end());
    double lat = 0.0, lon = 0.0;
    std::size_t count = 0;
    for (std::size_t idx : group) {
      lat += candidates[idx].position.lat();
      lon += candidates[idx].position.lon();
      count += candidates[idx].merged_count;
    }
    const double k = static_cast<double>(group.size());
    CandidateCoordinate merged;
    merged.position = group.size() == 1 ? candidates[group[0]].position
                                        : GeoCoordinate(lat / k, lon / k);
    merged.label = candidates[group[0]].label;
    merged.merged_count = count;
    out.push_back(std::move(merged));
  }
  return out;
}

RegionHint region_hint(std::span<const ConstraintCircle> circles) {
  if (circles.empty()) throw InputError("no constraint circles");
  const auto it = std::min_element(circles.begin(), circles.end(),
                                   [](const ConstraintCircle& a, const ConstraintCircle& b) {
                                     return a.radius < b.radius;
                                   });
  return {it->center, it->radius};
}

}  // namespace lmgeo
