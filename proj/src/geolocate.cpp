#include "lmgeo/geolocate.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"

namespace lmgeo {

std::string_view landmark_source_name(LandmarkSource s) {
  switch (s) {
    case LandmarkSource::kManual: return "manual";
    case LandmarkSource::kFullAddress: return "full-address";
    case LandmarkSource::kOrgRegion: return "org-name+region";
    case LandmarkSource::kOrgSelection: return "org-name+selection";
  }
  return "manual";
}

LandmarkSource parse_landmark_source(std::string_view s) {
  for (auto v : {LandmarkSource::kManual, LandmarkSource::kFullAddress, LandmarkSource::kOrgRegion,
                 LandmarkSource::kOrgSelection}) {
    if (s == landmark_source_name(v)) return v;
  }
  throw FormatError("unknown landmark source '" + std::string(s) + "'");
}

int confidence_tier(LandmarkSource s) {
  switch (s) {
    case LandmarkSource::kManual: return 4;
    case LandmarkSource::kFullAddress: return 3;
    case LandmarkSource::kOrgRegion: return 2;
    case LandmarkSource::kOrgSelection: return 1;
  }
  return 0;
}

ProbeSelection select_probes(const DelayVector& target, std::size_t k) {
  if (k == 0) throw InputError("k_probes must be at least 1");
  if (target.empty()) throw InputError("target delay vector is empty");
  std::vector<std::pair<double, ProbeId>> order;
  for (const auto& [probe, rtt] : target.entries()) order.emplace_back(rtt, probe);
  std::sort(order.begin(), order.end());
  ProbeSelection sel;
  sel.truncated = k > order.size();
  order.resize(std::min(k, order.size()));
  for (const auto& [rtt, probe] : order) sel.probes.push_back(probe);
  return sel;
}

DelayVector restrict_to(const DelayVector& v, std::span<const ProbeId> probes) {
  DelayVector out;
  for (ProbeId p : probes) {
    if (const auto rtt = v.get(p)) out.set(p, *rtt);
  }
  return out;
}

LandmarkObservation observe_host(const MeasurementSource& source, const std::string& ip,
                                 std::span<const ProbeId> probes) {
  LandmarkObservation obs;
  obs.id = ip;
  obs.delays = restrict_to(source.delay_vector(ip), probes);
  for (ProbeId p : probes) obs.routes.push_back(source.traceroute(p, ip));
  return obs;
}

void GeolocateConfig::validate() const {
  if (k_probes == 0) throw ConfigError("k_probes must be at least 1");
  if (k_candidates == 0) throw ConfigError("k_candidates must be at least 1");
  if (weights.alpha_delay < 0.0 || weights.beta_topo < 0.0) {
    throw ConfigError("selection weights must be >= 0");
  }
}

std::size_t best_landmark(std::span<const LandmarkScore> scores,
                          std::span<const Landmark> landmarks) {
  if (scores.empty()) throw SelectionError("no scored landmarks");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[best];
    if (a.s != b.s) {
      if (a.s > b.s) best = i;
      continue;
    }
    const auto& pa = landmarks[a.index].position;
    const auto& pb = landmarks[b.index].position;
    if (pa != pb) {
      if (pa < pb) best = i;
    } else if (a.index < b.index) {
      best = i;
    }
  }
  return best;
}

GeolocationResult geolocate_target(const std::string& target_ip,
                                   std::span<const Landmark> landmarks,
                                   const MeasurementSource& source,
                                   const GeolocateConfig& config) {
  config.validate();
  if (landmarks.empty()) throw InputError("landmark database is empty");
  if (!source.knows(target_ip)) throw MeasurementError("unknown target " + target_ip);
  const DelayVector all_target = source.delay_vector(target_ip);
  if (all_target.empty()) throw MeasurementError("target " + target_ip + " is unreachable");

  GeolocationResult r;
  r.target_ip = target_ip;
  const auto sel = select_probes(all_target, config.k_probes);
  r.probes = sel.probes;
  if (sel.truncated) {
    r.warnings.push_back("only " + std::to_string(sel.probes.size()) + " probes available, " +
                         std::to_string(config.k_probes) + " requested");
  }
  const DelayVector target = restrict_to(all_target, r.probes);

  // Delay stage over the whole database.
  std::vector<LandmarkScore> scored;
  std::vector<double> sims;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    if (!source.knows(landmarks[i].ip)) {
      ++r.excluded;
      continue;
    }
    const auto sim = delay_similarity(restrict_to(source.delay_vector(landmarks[i].ip), r.probes),
                                      target);
    if (!sim) {
      ++r.excluded;
      continue;
    }
    LandmarkScore s;
    s.index = i;
    s.id = landmarks[i].ip;
    s.similarity = *sim;
    scored.push_back(std::move(s));
    sims.push_back(sim->value);
  }
  if (scored.empty()) throw SelectionError("no landmark shares a probe with " + target_ip);
  auto s_d = delay_scores(sims);

  // Keep the top k by s_d and renormalize within the kept set.
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s_d[a] > s_d[b]; });
  order.resize(std::min(order.size(), config.k_candidates));
  std::sort(order.begin(), order.end());
  double kept_sum = 0.0;
  for (std::size_t k : order) kept_sum += s_d[k];
  if (!(kept_sum > 0.0)) throw SelectionError("every kept landmark has zero similarity");
  for (std::size_t k : order) {
    auto s = std::move(scored[k]);
    s.s_d = s_d[k] / kept_sum;
    r.scores.push_back(std::move(s));
  }

  // Topology stage over the kept landmarks.
  std::vector<ProbeId> route_probes = r.probes;
  if (!config.reuse_probes_for_routes) {
    route_probes.clear();
    for (const auto& p : source.probes()) route_probes.push_back(p.id);
  }
  std::vector<TraceRoute> target_routes;
  for (ProbeId p : route_probes) target_routes.push_back(source.traceroute(p, target_ip));
  std::vector<TraceRoute> landmark_routes;
  for (auto& s : r.scores) {
    landmark_routes.clear();
    for (ProbeId p : route_probes) landmark_routes.push_back(source.traceroute(p, s.id));
    s.route = shortest_route_length(landmark_routes, target_routes);
  }
  apply_topology(r.scores, config.weights);

  const auto& best = r.scores[best_landmark(r.scores, landmarks)];
  r.landmark = best.index;
  r.landmark_ip = landmarks[best.index].ip;
  r.position = landmarks[best.index].position;
  return r;
}

void write_result(std::ostream& out, const GeolocationResult& r, bool with_scores) {
  out << "target = " << r.target_ip << '\n'
      << "lat = " << format_fixed(r.position.lat(), 6) << '\n'
      << "lon = " << format_fixed(r.position.lon(), 6) << '\n'
      << "landmark = " << r.landmark_ip << '\n'
      << "probes_used = " << r.probes.size() << '\n'
      << "landmarks_scored = " << r.scores.size() << '\n'
      << "landmarks_excluded = " << r.excluded << '\n';
  for (const auto& w : r.warnings) out << "warning = " << w << '\n';
  if (!with_scores) return;
  out << "landmark\tsimilarity\tshared_probes\ts_d\troute_ms\ts_t\talpha\tbeta\ts\n";
  for (const auto& l : r.scores) {
    out << l.id << '\t' << format_fixed(l.similarity.value, 9) << '\t' << l.similarity.shared
        << '\t' << format_fixed(l.s_d, 9) << '\t'
        << (l.route ? format_fixed(l.route->ms, 4) : std::string("-")) << '\t'
        << (l.s_t ? format_fixed(*l.s_t, 9) : std::string("-")) << '\t'
        << format_fixed(l.alpha, 2) << '\t' << format_fixed(l.beta, 2) << '\t'
        << format_fixed(l.s, 9) << '\n';
  }
}

}  // namespace lmgeo
