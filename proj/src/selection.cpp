#include "lmgeo/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"

namespace lmgeo {

std::vector<double> normalize_by_max(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const double top = *std::max_element(out.begin(), out.end());
  for (auto& v : out) v = top > 0.0 ? v / top : 0.0;
  return out;
}

std::vector<double> complement_softmax(std::span<const double> values) {
  std::vector<double> e(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    e[i] = std::exp(values[i]);
    sum += e[i];
  }
  for (auto& v : e) v = 1.0 - v / sum;
  return e;
}

std::optional<Similarity> delay_similarity(const DelayVector& landmark,
                                           const DelayVector& target) {
  double dot = 0.0, nl = 0.0, nt = 0.0;
  std::size_t shared = 0;
  for (const auto& [probe, rl] : landmark.entries()) {
    const auto rt = target.get(probe);
    if (!rt) continue;
    ++shared;
    dot += rl * *rt;
    nl += rl * rl;
    nt += *rt * *rt;
  }
  if (shared == 0 || nl == 0.0 || nt == 0.0) return std::nullopt;
  Similarity s;
  s.value = std::clamp(dot / (std::sqrt(nl) * std::sqrt(nt)), -1.0, 1.0);
  s.shared = shared;
  s.low_confidence = shared < 3;
  return s;
}

std::vector<double> delay_scores(std::span<const double> similarities) {
  if (similarities.empty()) throw SelectionError("no landmark similarities to normalize");
  std::vector<double> out(similarities.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < similarities.size(); ++i) {
    out[i] = std::max(0.0, similarities[i]);
    sum += out[i];
  }
  if (!(sum > 0.0)) throw SelectionError("every landmark similarity is <= 0");
  for (auto& v : out) v /= sum;
  return out;
}

std::optional<RouteLength> shortest_route_length(std::span<const TraceRoute> to_landmark,
                                                 std::span<const TraceRoute> to_target) {
  std::map<ProbeId, const TraceRoute*> target_by_probe;
  for (const auto& r : to_target) {
    if (r.reached()) target_by_probe.emplace(r.probe, &r);
  }
  std::optional<RouteLength> best;
  for (const auto& lr : to_landmark) {
    if (!lr.reached()) continue;
    const auto it = target_by_probe.find(lr.probe);
    if (it == target_by_probe.end()) continue;
    const TraceRoute& tr = *it->second;

    std::map<RouterId, double> landmark_hops;
    for (const auto& h : lr.hops) landmark_hops[h.router] = h.rtt_ms;

    std::optional<RouteLength> probe_best;
    std::size_t best_depth = 0;
    for (std::size_t depth = 0; depth < tr.hops.size(); ++depth) {
      const auto& h = tr.hops[depth];
      const auto lh = landmark_hops.find(h.router);
      if (lh == landmark_hops.end()) continue;
      const double length = std::max(0.0, *lr.destination_rtt_ms - lh->second) +
                            std::max(0.0, *tr.destination_rtt_ms - h.rtt_ms);
      const bool better =
          !probe_best || length < probe_best->ms ||
          (length == probe_best->ms &&
           (depth > best_depth || (depth == best_depth && h.router < probe_best->router)));
      if (better) {
        probe_best = RouteLength{length, lr.probe, h.router};
        best_depth = depth;
      }
    }
    if (!probe_best) continue;
    if (!best || probe_best->ms < best->ms ||
        (probe_best->ms == best->ms && probe_best->probe < best->probe)) {
      best = probe_best;
    }
  }
  return best;
}

std::vector<double> topology_scores(std::span<const double> route_lengths_ms) {
  if (route_lengths_ms.empty()) return {};
  if (route_lengths_ms.size() == 1) return {0.0};
  return complement_softmax(normalize_by_max(route_lengths_ms));
}

std::vector<double> redistribution_gates(std::span<const double> distances_km) {
  if (distances_km.empty()) return {};
  if (distances_km.size() == 1) return {1.0};
  return complement_softmax(normalize_by_max(distances_km));
}

std::vector<double> combine_scores(std::span<const double> s_d,
                                   std::span<const std::optional<double>> s_t,
                                   double alpha, double beta) {
  if (s_d.size() != s_t.size()) throw InputError("score lists differ in length");
  std::vector<double> out(s_d.size());
  for (std::size_t i = 0; i < s_d.size(); ++i) {
    out[i] = s_t[i] ? alpha * s_d[i] + beta * *s_t[i] : s_d[i];
  }
  return out;
}

std::vector<LandmarkScore> score_landmarks(std::span<const LandmarkObservation> landmarks,
                                           const TargetObservation& target,
                                           const SelectionWeights& weights) {
  std::vector<LandmarkScore> scores;
  std::vector<double> sims;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const auto sim = delay_similarity(landmarks[i].delays, target.delays);
    if (!sim) continue;
    LandmarkScore s;
    s.index = i;
    s.id = landmarks[i].id;
    s.similarity = *sim;
    s.route = shortest_route_length(landmarks[i].routes, target.routes);
    scores.push_back(std::move(s));
    sims.push_back(sim->value);
  }
  if (scores.empty()) throw SelectionError("no landmark shares a probe with the target");
  const auto s_d = delay_scores(sims);
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].s_d = s_d[i];
  apply_topology(scores, weights);
  return scores;
}

void apply_topology(std::vector<LandmarkScore>& scores, const SelectionWeights& weights) {
  std::vector<double> lengths;
  std::vector<std::size_t> with_route;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i].s_t.reset();
    if (scores[i].route) {
      lengths.push_back(scores[i].route->ms);
      with_route.push_back(i);
    }
  }
  const auto s_t = topology_scores(lengths);
  for (std::size_t k = 0; k < with_route.size(); ++k) scores[with_route[k]].s_t = s_t[k];
  for (auto& s : scores) {
    if (s.s_t) {
      s.alpha = weights.alpha_delay;
      s.beta = weights.beta_topo;
      s.s = s.alpha * s.s_d + s.beta * *s.s_t;
    } else {
      s.alpha = 1.0;
      s.beta = 0.0;
      s.s = s.s_d;
    }
  }
}

std::vector<CoordinateScore> redistribute(std::span<const CandidateCoordinate> candidates,
                                          std::span<const GeoCoordinate> landmark_positions,
                                          std::span<const double> landmark_scores) {
  if (landmark_positions.size() != landmark_scores.size()) {
    throw InputError("landmark positions and scores differ in length");
  }
  std::vector<CoordinateScore> out;
  out.reserve(candidates.size());
  std::vector<double> dist(landmark_positions.size());
  for (const auto& c : candidates) {
    for (std::size_t j = 0; j < landmark_positions.size(); ++j) {
      dist[j] = great_circle_distance(c.position, landmark_positions[j]).value();
    }
    CoordinateScore cs;
    cs.gates = redistribution_gates(dist);
    for (std::size_t j = 0; j < cs.gates.size(); ++j) cs.score += cs.gates[j] * landmark_scores[j];
    out.push_back(std::move(cs));
  }
  return out;
}

std::size_t best_candidate(std::span<const CandidateCoordinate> candidates,
                           std::span<const CoordinateScore> scores) {
  if (candidates.empty() || candidates.size() != scores.size()) {
    throw InputError("candidate and score lists must be non-empty and aligned");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (scores[i].score != scores[best].score) {
      if (scores[i].score > scores[best].score) best = i;
    } else if (a.merged_count != b.merged_count) {
      if (a.merged_count > b.merged_count) best = i;
    } else if (a.position < b.position) {
      best = i;
    }
  }
  return best;
}

SelectionResult select_coordinate(std::span<const CandidateCoordinate> candidates,
                                  std::span<const LandmarkObservation> landmarks,
                                  const TargetObservation& target,
                                  const SelectionWeights& weights) {
  if (candidates.empty()) throw InputError("no candidate coordinates");
  SelectionResult result;
  if (candidates.size() == 1) {
    result.chosen = candidates[0];
    return result;
  }
  result.landmarks = score_landmarks(landmarks, target, weights);
  std::vector<GeoCoordinate> positions;
  std::vector<double> s;
  for (const auto& l : result.landmarks) {
    positions.push_back(landmarks[l.index].position);
    s.push_back(l.s);
  }
  result.candidates = redistribute(candidates, positions, s);
  result.best = best_candidate(candidates, result.candidates);
  result.chosen = candidates[result.best];
  return result;
}

std::vector<std::size_t> vicinity(std::span<const GeoCoordinate> landmarks,
                                  const GeoCoordinate& center, DistanceKm radius,
                                  double factor, std::size_t cap) {
  std::vector<std::pair<double, std::size_t>> near;
  const double limit = factor * radius.value();
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const double d = great_circle_distance(center, landmarks[i]).value();
    if (d <= limit) near.emplace_back(d, i);
  }
  std::sort(near.begin(), near.end());
  if (near.size() > cap) near.resize(cap);
  std::vector<std::size_t> out;
  for (const auto& [d, i] : near) out.push_back(i);
  return out;
}

void write_score_table(std::ostream& out, std::span<const CandidateCoordinate> candidates,
                       const SelectionResult& result) {
  out << "landmark\tsimilarity\tshared_probes\ts_d\troute_ms\ts_t\talpha\tbeta\ts\n";
  for (const auto& l : result.landmarks) {
    out << l.id << '\t' << format_fixed(l.similarity.value, 6) << '\t' << l.similarity.shared
        << '\t' << format_fixed(l.s_d, 6) << '\t'
        << (l.route ? format_fixed(l.route->ms, 3) : std::string("-")) << '\t'
        << (l.s_t ? format_fixed(*l.s_t, 6) : std::string("-")) << '\t'
        << format_fixed(l.alpha, 2) << '\t' << format_fixed(l.beta, 2) << '\t'
        << format_fixed(l.s, 6) << '\n';
  }
  out << "candidate\tlabel\tlat\tlon\tmerged\tscore\tgates\tchosen\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    out << i << '\t' << (c.label.empty() ? "-" : c.label) << '\t'
        << format_fixed(c.position.lat(), 6) << '\t' << format_fixed(c.position.lon(), 6)
        << '\t' << c.merged_count << '\t';
    if (i < result.candidates.size()) {
      const auto& cs = result.candidates[i];
      out << format_fixed(cs.score, 6) << '\t';
      for (std::size_t j = 0; j < cs.gates.size(); ++j) {
        out << (j ? "," : "") << format_fixed(cs.gates[j], 4);
      }
      if (cs.gates.empty()) out << '-';
    } else {
      out << "-\t-";
    }
    out << '\t' << (i == result.best ? "*" : "") << '\n';
  }
}

}  // namespace lmgeo
