#pragma once

// Measurement-based coordinate selection. Landmarks are scored by delay
// vector similarity to the target and by the length of the shortest
// indirect route between them; the scores are then handed to candidate
// coordinates through distance-based gates.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmgeo/cbg.hpp"
#include "lmgeo/measurement.hpp"

namespace lmgeo {

struct Similarity {
  double value = 0.0;
  std::size_t shared = 0;       // probes present in both vectors
  bool low_confidence = false;  // fewer than 3 shared probes
};

// Cosine similarity over the probes both vectors contain. nullopt when no
// probe is shared or either aligned vector is all zeros.
std::optional<Similarity> delay_similarity(const DelayVector& landmark,
                                           const DelayVector& target);

// Similarities floored at 0, then divided by their sum. Throws
// SelectionError when the list is empty or every floored value is 0.
std::vector<double> delay_scores(std::span<const double> similarities);

struct RouteLength {
  double ms = 0.0;
  ProbeId probe = 0;
  RouterId router = 0;  // the closest common router used
};

// For each probe that reaches both hosts, the common router minimizing
// est(R->landmark) + est(R->target), with est(R->X) = rtt(X) - rtt(R)
// clamped at 0. Ties go to the router deepest in the target route, then
// the lowest router id. Returns the minimum over probes (lowest probe id on
// ties), or nullopt when no probe has a common router.
std::optional<RouteLength> shortest_route_length(std::span<const TraceRoute> to_landmark,
                                                 std::span<const TraceRoute> to_target);

// values / max(values); all zeros when the max is 0. Keeps exp() in range
// whatever the units.
std::vector<double> normalize_by_max(std::span<const double> values);

// 1 - exp(x_i) / sum_j exp(x_j). Sums to n - 1.
std::vector<double> complement_softmax(std::span<const double> values);

// complement_softmax of the max-normalized lengths. A single value scores 0.
std::vector<double> topology_scores(std::span<const double> route_lengths_ms);

// Same transform over one candidate's landmark distances; a single
// landmark gets gate 1.
std::vector<double> redistribution_gates(std::span<const double> distances_km);

// alpha * s_d + beta * s_t where s_t is known, s_d alone otherwise.
std::vector<double> combine_scores(std::span<const double> s_d,
                                   std::span<const std::optional<double>> s_t,
                                   double alpha, double beta);

struct SelectionWeights {
  double alpha_delay = 0.5;
  double beta_topo = 0.5;
};

struct LandmarkObservation {
  std::string id;
  GeoCoordinate position;
  DelayVector delays;
  std::vector<TraceRoute> routes;
};

struct TargetObservation {
  DelayVector delays;
  std::vector<TraceRoute> routes;
};

struct LandmarkScore {
  std::size_t index = 0;  // into the landmark list given to the scorer
  std::string id;
  Similarity similarity;
  double s_d = 0.0;
  std::optional<RouteLength> route;
  std::optional<double> s_t;
  double alpha = 1.0;
  double beta = 0.0;
  double s = 0.0;
};

// Scores every landmark with a usable similarity; the others are left out.
// Throws SelectionError when none is usable.
std::vector<LandmarkScore> score_landmarks(std::span<const LandmarkObservation> landmarks,
                                           const TargetObservation& target,
                                           const SelectionWeights& weights = {});

// Fills s_t/alpha/beta/s of already delay-scored landmarks from their
// route lengths.
void apply_topology(std::vector<LandmarkScore>& scores, const SelectionWeights& weights);

struct CoordinateScore {
  double score = 0.0;
  std::vector<double> gates;  // per scored landmark
};

// score(c) = sum_j gate(l_j, c) * s(l_j).
std::vector<CoordinateScore> redistribute(std::span<const CandidateCoordinate> candidates,
                                          std::span<const GeoCoordinate> landmark_positions,
                                          std::span<const double> landmark_scores);

// Highest score, then highest merged_count, then smallest (lat, lon).
std::size_t best_candidate(std::span<const CandidateCoordinate> candidates,
                           std::span<const CoordinateScore> scores);

struct SelectionResult {
  std::size_t best = 0;
  CandidateCoordinate chosen;
  std::vector<LandmarkScore> landmarks;
  std::vector<CoordinateScore> candidates;
};

// A single candidate is returned without looking at measurements. Throws
// InputError with no candidates and SelectionError when no landmark is
// usable.
SelectionResult select_coordinate(std::span<const CandidateCoordinate> candidates,
                                  std::span<const LandmarkObservation> landmarks,
                                  const TargetObservation& target,
                                  const SelectionWeights& weights = {});

// Indices of landmarks within factor * radius of the center, nearest first,
// at most `cap` of them.
std::vector<std::size_t> vicinity(std::span<const GeoCoordinate> landmarks,
                                  const GeoCoordinate& center, DistanceKm radius,
                                  double factor = 5.0, std::size_t cap = 1000);

// Tab-separated audit table of landmark and candidate scores.
void write_score_table(std::ostream& out, std::span<const CandidateCoordinate> candidates,
                       const SelectionResult& result);

}  // namespace lmgeo
