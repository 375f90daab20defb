#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "lmgeo/error.hpp"
#include "lmgeo/random.hpp"
#include "lmgeo/selection.hpp"

using namespace lmgeo;

namespace {

DelayVector vec(std::initializer_list<double> rtts) {
  DelayVector v;
  ProbeId id = 0;
  for (double r : rtts) v.set(id++, r);
  return v;
}

TraceRoute route(ProbeId probe, std::vector<Hop> hops, double dest_rtt) {
  TraceRoute r;
  r.probe = probe;
  r.destination = "x";
  r.hops = std::move(hops);
  r.destination_rtt_ms = dest_rtt;
  r.complete = true;
  return r;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

const GeoCoordinate kBase(40.0, -100.0);

}  // namespace

TEST_CASE("delay similarity") {
  CHECK(delay_similarity(vec({3, 4, 5}), vec({3, 4, 5}))->value == doctest::Approx(1.0));
  CHECK(delay_similarity(vec({1, 2, 3}), vec({2, 4, 6}))->value == doctest::Approx(1.0));
  CHECK(delay_similarity(vec({1, 0}), vec({0, 1}))->value == doctest::Approx(0.0));
  const auto two = delay_similarity(vec({1, 0}), vec({0, 1}));
  CHECK(two->low_confidence);
  CHECK(two->shared == 2);

  // Only shared probes count.
  DelayVector a = vec({1, 2, 3});
  DelayVector b;
  b.set(1, 2);
  b.set(2, 3);
  b.set(7, 100);
  CHECK(delay_similarity(a, b)->value == doctest::Approx(1.0));
  CHECK(delay_similarity(a, b)->shared == 2);

  DelayVector other;
  other.set(9, 1.0);
  CHECK_FALSE(delay_similarity(a, other).has_value());
  CHECK_FALSE(delay_similarity(vec({0, 0}), vec({1, 2})).has_value());
  CHECK_THROWS_AS(a.set(0, -1.0), InputError);

  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    DelayVector v, scaled;
    const double k = rng.uniform(0.01, 100);
    for (ProbeId p = 0; p < 10; ++p) {
      const double r = rng.uniform(0, 80);
      v.set(p, r);
      scaled.set(p, k * r);
    }
    CHECK(delay_similarity(scaled, v)->value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("delay scores") {
  const std::vector<double> two = {0.8, 0.2};
  const auto s = delay_scores(two);
  CHECK(s[0] == doctest::Approx(0.8));
  CHECK(s[1] == doctest::Approx(0.2));
  CHECK(delay_scores(std::vector<double>{0.3})[0] == 1.0);
  const auto floored = delay_scores(std::vector<double>{-0.5, 0.5, 0.25});
  CHECK(floored[0] == 0.0);
  CHECK(floored[1] == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(delay_scores(std::vector<double>{-0.1, 0.0}), SelectionError);
  CHECK_THROWS_AS(delay_scores({}), SelectionError);
}

TEST_CASE("shortest route through the last shared router") {
  const std::vector<TraceRoute> to_l = {route(0, {{1, 10}, {2, 20}, {35, 35}}, 40)};
  const std::vector<TraceRoute> to_t = {route(0, {{1, 10}, {2, 20}, {35, 35}}, 50)};
  const auto r = shortest_route_length(to_l, to_t);
  REQUIRE(r);
  CHECK(r->ms == doctest::Approx(20.0));
  CHECK(r->router == 35);
}

TEST_CASE("shortest route in the two-probe topology") {
  // Edge delays (one-way ms doubled into rtt increments):
  // P1 -> R1 -> R2 -> L1 and P1 -> R1 -> R2 -> R3 -> H1; R2 is the shared router.
  // P2 -> R5 -> R4 -> L1 and P2 -> R5 -> R4 -> H1; R4 is the shared router.
  const double e_r2_l1 = 6, e_r2_r3 = 3, e_r3_h1 = 4;  // L1 -> R2 -> R3 -> H1: 13
  const double e_r4_l1 = 5, e_r4_h1 = 5;              // L1 -> R4 -> H1: 10
  const std::vector<TraceRoute> to_l = {
      route(1, {{1, 5}, {2, 9}}, 9 + e_r2_l1),
      route(2, {{5, 4}, {4, 8}}, 8 + e_r4_l1),
  };
  const std::vector<TraceRoute> to_t = {
      route(1, {{1, 5}, {2, 9}, {3, 9 + e_r2_r3}}, 9 + e_r2_r3 + e_r3_h1),
      route(2, {{5, 4}, {4, 8}}, 8 + e_r4_h1),
  };
  auto r = shortest_route_length(to_l, to_t);
  REQUIRE(r);
  CHECK(r->ms == doctest::Approx(e_r4_l1 + e_r4_h1));
  CHECK(r->probe == 2);
  CHECK(r->router == 4);

  // Make the other branch shorter and it is chosen instead.
  const std::vector<TraceRoute> to_t2 = {to_t[0], route(2, {{5, 4}, {4, 8}}, 8 + 20)};
  r = shortest_route_length(to_l, to_t2);
  REQUIRE(r);
  CHECK(r->ms == doctest::Approx(e_r2_l1 + e_r2_r3 + e_r3_h1));
  CHECK(r->probe == 1);
  CHECK(r->router == 2);
}

TEST_CASE("shortest route edge cases") {
  const std::vector<TraceRoute> to_l = {route(0, {{1, 10}}, 20)};
  const std::vector<TraceRoute> disjoint = {route(0, {{2, 10}}, 20)};
  CHECK_FALSE(shortest_route_length(to_l, disjoint));
  const std::vector<TraceRoute> other_probe = {route(1, {{1, 10}}, 20)};
  CHECK_FALSE(shortest_route_length(to_l, other_probe));
  TraceRoute silent = route(0, {{1, 10}}, 0);
  silent.destination_rtt_ms.reset();
  CHECK_FALSE(shortest_route_length(to_l, std::vector<TraceRoute>{silent}));

  // Jitter: the router answers later than the destination; clamp at 0.
  const std::vector<TraceRoute> jitter = {route(0, {{1, 25}}, 22)};
  CHECK(shortest_route_length(to_l, jitter)->ms == doctest::Approx(10.0));

  // Two shared routers with the same total: the deeper one in the target route.
  const std::vector<TraceRoute> l2 = {route(0, {{7, 10}, {8, 10}}, 12)};
  const std::vector<TraceRoute> t2 = {route(0, {{7, 10}, {8, 10}}, 13)};
  CHECK(shortest_route_length(l2, t2)->router == 8);
}

TEST_CASE("topology scores") {
  const auto eq = topology_scores(std::vector<double>{7.0, 7.0});
  CHECK(eq[0] == doctest::Approx(0.5));
  CHECK(eq[1] == doctest::Approx(0.5));
  const auto direct = complement_softmax(std::vector<double>{0.0, std::log(3.0)});
  CHECK(direct[0] == doctest::Approx(0.75));
  CHECK(direct[1] == doctest::Approx(0.25));
  CHECK(topology_scores(std::vector<double>{12.0})[0] == 0.0);
  CHECK(topology_scores(std::vector<double>{0.0, 0.0, 0.0})[0] == doctest::Approx(2.0 / 3.0));
  const auto norm = normalize_by_max(std::vector<double>{5.0, 10.0});
  CHECK(norm[0] == 0.5);
  CHECK(norm[1] == 1.0);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> lengths(2 + rng.index(30));
    for (auto& v : lengths) v = rng.uniform(0, 500);
    const auto s = topology_scores(lengths);
    CHECK(sum(s) == doctest::Approx(static_cast<double>(lengths.size()) - 1.0).epsilon(1e-12));
    // Shorter routes score higher.
    for (std::size_t a = 0; a < lengths.size(); ++a) {
      for (std::size_t b = 0; b < lengths.size(); ++b) {
        if (lengths[a] < lengths[b]) CHECK(s[a] > s[b]);
      }
    }
  }
}

TEST_CASE("combine scores") {
  const std::vector<double> s_d = {0.6, 0.4};
  const std::vector<std::optional<double>> s_t = {0.4, std::nullopt};
  const auto s = combine_scores(s_d, s_t, 0.5, 0.5);
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(0.4));
  const auto only_delay = combine_scores(s_d, s_t, 1.0, 0.0);
  CHECK(only_delay[0] == 0.6);
}

TEST_CASE("redistribution gates") {
  const std::vector<CandidateCoordinate> cands = {{kBase, "", 1}};
  const std::vector<GeoCoordinate> marks = {offset_km(kBase, 10, 0), offset_km(kBase, -10, 0)};
  const auto eq = redistribute(cands, marks, std::vector<double>{0.3, 0.7});
  CHECK(eq[0].gates[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(eq[0].gates[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(eq[0].score == doctest::Approx(0.5).epsilon(1e-6));

  const std::vector<GeoCoordinate> one = {marks[0]};
  const auto single = redistribute(cands, one, std::vector<double>{0.42});
  CHECK(single[0].gates[0] == 1.0);
  CHECK(single[0].score == 0.42);

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GeoCoordinate> lm;
    for (int i = 0; i < 2 + static_cast<int>(rng.index(20)); ++i) {
      lm.push_back(offset_km(kBase, rng.uniform(-50, 50), rng.uniform(-50, 50)));
    }
    std::vector<double> s(lm.size(), 1.0);
    const CandidateCoordinate c{offset_km(kBase, rng.uniform(-50, 50), rng.uniform(-50, 50)), "", 1};
    const auto before = redistribute(std::span(&c, 1), lm, s);
    CHECK(sum(before[0].gates) == doctest::Approx(lm.size() - 1.0).epsilon(1e-12));
    // Moving one landmark (not the farthest) closer raises its gate.
    std::size_t far = 0;
    for (std::size_t j = 1; j < lm.size(); ++j) {
      if (great_circle_distance(c.position, lm[j]) > great_circle_distance(c.position, lm[far])) {
        far = j;
      }
    }
    const std::size_t k = far == 0 ? 1 : 0;
    auto moved = lm;
    const double lat = (lm[k].lat() + c.position.lat()) / 2, lon = (lm[k].lon() + c.position.lon()) / 2;
    moved[k] = GeoCoordinate(lat, lon);
    const auto after = redistribute(std::span(&c, 1), moved, s);
    CHECK(after[0].gates[k] > before[0].gates[k]);
  }
}

TEST_CASE("argmax tie-break") {
  const std::vector<CandidateCoordinate> cands = {{GeoCoordinate(1, 1), "a", 1},
                                                  {GeoCoordinate(0, 5), "b", 2},
                                                  {GeoCoordinate(0, 2), "c", 2}};
  std::vector<CoordinateScore> scores(3);
  for (auto& s : scores) s.score = 1.0;
  CHECK(best_candidate(cands, scores) == 2);
  scores[0].score = 1.5;
  CHECK(best_candidate(cands, scores) == 0);
}

TEST_CASE("select coordinate on a hand-built scene") {
  // Two landmarks, two candidates; the target's delays match landmark A.
  const GeoCoordinate a = kBase, b = offset_km(kBase, 100, 0);
  std::vector<LandmarkObservation> marks = {{"A", a, vec({10, 20, 30, 40}), {}},
                                            {"B", b, vec({40, 30, 20, 10}), {}}};
  TargetObservation target{vec({11, 21, 29, 41}), {}};
  const std::vector<CandidateCoordinate> cands = {{offset_km(b, 1, 0), "nearB", 1},
                                                  {offset_km(a, 1, 0), "nearA", 1}};
  const auto res = select_coordinate(cands, marks, target);
  CHECK(res.chosen.label == "nearA");
  CHECK(res.landmarks.size() == 2);
  CHECK(res.landmarks[0].beta == 0.0);  // no routes: delay only
  CHECK(sum({res.landmarks[0].s_d, res.landmarks[1].s_d}) == doctest::Approx(1.0));

  // Positive rescaling of landmark scores keeps the argmax.
  std::vector<GeoCoordinate> pos = {a, b};
  std::vector<double> s = {res.landmarks[0].s, res.landmarks[1].s};
  auto scaled = s;
  for (auto& v : scaled) v *= 7.5;
  CHECK(best_candidate(cands, redistribute(cands, pos, s)) ==
        best_candidate(cands, redistribute(cands, pos, scaled)));

  std::ostringstream table;
  write_score_table(table, cands, res);
  CHECK(table.str().find("nearA") != std::string::npos);

  // A single candidate needs no measurements at all.
  CHECK(select_coordinate(std::span(cands).first(1), {}, target).chosen.label == "nearB");
  CHECK_THROWS_AS(select_coordinate(cands, {}, target), SelectionError);
  CHECK_THROWS_AS(select_coordinate({}, marks, target), InputError);
}

TEST_CASE("score identities on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nl = 2 + rng.index(15);
    std::vector<LandmarkObservation> marks;
    for (std::size_t i = 0; i < nl; ++i) {
      LandmarkObservation o;
      o.id = std::to_string(i);
      o.position = offset_km(kBase, rng.uniform(-100, 100), rng.uniform(-100, 100));
      for (ProbeId p = 0; p < 8; ++p) o.delays.set(p, rng.uniform(1, 50));
      o.routes.push_back(route(0, {{1, 2}, {static_cast<RouterId>(2 + rng.index(3)), 5}},
                               5 + rng.uniform(0, 20)));
      marks.push_back(std::move(o));
    }
    TargetObservation t;
    for (ProbeId p = 0; p < 8; ++p) t.delays.set(p, rng.uniform(1, 50));
    t.routes.push_back(route(0, {{1, 2}, {2, 5}}, 5 + rng.uniform(0, 20)));
    const auto scores = score_landmarks(marks, t);
    double sd = 0, st = 0;
    std::size_t with_t = 0;
    for (const auto& s : scores) {
      sd += s.s_d;
      if (s.s_t) {
        st += *s.s_t;
        ++with_t;
      }
    }
    CHECK(std::abs(sd - 1.0) <= 1e-9);
    if (with_t > 0) CHECK(std::abs(st - (static_cast<double>(with_t) - 1.0)) <= 1e-9);

    std::vector<CandidateCoordinate> cands;
    for (int c = 0; c < 5; ++c) {
      cands.push_back({offset_km(kBase, rng.uniform(-100, 100), rng.uniform(-100, 100)), "", 1});
    }
    std::vector<GeoCoordinate> pos;
    std::vector<double> s;
    for (const auto& l : scores) {
      pos.push_back(marks[l.index].position);
      s.push_back(l.s);
    }
    for (const auto& cs : redistribute(cands, pos, s)) {
      CHECK(std::abs(sum(cs.gates) - (static_cast<double>(pos.size()) - 1.0)) <= 1e-9);
    }
  }
}

TEST_CASE("vicinity keeps the nearest landmarks within the radius") {
  std::vector<GeoCoordinate> lm;
  for (int i = 0; i < 10; ++i) lm.push_back(offset_km(kBase, 10.0 * i, 0));
  const auto v = vicinity(lm, kBase, DistanceKm(10.0), 5.0, 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 0);
  CHECK(v[2] == 2);
  CHECK(vicinity(lm, kBase, DistanceKm(11.0), 5.0, 100).size() == 6);
}
