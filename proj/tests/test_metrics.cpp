#include "doctest.h"
#include "lmgeo/error.hpp"
#include "lmgeo/metrics.hpp"

using namespace lmgeo;

namespace {

LocationEntity ent(EntityType t, std::size_t b, std::size_t e) {
  return {t, "x", b, e, false};
}

std::vector<LocationEntity> full_page() {
  return {ent(EntityType::kOrganization, 0, 2), ent(EntityType::kDetailed, 3, 6),
          ent(EntityType::kCity, 7, 8), ent(EntityType::kState, 9, 10),
          ent(EntityType::kZip, 10, 11)};
}

}  // namespace

TEST_CASE("predictions equal to gold score 1 everywhere") {
  std::vector<PageEntities> gold{{"a", full_page()}, {"b", full_page()}};
  const auto m = compute_metrics(gold, gold);
  CHECK(m.all_types.precision == 1.0);
  CHECK(m.all_types.recall == 1.0);
  CHECK(m.all_types.f1 == 1.0);
  for (std::size_t i = 0; i < kNumEntityTypes; ++i) {
    CHECK(m.per_type[i].f1 == 1.0);
    CHECK(*m.page_accuracy[i] == 1.0);
  }
  CHECK(*m.full_info_accuracy == 1.0);
}

TEST_CASE("page accuracy is successes over total") {
  CHECK(page_accuracy(8937, 10000) == doctest::Approx(0.8937));
  CHECK(page_accuracy(0, 0) == 0.0);
}

TEST_CASE("zero predictions give zero precision and recall") {
  std::vector<PageEntities> gold{{"a", full_page()}};
  std::vector<PageEntities> pred{{"a", {}}};
  const auto m = compute_metrics(pred, gold);
  CHECK(m.all_types.precision == 0.0);
  CHECK(m.all_types.recall == 0.0);
  CHECK(m.all_types.f1 == 0.0);
  CHECK(*m.full_info_accuracy == 0.0);
}

TEST_CASE("full info needs every type right") {
  auto wrong = full_page();
  wrong[1].end = 5;  // truncated detailed address
  std::vector<PageEntities> gold{{"a", full_page()}, {"b", full_page()}};
  std::vector<PageEntities> pred{{"a", full_page()}, {"b", wrong}};
  const auto m = compute_metrics(pred, gold);
  CHECK(*m.full_info_accuracy == doctest::Approx(0.5));
  CHECK(*m.page_accuracy[static_cast<std::size_t>(EntityType::kDetailed)] ==
        doctest::Approx(0.5));
  CHECK(*m.page_accuracy[static_cast<std::size_t>(EntityType::kCity)] == 1.0);
  const auto& det = m.per_type[static_cast<std::size_t>(EntityType::kDetailed)];
  CHECK(det.precision == doctest::Approx(0.5));
  CHECK(det.recall == doctest::Approx(0.5));
  CHECK(m.all_types.f1 == doctest::Approx(0.9));
}

TEST_CASE("mismatched page ids are rejected") {
  std::vector<PageEntities> a{{"a", {}}};
  std::vector<PageEntities> b{{"b", {}}};
  CHECK_THROWS_AS(compute_metrics(a, b), InputError);
  CHECK_THROWS_AS(compute_metrics(a, std::vector<PageEntities>{}), InputError);
}

TEST_CASE("per-tag F1 treats unseen tags as perfect") {
  std::vector<std::vector<Tag>> gold{{0, 1, 0}};
  std::vector<std::vector<Tag>> pred{{0, 0, 0}};
  const auto f1 = per_tag_f1(pred, gold);
  REQUIRE(f1.size() == kNumTags);
  CHECK(f1[0] == doctest::Approx(0.8));  // tp 2, predicted 3, gold 2
  CHECK(f1[1] == 0.0);
  CHECK(f1[5] == 1.0);
}

TEST_CASE("metrics table has a row per type plus totals") {
  std::vector<PageEntities> gold{{"a", full_page()}};
  const auto table = metrics_table(compute_metrics(gold, gold));
  CHECK(table.find("all types\t1.0000") != std::string::npos);
  CHECK(table.find("detailed\t1.0000") != std::string::npos);
  CHECK(table.find("full info\t-\t-\t-\t1.0000") != std::string::npos);
}
