#include <sstream>

#include "doctest.h"
#include "lmgeo/orgdict.hpp"
#include "support/orgdict_oracle.hpp"

using namespace lmgeo;

TEST_CASE("buckets are keyed by first word and sorted longest first") {
  const std::vector<std::string> names = {"Acme Corp", "Acme Corporation of America",
                                          "acme corp", "Blue River Dental"};
  const auto dict = OrgDictionary::build(names);
  CHECK(dict.size() == 3);
  const auto acme = dict.bucket("ACME");
  REQUIRE(acme.size() == 2);
  CHECK(acme[0].name == "Acme Corporation of America");
  CHECK(acme[1].name == "Acme Corp");
  CHECK(dict.bucket("River").empty());
  CHECK(OrgDictionary::build(std::vector<std::string>{}).empty());
}

TEST_CASE("bucket sizes add up to the distinct name count") {
  Rng rng(5);
  const auto names = testing::random_org_names(rng, 10000);
  const auto dict = OrgDictionary::build(names);
  std::set<std::string> distinct;
  for (const auto& n : names) {
    auto toks = tokenize(n);
    for (auto& t : toks) t = to_lower(t);
    distinct.insert(join(toks));
  }
  std::size_t total = 0;
  for (const auto& [key, entries] : dict.index()) {
    total += entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(entries[i].tokens.front() == key);
      if (i > 0) CHECK(entries[i - 1].tokens.size() >= entries[i].tokens.size());
    }
  }
  CHECK(total == distinct.size());
  CHECK(dict.size() == distinct.size());
}

TEST_CASE("longest name wins and matching is case-insensitive") {
  const std::vector<std::string> names = {"Acme Corp", "Acme Corporation of America"};
  const auto dict = OrgDictionary::build(names);
  const auto toks = tokenize("welcome to ACME Corporation of America homepage");
  const auto found = match_organizations(dict, toks);
  REQUIRE(found.size() == 1);
  CHECK(found[0].text == "ACME Corporation of America");
  CHECK(found[0].begin == 2);
  CHECK(found[0].end == 6);
  CHECK_FALSE(found[0].low_confidence);
  CHECK(match_organizations(dict, tokenize("nothing to see here")).empty());
}

TEST_CASE("punctuation must match exactly and single words are low confidence") {
  const std::vector<std::string> names = {"Smith & Sons", "Zenith"};
  const auto dict = OrgDictionary::build(names);
  CHECK(match_organizations(dict, tokenize("Smith and Sons")).empty());
  const auto found = match_organizations(dict, tokenize("smith & sons near ZENITH"));
  REQUIRE(found.size() == 2);
  CHECK(found[0].text == "smith & sons");
  CHECK(found[1].low_confidence);
}

TEST_CASE("matches never overlap") {
  const std::vector<std::string> names = {"a b", "b c d"};
  const auto dict = OrgDictionary::build(names);
  const auto found = match_organizations(dict, tokenize("a b c d"));
  REQUIRE(found.size() == 1);
  CHECK(found[0].text == "a b");
}

TEST_CASE("matcher equals the brute-force substring matcher") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto names = testing::random_org_names(rng, 1000);
    const auto dict = OrgDictionary::build(names);
    for (int p = 0; p < 5; ++p) {
      const auto page = testing::random_org_page(rng, 30 + rng.index(60));
      const auto got = match_organizations(dict, page);
      const auto want = testing::brute_force_org_match(names, page);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == want[i]);
        CHECK(got[i].low_confidence == want[i].low_confidence);
      }
    }
  }
}

TEST_CASE("dictionary file round trip") {
  const std::vector<std::string> names = {"Acme Corp", "Blue River Dental", "Zenith"};
  const auto dict = OrgDictionary::build(names);
  std::stringstream ss;
  dict.write(ss);
  const auto back = OrgDictionary::read(ss);
  CHECK(back.size() == 3);
  std::stringstream again;
  back.write(again);
  CHECK(again.str() == [&] {
    std::stringstream s;
    dict.write(s);
    return s.str();
  }());
}
