#include "doctest.h"
#include "lmgeo/error.hpp"
#include "lmgeo/random.hpp"
#include "lmgeo/tags.hpp"
#include "lmgeo/text.hpp"

using namespace lmgeo;

namespace {

std::vector<Tag> tags_of(std::initializer_list<const char*> names) {
  std::vector<Tag> out;
  for (const char* n : names) out.push_back(*parse_tag(n));
  return out;
}

}  // namespace

TEST_CASE("tag scheme has 21 tags that round-trip through names") {
  CHECK(kNumTags == 21);
  for (Tag t = 0; t < kNumTags; ++t) {
    const auto name = tag_name(t);
    if (t != kOutside) CHECK(name.find('-') == 1);
    REQUIRE(parse_tag(name).has_value());
    CHECK(*parse_tag(name) == t);
  }
  CHECK(parse_tag("B-detailed") == make_tag(EntityType::kDetailed, TagPosition::kBegin));
  CHECK_FALSE(parse_tag("X-city").has_value());
  CHECK_FALSE(parse_tag("B-country").has_value());
}

TEST_CASE("tokenizer isolates punctuation") {
  const auto toks = tokenize("800 Avenue O, Ely, NV 89301");
  CHECK(toks == std::vector<std::string>{"800", "Avenue", "O", ",", "Ely", ",",
                                         "NV", "89301"});
  const auto c = tokenize("\xC2\xA9" "2020 Acme Corp.");
  CHECK(c == std::vector<std::string>{"\xC2\xA9", "2020", "Acme", "Corp", "."});
}

TEST_CASE("decode of the street address example") {
  const auto tokens = tokenize("800 Avenue O, Ely, NV 89301");
  const auto tags = tags_of({"B-det", "I-det", "E-det", "O", "S-city", "O",
                             "S-state", "S-zip"});
  const auto ents = decode_bieso(tokens, tags);
  REQUIRE(ents.size() == 4);
  CHECK(ents[0].type == EntityType::kDetailed);
  CHECK(ents[0].text == "800 Avenue O");
  CHECK(ents[1].type == EntityType::kCity);
  CHECK(ents[1].text == "Ely");
  CHECK(ents[2].type == EntityType::kState);
  CHECK(ents[2].text == "NV");
  CHECK(ents[3].type == EntityType::kZip);
  CHECK(ents[3].text == "89301");
}

TEST_CASE("all-O decodes to nothing") {
  const std::vector<std::string> tokens{"a", "b", "c"};
  const std::vector<Tag> tags(3, kOutside);
  CHECK(decode_bieso(tokens, tags).empty());
  CHECK_THROWS_AS(decode_bieso(tokens, std::vector<Tag>(2, kOutside)), InputError);
}

TEST_CASE("malformed runs decode leniently") {
  const std::vector<std::string> tokens{"a", "b", "c", "d", "e"};
  // I without B, then B without E.
  auto ents = decode_bieso(tokens, tags_of({"I-city", "I-city", "O", "B-org", "I-org"}));
  REQUIRE(ents.size() == 2);
  CHECK(ents[0].text == "a b");
  CHECK(ents[1].text == "d e");
  CHECK(ents[1].type == EntityType::kOrganization);
  // Type change splits a run.
  ents = decode_bieso(tokens, tags_of({"B-city", "E-state", "O", "S-zip", "S-zip"}));
  REQUIRE(ents.size() == 4);
  CHECK(ents[0].type == EntityType::kCity);
  CHECK(ents[1].type == EntityType::kState);
  CHECK(ents[2].text == "d");
  CHECK(ents[3].text == "e");
}

TEST_CASE("encode then decode is identity on random well-formed labelings") {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(30);
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
    std::vector<LocationEntity> ents;
    std::size_t pos = rng.index(3);
    while (pos < n) {
      const std::size_t len = 1 + rng.index(std::min<std::size_t>(4, n - pos));
      LocationEntity e;
      e.type = kAllEntityTypes[rng.index(kNumEntityTypes)];
      e.begin = pos;
      e.end = pos + len;
      e.text = join(std::span<const std::string>(tokens).subspan(pos, len));
      ents.push_back(e);
      pos += len + rng.index(3);  // may be adjacent
    }
    const auto tags = encode_bieso(n, ents);
    CHECK(decode_bieso(tokens, tags) == ents);
  }
}

TEST_CASE("tokenized page invariants") {
  CHECK_THROWS_AS(TokenizedPage("p", {}), InputError);
  CHECK_THROWS_AS(TokenizedPage("p", {"a b"}), InputError);
  CHECK_NOTHROW(TokenizedPage("p", {"a", "b"}));
}
