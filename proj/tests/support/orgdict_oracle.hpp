#pragma once

// Brute-force organization matcher and random fixtures shared by the unit
// and acceptance tests.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "lmgeo/random.hpp"
#include "lmgeo/tags.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo::testing {

// Tries every substring length at every position against the full set of
// names, longest first, and resumes after a hit.
inline std::vector<LocationEntity> brute_force_org_match(
    const std::vector<std::string>& names, const std::vector<std::string>& tokens) {
  std::set<std::string> keys;
  std::size_t longest = 0;
  for (const auto& n : names) {
    auto toks = tokenize(n);
    if (toks.empty()) continue;
    longest = std::max(longest, toks.size());
    for (auto& t : toks) t = to_lower(t);
    keys.insert(join(toks, "\x1f"));
  }
  std::vector<std::string> lowered;
  for (const auto& t : tokens) lowered.push_back(to_lower(t));

  std::vector<LocationEntity> out;
  std::size_t i = 0;
  while (i < lowered.size()) {
    std::size_t hit = 0;
    for (std::size_t len = std::min(longest, lowered.size() - i); len >= 1; --len) {
      std::vector<std::string> sub(lowered.begin() + i, lowered.begin() + i + len);
      if (keys.count(join(sub, "\x1f"))) {
        hit = len;
        break;
      }
    }
    if (hit == 0) {
      ++i;
      continue;
    }
    LocationEntity e;
    e.type = EntityType::kOrganization;
    e.begin = i;
    e.end = i + hit;
    std::vector<std::string> orig(tokens.begin() + i, tokens.begin() + i + hit);
    e.text = join(orig);
    e.low_confidence = hit == 1;
    out.push_back(e);
    i += hit;
  }
  return out;
}

inline const std::vector<std::string>& org_word_pool() {
  static const std::vector<std::string> pool = [] {
    std::vector<std::string> p;
    for (int i = 0; i < 40; ++i) p.push_back("w" + std::to_string(i));
    for (const char* s : {"Acme", "Group", "Inc", "&", "of", "the", "Dental", "-", "Co", "."}) {
      p.push_back(s);
    }
    return p;
  }();
  return pool;
}

inline std::string random_case(Rng& rng, std::string s) {
  for (auto& c : s) {
    if (rng.bernoulli(0.3)) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

inline std::vector<std::string> random_org_names(Rng& rng, std::size_t n) {
  const auto& pool = org_word_pool();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng.index(4);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < len; ++k) words.push_back(random_case(rng, pool[rng.index(pool.size())]));
    names.push_back(join(words));
  }
  return names;
}

inline std::vector<std::string> random_org_page(Rng& rng, std::size_t n) {
  const auto& pool = org_word_pool();
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < n; ++i) {
    toks.push_back(rng.bernoulli(0.2) ? "filler" + std::to_string(rng.index(9))
                                      : random_case(rng, pool[rng.index(pool.size())]));
  }
  return toks;
}

}  // namespace lmgeo::testing
