#pragma once

// Template-based generator of labeled page snippets. Stands in for a real
// annotated web corpus when training and exercising the tagger and the
// mining pipeline.

#include <cstdint>
#include <string>
#include <vector>

#include "lmgeo/random.hpp"
#include "lmgeo/tagger.hpp"

namespace lmgeo {

struct SyntheticAddress {
  std::string organization;
  std::string detailed;
  std::string city;
  std::string state;
  std::string zip;
};

enum class PageStyle {
  kContact,    // organization plus the full four-part address
  kCopyright,  // organization only, inside a copyright line
  kRegion,     // organization plus city/state but no street address
  kNoClue,     // filler text only
};

class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(std::uint64_t seed) : rng_(seed) {}

  SyntheticAddress random_address();
  std::string random_organization();

  tagger::LabeledPage make_page(const std::string& id,
                                const SyntheticAddress& address,
                                PageStyle style);

  // n pages, mostly contact style with a share of copyright/region/no-clue
  // pages. Ids are "s<index>".
  std::vector<tagger::LabeledPage> make_corpus(std::size_t n);

 private:
  Rng rng_;
};

// Raw text of a labeled page (tokens joined by spaces).
std::string page_text(const tagger::LabeledPage& page);

}  // namespace lmgeo
