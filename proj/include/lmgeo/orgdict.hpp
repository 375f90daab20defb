#pragma once

// Organization-name dictionary keyed by first word, with greedy
// longest-match extraction over tokenized pages.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lmgeo/tags.hpp"

namespace lmgeo {

class OrgDictionary {
 public:
  struct Entry {
    std::string name;                 // first spelling seen
    std::vector<std::string> tokens;  // lower-cased
  };

  OrgDictionary() = default;

  // Names are tokenized and compared case-insensitively; duplicates
  // collapse to the first spelling. Blank names are skipped.
  static OrgDictionary build(std::span<const std::string> names);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // Entries whose first token is `first_word` (any case), longest first;
  // equal lengths are ordered by lower-cased text. Empty when absent.
  std::span<const Entry> bucket(std::string_view first_word) const;
  const std::map<std::string, std::vector<Entry>>& index() const { return index_; }

  // One name per line; '#' lines and blanks are ignored on read.
  static OrgDictionary read(std::istream& in);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::vector<Entry>> index_;
  std::size_t size_ = 0;
};

// Scans left to right; at each position emits the longest name starting
// there and resumes after it. Single-token names are flagged low_confidence.
std::vector<LocationEntity> match_organizations(const OrgDictionary& dict,
                                                std::span<const std::string> tokens);

}  // namespace lmgeo
