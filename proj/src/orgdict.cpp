#include "lmgeo/orgdict.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "lmgeo/text.hpp"

namespace lmgeo {

OrgDictionary OrgDictionary::build(std::span<const std::string> names) {
  OrgDictionary dict;
  std::set<std::vector<std::string>> seen;
  for (const auto& name : names) {
    Entry e;
    e.name = std::string(trim(name));
    for (auto& t : tokenize(e.name)) e.tokens.push_back(to_lower(t));
    if (e.tokens.empty() || !seen.insert(e.tokens).second) continue;
    dict.index_[e.tokens.front()].push_back(std::move(e));
    ++dict.size_;
  }
  for (auto& [key, entries] : dict.index_) {
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.tokens.size() != b.tokens.size()) return a.tokens.size() > b.tokens.size();
      return a.tokens < b.tokens;
    });
  }
  return dict;
}

std::span<const OrgDictionary::Entry> OrgDictionary::bucket(std::string_view first_word) const {
  const auto it = index_.find(to_lower(first_word));
  if (it == index_.end()) return {};
  return it->second;
}

OrgDictionary OrgDictionary::read(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    names.emplace_back(t);
  }
  return build(names);
}

void OrgDictionary::write(std::ostream& out) const {
  out << "# lmgeo-orgdict 1\n";
  for (const auto& [key, entries] : index_) {
    for (const auto& e : entries) out << e.name << '\n';
  }
}

std::vector<LocationEntity> match_organizations(const OrgDictionary& dict,
                                                std::span<const std::string> tokens) {
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(to_lower(t));

  std::vector<LocationEntity> out;
  std::size_t i = 0;
  while (i < lowered.size()) {
    std::size_t matched = 0;
    for (const auto& e : dict.bucket(lowered[i])) {
      const std::size_t len = e.tokens.size();
      if (i + len <= lowered.size() &&
          std::equal(e.tokens.begin(), e.tokens.end(), lowered.begin() + i)) {
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    LocationEntity ent;
    ent.type = EntityType::kOrganization;
    ent.begin = i;
    ent.end = i + matched;
    ent.text = join(tokens.subspan(i, matched));
    ent.low_confidence = matched == 1;
    out.push_back(std::move(ent));
    i += matched;
  }
  return out;
}

}  // namespace lmgeo
