#include "lmgeo/preprocess.hpp"

#include <algorithm>
#include <array>

#include "lmgeo/error.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

std::vector<TokenRange> merge_ranges(std::vector<TokenRange> ranges) {
  std::sort(ranges.begin(), ranges.end(), [](const TokenRange& a, const TokenRange& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });
  std::vector<TokenRange> out;
  for (const auto& r : ranges) {
    if (!out.empty() && r.begin <= out.back().end) {
      out.back().end = std::max(out.back().end, r.end);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

bool contains(const TokenRange& r, const LocationEntity& e) {
  return r.begin <= e.begin && e.end <= r.end;
}

}  // namespace

std::vector<LocationEntity> locate_items(std::span<const std::string> tokens,
                                         const AddressItems& items,
                                         const std::optional<std::string>& organization) {
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(to_lower(t));

  const std::array<std::pair<EntityType, const std::optional<std::string>*>, 5> wanted = {{
      {EntityType::kOrganization, &organization},
      {EntityType::kDetailed, &items.detailed},
      {EntityType::kCity, &items.city},
      {EntityType::kState, &items.state},
      {EntityType::kZip, &items.zip},
  }};

  std::vector<LocationEntity> found;
  for (const auto& [type, value] : wanted) {
    if (!value->has_value()) continue;
    std::vector<std::string> needle;
    for (auto& t : tokenize(**value)) needle.push_back(to_lower(t));
    if (needle.empty() || needle.size() > lowered.size()) continue;
    for (std::size_t i = 0; i + needle.size() <= lowered.size(); ++i) {
      if (std::equal(needle.begin(), needle.end(), lowered.begin() + i)) {
        LocationEntity e;
        e.type = type;
        e.begin = i;
        e.end = i + needle.size();
        found.push_back(std::move(e));
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const LocationEntity& a, const LocationEntity& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.end != b.end) return a.end > b.end;
    return a.type < b.type;
  });

  std::vector<LocationEntity> out;
  std::size_t reach = 0;
  for (auto& e : found) {
    if (!out.empty() && e.begin < reach) continue;
    e.text = join(tokens.subspan(e.begin, e.end - e.begin));
    reach = e.end;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TokenRange> find_address_sections(std::size_t length,
                                              std::span<const LocationEntity> entities,
                                              std::size_t window, int threshold) {
  std::vector<TokenRange> hulls;
  if (length == 0 || window == 0) return hulls;
  const std::size_t last_start = length > window ? length - window : 0;
  for (std::size_t s = 0; s <= last_start; ++s) {
    const std::size_t stop = std::min(length, s + window);
    std::array<bool, kAllEntityTypes.size()> seen{};
    TokenRange hull{length, 0};
    for (const auto& e : entities) {
      if (e.type == EntityType::kOrganization) continue;
      if (e.begin < stop && e.end > s) {
        seen[static_cast<std::size_t>(e.type)] = true;
        hull.begin = std::min(hull.begin, e.begin);
        hull.end = std::max(hull.end, e.end);
      }
    }
    if (std::count(seen.begin(), seen.end(), true) >= threshold) hulls.push_back(hull);
  }
  return merge_ranges(std::move(hulls));
}

std::vector<TokenRange> copyright_windows(std::span<const std::string> tokens,
                                          std::size_t context) {
  std::vector<TokenRange> out;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k] != kCopyrightSign) continue;
    out.push_back({k > context ? k - context : 0, std::min(tokens.size(), k + context + 1)});
  }
  return merge_ranges(std::move(out));
}

tagger::LabeledPage preprocess_page(const std::string& page_id, std::string_view raw_text,
                                    const AddressItems& items,
                                    const std::optional<std::string>& organization,
                                    const PreprocessConfig& config) {
  auto tokens = tokenize(raw_text);
  if (tokens.empty()) throw InputError("page " + page_id + " has no text");

  const auto entities = locate_items(tokens, items, organization);
  const auto sections = find_address_sections(tokens.size(), entities,
                                              config.cohesion_window,
                                              config.cohesion_threshold);
  const auto copyright = copyright_windows(tokens, config.copyright_context);

  std::vector<TokenRange> kept = copyright;
  for (const auto& s : sections) {
    kept.push_back({s.begin > config.address_context ? s.begin - config.address_context : 0,
                    std::min(tokens.size(), s.end + config.address_context)});
  }
  kept = merge_ranges(std::move(kept));

  if (kept.empty()) {
    tokens.resize(std::min(tokens.size(), 2 * config.address_context + 1));
    std::vector<Tag> tags(tokens.size(), kOutside);
    return {TokenizedPage(page_id, std::move(tokens)), std::move(tags)};
  }

  // Labels survive only inside a copyright window or an address section;
  // an organization also survives right next to an address section.
  std::vector<LocationEntity> labeled;
  for (const auto& e : entities) {
    bool keep = std::any_of(copyright.begin(), copyright.end(),
                            [&](const TokenRange& r) { return contains(r, e); });
    for (const auto& s : sections) {
      if (e.type == EntityType::kOrganization) {
        const TokenRange near{s.begin > config.cohesion_window ? s.begin - config.cohesion_window : 0,
                              s.end + config.cohesion_window};
        keep = keep || contains(near, e);
      } else {
        keep = keep || contains(s, e);
      }
    }
    keep = keep && std::any_of(kept.begin(), kept.end(),
                               [&](const TokenRange& r) { return contains(r, e); });
    if (keep) labeled.push_back(e);
  }
  const auto full_tags = encode_bieso(tokens.size(), labeled);

  std::vector<std::string> out_tokens;
  std::vector<Tag> out_tags;
  for (const auto& r : kept) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      out_tokens.push_back(std::move(tokens[i]));
      out_tags.push_back(full_tags[i]);
    }
  }
  return {TokenizedPage(page_id, std::move(out_tokens)), std::move(out_tags)};
}

}  // namespace lmgeo
