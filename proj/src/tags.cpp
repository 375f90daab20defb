#include "lmgeo/tags.hpp"

#include <algorithm>
#include <cctype>

#include "lmgeo/error.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kShort = {
    "org", "det", "city", "state", "zip"};
constexpr std::array<std::string_view, kNumEntityTypes> kDisplay = {
    "organization", "detailed", "city", "state", "zip"};
constexpr std::string_view kPositions = "BIES";

}  // namespace

std::string_view short_name(EntityType t) {
  return kShort[static_cast<std::size_t>(t)];
}

std::string_view display_name(EntityType t) {
  return kDisplay[static_cast<std::size_t>(t)];
}

std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (std::size_t i = 0; i < kNumEntityTypes; ++i) {
    if (s == kShort[i] || s == kDisplay[i]) return static_cast<EntityType>(i);
  }
  return std::nullopt;
}

std::string tag_name(Tag tag) {
  if (tag == kOutside) return "O";
  std::string out(1, kPositions[static_cast<std::size_t>(tag_position(tag))]);
  out += '-';
  out += short_name(tag_type(tag));
  return out;
}

std::optional<Tag> parse_tag(std::string_view s) {
  if (s == "O") return kOutside;
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  const auto pos = kPositions.find(s[0]);
  if (pos == std::string_view::npos) return std::nullopt;
  const auto type = parse_entity_type(s.substr(2));
  if (!type) return std::nullopt;
  return make_tag(*type, static_cast<TagPosition>(pos));
}

TokenizedPage::TokenizedPage(std::string source_id,
                             std::vector<std::string> tokens)
    : source_id_(std::move(source_id)), tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw InputError("page has no tokens");
  for (const auto& t : tokens_) {
    if (t.empty() || std::any_of(t.begin(), t.end(), [](char c) {
          return std::isspace(static_cast<unsigned char>(c));
        })) {
      throw InputError("token is empty or contains whitespace");
    }
  }
}

std::vector<LocationEntity> decode_bieso(std::span<const std::string> tokens,
                                         std::span<const Tag> tags) {
  if (tokens.size() != tags.size()) {
    throw InputError("token and tag sequences differ in length");
  }
  std::vector<LocationEntity> out;
  bool open = false;
  std::size_t open_begin = 0;
  EntityType open_type = EntityType::kOrganization;

  auto close = [&](std::size_t end) {
    if (!open) return;
    LocationEntity e;
    e.type = open_type;
    e.begin = open_begin;
    e.end = end;
    e.text = join(tokens.subspan(e.begin, e.end - e.begin));
    out.push_back(std::move(e));
    open = false;
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag tag = tags[i];
    if (tag == kOutside || tag >= kNumTags) {
      close(i);
      continue;
    }
    const EntityType type = tag_type(tag);
    const TagPosition pos = tag_position(tag);
    const bool continues = open && open_type == type &&
                           (pos == TagPosition::kInside || pos == TagPosition::kEnd);
    if (!continues) {
      close(i);
      open = true;
      open_begin = i;
      open_type = type;
    }
    if (pos == TagPosition::kEnd || pos == TagPosition::kSingle) close(i + 1);
  }
  close(tags.size());
  return out;
}

std::vector<Tag> encode_bieso(std::size_t length,
                              std::span<const LocationEntity> entities) {
  std::vector<Tag> tags(length, kOutside);
  for (const auto& e : entities) {
    if (e.begin >= e.end || e.end > length) {
      throw InputError("entity span out of bounds");
    }
    for (std::size_t i = e.begin; i < e.end; ++i) {
      if (tags[i] != kOutside) throw InputError("entities overlap");
    }
    if (e.end - e.begin == 1) {
      tags[e.begin] = make_tag(e.type, TagPosition::kSingle);
      continue;
    }
    tags[e.begin] = make_tag(e.type, TagPosition::kBegin);
    for (std::size_t i = e.begin + 1; i + 1 < e.end; ++i) {
      tags[i] = make_tag(e.type, TagPosition::kInside);
    }
    tags[e.end - 1] = make_tag(e.type, TagPosition::kEnd);
  }
  return tags;
}

}  // namespace lmgeo
