#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmgeo {

enum class EntityType : std::uint8_t { kOrganization, kDetailed, kCity, kState, kZip };
inline constexpr std::size_t kNumEntityTypes = 5;
inline constexpr std::array<EntityType, kNumEntityTypes> kAllEntityTypes = {
    EntityType::kOrganization, EntityType::kDetailed, EntityType::kCity,
    EntityType::kState, EntityType::kZip};

enum class TagPosition : std::uint8_t { kBegin, kInside, kEnd, kSingle };

// Short label used inside tags ("org", "det", "city", "state", "zip").
std::string_view short_name(EntityType t);
// Human label used in reports ("organization", "detailed", ...).
std::string_view display_name(EntityType t);
std::optional<EntityType> parse_entity_type(std::string_view s);

// Tag index: 0 is O, 1 + 4*type + position otherwise.
using Tag = std::uint8_t;
inline constexpr std::size_t kNumTags = 1 + 4 * kNumEntityTypes;
inline constexpr Tag kOutside = 0;

constexpr Tag make_tag(EntityType t, TagPosition p) {
  return static_cast<Tag>(1 + 4 * static_cast<int>(t) + static_cast<int>(p));
}
constexpr EntityType tag_type(Tag tag) {
  return static_cast<EntityType>((tag - 1) / 4);
}
constexpr TagPosition tag_position(Tag tag) {
  return static_cast<TagPosition>((tag - 1) % 4);
}

std::string tag_name(Tag tag);
// Accepts "O" and "<B|I|E|S>-<type>"; type may be short or display form.
std::optional<Tag> parse_tag(std::string_view s);

// A whitespace-free token sequence from one page.
class TokenizedPage {
 public:
  TokenizedPage() = default;
  // Throws InputError on an empty sequence or a token containing whitespace.
  TokenizedPage(std::string source_id, std::vector<std::string> tokens);

  const std::string& source_id() const { return source_id_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::string source_id_;
  std::vector<std::string> tokens_;
};

// A decoded span [begin, end) of one entity type.
struct LocationEntity {
  EntityType type = EntityType::kOrganization;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool low_confidence = false;

  friend bool operator==(const LocationEntity& a, const LocationEntity& b) {
    return a.type == b.type && a.text == b.text && a.begin == b.begin &&
           a.end == b.end;
  }
};

// Lenient BIESO decode. Well-formed B(I)*E and S spans decode exactly; a
// malformed run of same-type tags (I without B, B without E) becomes one
// entity covering the run.
std::vector<LocationEntity> decode_bieso(std::span<const std::string> tokens,
                                         std::span<const Tag> tags);

// Writes tags for non-overlapping entities; everything else is O.
std::vector<Tag> encode_bieso(std::size_t length,
                              std::span<const LocationEntity> entities);

}  // namespace lmgeo
