#pragma once

// Turns a raw page plus its known address/organization into a labeled,
// shortened training example: entities are found in the text, only the
// copyright and address sections keep their labels, and long runs of
// unrelated text are cut away.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmgeo/tagger.hpp"

namespace lmgeo {

struct AddressItems {
  std::optional<std::string> detailed;
  std::optional<std::string> city;
  std::optional<std::string> state;
  std::optional<std::string> zip;
};

struct PreprocessConfig {
  std::size_t copyright_context = 100;  // words kept on each side of a ©
  std::size_t address_context = 100;    // words kept around an address section
  std::size_t cohesion_window = 12;
  int cohesion_threshold = 3;  // distinct address item types inside the window
};

// Half-open token range.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const TokenRange&) const = default;
};

// All case-insensitive, non-overlapping occurrences of the given items in
// the tokens. Earlier and then longer occurrences win overlaps.
std::vector<LocationEntity> locate_items(std::span<const std::string> tokens,
                                         const AddressItems& items,
                                         const std::optional<std::string>& organization);

// Windows of `window` tokens whose score (number of distinct address item
// types among detailed/city/state/zip with an occurrence intersecting the
// window) reaches the threshold. Each qualifying window contributes the
// hull of the occurrences it touches; overlapping hulls are merged.
std::vector<TokenRange> find_address_sections(std::size_t length,
                                              std::span<const LocationEntity> entities,
                                              std::size_t window, int threshold);

// [k - context, k + context] around every © token, clamped, merged.
std::vector<TokenRange> copyright_windows(std::span<const std::string> tokens,
                                          std::size_t context);

// Never throws on clue-free text: such a page becomes its first
// 2 * address_context + 1 tokens, all O. Throws InputError on empty text.
tagger::LabeledPage preprocess_page(const std::string& page_id, std::string_view raw_text,
                                    const AddressItems& items,
                                    const std::optional<std::string>& organization,
                                    const PreprocessConfig& config = {});

}  // namespace lmgeo
