#pragma once

// Landmark mining: pages are filtered against a proxy blacklist, their
// location clues extracted, and each clue set turned into a coordinate by
// geocoding a full address, or an organization name inside a region, with
// measurement-based selection when several sites remain.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmgeo/cbg.hpp"
#include "lmgeo/geolocate.hpp"
#include "lmgeo/measurement.hpp"
#include "lmgeo/orgdict.hpp"
#include "lmgeo/selection.hpp"
#include "lmgeo/tagger.hpp"

namespace lmgeo {

enum class PageKind { kHome, kContact };
std::string_view page_kind_name(PageKind k);

struct PageRecord {
  std::string ip;
  std::string url;
  std::string text;
  PageKind kind = PageKind::kHome;

  // Throws InputError on a malformed ip or empty text.
  void validate() const;
};

struct FormattedAddress {
  std::optional<std::string> detailed;
  std::optional<std::string> city;
  std::optional<std::string> state;
  std::optional<std::string> zip;
  std::optional<std::string> organization;

  bool complete() const { return detailed && city && state && zip; }
  bool has_region() const { return city || state || zip; }
  bool empty() const { return !detailed && !has_region() && !organization; }
  // "detailed, city, state, zip" over the parts present.
  std::string address_query() const;
  // "city, state, zip" over the parts present.
  std::string region_query() const;
};

// Lower-cases and drops punctuation-only tokens: "800 Avenue O, Ely" and
// "800 avenue o ely" are the same query.
std::string normalize_query(std::string_view query);

// File-backed stand-in for a geocoding service.
class GeocoderStub {
 public:
  struct Entry {
    std::string name;
    GeoCoordinate position;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  void add(std::string_view query, std::string name, const GeoCoordinate& position);
  // Entries in insertion order; with a region only those within its radius.
  std::vector<Entry> lookup(std::string_view query,
                            const std::optional<RegionHint>& region = std::nullopt) const;
  std::size_t size() const;

  // Tab-separated "query, name, lat, lon"; '#' lines and blanks skipped.
  static GeocoderStub read(std::istream& in);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::vector<Entry>> table_;
};

// ip -> registered organization.
class WhoisTable {
 public:
  void add(const std::string& ip, std::string org);
  std::optional<std::string> organization(const std::string& ip) const;
  // Tab-separated "ip, organization"; '#' lines and blanks skipped.
  static WhoisTable read(std::istream& in);

 private:
  std::map<std::string, std::string> orgs_;
};

// Lower-cased names, one per line; '#' lines and blanks skipped.
std::set<std::string> read_blacklist(std::istream& in);

// Drops pages whose whois organization is on the blacklist (any case).
// Pages without a whois entry are kept.
std::vector<PageRecord> filter_proxies(std::span<const PageRecord> pages, const WhoisTable& whois,
                                       const std::set<std::string>& blacklist);

// Tagger entities first (the first of each type); the dictionary supplies
// the organization when the tagger found none.
FormattedAddress extract_clues(const PageRecord& page, const tagger::TaggerParams& params,
                               const OrgDictionary& dict);

struct MineConfig {
  MeasurementConstants constants;
  SelectionWeights weights;
  double region_radius_km = 50.0;   // org search radius around a geocoded region clue
  double merge_threshold_km = 1.0;
  std::size_t cbg_probes = 100;     // nearest probes used to draw circles
  std::size_t k_probes = 200;       // nearest probes used for selection
  std::size_t vicinity_cap = 1000;  // reference landmarks nearest the candidates
  double vicinity_factor = 5.0;     // ... within factor * smallest circle radius

  void validate() const;
};

enum class MineStatus { kLandmark, kDeferred, kNone, kRejected };
std::string_view mine_status_name(MineStatus s);

struct MineOutcome {
  MineStatus status = MineStatus::kNone;
  std::optional<Landmark> landmark;
  char branch = '-';        // 'a' full address, 'b' org + region, 'c' org + circles
  std::size_t candidates = 0;
  std::string reason;
};

// Landmarks used as references by coordinate selection.
std::vector<std::size_t> selection_references(std::span<const CandidateCoordinate> candidates,
                                              std::span<const Landmark> references,
                                              double radius_km, const MineConfig& config);

// Decides one page. Branch (a) never touches the measurement source, which
// may be null; (b) and (c) need it only when several candidates remain or
// circles must be drawn.
MineOutcome mine_landmark(const PageRecord& page, const FormattedAddress& clues,
                          const GeocoderStub& geocoder, const MeasurementSource* measurements,
                          std::span<const Landmark> references, const MineConfig& config);

struct MiningInputs {
  const tagger::TaggerParams* tagger = nullptr;
  const OrgDictionary* dictionary = nullptr;
  const GeocoderStub* geocoder = nullptr;
  const MeasurementSource* measurements = nullptr;  // optional
  const WhoisTable* whois = nullptr;                 // optional
  std::set<std::string> blacklist;
  std::vector<Landmark> references;  // known landmarks, e.g. manual ones
};

struct PageReport {
  std::string ip;
  std::string url;
  PageKind kind = PageKind::kHome;
  MineOutcome outcome;
};

struct MiningReport {
  std::size_t pages = 0;
  std::size_t filtered = 0;
  std::vector<PageReport> outcomes;
  std::vector<std::pair<std::string, std::string>> skipped;  // (input, reason)

  std::size_t count(MineStatus s) const;
  std::size_t count(LandmarkSource s) const;
  void write(std::ostream& out) const;
};

struct MiningResult {
  std::vector<Landmark> landmarks;  // one per ip, sorted by ip
  MiningReport report;
};

// Filter, extract, mine. Full-address landmarks are mined first and join
// the references for the selection-based pages. Duplicate ips keep the
// highest tier (the earlier page on ties).
MiningResult build_database(std::span<const PageRecord> pages, const MiningInputs& inputs,
                            const MineConfig& config = {});

// Sorts landmarks by numeric ip; keeps the best tier per ip.
std::vector<Landmark> dedup_landmarks(std::span<const Landmark> landmarks);

// Pages from "<ip>_<home|contact>.txt" files, sorted by file name. Bad
// names, unreadable files and empty pages are reported, never thrown.
// Markup tags are stripped from the text.
struct LoadedPages {
  std::vector<PageRecord> pages;
  std::vector<std::pair<std::string, std::string>> skipped;
};
LoadedPages load_pages(const std::filesystem::path& dir);

std::string strip_markup(std::string_view html);

}  // namespace lmgeo
