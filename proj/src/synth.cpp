#include "lmgeo/synth.hpp"

#include <array>
#include <string_view>

#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& items) {
  return items[rng.index(N)];
}

constexpr std::array<const char*, 24> kOrgHeads = {
    "Acme", "Blue River", "Northside", "Summit", "Pioneer", "Redwood",
    "Lakeview", "Granite", "Silver Oak", "Harbor", "Evergreen", "Cedar",
    "Maple Leaf", "Sunrise", "Keystone", "Liberty", "Frontier", "Meridian",
    "Riverbend", "Stonebridge", "Bright Path", "Hillcrest", "Oakwood", "Valley"};
constexpr std::array<const char*, 16> kOrgBodies = {
    "Dental", "Family", "Medical", "Legal", "Auto", "Insurance", "Realty",
    "Software", "Hardware", "Printing", "Consulting", "Veterinary", "Design",
    "Plumbing", "Roofing", "Accounting"};
constexpr std::array<const char*, 12> kOrgSuffixes = {
    "Group", "Inc", "LLC", "Clinic", "Associates", "Partners", "Company",
    "Services", "Center", "Corporation", "Studio", "Solutions"};
constexpr std::array<const char*, 22> kStreetNames = {
    "Main", "Oak", "Pine", "Maple", "Washington", "Lincoln", "Park", "Elm",
    "Lake", "Hill", "Church", "Market", "Broadway", "Jefferson", "Highland",
    "Madison", "Spring", "River", "Center", "Franklin", "Walnut", "Chestnut"};
constexpr std::array<const char*, 10> kStreetTypes = {
    "Street", "Avenue", "Road", "Boulevard", "Drive", "Lane", "Way", "Court",
    "St", "Ave"};
constexpr std::array<const char*, 4> kDirections = {"North", "South", "East", "West"};
constexpr std::array<const char*, 8> kUnitWords = {"Suite", "Suite", "Unit", "Floor",
                                                   "Suite", "Building", "Room", "Unit"};
constexpr std::array<const char*, 26> kCities = {
    "Ely", "Reno", "Springfield", "Fairview", "Madison", "Georgetown",
    "Salem", "Franklin", "Clinton", "Arlington", "Ashland", "Burlington",
    "Dover", "Hudson", "Kingston", "Marion", "Oxford", "Milton",
    "San Jose", "Los Angeles", "Salt Lake City", "Santa Fe", "New Haven",
    "Fort Worth", "Cedar Rapids", "Grand Junction"};
constexpr std::array<const char*, 20> kStates = {
    "NV", "CA", "TX", "NY", "IL", "OH", "WA", "OR", "UT", "CO",
    "AZ", "NM", "IA", "CT", "MA", "VA", "GA", "FL", "MN", "WI"};
constexpr std::array<const char*, 30> kFiller = {
    "welcome", "to", "our", "home", "page", "we", "offer", "quality",
    "service", "since", "call", "today", "for", "a", "free", "estimate",
    "about", "us", "news", "events", "hours", "monday", "through", "friday",
    "the", "best", "in", "town", "learn", "more"};

class Builder {
 public:
  void text(std::string_view s) {
    for (auto& t : tokenize(s)) {
      tokens_.push_back(std::move(t));
      tags_.push_back(kOutside);
    }
  }
  void entity(std::string_view s, EntityType type) {
    auto toks = tokenize(s);
    if (toks.empty()) return;
    const std::size_t begin = tokens_.size();
    for (auto& t : toks) tokens_.push_back(std::move(t));
    LocationEntity e;
    e.type = type;
    e.begin = begin;
    e.end = tokens_.size();
    const auto tags = encode_bieso(e.end - e.begin, std::vector<LocationEntity>{
                                                        {type, "", 0, e.end - e.begin}});
    tags_.insert(tags_.end(), tags.begin(), tags.end());
  }
  void filler(Rng& rng, std::size_t max_words) {
    const std::size_t n = rng.index(max_words + 1);
    for (std::size_t i = 0; i < n; ++i) text(pick(rng, kFiller));
  }
  bool empty() const { return tokens_.empty(); }
  tagger::LabeledPage finish(const std::string& id) {
    return {TokenizedPage(id, std::move(tokens_)), std::move(tags_)};
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<Tag> tags_;
};

std::string year(Rng& rng) { return std::to_string(1998 + rng.index(25)); }

}  // namespace

std::string SyntheticCorpus::random_organization() {
  std::string org = pick(rng_, kOrgHeads);
  if (rng_.bernoulli(0.7)) org += std::string(" ") + pick(rng_, kOrgBodies);
  if (rng_.bernoulli(0.8)) org += std::string(" ") + pick(rng_, kOrgSuffixes);
  return org;
}

SyntheticAddress SyntheticCorpus::random_address() {
  SyntheticAddress a;
  a.organization = random_organization();
  const std::string number = std::to_string(1 + rng_.index(9899));
  switch (rng_.index(4)) {
    case 0:
      a.detailed = number + " " + pick(rng_, kStreetNames) + " " + pick(rng_, kStreetTypes);
      break;
    case 1:
      a.detailed = number + " " + pick(rng_, kDirections) + " " +
                   pick(rng_, kStreetNames) + " " + pick(rng_, kStreetTypes);
      break;
    case 2:
      a.detailed = number + " Avenue " + std::string(1, static_cast<char>('A' + rng_.index(26)));
      break;
    default:
      a.detailed = number + " " + pick(rng_, kStreetNames) + " " +
                   pick(rng_, kStreetTypes) + " " + pick(rng_, kUnitWords) + " " +
                   std::to_string(100 + rng_.index(900));
      break;
  }
  a.city = pick(rng_, kCities);
  a.state = pick(rng_, kStates);
  std::string zip = std::to_string(10000 + rng_.index(89999));
  a.zip = zip;
  return a;
}

tagger::LabeledPage SyntheticCorpus::make_page(const std::string& id,
                                               const SyntheticAddress& a,
                                               PageStyle style) {
  Builder b;
  b.filler(rng_, 6);
  switch (style) {
    case PageStyle::kContact:
      switch (rng_.index(3)) {
        case 0:
          b.text("Contact");
          b.entity(a.organization, EntityType::kOrganization);
          b.text("at");
          break;
        case 1:
          b.entity(a.organization, EntityType::kOrganization);
          b.text("is located at");
          break;
        default:
          b.text("Visit");
          b.entity(a.organization, EntityType::kOrganization);
          b.text(":");
          break;
      }
      b.entity(a.detailed, EntityType::kDetailed);
      b.text(",");
      b.entity(a.city, EntityType::kCity);
      b.text(",");
      b.entity(a.state, EntityType::kState);
      b.entity(a.zip, EntityType::kZip);
      if (rng_.bernoulli(0.5)) {
        b.text(". Phone : ( " + std::to_string(200 + rng_.index(800)) + " ) " +
               std::to_string(100 + rng_.index(900)) + " - " +
               std::to_string(1000 + rng_.index(9000)));
      }
      break;
    case PageStyle::kCopyright:
      b.text(rng_.bernoulli(0.5) ? "Copyright \xC2\xA9 " + year(rng_)
                                 : "\xC2\xA9 " + year(rng_));
      b.entity(a.organization, EntityType::kOrganization);
      b.text(". All rights reserved .");
      break;
    case PageStyle::kRegion:
      b.entity(a.organization, EntityType::kOrganization);
      b.text("serves");
      b.entity(a.city, EntityType::kCity);
      b.text(",");
      b.entity(a.state, EntityType::kState);
      b.text("and nearby areas");
      break;
    case PageStyle::kNoClue:
      b.text("welcome");
      break;
  }
  b.filler(rng_, 6);
  return b.finish(id);
}

std::vector<tagger::LabeledPage> SyntheticCorpus::make_corpus(std::size_t n) {
  std::vector<tagger::LabeledPage> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng_.uniform();
    const PageStyle style = u < 0.7    ? PageStyle::kContact
                            : u < 0.85 ? PageStyle::kCopyright
                            : u < 0.95 ? PageStyle::kRegion
                                       : PageStyle::kNoClue;
    out.push_back(make_page("s" + std::to_string(i), random_address(), style));
  }
  return out;
}

std::string page_text(const tagger::LabeledPage& page) {
  return join(page.page.tokens());
}

}  // namespace lmgeo
