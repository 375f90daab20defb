#include "lmgeo/mine.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

bool punctuation_only(std::string_view token) {
  return std::none_of(token.begin(), token.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; });
}

std::string join_present(std::initializer_list<const std::optional<std::string>*> parts) {
  std::string out;
  for (const auto* p : parts) {
    if (!*p) continue;
    if (!out.empty()) out += ", ";
    out += **p;
  }
  return out;
}

// Tab-separated rows, skipping blanks and '#' comments.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t fields, const char* what, Fn fn) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != fields) {
      throw FormatError(std::string(what) + " line " + std::to_string(number) + ": expected " +
                        std::to_string(fields) + " tab-separated fields");
    }
    try {
      fn(f);
    } catch (const std::exception& e) {
      throw FormatError(std::string(what) + " line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::uint64_t ip_order(const std::string& ip) {
  const auto v = parse_ipv4(ip);
  return v ? *v : (std::uint64_t{1} << 32);
}

GeoCoordinate candidate_center(std::span<const CandidateCoordinate> candidates) {
  double lat = 0.0, lon = 0.0;
  for (const auto& c : candidates) {
    lat += c.position.lat();
    lon += c.position.lon();
  }
  const double n = static_cast<double>(candidates.size());
  return GeoCoordinate(lat / n, lon / n);
}

MineOutcome outcome(MineStatus status, char branch, std::string reason) {
  MineOutcome o;
  o.status = status;
  o.branch = branch;
  o.reason = std::move(reason);
  return o;
}

}  // namespace

std::string_view page_kind_name(PageKind k) { return k == PageKind::kHome ? "home" : "contact"; }

void PageRecord::validate() const {
  if (!parse_ipv4(ip)) throw InputError("not an IPv4 address: '" + ip + "'");
  if (trim(text).empty()) throw InputError("page " + ip + " has no text");
}

std::string FormattedAddress::address_query() const {
  return join_present({&detailed, &city, &state, &zip});
}

std::string FormattedAddress::region_query() const { return join_present({&city, &state, &zip}); }

std::string normalize_query(std::string_view query) {
  std::string out;
  for (const auto& token : tokenize(query)) {
    if (punctuation_only(token)) continue;
    if (!out.empty()) out += ' ';
    out += to_lower(token);
  }
  return out;
}

void GeocoderStub::add(std::string_view query, std::string name, const GeoCoordinate& position) {
  const auto key = normalize_query(query);
  if (key.empty()) throw InputError("empty geocoder query");
  table_[key].push_back({std::move(name), position});
}

std::vector<GeocoderStub::Entry> GeocoderStub::lookup(std::string_view query,
                                                      const std::optional<RegionHint>& region) const {
  const auto it = table_.find(normalize_query(query));
  if (it == table_.end()) return {};
  std::vector<Entry> out;
  for (const auto& e : it->second) {
    if (!region || great_circle_distance(e.position, region->center) <= region->radius) {
      out.push_back(e);
    }
  }
  return out;
}

std::size_t GeocoderStub::size() const {
  std::size_t n = 0;
  for (const auto& [k, v] : table_) n += v.size();
  return n;
}

GeocoderStub GeocoderStub::read(std::istream& in) {
  GeocoderStub g;
  for_each_row(in, 4, "geocoder", [&](const std::vector<std::string>& f) {
    g.add(f[0], f[1], GeoCoordinate(parse_double(f[2]), parse_double(f[3])));
  });
  return g;
}

void GeocoderStub::write(std::ostream& out) const {
  for (const auto& [key, entries] : table_) {
    for (const auto& e : entries) {
      out << key << '\t' << e.name << '\t' << format_double(e.position.lat()) << '\t'
          << format_double(e.position.lon()) << '\n';
    }
  }
}

void WhoisTable::add(const std::string& ip, std::string org) {
  if (!parse_ipv4(ip)) throw InputError("not an IPv4 address: '" + ip + "'");
  orgs_[ip] = std::move(org);
}

std::optional<std::string> WhoisTable::organization(const std::string& ip) const {
  const auto it = orgs_.find(ip);
  if (it == orgs_.end()) return std::nullopt;
  return it->second;
}

WhoisTable WhoisTable::read(std::istream& in) {
  WhoisTable w;
  for_each_row(in, 2, "whois", [&](const std::vector<std::string>& f) {
    w.add(std::string(trim(f[0])), std::string(trim(f[1])));
  });
  return w;
}

std::set<std::string> read_blacklist(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.insert(to_lower(t));
  }
  return out;
}

std::vector<PageRecord> filter_proxies(std::span<const PageRecord> pages, const WhoisTable& whois,
                                       const std::set<std::string>& blacklist) {
  std::vector<PageRecord> out;
  for (const auto& p : pages) {
    const auto org = whois.organization(p.ip);
    if (org && blacklist.count(to_lower(trim(*org)))) continue;
    out.push_back(p);
  }
  return out;
}

FormattedAddress extract_clues(const PageRecord& page, const tagger::TaggerParams& params,
                               const OrgDictionary& dict) {
  FormattedAddress a;
  const auto tokens = tokenize(page.text);
  if (tokens.empty()) return a;
  const TokenizedPage tp(page.ip, tokens);
  for (const auto& e : tagger::extract_entities(params, tp)) {
    std::optional<std::string>* slot = nullptr;
    switch (e.type) {
      case EntityType::kOrganization: slot = &a.organization; break;
      case EntityType::kDetailed: slot = &a.detailed; break;
      case EntityType::kCity: slot = &a.city; break;
      case EntityType::kState: slot = &a.state; break;
      case EntityType::kZip: slot = &a.zip; break;
    }
    if (!*slot) *slot = e.text;
  }
  if (!a.organization) {
    const auto matches = match_organizations(dict, tokens);
    const auto strong = std::find_if(matches.begin(), matches.end(),
                                     [](const LocationEntity& m) { return !m.low_confidence; });
    if (strong != matches.end()) {
      a.organization = strong->text;
    } else if (!matches.empty()) {
      a.organization = matches.front().text;
    }
  }
  return a;
}

void MineConfig::validate() const {
  constants.validate();
  if (!(region_radius_km > 0.0)) throw ConfigError("region_radius_km must be > 0");
  if (!(merge_threshold_km >= 0.0)) throw ConfigError("merge_threshold_km must be >= 0");
  if (cbg_probes == 0 || k_probes == 0) throw ConfigError("probe counts must be at least 1");
  if (vicinity_cap == 0) throw ConfigError("vicinity_cap must be at least 1");
  if (!(vicinity_factor > 0.0)) throw ConfigError("vicinity_factor must be > 0");
}

std::string_view mine_status_name(MineStatus s) {
  switch (s) {
    case MineStatus::kLandmark: return "landmark";
    case MineStatus::kDeferred: return "deferred";
    case MineStatus::kNone: return "none";
    case MineStatus::kRejected: return "rejected";
  }
  return "none";
}

std::vector<std::size_t> selection_references(std::span<const CandidateCoordinate> candidates,
                                              std::span<const Landmark> references,
                                              double radius_km, const MineConfig& config) {
  if (candidates.empty() || references.empty()) return {};
  std::vector<GeoCoordinate> positions;
  positions.reserve(references.size());
  for (const auto& r : references) positions.push_back(r.position);
  return vicinity(positions, candidate_center(candidates), DistanceKm(radius_km),
                  config.vicinity_factor, config.vicinity_cap);
}

MineOutcome mine_landmark(const PageRecord& page, const FormattedAddress& clues,
                          const GeocoderStub& geocoder, const MeasurementSource* measurements,
                          std::span<const Landmark> references, const MineConfig& config) {
  // (a) a complete address decides the coordinate on its own.
  if (clues.complete()) {
    const auto query = clues.address_query();
    const auto hits = geocoder.lookup(query);
    if (hits.empty()) {
      return outcome(MineStatus::kRejected, 'a', "geocoder has no match for '" + query + "'");
    }
    auto o = outcome(MineStatus::kLandmark, 'a', {});
    o.candidates = hits.size();
    o.landmark = Landmark{page.ip, hits.front().position, LandmarkSource::kFullAddress};
    return o;
  }
  if (!clues.organization) {
    return outcome(MineStatus::kNone, '-', clues.empty() ? "no clues" : "incomplete address and no organization");
  }
  const std::string& org = *clues.organization;

  const bool measured = measurements && measurements->knows(page.ip);
  DelayVector delays;
  if (measured) delays = measurements->delay_vector(page.ip);

  char branch = 'c';
  std::vector<GeocoderStub::Entry> sites;
  double vicinity_radius = config.region_radius_km;
  std::string note;

  // (b) organization searched inside a geocoded region clue.
  if (clues.has_region()) {
    const auto region = geocoder.lookup(clues.region_query());
    if (!region.empty()) {
      branch = 'b';
      sites = geocoder.lookup(org, RegionHint{region.front().position,
                                              DistanceKm(config.region_radius_km)});
    } else {
      note = "region '" + clues.region_query() + "' not geocoded; ";
    }
  }
  // (c) organization searched inside the smallest constraint circle, then
  // pruned by the others.
  std::vector<CandidateCoordinate> candidates;
  if (branch == 'c') {
    if (!measured || delays.empty()) {
      return outcome(MineStatus::kDeferred, 'c', note + "no measurements to bound '" + org + "'");
    }
    const auto chosen = select_probes(delays, config.cbg_probes).probes;
    std::vector<GeoCoordinate> probe_positions;
    std::vector<double> rtts;
    for (ProbeId p : chosen) {
      const auto& probes = measurements->probes();
      const auto it = std::find_if(probes.begin(), probes.end(),
                                   [&](const ProbeInfo& info) { return info.id == p; });
      if (it == probes.end()) continue;
      probe_positions.push_back(it->position);
      rtts.push_back(*delays.get(p));
    }
    const auto circles = build_circles(probe_positions, rtts, config.constants);
    const auto hint = region_hint(circles);
    vicinity_radius = hint.radius.value();
    std::vector<CandidateCoordinate> raw;
    for (const auto& s : geocoder.lookup(org, hint)) raw.push_back({s.position, s.name, 1});
    candidates = filter_candidates(circles, std::move(raw), config.constants.sphere_radius_km);
  } else {
    for (const auto& s : sites) candidates.push_back({s.position, s.name, 1});
  }
  candidates = merge_close(candidates, config.merge_threshold_km, config.constants.sphere_radius_km);

  MineOutcome o;
  o.branch = branch;
  o.candidates = candidates.size();
  if (candidates.empty()) {
    o.status = MineStatus::kNone;
    o.reason = note + "no site of '" + org + "' in the region";
    return o;
  }
  if (candidates.size() == 1) {
    o.status = MineStatus::kLandmark;
    o.landmark = Landmark{page.ip, candidates.front().position, LandmarkSource::kOrgRegion};
    o.reason = note;
    return o;
  }

  // Several sites: measurement-based selection.
  if (!measured || delays.empty()) {
    o.status = MineStatus::kDeferred;
    o.reason = note + std::to_string(candidates.size()) + " sites and no measurements";
    return o;
  }
  const auto probes = select_probes(delays, config.k_probes).probes;
  std::vector<LandmarkObservation> observed;
  for (std::size_t i : selection_references(candidates, references, vicinity_radius, config)) {
    const auto& ref = references[i];
    if (ref.ip == page.ip || !measurements->knows(ref.ip)) continue;
    auto obs = observe_host(*measurements, ref.ip, probes);
    obs.position = ref.position;
    observed.push_back(std::move(obs));
  }
  const auto self = observe_host(*measurements, page.ip, probes);
  const TargetObservation target{self.delays, self.routes};

  std::size_t pick = 0;
  try {
    if (observed.empty()) throw SelectionError("no reference landmarks near the sites");
    pick = select_coordinate(candidates, observed, target, config.weights).best;
  } catch (const SelectionError& e) {
    // Most-merged site, first on ties.
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (candidates[i].merged_count > candidates[pick].merged_count) pick = i;
    }
    note += std::string(e.what()) + "; took the most-merged site";
  }
  o.status = MineStatus::kLandmark;
  o.landmark = Landmark{page.ip, candidates[pick].position, LandmarkSource::kOrgSelection};
  o.reason = note;
  return o;
}

std::size_t MiningReport::count(MineStatus s) const {
  return static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [&](const PageReport& p) { return p.outcome.status == s; }));
}

std::size_t MiningReport::count(LandmarkSource s) const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [&](const PageReport& p) {
        return p.outcome.landmark && p.outcome.landmark->source == s;
      }));
}

void MiningReport::write(std::ostream& out) const {
  out << "pages\t" << pages << '\n'
      << "skipped\t" << skipped.size() << '\n'
      << "filtered_proxies\t" << filtered << '\n';
  for (auto s : {LandmarkSource::kFullAddress, LandmarkSource::kOrgRegion,
                 LandmarkSource::kOrgSelection}) {
    out << landmark_source_name(s) << '\t' << count(s) << '\n';
  }
  for (auto s : {MineStatus::kDeferred, MineStatus::kNone, MineStatus::kRejected}) {
    out << mine_status_name(s) << '\t' << count(s) << '\n';
  }
  out << "\nip\tkind\tstatus\tbranch\tsource\tcandidates\tlat\tlon\treason\n";
  for (const auto& p : outcomes) {
    const auto& o = p.outcome;
    out << p.ip << '\t' << page_kind_name(p.kind) << '\t' << mine_status_name(o.status) << '\t'
        << o.branch << '\t'
        << (o.landmark ? landmark_source_name(o.landmark->source) : std::string_view("-")) << '\t'
        << o.candidates << '\t'
        << (o.landmark ? format_fixed(o.landmark->position.lat(), 6) : std::string("-")) << '\t'
        << (o.landmark ? format_fixed(o.landmark->position.lon(), 6) : std::string("-")) << '\t'
        << (o.reason.empty() ? "-" : o.reason) << '\n';
  }
  for (const auto& [input, reason] : skipped) out << "skipped\t" << input << '\t' << reason << '\n';
}

std::vector<Landmark> dedup_landmarks(std::span<const Landmark> landmarks) {
  std::vector<Landmark> sorted(landmarks.begin(), landmarks.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Landmark& a, const Landmark& b) {
    return ip_order(a.ip) < ip_order(b.ip) || (ip_order(a.ip) == ip_order(b.ip) && a.ip < b.ip);
  });
  std::vector<Landmark> out;
  for (const auto& l : sorted) {
    if (!out.empty() && out.back().ip == l.ip) {
      if (l.confidence() > out.back().confidence()) out.back() = l;
      continue;
    }
    out.push_back(l);
  }
  return out;
}

MiningResult build_database(std::span<const PageRecord> pages, const MiningInputs& inputs,
                            const MineConfig& config) {
  config.validate();
  if (!inputs.tagger || !inputs.dictionary || !inputs.geocoder) {
    throw ConfigError("mining needs a tagger, a dictionary and a geocoder");
  }
  MiningResult result;
  auto& report = result.report;
  report.pages = pages.size();

  std::vector<PageRecord> valid;
  for (const auto& p : pages) {
    try {
      p.validate();
      valid.push_back(p);
    } catch (const InputError& e) {
      report.skipped.emplace_back(p.ip.empty() ? p.url : p.ip, e.what());
    }
  }
  if (inputs.whois) {
    const auto kept = filter_proxies(valid, *inputs.whois, inputs.blacklist);
    report.filtered = valid.size() - kept.size();
    valid = kept;
  }

  std::vector<FormattedAddress> clues;
  for (const auto& p : valid) clues.push_back(extract_clues(p, *inputs.tagger, *inputs.dictionary));

  std::vector<MineOutcome> outcomes(valid.size());
  std::vector<Landmark> references = inputs.references;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!clues[i].complete()) continue;
    outcomes[i] = mine_landmark(valid[i], clues[i], *inputs.geocoder, nullptr, {}, config);
    if (outcomes[i].landmark) references.push_back(*outcomes[i].landmark);
  }
  references = dedup_landmarks(references);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (clues[i].complete()) continue;
    try {
      outcomes[i] = mine_landmark(valid[i], clues[i], *inputs.geocoder, inputs.measurements,
                                  references, config);
    } catch (const std::exception& e) {
      outcomes[i] = outcome(MineStatus::kRejected, '-', e.what());
    }
  }

  std::vector<Landmark> mined;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    report.outcomes.push_back({valid[i].ip, valid[i].url, valid[i].kind, outcomes[i]});
    if (outcomes[i].landmark) mined.push_back(*outcomes[i].landmark);
  }
  result.landmarks = dedup_landmarks(mined);
  return result;
}

std::string strip_markup(std::string_view html) {
  std::string out;
  bool in_tag = false;
  for (char c : html) {
    if (c == '<') {
      in_tag = true;
      out += ' ';
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out += c;
    }
  }
  const std::pair<std::string_view, std::string_view> entities[] = {
      {"&copy;", kCopyrightSign}, {"&nbsp;", " "}, {"&amp;", "&"}};
  for (const auto& [from, to] : entities) {
    for (auto pos = out.find(from); pos != std::string::npos; pos = out.find(from, pos + to.size())) {
      out.replace(pos, from.size(), to);
    }
  }
  return out;
}

LoadedPages load_pages(const std::filesystem::path& dir) {
  LoadedPages result;
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file()) files.push_back(it->path());
  }
  if (ec) {
    result.skipped.emplace_back(dir.string(), "cannot list directory: " + ec.message());
    return result;
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    const auto stem = f.stem().string();
    const auto cut = stem.rfind('_');
    if (f.extension() != ".txt" || cut == std::string::npos) {
      result.skipped.emplace_back(name, "expected <ip>_<home|contact>.txt");
      continue;
    }
    PageRecord p;
    p.ip = stem.substr(0, cut);
    const auto kind = stem.substr(cut + 1);
    if (kind != "home" && kind != "contact") {
      result.skipped.emplace_back(name, "unknown page kind '" + kind + "'");
      continue;
    }
    p.kind = kind == "home" ? PageKind::kHome : PageKind::kContact;
    p.url = "http://" + p.ip + (p.kind == PageKind::kHome ? "/" : "/contact");
    std::ifstream in(f, std::ios::binary);
    std::ostringstream body;
    if (!(in && body << in.rdbuf())) {
      result.skipped.emplace_back(name, "unreadable");
      continue;
    }
    p.text = strip_markup(body.str());
    try {
      p.validate();
    } catch (const InputError& e) {
      result.skipped.emplace_back(name, e.what());
      continue;
    }
    result.pages.push_back(std::move(p));
  }
  return result;
}

}  // namespace lmgeo
