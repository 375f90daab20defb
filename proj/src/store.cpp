#include "lmgeo/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <variant>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

// Seeds get their own alternative: std::uint64_t may be std::size_t.
struct SeedRef {
  std::uint64_t* p;
};
using FieldRef = std::variant<double*, std::size_t*, int*, SeedRef, std::string*>;

// Every config key, in file order.
std::vector<std::pair<std::string_view, FieldRef>> fields(EngineConfig& c) {
  return {
      {"converting_factor", &c.constants.converting_factor},
      {"light_speed_km_s", &c.constants.light_speed_km_s},
      {"sphere_radius_km", &c.constants.sphere_radius_km},
      {"alpha_delay", &c.weights.alpha_delay},
      {"beta_topo", &c.weights.beta_topo},
      {"k_probes", &c.k_probes},
      {"k_candidates", &c.k_candidates},
      {"merge_threshold_km", &c.merge_threshold_km},
      {"region_radius_km", &c.region_radius_km},
      {"cbg_probes", &c.cbg_probes},
      {"vicinity_factor", &c.vicinity_factor},
      {"vicinity_cap", &c.vicinity_cap},
      {"embed_dim", &c.dims.embed},
      {"encoder_hidden", &c.dims.encoder_hidden},
      {"decoder_hidden", &c.dims.decoder_hidden},
      {"alpha_distinguish", &c.train.alpha_distinguish},
      {"epochs", &c.train.epochs},
      {"batch_size", &c.train.batch_size},
      {"learning_rate", &c.train.learning_rate},
      {"clip_norm", &c.train.clip_norm},
      {"train_seed", SeedRef{&c.train.seed}},
      {"sim_config", &c.sim_config},
      {"seed", SeedRef{&c.seed}},
  };
}

void require(bool ok, std::string_view key, std::string_view what) {
  if (!ok) throw ConfigError(std::string(key) + " " + std::string(what));
}

}  // namespace

void EngineConfig::validate() const {
  const double f = constants.converting_factor;
  require(f > 0.0 && f <= 2.0 / 3.0, "converting_factor", "must lie in (0, 2/3]");
  require(constants.light_speed_km_s > 0.0 && std::isfinite(constants.light_speed_km_s),
          "light_speed_km_s", "must be positive");
  require(constants.sphere_radius_km > 0.0 && std::isfinite(constants.sphere_radius_km),
          "sphere_radius_km", "must be positive");
  require(weights.alpha_delay >= 0.0 && std::isfinite(weights.alpha_delay), "alpha_delay", "must be >= 0");
  require(weights.beta_topo >= 0.0 && std::isfinite(weights.beta_topo), "beta_topo", "must be >= 0");
  require(weights.alpha_delay + weights.beta_topo > 0.0, "alpha_delay", "and beta_topo must not both be 0");
  require(k_probes > 0, "k_probes", "must be >= 1");
  require(k_candidates > 0, "k_candidates", "must be >= 1");
  require(merge_threshold_km >= 0.0 && std::isfinite(merge_threshold_km), "merge_threshold_km", "must be >= 0");
  require(region_radius_km > 0.0 && std::isfinite(region_radius_km), "region_radius_km", "must be > 0");
  require(cbg_probes > 0, "cbg_probes", "must be >= 1");
  require(vicinity_factor > 0.0 && std::isfinite(vicinity_factor), "vicinity_factor", "must be > 0");
  require(vicinity_cap > 0, "vicinity_cap", "must be >= 1");
  require(dims.embed > 0, "embed_dim", "must be >= 1");
  require(dims.encoder_hidden > 0, "encoder_hidden", "must be >= 1");
  require(dims.decoder_hidden > 0, "decoder_hidden", "must be >= 1");
  require(train.alpha_distinguish >= 0.0 && std::isfinite(train.alpha_distinguish), "alpha_distinguish",
          "must be >= 0");
  require(train.epochs > 0, "epochs", "must be >= 1");
  require(train.batch_size > 0, "batch_size", "must be >= 1");
  require(train.learning_rate > 0.0 && std::isfinite(train.learning_rate), "learning_rate", "must be > 0");
  require(std::isfinite(train.clip_norm), "clip_norm", "must be finite");
}

EngineConfig EngineConfig::parse(std::istream& in) {
  EngineConfig c;
  auto table = fields(c);
  for (const auto& kv : read_key_values(in)) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == kv.key; });
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
    try {
      std::visit(
          [&](auto field) {
            using F = decltype(field);
            if constexpr (std::is_same_v<F, SeedRef>) {
              *field.p = static_cast<std::uint64_t>(parse_int(kv.value));
            } else if constexpr (std::is_same_v<F, double*>) {
              *field = parse_double(kv.value);
            } else if constexpr (std::is_same_v<F, std::string*>) {
              *field = kv.value;
            } else {
              const auto v = parse_int(kv.value);
              if (v < 0) throw FormatError("must be >= 0");
              *field = static_cast<std::remove_pointer_t<F>>(v);
            }
          },
          it->second);
    } catch (const FormatError& e) {
      throw ConfigError("line " + std::to_string(kv.line) + ": " + kv.key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse(in);
}

void EngineConfig::write(std::ostream& out) const {
  auto copy = *this;
  for (const auto& [key, ref] : fields(copy)) {
    out << key << " = ";
    std::visit(
        [&](auto field) {
          if constexpr (std::is_same_v<decltype(field), SeedRef>) {
            out << *field.p;
          } else if constexpr (std::is_same_v<decltype(field), double*>) {
            out << format_double(*field);
          } else {
            out << *field;
          }
        },
        ref);
    out << '\n';
  }
}

bool operator==(const EngineConfig& a, const EngineConfig& b) {
  std::ostringstream sa, sb;
  a.write(sa);
  b.write(sb);
  return sa.str() == sb.str();
}

GeolocateConfig EngineConfig::geolocate() const {
  GeolocateConfig g;
  g.k_probes = k_probes;
  g.k_candidates = k_candidates;
  g.weights = weights;
  return g;
}

MineConfig EngineConfig::mine() const {
  MineConfig m;
  m.constants = constants;
  m.weights = weights;
  m.region_radius_km = region_radius_km;
  m.merge_threshold_km = merge_threshold_km;
  m.cbg_probes = cbg_probes;
  m.k_probes = k_probes;
  m.vicinity_cap = vicinity_cap;
  m.vicinity_factor = vicinity_factor;
  return m;
}

void write_landmark_db(std::ostream& out, std::span<const Landmark> landmarks) {
  std::vector<std::pair<std::uint32_t, const Landmark*>> order;
  order.reserve(landmarks.size());
  for (const auto& l : landmarks) {
    const auto ip = parse_ipv4(l.ip);
    if (!ip) throw InputError("landmark ip '" + l.ip + "' is not IPv4");
    order.emplace_back(*ip, &l);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i].first == order[i - 1].first) throw InputError("duplicate landmark ip " + order[i].second->ip);
  }
  out << kLandmarkDbHeader << '\n';
  for (const auto& [ip, l] : order) {
    out << format_ipv4(ip) << '\t' << format_double(l->position.lat()) << '\t'
        << format_double(l->position.lon()) << '\t' << landmark_source_name(l->source) << '\t'
        << l->confidence() << '\n';
  }
}

std::vector<Landmark> read_landmark_db(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kLandmarkDbHeader) {
    throw FormatError("landmark db line 1: expected '" + std::string(kLandmarkDbHeader) + "'");
  }
  std::vector<Landmark> out;
  std::set<std::uint32_t> seen;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      const auto f = split(line, '\t');
      if (f.size() != 5) throw FormatError("expected 5 tab-separated fields");
      const auto ip = parse_ipv4(f[0]);
      if (!ip) throw FormatError("bad ip '" + f[0] + "'");
      if (!seen.insert(*ip).second) throw FormatError("duplicate ip " + f[0]);
      Landmark l{f[0], GeoCoordinate(parse_double(f[1]), parse_double(f[2])), parse_landmark_source(f[3])};
      if (parse_int(f[4]) != l.confidence()) throw FormatError("confidence does not match source");
      out.push_back(std::move(l));
    } catch (const std::exception& e) {
      throw FormatError("landmark db line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Landmark> load_landmark_db(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read landmark db " + path.string());
  return read_landmark_db(in);
}

void save_landmark_db(const std::filesystem::path& path, std::span<const Landmark> landmarks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write landmark db " + path.string());
  write_landmark_db(out, landmarks);
}

}  // namespace lmgeo
