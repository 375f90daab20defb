#pragma once

// Engine configuration and the landmark database file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmgeo/geolocate.hpp"
#include "lmgeo/mine.hpp"
#include "lmgeo/tagger.hpp"

namespace lmgeo {

struct EngineConfig {
  MeasurementConstants constants;
  SelectionWeights weights;
  std::size_t k_probes = 200;
  std::size_t k_candidates = 1000;
  double merge_threshold_km = 1.0;
  double region_radius_km = 50.0;
  std::size_t cbg_probes = 100;
  double vicinity_factor = 5.0;
  std::size_t vicinity_cap = 1000;
  tagger::TaggerDims dims;
  tagger::TrainConfig train;
  std::string sim_config;  // path, may be empty
  std::uint64_t seed = 1;

  // Throws ConfigError naming the offending key.
  void validate() const;

  // Flat key=value, '#' comments; missing keys keep their defaults and
  // unknown keys are rejected.
  static EngineConfig parse(std::istream& in);
  static EngineConfig load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  GeolocateConfig geolocate() const;
  MineConfig mine() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&);
};

inline constexpr std::string_view kLandmarkDbHeader = "lmgeo-landmarks 1";

// Header line, then "ip<TAB>lat<TAB>lon<TAB>source<TAB>confidence" per
// landmark sorted by numeric ip. Throws InputError on a duplicate ip.
void write_landmark_db(std::ostream& out, std::span<const Landmark> landmarks);
// Throws FormatError with the line number on malformed input.
std::vector<Landmark> read_landmark_db(std::istream& in);

std::vector<Landmark> load_landmark_db(const std::filesystem::path& path);
void save_landmark_db(const std::filesystem::path& path, std::span<const Landmark> landmarks);

}  // namespace lmgeo
