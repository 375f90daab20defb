#include "lmgeo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/random.hpp"

namespace lmgeo {

MedBenchConfig::MedBenchConfig() {
  sim.region_km = 500.0;
  sim.routers = 1000;
  sim.probes = 50;
  sim.targets = 10;
}

void MedBenchConfig::validate() const {
  if (landmark_counts.empty()) throw ConfigError("no landmark counts to run");
  for (auto n : landmark_counts) {
    if (n == 0) throw ConfigError("landmark counts must be at least 1");
  }
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (sim.probes == 0 || sim.targets == 0) throw ConfigError("bench needs probes and targets");
  sim.validate();
  geolocate.validate();
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double MedRow::med_km() const { return median(errors_km); }
double MedRow::nearest_median_km() const { return median(nearest_km); }

std::vector<MedRow> run_med_bench(const MedBenchConfig& config) {
  config.validate();
  std::vector<MedRow> rows;
  for (std::size_t n : config.landmark_counts) {
    MedRow row;
    row.landmarks = n;
    row.trials = config.trials;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      SimConfig sim = config.sim;
      sim.landmarks = n;
      sim.seed = mix_seed(config.sim.seed, n, trial);
      const auto topo = std::make_shared<const SimTopology>(SimTopology::generate(sim));
      const SimNetwork net(topo);

      std::vector<Landmark> db;
      for (std::size_t i : topo->hosts_with_role(HostRole::kLandmark)) {
        db.push_back({topo->hosts()[i].ip, topo->hosts()[i].position, LandmarkSource::kManual});
      }
      for (std::size_t i : topo->hosts_with_role(HostRole::kTarget)) {
        const auto& target = topo->hosts()[i];
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& l : db) {
          nearest = std::min(nearest, great_circle_distance(target.position, l.position).value());
        }
        try {
          const auto r = geolocate_target(target.ip, db, net, config.geolocate);
          row.errors_km.push_back(great_circle_distance(target.position, r.position).value());
          row.nearest_km.push_back(nearest);
        } catch (const SelectionError&) {
          ++row.failures;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_med_table(std::ostream& out, const MedBenchConfig& config,
                     const std::vector<MedRow>& rows) {
  out << "landmarks\ttrials\ttargets\tfailures\tmed_km\tnearest_landmark_median_km\n";
  for (const auto& r : rows) {
    out << r.landmarks << '\t' << r.trials << '\t' << r.errors_km.size() << '\t' << r.failures
        << '\t' << format_fixed(r.med_km(), 3) << '\t' << format_fixed(r.nearest_median_km(), 3)
        << '\n';
  }
  out << "\nerror_km";
  for (const auto& r : rows) out << "\tcdf_n" << r.landmarks;
  out << '\n';
  for (double km : config.cdf_km) {
    out << format_double(km);
    for (const auto& r : rows) {
      const auto below = std::count_if(r.errors_km.begin(), r.errors_km.end(),
                                       [&](double e) { return e <= km; });
      const double frac = r.errors_km.empty() ? 0.0 : double(below) / double(r.errors_km.size());
      out << '\t' << format_fixed(frac, 4);
    }
    out << '\n';
  }
}

}  // namespace lmgeo
