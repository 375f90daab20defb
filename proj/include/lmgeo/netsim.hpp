#pragma once

// Deterministic synthetic network: routers scattered over a square region,
// wired as a Gabriel graph, with hosts (probes, landmarks, targets)
// attached to their nearest router. Produces pings and traceroutes, and
// serves as the measurement source for every experiment.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmgeo/geo.hpp"
#include "lmgeo/measurement.hpp"

namespace lmgeo {

enum class DelayMode { kProportional, kNoise, kLastHop };

std::string_view delay_mode_name(DelayMode m);
DelayMode parse_delay_mode(std::string_view s);  // ConfigError when unknown

struct DelayModel {
  DelayMode mode = DelayMode::kProportional;
  // Signal speed as a fraction of light speed. Kept below the 4/9 used to
  // draw constraint circles so that the circles always cover the truth.
  double propagation_factor = 0.4;
  double noise_stddev_ms = 0.0;  // half-normal extra per (probe, host) pair
  double lasthop_ms = 0.0;       // per-host extra, uniform in [0, lasthop_ms]
  double nonresponse_prob = 0.0;  // chance that a router never answers traceroute

  void validate() const;
};

struct SimConfig {
  double region_km = 500.0;  // side of the square
  double origin_lat = 39.0;  // square center
  double origin_lon = -98.0;
  std::size_t routers = 1000;
  std::size_t probes = 50;
  std::size_t landmarks = 100;
  std::size_t targets = 20;
  DelayModel delay;
  std::uint64_t seed = 1;

  void validate() const;
  // Flat key=value text with '#' comments; unknown keys are rejected.
  static SimConfig parse(std::istream& in);
  void write(std::ostream& out) const;
};

enum class HostRole { kProbe, kLandmark, kTarget };
std::string_view host_role_name(HostRole r);

struct SimHost {
  std::string ip;
  HostRole role = HostRole::kTarget;
  GeoCoordinate position;
  std::size_t router = 0;   // attachment
  double access_ms = 0.0;   // one-way delay to the attachment router
  double lasthop_ms = 0.0;  // extra added to every rtt touching this host
};

// Host placed by the caller instead of at random.
struct HostSpec {
  std::string ip;  // assigned automatically when empty
  HostRole role = HostRole::kTarget;
  GeoCoordinate position;
};

struct SimRouter {
  GeoCoordinate position;
  double x_km = 0.0;  // planar position relative to the region center
  double y_km = 0.0;
  bool silent = false;
};

struct SimEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double delay_ms = 0.0;  // one way
};

class SimTopology {
 public:
  // Random routers and hosts from the config, plus the given hosts (placed
  // first, in order). Throws ConfigError on an infeasible config.
  static SimTopology generate(const SimConfig& config, std::span<const HostSpec> extra = {});

  const SimConfig& config() const { return config_; }
  const std::vector<SimRouter>& routers() const { return routers_; }
  const std::vector<SimEdge>& edges() const { return edges_; }
  const std::vector<SimHost>& hosts() const { return hosts_; }
  const std::vector<std::vector<std::pair<std::size_t, double>>>& adjacency() const {
    return adjacency_;
  }
  // Index into hosts(), or nullopt.
  std::optional<std::size_t> find_host(const std::string& ip) const;
  std::vector<std::size_t> hosts_with_role(HostRole role) const;

  // Text dump of routers, edges and hosts.
  void write(std::ostream& out) const;

 private:
  SimConfig config_;
  std::vector<SimRouter> routers_;
  std::vector<SimEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
  std::vector<SimHost> hosts_;
  std::unordered_map<std::string, std::size_t> by_ip_;
};

// Single-source shortest one-way delays over the router graph, with the
// predecessor of each router on its shortest path.
struct ShortestPaths {
  std::vector<double> delay_ms;
  std::vector<std::size_t> previous;  // == own index at the source / unreachable
};
ShortestPaths dijkstra(const SimTopology& topo, std::size_t source_router);

// Measurements over a topology. Shortest-path trees are computed on demand
// and cached per source router.
class SimNetwork : public MeasurementSource {
 public:
  explicit SimNetwork(std::shared_ptr<const SimTopology> topo);

  const SimTopology& topology() const { return *topo_; }

  // Round-trip delay between two hosts (by index). nullopt if unreachable.
  std::optional<double> ping(std::size_t src, std::size_t dst) const;
  TraceRoute traceroute_hosts(std::size_t probe_host, std::size_t dst) const;

  const std::vector<ProbeInfo>& probes() const override { return probes_; }
  bool knows(const std::string& ip) const override;
  DelayVector delay_vector(const std::string& ip) const override;
  TraceRoute traceroute(ProbeId probe, const std::string& ip) const override;

 private:
  const ShortestPaths& paths_from(std::size_t router) const;
  double noise(std::size_t src, std::size_t dst) const;

  std::shared_ptr<const SimTopology> topo_;
  std::vector<ProbeInfo> probes_;
  std::vector<std::size_t> probe_hosts_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::shared_ptr<const ShortestPaths>> cache_;
};

// Frozen measurements: delay vectors and traceroutes from every probe to a
// set of hosts.
class MeasurementSnapshot : public MeasurementSource {
 public:
  static MeasurementSnapshot capture(const MeasurementSource& source,
                                     std::span<const std::string> ips);

  const std::vector<ProbeInfo>& probes() const override { return probes_; }
  bool knows(const std::string& ip) const override;
  DelayVector delay_vector(const std::string& ip) const override;
  TraceRoute traceroute(ProbeId probe, const std::string& ip) const override;

  // Versioned text format; read throws FormatError with the line number.
  void write(std::ostream& out) const;
  static MeasurementSnapshot read(std::istream& in);

  friend bool operator==(const MeasurementSnapshot& a, const MeasurementSnapshot& b) {
    return a.probes_ == b.probes_ && a.delays_ == b.delays_ && a.routes_ == b.routes_;
  }

 private:
  std::vector<ProbeInfo> probes_;
  std::map<std::string, DelayVector> delays_;
  std::map<std::string, std::map<ProbeId, TraceRoute>> routes_;
};

}  // namespace lmgeo
