#pragma once

// Delay vectors, traceroutes and the measurement-source seam used by the
// region constraint, coordinate selection and geolocation stages.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmgeo/geo.hpp"

namespace lmgeo {

using ProbeId = std::uint32_t;
using RouterId = std::uint32_t;

std::optional<std::uint32_t> parse_ipv4(std::string_view s);
std::string format_ipv4(std::uint32_t ip);

// RTTs in ms keyed by probe id; probes without a reply are absent.
class DelayVector {
 public:
  // Throws InputError on a negative or non-finite rtt.
  void set(ProbeId probe, double rtt_ms);
  std::optional<double> get(ProbeId probe) const;
  const std::map<ProbeId, double>& entries() const { return rtts_; }
  std::size_t size() const { return rtts_.size(); }
  bool empty() const { return rtts_.empty(); }

  friend bool operator==(const DelayVector&, const DelayVector&) = default;

 private:
  std::map<ProbeId, double> rtts_;
};

struct Hop {
  RouterId router = 0;
  double rtt_ms = 0.0;  // cumulative from the probe
  friend bool operator==(const Hop&, const Hop&) = default;
};

// Responding routers in path order. Silent routers are simply missing, and
// make the route incomplete. destination_rtt_ms is set when the
// destination answered.
struct TraceRoute {
  ProbeId probe = 0;
  std::string destination;
  std::vector<Hop> hops;
  std::optional<double> destination_rtt_ms;
  bool complete = false;

  bool reached() const { return destination_rtt_ms.has_value(); }
  // Cumulative RTTs never decrease and the destination RTT is not below the
  // last hop's.
  bool monotone() const;
  friend bool operator==(const TraceRoute&, const TraceRoute&) = default;
};

struct ProbeInfo {
  ProbeId id = 0;
  std::string ip;
  GeoCoordinate position;
  friend bool operator==(const ProbeInfo&, const ProbeInfo&) = default;
};

class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;

  virtual const std::vector<ProbeInfo>& probes() const = 0;
  virtual bool knows(const std::string& ip) const = 0;
  // Pings from every probe. Throws MeasurementError for an unknown ip.
  virtual DelayVector delay_vector(const std::string& ip) const = 0;
  // Throws MeasurementError for an unknown probe or ip.
  virtual TraceRoute traceroute(ProbeId probe, const std::string& ip) const = 0;
};

}  // namespace lmgeo
