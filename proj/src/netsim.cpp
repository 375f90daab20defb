#include "lmgeo/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/random.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLightKmPerMs = 299792.458 / 1000.0;

// Seed streams, so that changing one count does not reshuffle the others.
enum Stream : std::uint64_t {
  kRouterStream = 0x7201,
  kHostStream = 0x4057,
  kSilentStream = 0x5113,
  kLastHopStream = 0x1A57,
  kNoiseStream = 0x401E,
};

// Buckets planar points into square cells for neighborhood queries.
class Grid {
 public:
  Grid(const std::vector<SimRouter>& pts, double half_side)
      : pts_(pts), origin_(-half_side) {
    side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(pts.size() / 2.0)));
    cell_ = 2.0 * half_side / static_cast<double>(side_);
    cells_.resize(side_ * side_);
    for (std::size_t i = 0; i < pts.size(); ++i) cells_[cell_of(pts[i].x_km, pts[i].y_km)].push_back(i);
  }

  // True when some point other than a and b lies strictly inside the circle
  // with diameter ab. Scans rings of cells outward from the midpoint.
  bool has_witness(std::size_t a, std::size_t b) const {
    const double mx = (pts_[a].x_km + pts_[b].x_km) / 2, my = (pts_[a].y_km + pts_[b].y_km) / 2;
    const double dx = pts_[a].x_km - pts_[b].x_km, dy = pts_[a].y_km - pts_[b].y_km;
    const double r2 = (dx * dx + dy * dy) / 4.0;
    const double r = std::sqrt(r2);
    const long cx = coord(mx), cy = coord(my);
    const long rings = static_cast<long>(std::ceil(r / cell_)) + 1;
    const long n = static_cast<long>(side_);
    for (long ring = 0; ring <= rings; ++ring) {
      for (long gx = cx - ring; gx <= cx + ring; ++gx) {
        for (long gy = cy - ring; gy <= cy + ring; ++gy) {
          if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != ring) continue;
          if (gx < 0 || gy < 0 || gx >= n || gy >= n) continue;
          for (std::size_t w : cells_[static_cast<std::size_t>(gx * n + gy)]) {
            if (w == a || w == b) continue;
            const double ex = pts_[w].x_km - mx, ey = pts_[w].y_km - my;
            if (ex * ex + ey * ey < r2 * (1.0 - 1e-12)) return true;
          }
        }
      }
    }
    return false;
  }

 private:
  long coord(double v) const {
    const long c = static_cast<long>(std::floor((v - origin_) / cell_));
    return std::clamp<long>(c, 0, static_cast<long>(side_) - 1);
  }
  std::size_t cell_of(double x, double y) const {
    return static_cast<std::size_t>(coord(x)) * side_ + static_cast<std::size_t>(coord(y));
  }

  const std::vector<SimRouter>& pts_;
  double origin_;
  std::size_t side_;
  double cell_;
  std::vector<std::vector<std::size_t>> cells_;
};

double one_way_ms(double km, double propagation_factor) {
  return km / (propagation_factor * kLightKmPerMs);
}

std::size_t component_count(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                            std::vector<int>& label) {
  label.assign(adj.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (label[s] >= 0) continue;
    std::vector<std::size_t> stack = {s};
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, d] : adj[u]) {
        if (label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return static_cast<std::size_t>(next);
}

std::size_t parse_count(const KeyValue& kv) {
  const auto v = parse_int(kv.value);
  if (v < 0) throw ConfigError(kv.key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string_view delay_mode_name(DelayMode m) {
  switch (m) {
    case DelayMode::kProportional: return "proportional";
    case DelayMode::kNoise: return "proportional+noise";
    case DelayMode::kLastHop: return "proportional+lasthop";
  }
  return "proportional";
}

DelayMode parse_delay_mode(std::string_view s) {
  for (auto m : {DelayMode::kProportional, DelayMode::kNoise, DelayMode::kLastHop}) {
    if (s == delay_mode_name(m)) return m;
  }
  throw ConfigError("unknown delay mode '" + std::string(s) + "'");
}

std::string_view host_role_name(HostRole r) {
  switch (r) {
    case HostRole::kProbe: return "probe";
    case HostRole::kLandmark: return "landmark";
    case HostRole::kTarget: return "target";
  }
  return "target";
}

void DelayModel::validate() const {
  if (!(propagation_factor > 0.0) || propagation_factor > 1.0) {
    throw ConfigError("propagation_factor must be in (0, 1]");
  }
  if (!(noise_stddev_ms >= 0.0) || !(lasthop_ms >= 0.0)) {
    throw ConfigError("noise_stddev_ms and lasthop_ms must be >= 0");
  }
  if (!(nonresponse_prob >= 0.0 && nonresponse_prob <= 1.0)) {
    throw ConfigError("nonresponse_prob must be in [0, 1]");
  }
}

void SimConfig::validate() const {
  if (routers == 0) throw ConfigError("routers must be at least 1");
  if (!(region_km > 0.0) || region_km > 2000.0) throw ConfigError("region_km must be in (0, 2000]");
  if (!std::isfinite(origin_lon) || !(std::abs(origin_lat) <= 80.0)) throw ConfigError("origin_lat must be within [-80, 80]");
  delay.validate();
}

SimConfig SimConfig::parse(std::istream& in) {
  SimConfig c;
  for (const auto& kv : read_key_values(in)) {
    try {
      if (kv.key == "region_km") c.region_km = parse_double(kv.value);
      else if (kv.key == "origin_lat") c.origin_lat = parse_double(kv.value);
      else if (kv.key == "origin_lon") c.origin_lon = parse_double(kv.value);
      else if (kv.key == "routers") c.routers = parse_count(kv);
      else if (kv.key == "probes") c.probes = parse_count(kv);
      else if (kv.key == "landmarks") c.landmarks = parse_count(kv);
      else if (kv.key == "targets") c.targets = parse_count(kv);
      else if (kv.key == "delay_mode") c.delay.mode = parse_delay_mode(kv.value);
      else if (kv.key == "propagation_factor") c.delay.propagation_factor = parse_double(kv.value);
      else if (kv.key == "noise_stddev_ms") c.delay.noise_stddev_ms = parse_double(kv.value);
      else if (kv.key == "lasthop_ms") c.delay.lasthop_ms = parse_double(kv.value);
      else if (kv.key == "nonresponse_prob") c.delay.nonresponse_prob = parse_double(kv.value);
      else if (kv.key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(kv.value));
      else throw ConfigError("unknown key '" + kv.key + "'");
    } catch (const FormatError& e) {
      throw ConfigError("line " + std::to_string(kv.line) + ": " + kv.key + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

void SimConfig::write(std::ostream& out) const {
  out << "region_km = " << format_double(region_km) << '\n'
      << "origin_lat = " << format_double(origin_lat) << '\n'
      << "origin_lon = " << format_double(origin_lon) << '\n'
      << "routers = " << routers << '\n'
      << "probes = " << probes << '\n'
      << "landmarks = " << landmarks << '\n'
      << "targets = " << targets << '\n'
      << "delay_mode = " << delay_mode_name(delay.mode) << '\n'
      << "propagation_factor = " << format_double(delay.propagation_factor) << '\n'
      << "noise_stddev_ms = " << format_double(delay.noise_stddev_ms) << '\n'
      << "lasthop_ms = " << format_double(delay.lasthop_ms) << '\n'
      << "nonresponse_prob = " << format_double(delay.nonresponse_prob) << '\n'
      << "seed = " << seed << '\n';
}

SimTopology SimTopology::generate(const SimConfig& config, std::span<const HostSpec> extra) {
  config.validate();
  SimTopology t;
  t.config_ = config;
  const GeoCoordinate origin(config.origin_lat, config.origin_lon);
  const double half = config.region_km / 2.0;
  const double pf = config.delay.propagation_factor;

  Rng router_rng(mix_seed(config.seed, kRouterStream));
  t.routers_.resize(config.routers);
  for (std::size_t i = 0; i < config.routers; ++i) {
    auto& r = t.routers_[i];
    r.x_km = router_rng.uniform(-half, half);
    r.y_km = router_rng.uniform(-half, half);
    r.position = offset_km(origin, r.x_km, r.y_km);
    Rng silent_rng(mix_seed(config.seed, kSilentStream, i));
    r.silent = silent_rng.uniform() < config.delay.nonresponse_prob;
  }

  // Gabriel graph: a and b are linked when no third router sits inside the
  // circle with diameter ab.
  t.adjacency_.resize(config.routers);
  auto link = [&](std::size_t a, std::size_t b) {
    const double km = great_circle_distance(t.routers_[a].position, t.routers_[b].position).value();
    // Coincident routers still get a positive delay.
    const double ms = std::max(one_way_ms(km, pf), 1e-6);
    t.edges_.push_back({a, b, ms});
    t.adjacency_[a].emplace_back(b, ms);
    t.adjacency_[b].emplace_back(a, ms);
  };
  const Grid grid(t.routers_, half);
  for (std::size_t a = 0; a < config.routers; ++a) {
    for (std::size_t b = a + 1; b < config.routers; ++b) {
      if (!grid.has_witness(a, b)) link(a, b);
    }
  }
  // Gabriel graphs of distinct points are connected; coincident points can
  // break that, so join any leftover components through their closest pair.
  std::vector<int> label;
  while (component_count(t.adjacency_, label) > 1) {
    double best = kInf;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < config.routers; ++a) {
      if (label[a] != 0) continue;
      for (std::size_t b = 0; b < config.routers; ++b) {
        if (label[b] == 0) continue;
        const double dx = t.routers_[a].x_km - t.routers_[b].x_km;
        const double dy = t.routers_[a].y_km - t.routers_[b].y_km;
        if (dx * dx + dy * dy < best) {
          best = dx * dx + dy * dy;
          ba = a;
          bb = b;
        }
      }
    }
    link(ba, bb);
  }

  std::set<std::string> used;
  for (const auto& h : extra) {
    if (!h.ip.empty() && !used.insert(h.ip).second) {
      throw ConfigError("duplicate host ip " + h.ip);
    }
  }
  std::uint32_t next_probe_ip = *parse_ipv4("100.64.0.1");
  std::uint32_t next_host_ip = *parse_ipv4("10.0.0.1");
  auto assign_ip = [&](HostRole role) {
    std::uint32_t& counter = role == HostRole::kProbe ? next_probe_ip : next_host_ip;
    std::string ip;
    do {
      ip = format_ipv4(counter++);
    } while (used.count(ip));
    used.insert(ip);
    return ip;
  };

  auto add_host = [&](std::string ip, HostRole role, const GeoCoordinate& pos) {
    SimHost h;
    h.ip = ip.empty() ? assign_ip(role) : std::move(ip);
    h.role = role;
    h.position = pos;
    double best = kInf;
    for (std::size_t r = 0; r < t.routers_.size(); ++r) {
      const double d = great_circle_distance(pos, t.routers_[r].position).value();
      if (d < best) {
        best = d;
        h.router = r;
      }
    }
    h.access_ms = one_way_ms(best, pf);
    if (config.delay.mode == DelayMode::kLastHop) {
      Rng lh(mix_seed(config.seed, kLastHopStream, fnv1a64(h.ip)));
      h.lasthop_ms = lh.uniform(0.0, config.delay.lasthop_ms);
    }
    t.by_ip_[h.ip] = t.hosts_.size();
    t.hosts_.push_back(std::move(h));
  };

  for (const auto& h : extra) add_host(h.ip, h.role, h.position);
  Rng host_rng(mix_seed(config.seed, kHostStream));
  const std::pair<HostRole, std::size_t> groups[] = {{HostRole::kProbe, config.probes},
                                                     {HostRole::kLandmark, config.landmarks},
                                                     {HostRole::kTarget, config.targets}};
  for (const auto& [role, count] : groups) {
    for (std::size_t i = 0; i < count; ++i) {
      const double x = host_rng.uniform(-half, half);
      const double y = host_rng.uniform(-half, half);
      add_host({}, role, offset_km(origin, x, y));
    }
  }
  return t;
}

std::optional<std::size_t> SimTopology::find_host(const std::string& ip) const {
  const auto it = by_ip_.find(ip);
  if (it == by_ip_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> SimTopology::hosts_with_role(HostRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    if (hosts_[i].role == role) out.push_back(i);
  }
  return out;
}

void SimTopology::write(std::ostream& out) const {
  out << "lmgeo-topology 1\n";
  config_.write(out);
  for (std::size_t i = 0; i < routers_.size(); ++i) {
    const auto& r = routers_[i];
    out << "router\t" << i << '\t' << format_double(r.position.lat()) << '\t'
        << format_double(r.position.lon()) << '\t' << (r.silent ? 1 : 0) << '\n';
  }
  for (const auto& e : edges_) {
    out << "edge\t" << e.a << '\t' << e.b << '\t' << format_double(e.delay_ms) << '\n';
  }
  for (const auto& h : hosts_) {
    out << "host\t" << h.ip << '\t' << host_role_name(h.role) << '\t'
        << format_double(h.position.lat()) << '\t' << format_double(h.position.lon()) << '\t'
        << h.router << '\t' << format_double(h.access_ms) << '\t'
        << format_double(h.lasthop_ms) << '\n';
  }
  out << "end\n";
}

ShortestPaths dijkstra(const SimTopology& topo, std::size_t source) {
  const auto& adj = topo.adjacency();
  ShortestPaths sp;
  sp.delay_ms.assign(adj.size(), kInf);
  sp.previous.resize(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) sp.previous[i] = i;
  if (source >= adj.size()) throw InputError("no such router");
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  sp.delay_ms[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > sp.delay_ms[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < sp.delay_ms[v]) {
        sp.delay_ms[v] = nd;
        sp.previous[v] = u;
        queue.emplace(nd, v);
      }
    }
  }
  return sp;
}

SimNetwork::SimNetwork(std::shared_ptr<const SimTopology> topo) : topo_(std::move(topo)) {
  if (!topo_) throw InputError("no topology");
  for (std::size_t i : topo_->hosts_with_role(HostRole::kProbe)) {
    const auto& h = topo_->hosts()[i];
    probes_.push_back({static_cast<ProbeId>(probes_.size()), h.ip, h.position});
    probe_hosts_.push_back(i);
  }
}

const ShortestPaths& SimNetwork::paths_from(std::size_t router) const {
  std::lock_guard lock(mu_);
  auto& slot = cache_[router];
  if (!slot) slot = std::make_shared<const ShortestPaths>(dijkstra(*topo_, router));
  return *slot;
}

double SimNetwork::noise(std::size_t src, std::size_t dst) const {
  const auto& model = topo_->config().delay;
  if (model.mode != DelayMode::kNoise || model.noise_stddev_ms == 0.0) return 0.0;
  const auto& hosts = topo_->hosts();
  Rng rng(mix_seed(topo_->config().seed, kNoiseStream, fnv1a64(hosts[src].ip),
                   fnv1a64(hosts[dst].ip)));
  return std::abs(rng.normal()) * model.noise_stddev_ms;
}

std::optional<double> SimNetwork::ping(std::size_t src, std::size_t dst) const {
  const auto& hosts = topo_->hosts();
  if (src >= hosts.size() || dst >= hosts.size()) throw InputError("no such host");
  const auto& a = hosts[src];
  const auto& b = hosts[dst];
  const double extra = a.lasthop_ms + b.lasthop_ms;
  if (src == dst) return extra;
  const double core = paths_from(a.router).delay_ms[b.router];
  if (!std::isfinite(core)) return std::nullopt;
  return 2.0 * (a.access_ms + core + b.access_ms) + noise(src, dst) + extra;
}

TraceRoute SimNetwork::traceroute_hosts(std::size_t probe_host, std::size_t dst) const {
  const auto& hosts = topo_->hosts();
  if (probe_host >= hosts.size() || dst >= hosts.size()) throw InputError("no such host");
  const auto& p = hosts[probe_host];
  const auto& d = hosts[dst];
  TraceRoute tr;
  const auto it = std::find(probe_hosts_.begin(), probe_hosts_.end(), probe_host);
  tr.probe = static_cast<ProbeId>(it - probe_hosts_.begin());
  tr.destination = d.ip;

  const auto rtt = ping(probe_host, dst);
  if (!rtt) return tr;
  // A host tracing itself never leaves the access link.
  if (probe_host == dst) {
    tr.complete = !topo_->routers()[p.router].silent;
    tr.destination_rtt_ms = rtt;
    return tr;
  }
  const auto& sp = paths_from(p.router);
  std::vector<std::size_t> path = {d.router};
  while (path.back() != p.router) path.push_back(sp.previous[path.back()]);
  std::reverse(path.begin(), path.end());

  tr.complete = true;
  double last = 0.0;
  for (std::size_t r : path) {
    if (topo_->routers()[r].silent) {
      tr.complete = false;
      continue;
    }
    last = std::max(last, 2.0 * (p.access_ms + sp.delay_ms[r]) + p.lasthop_ms);
    tr.hops.push_back({static_cast<RouterId>(r), last});
  }
  tr.destination_rtt_ms = std::max(last, *rtt);
  return tr;
}

bool SimNetwork::knows(const std::string& ip) const { return topo_->find_host(ip).has_value(); }

DelayVector SimNetwork::delay_vector(const std::string& ip) const {
  const auto host = topo_->find_host(ip);
  if (!host) throw MeasurementError("unknown host " + ip);
  DelayVector v;
  for (std::size_t k = 0; k < probe_hosts_.size(); ++k) {
    if (const auto rtt = ping(probe_hosts_[k], *host)) v.set(static_cast<ProbeId>(k), *rtt);
  }
  return v;
}

TraceRoute SimNetwork::traceroute(ProbeId probe, const std::string& ip) const {
  const auto host = topo_->find_host(ip);
  if (!host) throw MeasurementError("unknown host " + ip);
  if (probe >= probe_hosts_.size()) throw MeasurementError("unknown probe " + std::to_string(probe));
  return traceroute_hosts(probe_hosts_[probe], *host);
}

MeasurementSnapshot MeasurementSnapshot::capture(const MeasurementSource& source,
                                                 std::span<const std::string> ips) {
  MeasurementSnapshot s;
  s.probes_ = source.probes();
  for (const auto& ip : ips) {
    s.delays_[ip] = source.delay_vector(ip);
    auto& routes = s.routes_[ip];
    for (const auto& p : s.probes_) routes[p.id] = source.traceroute(p.id, ip);
  }
  return s;
}

bool MeasurementSnapshot::knows(const std::string& ip) const { return delays_.count(ip) > 0; }

DelayVector MeasurementSnapshot::delay_vector(const std::string& ip) const {
  const auto it = delays_.find(ip);
  if (it == delays_.end()) throw MeasurementError("host " + ip + " is not in the snapshot");
  return it->second;
}

TraceRoute MeasurementSnapshot::traceroute(ProbeId probe, const std::string& ip) const {
  const auto it = routes_.find(ip);
  if (it == routes_.end()) throw MeasurementError("host " + ip + " is not in the snapshot");
  const auto r = it->second.find(probe);
  if (r == it->second.end()) {
    throw MeasurementError("probe " + std::to_string(probe) + " has no route to " + ip);
  }
  return r->second;
}

void MeasurementSnapshot::write(std::ostream& out) const {
  out << "lmgeo-snapshot 1\n";
  for (const auto& p : probes_) {
    out << "probe\t" << p.id << '\t' << p.ip << '\t' << format_double(p.position.lat()) << '\t'
        << format_double(p.position.lon()) << '\n';
  }
  for (const auto& [ip, v] : delays_) {
    out << "delay\t" << ip << '\t';
    bool first = true;
    for (const auto& [probe, rtt] : v.entries()) {
      out << (first ? "" : ",") << probe << ':' << format_double(rtt);
      first = false;
    }
    if (first) out << '-';
    out << '\n';
    const auto rit = routes_.find(ip);
    if (rit == routes_.end()) continue;
    for (const auto& [probe, tr] : rit->second) {
      out << "trace\t" << ip << '\t' << probe << '\t'
          << (tr.destination_rtt_ms ? format_double(*tr.destination_rtt_ms) : std::string("-"))
          << '\t' << (tr.complete ? 1 : 0) << '\t';
      for (std::size_t i = 0; i < tr.hops.size(); ++i) {
        out << (i ? "," : "") << tr.hops[i].router << ':' << format_double(tr.hops[i].rtt_ms);
      }
      if (tr.hops.empty()) out << '-';
      out << '\n';
    }
  }
  out << "end\n";
}

MeasurementSnapshot MeasurementSnapshot::read(std::istream& in) {
  MeasurementSnapshot s;
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError("snapshot line " + std::to_string(number) + ": " + why);
  };
  if (!std::getline(in, line) || trim(line) != "lmgeo-snapshot 1") {
    number = 1;
    throw fail("expected header 'lmgeo-snapshot 1'");
  }
  number = 1;
  bool ended = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line == "end") {
      ended = true;
      break;
    }
    const auto f = split(line, '\t');
    try {
      if (f[0] == "probe" && f.size() == 5) {
        s.probes_.push_back({static_cast<ProbeId>(parse_int(f[1])), f[2],
                             GeoCoordinate(parse_double(f[3]), parse_double(f[4]))});
      } else if (f[0] == "delay" && f.size() == 3) {
        DelayVector v;
        if (f[2] != "-") {
          for (const auto& item : split(f[2], ',')) {
            const auto kv = split(item, ':');
            if (kv.size() != 2) throw fail("bad delay entry '" + item + "'");
            v.set(static_cast<ProbeId>(parse_int(kv[0])), parse_double(kv[1]));
          }
        }
        s.delays_[f[1]] = std::move(v);
      } else if (f[0] == "trace" && f.size() == 6) {
        TraceRoute tr;
        tr.destination = f[1];
        tr.probe = static_cast<ProbeId>(parse_int(f[2]));
        if (f[3] != "-") tr.destination_rtt_ms = parse_double(f[3]);
        tr.complete = f[4] == "1";
        if (f[5] != "-") {
          for (const auto& item : split(f[5], ',')) {
            const auto kv = split(item, ':');
            if (kv.size() != 2) throw fail("bad hop '" + item + "'");
            tr.hops.push_back({static_cast<RouterId>(parse_int(kv[0])), parse_double(kv[1])});
          }
        }
        if (!s.delays_.count(tr.destination)) throw fail("trace before delay line");
        s.routes_[tr.destination][tr.probe] = std::move(tr);
      } else {
        throw fail("unrecognized record");
      }
    } catch (const FormatError& e) {
      if (std::string_view(e.what()).starts_with("snapshot line")) throw;
      throw fail(e.what());
    } catch (const InputError& e) {
      throw fail(e.what());
    }
  }
  if (!ended) throw fail("missing 'end' line");
  return s;
}

}  // namespace lmgeo
