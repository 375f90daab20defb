#pragma once

// Planted mining world: simulator target hosts get synthetic pages whose
// addresses and organization sites are registered in a geocoder table at
// known positions. Simulator landmarks serve as references.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "lmgeo/mine.hpp"
#include "lmgeo/netsim.hpp"
#include "lmgeo/store.hpp"
#include "lmgeo/synth.hpp"

namespace lmgeo::testing {

struct MiningFixture {
  SimConfig sim;
  std::shared_ptr<const SimTopology> topo;
  std::vector<PageRecord> pages;
  GeocoderStub geocoder;
  WhoisTable whois;
  std::set<std::string> blacklist;
  std::vector<Landmark> references;
  std::map<std::string, GeoCoordinate> truth;
  std::map<std::string, PageStyle> style;
  std::set<std::string> proxies;

  void write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir / "pages");
    for (const auto& p : pages) {
      std::ofstream(dir / "pages" / (p.ip + "_" + std::string(page_kind_name(p.kind)) + ".txt"),
                    std::ios::binary)
          << p.text << '\n';
    }
    std::ofstream geo(dir / "geocoder.tsv", std::ios::binary);
    geocoder.write(geo);
    std::ofstream who(dir / "whois.tsv", std::ios::binary);
    for (const auto& p : pages) {
      if (auto org = whois.organization(p.ip)) who << p.ip << '\t' << *org << '\n';
    }
    std::ofstream black(dir / "blacklist.txt", std::ios::binary);
    for (const auto& b : blacklist) black << b << '\n';
    std::ofstream conf(dir / "sim.conf", std::ios::binary);
    sim.write(conf);
    save_landmark_db(dir / "references.db", references);
  }
};

inline MiningFixture make_mining_fixture(std::uint64_t seed, std::size_t pages) {
  MiningFixture f;
  f.sim.region_km = 300.0;
  f.sim.routers = 400;
  f.sim.probes = 30;
  f.sim.landmarks = 600;
  f.sim.targets = pages;
  f.sim.seed = seed;
  f.topo = std::make_shared<const SimTopology>(SimTopology::generate(f.sim));
  for (std::size_t i : f.topo->hosts_with_role(HostRole::kLandmark)) {
    f.references.push_back({f.topo->hosts()[i].ip, f.topo->hosts()[i].position, LandmarkSource::kManual});
  }
  f.blacklist = {"cloudfront", "fastly"};

  SyntheticCorpus gen(mix_seed(seed, 1));
  Rng rng(mix_seed(seed, 2));
  std::set<std::string> orgs, regions, streets;
  auto fresh_address = [&] {
    for (;;) {
      auto a = gen.random_address();
      const std::string region = a.city + ", " + a.state;
      const std::string street = a.detailed + ", " + region + ", " + a.zip;
      if (orgs.count(a.organization) || regions.count(region) || streets.count(street)) continue;
      orgs.insert(a.organization);
      regions.insert(region);
      streets.insert(street);
      return a;
    }
  };
  // Three organization sites 25 km apart around the true one.
  auto plant_sites = [&](const std::string& org, const GeoCoordinate& at) {
    const double turn = rng.uniform(0.0, 6.283185307179586);
    f.geocoder.add(org, org + " main", at);
    for (int k = 1; k <= 2; ++k) {
      const double a = turn + 2.0 * k;
      f.geocoder.add(org, org + " branch", offset_km(at, 25.0 * std::cos(a), 25.0 * std::sin(a)));
    }
  };

  std::size_t n = 0;
  for (std::size_t i : f.topo->hosts_with_role(HostRole::kTarget)) {
    const auto& host = f.topo->hosts()[i];
    const auto a = fresh_address();
    const double u = rng.uniform();
    const PageStyle s = u < 0.6 ? PageStyle::kContact : u < 0.8 ? PageStyle::kRegion : PageStyle::kCopyright;
    switch (s) {
      case PageStyle::kContact:
        f.geocoder.add(a.detailed + ", " + a.city + ", " + a.state + ", " + a.zip, "street", host.position);
        break;
      case PageStyle::kRegion:
        f.geocoder.add(a.city + ", " + a.state, a.city,
                       offset_km(host.position, rng.uniform(-10, 10), rng.uniform(-10, 10)));
        plant_sites(a.organization, host.position);
        break;
      default:
        plant_sites(a.organization, host.position);
        break;
    }
    const auto lp = gen.make_page("p", a, s);
    f.pages.push_back({host.ip, "http://" + host.ip + "/contact", page_text(lp), PageKind::kContact});
    f.truth.emplace(host.ip, host.position);
    f.style.emplace(host.ip, s);
    if (n % 20 == 7) {
      f.whois.add(host.ip, n % 40 == 7 ? "CloudFront" : "FASTLY");
      f.proxies.insert(host.ip);
    } else {
      f.whois.add(host.ip, a.organization);
    }
    ++n;
  }
  return f;
}

}  // namespace lmgeo::testing
