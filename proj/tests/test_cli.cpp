#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lmgeo/cli.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/store.hpp"
#include "lmgeo/text.hpp"
#include "support/mine_fixture.hpp"

using namespace lmgeo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lmgeo");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lmgeo_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  const auto none = cli({});
  CHECK(none.code == 2);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"tagger"}).code == 2);
  CHECK(cli({"sim", "generate", "--routers", "many"}).code == 2);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("geolocate") != std::string::npos);
}

TEST_CASE("failed commands exit 1 with a reason") {
  const auto dir = scratch("fail");
  const auto missing = cli({"geolocate", "10.0.0.1", "--db", (dir / "none.db").string(), "--measurements",
                            (dir / "none.txt").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("cannot read") != std::string::npos);

  std::ofstream(dir / "engine.conf") << "converting_factor = 0.7\n";
  const auto fast = cli({"--config", (dir / "engine.conf").string(), "sim", "generate", "--routers", "10"});
  CHECK(fast.code == 1);
  CHECK(fast.err.find("converting_factor") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sim generate is reproducible") {
  const auto dir = scratch("sim");
  auto gen = [&](const std::string& seed, const std::string& name) {
    return cli({"sim", "generate", "--seed", seed, "--routers", "200", "--probes", "10", "--landmarks", "50",
                "--out", (dir / name).string(), "--landmarks-db", (dir / (name + ".db")).string()});
  };
  REQUIRE(gen("7", "a").code == 0);
  REQUIRE(gen("7", "b").code == 0);
  REQUIRE(gen("8", "c").code == 0);
  CHECK(slurp(dir / "a") == slurp(dir / "b"));
  CHECK(slurp(dir / "a.db") == slurp(dir / "b.db"));
  CHECK(slurp(dir / "a") != slurp(dir / "c"));
  CHECK(load_landmark_db(dir / "a.db").size() == 50);
  fs::remove_all(dir);
}

TEST_CASE("bench med prints a decreasing three-row table") {
  const auto r = cli({"bench", "med", "--landmarks", "10,100,400", "--trials", "4", "--routers", "400",
                      "--probes", "20", "--targets", "8"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::vector<double> meds;
  while (std::getline(in, line) && !trim(line).empty()) meds.push_back(parse_double(split(line, '\t')[4]));
  REQUIRE(meds.size() == 3);
  CHECK(meds[0] > meds[1]);
  CHECK(meds[1] > meds[2]);
  CHECK(r.out.find("cdf_n400") != std::string::npos);
}

TEST_CASE("mining pipeline end to end") {
  const auto dir = scratch("mine");
  const auto fixture = testing::make_mining_fixture(5, 40);
  fixture.write(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };

  REQUIRE(cli({"tagger", "synth", "--pages", "400", "--seed", "31", "--out", p("corpus.tsv")}).code == 0);
  REQUIRE(cli({"tagger", "train", "--corpus", p("corpus.tsv"), "--out", p("model.ckpt"), "--log", p("train.log"),
               "--epochs", "12", "--embed", "12", "--encoder", "12", "--decoder", "12", "--batch", "32",
               "--alpha", "0"})
              .code == 0);
  std::ofstream(dir / "names.txt") << "Nobody Holdings\n";
  REQUIRE(cli({"orgdict", "build", p("names.txt"), p("org.dict")}).code == 0);

  auto mine = [&](const std::string& db, const std::string& report) {
    return cli({"mine", "--pages", p("pages"), "--model", p("model.ckpt"), "--dict", p("org.dict"), "--geocoder",
                p("geocoder.tsv"), "--whois", p("whois.tsv"), "--blacklist", p("blacklist.txt"), "--measurements",
                p("sim.conf"), "--references", p("references.db"), "--db", (dir / db).string(), "--report",
                (dir / report).string()});
  };
  const auto first = mine("a.db", "a.tsv");
  REQUIRE_MESSAGE(first.code == 0, first.err);
  REQUIRE(mine("b.db", "b.tsv").code == 0);
  CHECK(slurp(dir / "a.db") == slurp(dir / "b.db"));
  CHECK(slurp(dir / "a.tsv") == slurp(dir / "b.tsv"));

  const auto db = load_landmark_db(dir / "a.db");
  std::size_t full = 0, mined = 0, on_site = 0;
  for (const auto& l : db) {
    CHECK(fixture.proxies.count(l.ip) == 0);
    ++mined;
    if (l.source != LandmarkSource::kFullAddress && l.position == fixture.truth.at(l.ip)) ++on_site;
    if (l.source != LandmarkSource::kFullAddress) continue;
    ++full;
    CHECK(great_circle_distance(l.position, fixture.truth.at(l.ip)).value() <= 1.0);
  }
  MESSAGE("mined " << mined << " landmarks, " << full << " from full addresses, " << on_site << "/"
                    << mined - full << " org-name ones on the true site");
  CHECK(full >= 15);
  CHECK(mined > full);
  CHECK(slurp(dir / "a.tsv").find("filtered_proxies\t" + std::to_string(fixture.proxies.size())) !=
        std::string::npos);

  // Geolocate a mined host against the references; select among planted sites.
  const auto target = db.front().ip;
  const auto g = cli({"geolocate", target, "--db", p("references.db"), "--measurements", p("sim.conf"), "--scores"});
  REQUIRE_MESSAGE(g.code == 0, g.err);
  CHECK(g.out.find("target = " + target) == 0);

  std::ofstream cands(dir / "cands.tsv");
  const auto truth = fixture.truth.at(target);
  cands << format_double(truth.lat()) << '\t' << format_double(truth.lon()) << "\ttrue\n";
  const auto other = offset_km(truth, 30.0, 0.0);
  cands << format_double(other.lat()) << '\t' << format_double(other.lon()) << "\tother\n";
  cands.close();
  const auto s = cli({"select-coord", target, "--candidates", p("cands.tsv"), "--db", p("references.db"),
                      "--measurements", p("sim.conf")});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(s.out.find("chosen\t") != std::string::npos);
  fs::remove_all(dir);
}
