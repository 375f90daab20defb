#include "lmgeo/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "lmgeo/bench.hpp"
#include "lmgeo/cbg.hpp"
#include "lmgeo/error.hpp"
#include "lmgeo/geolocate.hpp"
#include "lmgeo/metrics.hpp"
#include "lmgeo/mine.hpp"
#include "lmgeo/netsim.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/orgdict.hpp"
#include "lmgeo/selection.hpp"
#include "lmgeo/store.hpp"
#include "lmgeo/synth.hpp"
#include "lmgeo/tagger.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  return in;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  fn(out);
  if (!out) throw InputError("write failed: " + path);
}

SimConfig load_sim_config(const std::string& path) {
  auto in = open_in(path);
  return SimConfig::parse(in);
}

// A snapshot file, or a sim config from which a live simulator is built.
std::unique_ptr<MeasurementSource> load_measurements(const std::string& path) {
  auto in = open_in(path);
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  if (trim(first).rfind("lmgeo-snapshot", 0) == 0) {
    return std::make_unique<MeasurementSnapshot>(MeasurementSnapshot::read(in));
  }
  auto topo = std::make_shared<const SimTopology>(SimTopology::generate(SimConfig::parse(in)));
  return std::make_unique<SimNetwork>(topo);
}

tagger::TaggerParams load_model(const std::string& path) {
  auto in = open_in(path);
  return tagger::TaggerParams::load(in);
}

std::vector<tagger::LabeledPage> load_corpus(const std::string& path) {
  auto in = open_in(path);
  return tagger::read_corpus(in);
}

OrgDictionary load_dictionary(const std::string& path) {
  auto in = open_in(path);
  return OrgDictionary::read(in);
}

std::vector<CandidateCoordinate> read_candidates(const std::string& path) {
  auto in = open_in(path);
  std::vector<CandidateCoordinate> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split(line, '\t');
    try {
      if (f.size() < 2 || f.size() > 3) throw FormatError("expected lat, lon[, label]");
      out.push_back({GeoCoordinate(parse_double(f[0]), parse_double(f[1])),
                     f.size() == 3 ? f[2] : "c" + std::to_string(out.size()), 1});
    } catch (const std::exception& e) {
      throw FormatError(path + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string entity_line(const LocationEntity& e) {
  return std::string(display_name(e.type)) + '\t' + std::to_string(e.begin) + '\t' +
         std::to_string(e.end) + '\t' + e.text + (e.low_confidence ? "\tlow" : "");
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;

  // Loaded on first use, after argument parsing has set the path.
  const EngineConfig& engine() {
    if (!engine_) engine_ = config_path.empty() ? EngineConfig{} : EngineConfig::load(config_path);
    return *engine_;
  }

  std::optional<EngineConfig> engine_;
};

void add_tagger(CLI::App& app, Context& ctx) {
  auto* tagger_cmd = app.add_subcommand("tagger", "Address tagger: synth, train, eval, tag");
  tagger_cmd->require_subcommand(1);

  auto* synth = tagger_cmd->add_subcommand("synth", "Write a synthetic labeled corpus");
  auto pages = std::make_shared<std::size_t>(2000);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto out_path = std::make_shared<std::string>();
  synth->add_option("--pages", *pages, "Number of pages")->capture_default_str();
  synth->add_option("--seed", *seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", *out_path, "Corpus file (default stdout)");
  synth->callback([&ctx, pages, seed, out_path] {
    SyntheticCorpus gen(*seed);
    const auto corpus = gen.make_corpus(*pages);
    emit(*out_path, ctx.out, [&](std::ostream& o) { tagger::write_corpus(o, corpus); });
  });

  auto* train = tagger_cmd->add_subcommand("train", "Train a tagger checkpoint");
  struct TrainArgs {
    std::string corpus, valid, out, log;
    double valid_share = 0.15;
    std::optional<int> epochs, embed, encoder, decoder, batch;
    std::optional<double> alpha, lr;
    std::optional<std::uint64_t> seed;
  };
  auto ta = std::make_shared<TrainArgs>();
  train->add_option("--corpus", ta->corpus, "Training corpus")->required();
  train->add_option("--valid", ta->valid, "Validation corpus (default: tail of the training corpus)");
  train->add_option("--valid-share", ta->valid_share, "Share held out when --valid is absent")
      ->capture_default_str();
  train->add_option("--out", ta->out, "Checkpoint file")->required();
  train->add_option("--log", ta->log, "Per-epoch log (default stdout)");
  train->add_option("--epochs", ta->epochs);
  train->add_option("--embed", ta->embed);
  train->add_option("--encoder", ta->encoder);
  train->add_option("--decoder", ta->decoder);
  train->add_option("--batch", ta->batch);
  train->add_option("--alpha", ta->alpha, "alpha_distinguish");
  train->add_option("--lr", ta->lr);
  train->add_option("--seed", ta->seed);
  train->callback([&ctx, ta] {
    auto dims = ctx.engine().dims;
    auto cfg = ctx.engine().train;
    if (ta->embed) dims.embed = *ta->embed;
    if (ta->encoder) dims.encoder_hidden = *ta->encoder;
    if (ta->decoder) dims.decoder_hidden = *ta->decoder;
    if (ta->epochs) cfg.epochs = *ta->epochs;
    if (ta->batch) cfg.batch_size = *ta->batch;
    if (ta->alpha) cfg.alpha_distinguish = *ta->alpha;
    if (ta->lr) cfg.learning_rate = *ta->lr;
    if (ta->seed) cfg.seed = *ta->seed;

    auto training = load_corpus(ta->corpus);
    std::vector<tagger::LabeledPage> validation;
    if (!ta->valid.empty()) {
      validation = load_corpus(ta->valid);
    } else {
      if (!(ta->valid_share > 0.0 && ta->valid_share < 1.0)) throw ConfigError("--valid-share must lie in (0, 1)");
      const auto keep = training.size() - static_cast<std::size_t>(ta->valid_share * training.size());
      validation.assign(training.begin() + static_cast<std::ptrdiff_t>(keep), training.end());
      training.resize(keep);
    }
    emit(ta->log, ctx.out, [&](std::ostream& log) {
      log << "epoch\ttrain_loss\tall_types_f1\tfull_info_acc\n";
      const auto result = tagger::train(training, validation, dims, cfg, [&](const tagger::EpochReport& e) {
        log << e.epoch << '\t' << format_fixed(e.train_loss, 4) << '\t'
            << format_fixed(e.validation.all_types.f1, 4) << '\t'
            << (e.validation.full_info_accuracy ? format_fixed(*e.validation.full_info_accuracy, 4) : "-") << '\n';
      });
      log << "best_epoch\t" << result.best_epoch << '\n';
      emit(ta->out, log, [&](std::ostream& o) { result.params.save(o); });
    });
  });

  auto* eval = tagger_cmd->add_subcommand("eval", "Per-type metrics of a checkpoint on a corpus");
  auto model = std::make_shared<std::string>();
  auto corpus = std::make_shared<std::string>();
  auto eval_out = std::make_shared<std::string>();
  eval->add_option("--model", *model)->required();
  eval->add_option("--corpus", *corpus)->required();
  eval->add_option("--out", *eval_out, "Metrics table (default stdout)");
  eval->callback([&ctx, model, corpus, eval_out] {
    const auto params = load_model(*model);
    const auto pages = load_corpus(*corpus);
    const auto m = tagger::evaluate(params, pages);
    emit(*eval_out, ctx.out, [&](std::ostream& o) { o << metrics_table(m); });
  });

  auto* tag = tagger_cmd->add_subcommand("tag", "Entities found in a page file");
  auto tag_model = std::make_shared<std::string>();
  auto page = std::make_shared<std::string>();
  tag->add_option("--model", *tag_model)->required();
  tag->add_option("page", *page, "Page text file")->required();
  tag->callback([&ctx, tag_model, page] {
    const auto params = load_model(*tag_model);
    const auto tokens = tokenize(strip_markup(slurp(*page)));
    if (tokens.empty()) return;
    for (const auto& e : tagger::extract_entities(params, TokenizedPage(*page, tokens))) {
      ctx.out << entity_line(e) << '\n';
    }
  });
}

void add_orgdict(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("orgdict", "Organization dictionary: build, match");
  cmd->require_subcommand(1);

  auto* build = cmd->add_subcommand("build", "Build a dictionary from a names file");
  auto names = std::make_shared<std::string>();
  auto out_path = std::make_shared<std::string>();
  build->add_option("names", *names, "One organization name per line")->required();
  build->add_option("out", *out_path, "Dictionary file")->required();
  build->callback([&ctx, names, out_path] {
    auto in = open_in(*names);
    const auto dict = OrgDictionary::read(in);
    emit(*out_path, ctx.out, [&](std::ostream& o) { dict.write(o); });
    ctx.out << "names\t" << dict.size() << '\n';
  });

  auto* match = cmd->add_subcommand("match", "Dictionary matches in a page file");
  auto dict_path = std::make_shared<std::string>();
  auto page = std::make_shared<std::string>();
  match->add_option("dict", *dict_path)->required();
  match->add_option("page", *page)->required();
  match->callback([&ctx, dict_path, page] {
    const auto dict = load_dictionary(*dict_path);
    const auto tokens = tokenize(strip_markup(slurp(*page)));
    for (const auto& e : match_organizations(dict, tokens)) ctx.out << entity_line(e) << '\n';
  });
}

void add_mine(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("mine", "Mine a landmark database from page files");
  struct Args {
    std::string pages, model, dict, geocoder, whois, blacklist, measurements, references, db, report;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--pages", a->pages, "Directory of <ip>_<home|contact>.txt files")->required();
  cmd->add_option("--model", a->model, "Tagger checkpoint")->required();
  cmd->add_option("--dict", a->dict, "Organization dictionary")->required();
  cmd->add_option("--geocoder", a->geocoder, "Geocoder table")->required();
  cmd->add_option("--whois", a->whois, "ip -> organization table");
  cmd->add_option("--blacklist", a->blacklist, "Proxy provider names");
  cmd->add_option("--measurements", a->measurements, "Snapshot or sim config");
  cmd->add_option("--references", a->references, "Known landmark db used by selection");
  cmd->add_option("--db", a->db, "Output landmark db")->required();
  cmd->add_option("--report", a->report, "Mining report (default stdout)");
  cmd->callback([&ctx, a] {
    const auto params = load_model(a->model);
    const auto dict = load_dictionary(a->dict);
    auto geo_in = open_in(a->geocoder);
    const auto geocoder = GeocoderStub::read(geo_in);
    std::optional<WhoisTable> whois;
    MiningInputs inputs;
    if (!a->whois.empty()) {
      auto in = open_in(a->whois);
      whois = WhoisTable::read(in);
      inputs.whois = &*whois;
    }
    if (!a->blacklist.empty()) {
      auto in = open_in(a->blacklist);
      inputs.blacklist = read_blacklist(in);
    }
    std::unique_ptr<MeasurementSource> source;
    if (!a->measurements.empty()) source = load_measurements(a->measurements);
    if (!a->references.empty()) inputs.references = load_landmark_db(a->references);
    inputs.tagger = &params;
    inputs.dictionary = &dict;
    inputs.geocoder = &geocoder;
    inputs.measurements = source.get();

    auto loaded = load_pages(a->pages);
    auto result = build_database(loaded.pages, inputs, ctx.engine().mine());
    result.report.pages += loaded.skipped.size();
    result.report.skipped.insert(result.report.skipped.begin(), loaded.skipped.begin(), loaded.skipped.end());
    save_landmark_db(a->db, result.landmarks);
    emit(a->report, ctx.out, [&](std::ostream& o) { result.report.write(o); });
  });
}

void add_select(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("select-coord", "Choose among candidate coordinates of one host");
  struct Args {
    std::string target, candidates, db, measurements, out;
    double radius_km = 50.0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("target", a->target, "Host ip")->required();
  cmd->add_option("--candidates", a->candidates, "lat<TAB>lon[<TAB>label] per line")->required();
  cmd->add_option("--db", a->db, "Reference landmark db")->required();
  cmd->add_option("--measurements", a->measurements, "Snapshot or sim config")->required();
  cmd->add_option("--radius", a->radius_km, "Vicinity radius before the factor, km")->capture_default_str();
  cmd->add_option("--out", a->out, "Score table (default stdout)");
  cmd->callback([&ctx, a] {
    const auto cfg = ctx.engine().mine();
    const auto candidates = merge_close(read_candidates(a->candidates), cfg.merge_threshold_km,
                                        cfg.constants.sphere_radius_km);
    if (candidates.empty()) throw InputError("no candidates");
    const auto db = load_landmark_db(a->db);
    const auto source = load_measurements(a->measurements);
    const auto probes = select_probes(source->delay_vector(a->target), cfg.k_probes).probes;
    std::vector<LandmarkObservation> observed;
    for (std::size_t i : selection_references(candidates, db, a->radius_km, cfg)) {
      if (db[i].ip == a->target || !source->knows(db[i].ip)) continue;
      auto obs = observe_host(*source, db[i].ip, probes);
      obs.position = db[i].position;
      observed.push_back(std::move(obs));
    }
    const auto self = observe_host(*source, a->target, probes);
    const auto result = select_coordinate(candidates, observed, {self.delays, self.routes}, cfg.weights);
    emit(a->out, ctx.out, [&](std::ostream& o) {
      o << "target\t" << a->target << '\n'
        << "chosen\t" << result.chosen.label << '\t' << format_double(result.chosen.position.lat())
        << '\t' << format_double(result.chosen.position.lon()) << '\n'
        << "references\t" << observed.size() << "\n\n";
      write_score_table(o, candidates, result);
    });
  });
}

void add_geolocate(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("geolocate", "Geolocate a target ip against a landmark db");
  struct Args {
    std::string target, db, measurements, out;
    std::optional<std::size_t> k_probes, k_candidates;
    bool scores = false;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("target", a->target, "Target ip")->required();
  cmd->add_option("--db", a->db, "Landmark db")->required();
  cmd->add_option("--measurements", a->measurements, "Snapshot or sim config")->required();
  cmd->add_option("--k-probes", a->k_probes);
  cmd->add_option("--k-candidates", a->k_candidates);
  cmd->add_flag("--scores", a->scores, "Append the per-landmark score table");
  cmd->add_option("--out", a->out, "Result file (default stdout)");
  cmd->callback([&ctx, a] {
    auto cfg = ctx.engine().geolocate();
    if (a->k_probes) cfg.k_probes = *a->k_probes;
    if (a->k_candidates) cfg.k_candidates = *a->k_candidates;
    const auto db = load_landmark_db(a->db);
    const auto source = load_measurements(a->measurements);
    const auto r = geolocate_target(a->target, db, *source, cfg);
    emit(a->out, ctx.out, [&](std::ostream& o) { write_result(o, r, a->scores); });
  });
}

struct SimArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> routers, probes, landmarks, targets;
  std::optional<double> region_km;

  // bench med takes its own landmark list.
  void attach(CLI::App* cmd, bool with_landmarks = true) {
    cmd->add_option("--config", config, "Sim config file");
    cmd->add_option("--seed", seed);
    cmd->add_option("--routers", routers);
    cmd->add_option("--probes", probes);
    if (with_landmarks) cmd->add_option("--landmarks", landmarks);
    cmd->add_option("--targets", targets);
    cmd->add_option("--region", region_km, "Side of the square region, km");
  }
  SimConfig resolve(const EngineConfig& engine, SimConfig c = {}) const {
    const std::string& path = config.empty() ? engine.sim_config : config;
    if (!path.empty()) c = load_sim_config(path);
    if (seed) c.seed = *seed;
    if (routers) c.routers = *routers;
    if (probes) c.probes = *probes;
    if (landmarks) c.landmarks = *landmarks;
    if (targets) c.targets = *targets;
    if (region_km) c.region_km = *region_km;
    c.validate();
    return c;
  }
};

void add_sim(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("sim", "Network simulator: generate, snapshot");
  cmd->require_subcommand(1);

  auto* gen = cmd->add_subcommand("generate", "Write a topology and its landmark db");
  auto ga = std::make_shared<SimArgs>();
  auto topo_out = std::make_shared<std::string>();
  auto db_out = std::make_shared<std::string>();
  auto config_out = std::make_shared<std::string>();
  ga->attach(gen);
  gen->add_option("--out", *topo_out, "Topology dump (default stdout)");
  gen->add_option("--landmarks-db", *db_out, "Landmark hosts as a manual landmark db");
  gen->add_option("--config-out", *config_out, "Resolved sim config");
  gen->callback([&ctx, ga, topo_out, db_out, config_out] {
    const auto config = ga->resolve(ctx.engine());
    const auto topo = SimTopology::generate(config);
    emit(*topo_out, ctx.out, [&](std::ostream& o) { topo.write(o); });
    if (!config_out->empty()) emit(*config_out, ctx.out, [&](std::ostream& o) { config.write(o); });
    if (!db_out->empty()) {
      std::vector<Landmark> db;
      for (std::size_t i : topo.hosts_with_role(HostRole::kLandmark)) {
        db.push_back({topo.hosts()[i].ip, topo.hosts()[i].position, LandmarkSource::kManual});
      }
      save_landmark_db(*db_out, db);
    }
  });

  auto* snap = cmd->add_subcommand("snapshot", "Capture pings and traceroutes to every non-probe host");
  auto sa = std::make_shared<SimArgs>();
  auto snap_out = std::make_shared<std::string>();
  sa->attach(snap);
  snap->add_option("--out", *snap_out, "Snapshot file (default stdout)");
  snap->callback([&ctx, sa, snap_out] {
    auto topo = std::make_shared<const SimTopology>(SimTopology::generate(sa->resolve(ctx.engine())));
    const SimNetwork net(topo);
    std::vector<std::string> ips;
    for (const auto& h : topo->hosts()) {
      if (h.role != HostRole::kProbe) ips.push_back(h.ip);
    }
    const auto snapshot = MeasurementSnapshot::capture(net, ips);
    emit(*snap_out, ctx.out, [&](std::ostream& o) { snapshot.write(o); });
  });
}

void add_bench(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("bench", "Experiments");
  cmd->require_subcommand(1);
  auto* med = cmd->add_subcommand("med", "Median error distance as landmarks are added");
  auto sa = std::make_shared<SimArgs>();
  auto counts = std::make_shared<std::vector<std::size_t>>(std::vector<std::size_t>{10, 100, 1000});
  auto trials = std::make_shared<std::size_t>(30);
  auto out_path = std::make_shared<std::string>();
  sa->attach(med, false);
  med->add_option("--landmarks", *counts, "Landmark counts")->delimiter(',')->capture_default_str();
  med->add_option("--trials", *trials)->capture_default_str();
  med->add_option("--out", *out_path, "MED and CDF table (default stdout)");
  med->callback([&ctx, sa, counts, trials, out_path] {
    MedBenchConfig c;
    c.sim = sa->resolve(ctx.engine(), c.sim);
    c.landmark_counts = *counts;
    c.trials = *trials;
    c.geolocate = ctx.engine().geolocate();
    c.validate();
    const auto rows = run_med_bench(c);
    emit(*out_path, ctx.out, [&](std::ostream& o) { write_med_table(o, c, rows); });
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, {}};
  CLI::App app("Landmark mining and IP geolocation toolkit", "lmgeo");
  app.require_subcommand(1);
  app.add_option("--config", ctx.config_path, "Engine config file (key = value)");
  add_tagger(app, ctx);
  add_orgdict(app, ctx);
  add_mine(app, ctx);
  add_select(app, ctx);
  add_geolocate(app, ctx);
  add_sim(app, ctx);
  add_bench(app, ctx);

  if (args.size() <= 1) {
    err << app.help();
    return 2;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lmgeo
