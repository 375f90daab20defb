#include "lmgeo/metrics.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"

namespace lmgeo {

namespace {

using SpanKey = std::tuple<int, std::size_t, std::size_t>;

std::multiset<SpanKey> keys_of(const std::vector<LocationEntity>& es) {
  std::multiset<SpanKey> out;
  for (const auto& e : es) out.emplace(static_cast<int>(e.type), e.begin, e.end);
  return out;
}

std::set<std::pair<std::size_t, std::size_t>> spans_of_type(
    const std::vector<LocationEntity>& es, EntityType t) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : es) {
    if (e.type == t) out.emplace(e.begin, e.end);
  }
  return out;
}

std::string cell(double v) { return format_fixed(v, 4); }

}  // namespace

PrecisionRecall make_precision_recall(std::size_t tp, std::size_t predicted,
                                      std::size_t gold) {
  PrecisionRecall r;
  r.true_positives = tp;
  r.predicted = predicted;
  r.gold = gold;
  r.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
  r.recall = gold ? static_cast<double>(tp) / gold : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

double page_accuracy(std::size_t successes, std::size_t total) {
  return total ? static_cast<double>(successes) / static_cast<double>(total) : 0.0;
}

ExtractionMetrics compute_metrics(std::span<const PageEntities> predicted,
                                  std::span<const PageEntities> gold) {
  if (predicted.size() != gold.size()) {
    throw InputError("predicted and gold page counts differ");
  }
  std::array<std::size_t, kNumEntityTypes> tp{}, np{}, ng{};
  std::array<std::size_t, kNumEntityTypes> page_ok{}, page_total{};
  std::size_t full_ok = 0;
  std::size_t full_total = 0;

  for (std::size_t p = 0; p < gold.size(); ++p) {
    if (predicted[p].page_id != gold[p].page_id) {
      throw InputError("page id mismatch: '" + predicted[p].page_id + "' vs '" +
                       gold[p].page_id + "'");
    }
    const auto pk = keys_of(predicted[p].entities);
    auto gk = keys_of(gold[p].entities);
    for (const auto& k : pk) {
      const auto t = static_cast<std::size_t>(std::get<0>(k));
      ++np[t];
      if (auto it = gk.find(k); it != gk.end()) {
        ++tp[t];
        gk.erase(it);
      }
    }
    for (const auto& e : gold[p].entities) ++ng[static_cast<std::size_t>(e.type)];

    bool has_all = true;
    bool all_ok = true;
    for (EntityType t : kAllEntityTypes) {
      const auto i = static_cast<std::size_t>(t);
      const auto g = spans_of_type(gold[p].entities, t);
      const bool ok = spans_of_type(predicted[p].entities, t) == g;
      if (g.empty()) {
        has_all = false;
        continue;
      }
      ++page_total[i];
      if (ok) ++page_ok[i];
      all_ok = all_ok && ok;
    }
    if (has_all) {
      ++full_total;
      if (all_ok) ++full_ok;
    }
  }

  ExtractionMetrics m;
  m.pages = gold.size();
  std::size_t all_tp = 0, all_np = 0, all_ng = 0;
  for (std::size_t i = 0; i < kNumEntityTypes; ++i) {
    m.per_type[i] = make_precision_recall(tp[i], np[i], ng[i]);
    if (page_total[i]) m.page_accuracy[i] = page_accuracy(page_ok[i], page_total[i]);
    all_tp += tp[i];
    all_np += np[i];
    all_ng += ng[i];
  }
  m.all_types = make_precision_recall(all_tp, all_np, all_ng);
  if (full_total) m.full_info_accuracy = page_accuracy(full_ok, full_total);
  return m;
}

std::vector<double> per_tag_f1(std::span<const std::vector<Tag>> predicted,
                               std::span<const std::vector<Tag>> gold) {
  if (predicted.size() != gold.size()) {
    throw InputError("predicted and gold sequence counts differ");
  }
  std::vector<std::size_t> tp(kNumTags, 0), np(kNumTags, 0), ng(kNumTags, 0);
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (predicted[s].size() != gold[s].size()) {
      throw InputError("predicted and gold sequence lengths differ");
    }
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      ++np[predicted[s][t]];
      ++ng[gold[s][t]];
      if (predicted[s][t] == gold[s][t]) ++tp[gold[s][t]];
    }
  }
  std::vector<double> f1(kNumTags, 1.0);
  for (std::size_t k = 0; k < kNumTags; ++k) {
    if (np[k] == 0 && ng[k] == 0) continue;
    f1[k] = make_precision_recall(tp[k], np[k], ng[k]).f1;
  }
  return f1;
}

std::string metrics_table(const ExtractionMetrics& m) {
  std::string out = "results\tprec\trec\tf1\tacc\n";
  const auto& a = m.all_types;
  out += "all types\t" + cell(a.precision) + "\t" + cell(a.recall) + "\t" +
         cell(a.f1) + "\t-\n";
  for (EntityType t : kAllEntityTypes) {
    const auto i = static_cast<std::size_t>(t);
    const auto& r = m.per_type[i];
    out += std::string(display_name(t)) + "\t" + cell(r.precision) + "\t" +
           cell(r.recall) + "\t" + cell(r.f1) + "\t" +
           (m.page_accuracy[i] ? cell(*m.page_accuracy[i]) : "-") + "\n";
  }
  out += "full info\t-\t-\t-\t" +
         (m.full_info_accuracy ? cell(*m.full_info_accuracy) : std::string("-")) +
         "\n";
  return out;
}

}  // namespace lmgeo
