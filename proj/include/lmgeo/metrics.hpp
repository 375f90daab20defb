#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmgeo/tags.hpp"

namespace lmgeo {

struct PrecisionRecall {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0.0;  // 0 when nothing was predicted
  double recall = 0.0;     // 0 when there is no gold
  double f1 = 0.0;         // harmonic mean, 0 when P + R == 0
};

PrecisionRecall make_precision_recall(std::size_t tp, std::size_t predicted,
                                      std::size_t gold);

// P_suc / P_total; 0 for an empty denominator.
double page_accuracy(std::size_t successes, std::size_t total);

struct ExtractionMetrics {
  PrecisionRecall all_types;
  std::array<PrecisionRecall, kNumEntityTypes> per_type{};
  // Over pages whose gold contains the type; empty when no page does.
  std::array<std::optional<double>, kNumEntityTypes> page_accuracy{};
  // Over pages whose gold contains all five types.
  std::optional<double> full_info_accuracy;
  std::size_t pages = 0;
};

struct PageEntities {
  std::string page_id;
  std::vector<LocationEntity> entities;
};

// Exact span-and-type matching. Pages are paired by position and must carry
// the same ids; throws InputError otherwise.
ExtractionMetrics compute_metrics(std::span<const PageEntities> predicted,
                                  std::span<const PageEntities> gold);

// Token-level F1 per tag index (size kNumTags). A tag that is neither
// predicted nor present in gold scores 1.
std::vector<double> per_tag_f1(std::span<const std::vector<Tag>> predicted,
                               std::span<const std::vector<Tag>> gold);

// Tab-separated table: header, "all types", one row per type, "full info".
std::string metrics_table(const ExtractionMetrics& m);

}  // namespace lmgeo
