#include "ensemble/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ensemble/error.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/table.hpp"
#include "json.hpp"

namespace ensemble {
namespace {

DatasetManifest load_entries(const std::filesystem::path& path, LabelSpace codebook,
                             bool need_path) {
  const DelimitedTable table = DelimitedTable::read(path);
  const std::size_t id_col = table.column("image_id");
  const std::size_t label_col = table.column("label");
  const auto path_col = need_path ? std::optional(table.column("path"))
                                  : table.find_column("path");
  const auto base = path.parent_path();

  DatasetManifest m;
  m.codebook = codebook;
  std::unordered_set<std::string> seen;
  for (const auto& row : table.rows()) {
    const std::string& id = row.fields[id_col];
    if (id.empty()) throw ParseError(table.where(row) + ": empty image_id");
    if (!seen.insert(id).second) {
      throw ParseError(table.where(row) + ": duplicate image_id '" + id + "'");
    }
    const auto code = parse_int(row.fields[label_col]);
    if (!code) {
      throw ParseError(table.where(row) + ": label '" + row.fields[label_col] +
                       "' is not an integer");
    }
    const ClassLabel label{static_cast<int>(*code)};
    if (!codebook.contains(label)) {
      throw LabelError(table.where(row) + ": unknown label code " +
                       row.fields[label_col]);
    }
    std::filesystem::path file;
    if (path_col) {
      file = row.fields[*path_col];
      if (need_path && file.empty()) throw ParseError(table.where(row) + ": empty path");
      if (!file.empty() && file.is_relative()) file = base / file;
    }
    m.entries.push_back({id, std::move(file), label});
  }
  return m;
}

std::size_t round_half_up(double v) {
  return static_cast<std::size_t>(std::floor(v + 0.5));
}

}  // namespace

const ManifestEntry& DatasetManifest::find(const std::string& image_id) const {
  for (const auto& e : entries) {
    if (e.image_id == image_id) return e;
  }
  throw CoverageError("image id '" + image_id + "' not in manifest");
}

std::vector<std::size_t> DatasetManifest::class_counts() const {
  const auto codes = codebook.codes();
  std::vector<std::size_t> counts(codes.size(), 0);
  for (const auto& e : entries) {
    const auto it = std::find(codes.begin(), codes.end(), e.label);
    ++counts[static_cast<std::size_t>(it - codes.begin())];
  }
  return counts;
}

DatasetManifest load_manifest(const std::filesystem::path& path, LabelSpace codebook) {
  return load_entries(path, codebook, true);
}

DatasetManifest load_truth(const std::filesystem::path& path, LabelSpace codebook) {
  return load_entries(path, codebook, false);
}

void SplitParams::validate() const {
  if (iterations < 1) throw DomainError("iterations must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must lie strictly between 0 and 1");
  }
}

std::size_t train_count(std::size_t k, double train_fraction) {
  return round_half_up(train_fraction * static_cast<double>(k));
}

SplitPlan make_splits(const DatasetManifest& m, const SplitParams& params,
                      std::uint64_t seed) {
  params.validate();
  const std::size_t k = m.size();
  if (k < 2) throw StratificationError("need at least two images to split");

  const auto codes = m.codebook.codes();
  std::vector<std::vector<std::size_t>> members(codes.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto it = std::find(codes.begin(), codes.end(), m.entries[i].label);
    members[static_cast<std::size_t>(it - codes.begin())].push_back(i);
  }
  for (std::size_t c = 0; c < codes.size(); ++c) {
    if (members[c].size() < 2) {
      throw StratificationError("class " + std::to_string(codes[c].code) + " has " +
                                std::to_string(members[c].size()) +
                                " image(s); stratified splits need at least 2");
    }
  }

  // Largest-remainder allocation of the train count over classes.
  const std::size_t total_train = train_count(k, params.train_fraction);
  std::vector<std::size_t> quota(codes.size());
  std::vector<std::size_t> remainder(codes.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < codes.size(); ++c) {
    quota[c] = members[c].size() * total_train / k;
    remainder[c] = members[c].size() * total_train % k;
    assigned += quota[c];
  }
  std::vector<std::size_t> by_remainder(codes.size());
  std::iota(by_remainder.begin(), by_remainder.end(), 0);
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_train; ++i, ++assigned) {
    ++quota[by_remainder[i % by_remainder.size()]];
  }
  for (std::size_t c = 0; c < codes.size(); ++c) {
    quota[c] = std::clamp<std::size_t>(quota[c], 1, members[c].size() - 1);
  }

  SplitPlan plan;
  plan.seed = seed;
  plan.train_fraction = params.train_fraction;
  for (int r = 0; r < params.iterations; ++r) {
    Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(r)});
    std::vector<bool> in_train(k, false);
    for (std::size_t c = 0; c < codes.size(); ++c) {
      auto pool = members[c];
      for (std::size_t i = pool.size() - 1; i > 0; --i) {
        std::swap(pool[i], pool[rng.below(i + 1)]);
      }
      for (std::size_t i = 0; i < quota[c]; ++i) in_train[pool[i]] = true;
    }
    Split split;
    for (std::size_t i = 0; i < k; ++i) {
      (in_train[i] ? split.train : split.test).push_back(m.entries[i].image_id);
    }
    plan.iterations.push_back(std::move(split));
  }
  return plan;
}

void save_split_plan(const std::filesystem::path& path, const SplitPlan& plan) {
  nlohmann::ordered_json j;
  j["schema"] = "ensemble-split-plan";
  j["version"] = 1;
  j["seed"] = plan.seed;
  j["train_fraction"] = plan.train_fraction;
  j["iterations"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < plan.iterations.size(); ++r) {
    j["iterations"].push_back({{"iteration", r},
                               {"train", plan.iterations[r].train},
                               {"test", plan.iterations[r].test}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SplitPlan load_split_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("schema") != "ensemble-split-plan" || j.at("version") != 1) {
      throw FormatError("'" + path.string() + "' is not a version-1 split plan");
    }
    SplitPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.train_fraction = j.at("train_fraction").get<double>();
    for (const auto& it : j.at("iterations")) {
      plan.iterations.push_back({it.at("train").get<std::vector<std::string>>(),
                                 it.at("test").get<std::vector<std::string>>()});
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace ensemble
