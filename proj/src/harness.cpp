#include "ensemble/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "ensemble/error.hpp"
#include "ensemble/image_io.hpp"
#include "ensemble/rng.hpp"
#include "parallel.hpp"

namespace ensemble {
namespace {

using json = nlohmann::ordered_json;

const char* kind_name(MemberSpec::Kind k) {
  return k == MemberSpec::Kind::Logistic ? "logistic" : "centroid";
}

json committee_json(const CommitteeConfig& c) {
  json members = json::array();
  for (const auto& m : c.members) {
    members.push_back({{"id", m.id}, {"kind", kind_name(m.kind)}, {"side", m.side}});
  }
  return members;
}

json train_json(const TrainConfig& t) {
  return {{"mini_batch", t.mini_batch},       {"max_epochs", t.max_epochs},
          {"learning_rate", t.learning_rate}, {"momentum", t.momentum},
          {"l2_decay", t.l2_decay},           {"grad_clip_l2", t.grad_clip_l2},
          {"shuffle_each_epoch", t.shuffle_each_epoch}};
}

std::unordered_map<std::string, std::size_t> index_manifest(const DatasetManifest& m) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.entries.size(); ++i) index.emplace(m.entries[i].image_id, i);
  return index;
}

std::vector<std::size_t> resolve(const std::vector<std::string>& ids,
                                 const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw CoverageError("split plan names unknown image '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

void check_plan(const SplitPlan& plan) {
  if (plan.iterations.empty()) throw DomainError("split plan has no iterations");
  for (std::size_t r = 0; r < plan.iterations.size(); ++r) {
    if (plan.iterations[r].test.empty()) {
      throw DomainError("iteration " + std::to_string(r) + " has an empty test set");
    }
  }
}

std::vector<ClassLabel> truth_of(const DatasetManifest& m, std::span<const std::size_t> idx) {
  std::vector<ClassLabel> out;
  for (auto i : idx) out.push_back(m.entries[i].label);
  return out;
}

json plan_json(const SplitPlan& plan) {
  return {{"seed", plan.seed},
          {"iterations", plan.iterations.size()},
          {"train_fraction", plan.train_fraction}};
}

std::string member_kind_from(const std::string& s, const std::string& where) {
  if (s != "logistic" && s != "centroid") {
    throw UsageError(where + ": member kind must be 'logistic' or 'centroid', got '" + s + "'");
  }
  return s;
}

}  // namespace

void CommitteeConfig::validate() const {
  if (members.empty()) throw UsageError("committee has no members");
  std::vector<std::string> ids;
  for (const auto& m : members) {
    if (m.id.empty()) throw UsageError("committee member with empty id");
    if (m.id == kEnsembleId) throw UsageError("member id 'ensemble' is reserved");
    if (m.side < 1) throw UsageError("member '" + m.id + "' has side < 1");
    ids.push_back(m.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw UsageError("duplicate committee member id");
  }
  if (input_side < 1) throw UsageError("input side must be >= 1");
  train.validate();
}

MemberSpec builtin_member(std::string_view name) {
  using K = MemberSpec::Kind;
  static const std::vector<std::pair<std::string, MemberSpec>> table = {
      {"A", {"logistic32", K::Logistic, 32}},
      {"B", {"logistic16", K::Logistic, 16}},
      {"C", {"centroid16", K::Centroid, 16}},
      {"D", {"logistic8", K::Logistic, 8}},
  };
  for (const auto& [letter, spec] : table) {
    if (name == letter || name == spec.id) return spec;
  }
  throw UsageError("unknown committee member '" + std::string(name) + "'");
}

CommitteeConfig committee_preset(std::string_view name) {
  CommitteeConfig c;
  std::vector<std::string> parts;
  if (name == "augmented") {
    parts = {"A", "B", "C"};
  } else if (name == "plain") {
    parts = {"B", "C", "D"};
  } else {
    std::stringstream ss{std::string(name)};
    for (std::string p; std::getline(ss, p, ',');) {
      if (!p.empty()) parts.push_back(p);
    }
  }
  for (const auto& p : parts) c.members.push_back(builtin_member(p));
  c.validate();
  return c;
}

CommitteeConfig load_committee(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open committee file '" + path.string() + "'");
  CommitteeConfig c;
  try {
    const auto j = nlohmann::json::parse(in);
    c.input_side = j.value("input_side", c.input_side);
    for (const auto& m : j.at("members")) {
      MemberSpec spec;
      spec.id = m.at("id").get<std::string>();
      const auto kind = member_kind_from(m.at("kind").get<std::string>(), path.string());
      spec.kind = kind == "logistic" ? MemberSpec::Kind::Logistic : MemberSpec::Kind::Centroid;
      spec.side = m.value("side", spec.side);
      c.members.push_back(spec);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      c.train.mini_batch = t.value("mini_batch", c.train.mini_batch);
      c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.momentum = t.value("momentum", c.train.momentum);
      c.train.l2_decay = t.value("l2_decay", c.train.l2_decay);
      c.train.grad_clip_l2 = t.value("grad_clip_l2", c.train.grad_clip_l2);
      c.train.shuffle_each_epoch = t.value("shuffle_each_epoch", c.train.shuffle_each_epoch);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
  c.validate();
  return c;
}

MetricSummary summarize(std::vector<std::optional<double>> values) {
  MetricSummary s;
  s.per_iteration = std::move(values);
  double sum = 0.0;
  for (const auto& v : s.per_iteration) {
    if (v) {
      sum += *v;
      ++s.defined;
    } else {
      ++s.excluded;
    }
  }
  if (s.defined == 0) return s;
  const double mean = sum / static_cast<double>(s.defined);
  double ss = 0.0;
  for (const auto& v : s.per_iteration) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  s.mean = mean;
  s.std = s.defined > 1 ? std::sqrt(ss / static_cast<double>(s.defined - 1)) : 0.0;
  return s;
}

const ModelReport& EvalReport::row(std::string_view model_id) const {
  for (const auto& r : rows) {
    if (r.model_id == model_id) return r;
  }
  throw DomainError("report has no row '" + std::string(model_id) + "'");
}

IterationResult evaluate_iteration(std::span<const ClassLabel> truth, const DecisionMatrix& d,
                                   const ScoreMatrix& s, ClassLabel positive) {
  if (truth.size() != d.images()) {
    throw DimensionError("truth has " + std::to_string(truth.size()) + " labels for " +
                         std::to_string(d.images()) + " images");
  }
  const bool binary = d.label_space().is_binary();
  auto scored = [&](std::span<const ClassLabel> decisions, std::span<const double> scores) {
    MetricSet ms = metric_set(confusion(truth, decisions, positive));
    if (!binary) return ms;
    std::vector<double> oriented(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      oriented[i] = positive_score(decisions[i], scores[i], positive);
    }
    try {
      ms.auc = roc_and_auc(truth, oriented, positive).auc;
    } catch (const DegenerateRocError&) {
      ms.auc.reset();
    }
    return ms;
  };

  IterationResult out;
  for (std::size_t m = 0; m < d.models(); ++m) out.members.push_back(scored(d.row(m), s.row(m)));
  out.fusion = fuse(d, s);
  out.ensemble = scored(out.fusion.dm, out.fusion.ds);
  return out;
}

EvalReport aggregate(const std::vector<std::string>& model_ids,
                     std::span<const IterationResult> iterations, json config) {
  EvalReport report;
  report.iterations = iterations.size();
  report.config = std::move(config);
  auto build = [&](const std::string& id, bool is_ensemble, auto pick) {
    ModelReport row;
    row.model_id = id;
    row.is_ensemble = is_ensemble;
    std::vector<std::optional<double>> acc, sen, spe, f1, auc;
    for (const auto& it : iterations) {
      const MetricSet& ms = pick(it);
      acc.push_back(ms.accuracy);
      sen.push_back(ms.sensitivity);
      spe.push_back(ms.specificity);
      f1.push_back(ms.f1);
      auc.push_back(ms.auc);
    }
    row.accuracy = summarize(std::move(acc));
    row.sensitivity = summarize(std::move(sen));
    row.specificity = summarize(std::move(spe));
    row.f1 = summarize(std::move(f1));
    row.auc = summarize(std::move(auc));
    return row;
  };
  for (std::size_t m = 0; m < model_ids.size(); ++m) {
    report.rows.push_back(build(model_ids[m], false,
                                [m](const IterationResult& it) -> const MetricSet& {
                                  return it.members.at(m);
                                }));
  }
  report.rows.push_back(build(std::string(kEnsembleId), true,
                              [](const IterationResult& it) -> const MetricSet& {
                                return it.ensemble;
                              }));
  return report;
}

InternalRun run_internal(const DatasetManifest& m, const SplitPlan& plan,
                         const CommitteeConfig& committee, const RunOptions& options) {
  committee.validate();
  check_plan(plan);
  m.codebook.check(options.positive);
  AugmentationConfig aug = options.augmentation;
  aug.seed = plan.seed;
  if (options.augment) aug.validate();

  const auto index = index_manifest(m);
  std::vector<std::vector<std::size_t>> train_idx, test_idx;
  std::vector<bool> used(m.size(), false);
  for (const auto& split : plan.iterations) {
    train_idx.push_back(resolve(split.train, index));
    test_idx.push_back(resolve(split.test, index));
    for (auto i : train_idx.back()) used[i] = true;
    for (auto i : test_idx.back()) used[i] = true;
  }

  // Decode and normalize every referenced image once.
  const int side = committee.input_side;
  std::vector<RasterImage> images(m.size());
  detail::parallel_for(m.size(), [&](std::size_t i) {
    if (!used[i]) return;
    images[i] = resize(to_rgb(read_image(m.entries[i].path)), side, side);
  });

  // Un-augmented features per distinct member side.
  std::map<int, std::vector<FeatureVector>> base_features;
  for (const auto& member : committee.members) base_features.emplace(member.side, std::vector<FeatureVector>{});
  for (auto& [feat_side, feats] : base_features) {
    feats.resize(m.size());
    detail::parallel_for(m.size(), [&, fs = feat_side](std::size_t i) {
      if (used[i]) feats[i] = extract_features(images[i], fs);
    });
  }

  std::vector<std::string> model_ids;
  for (const auto& member : committee.members) model_ids.push_back(member.id);

  InternalRun run;
  std::vector<IterationResult> results;
  for (std::size_t r = 0; r < plan.iterations.size(); ++r) {
    const auto& train = train_idx[r];
    const auto& test = test_idx[r];
    const std::vector<ClassLabel> train_truth = truth_of(m, train);
    const std::vector<ClassLabel> test_truth = truth_of(m, test);
    std::vector<ClassLabel> decisions(committee.members.size() * test.size());
    std::vector<double> scores(decisions.size());

    for (std::size_t k = 0; k < committee.members.size(); ++k) {
      const MemberSpec& member = committee.members[k];
      const auto& cached = base_features.at(member.side);

      std::vector<FeatureVector> train_x(train.size());
      if (options.augment) {
        std::vector<RasterImage> originals;
        originals.reserve(train.size());
        for (auto i : train) originals.push_back(images[i]);
        const auto augmented = augment_batch(originals, aug, (r << 16) | k);
        if (options.debug_png_dir && r == 0) {
          std::filesystem::create_directories(*options.debug_png_dir);
          for (std::size_t t = 0; t < train.size(); ++t) {
            write_png(*options.debug_png_dir /
                          (member.id + "_" + m.entries[train[t]].image_id + ".png"),
                      augmented[t]);
          }
        }
        detail::parallel_for(train.size(), [&](std::size_t t) {
          train_x[t] = extract_features(augmented[t], member.side);
        });
      } else {
        for (std::size_t t = 0; t < train.size(); ++t) train_x[t] = cached[train[t]];
      }

      std::vector<Prediction> preds(test.size());
      try {
        if (member.kind == MemberSpec::Kind::Logistic) {
          TrainConfig cfg = committee.train;
          cfg.seed = Rng::stream(plan.seed, {r, k, 0x7472ULL}).next();
          const LinearModel model = sgdm_train(train_x, train_truth, cfg);
          detail::parallel_for(test.size(), [&](std::size_t t) {
            preds[t] = predict(model, cached[test[t]]);
          });
        } else {
          const CentroidModel model = nearest_centroid_train(train_x, train_truth, m.codebook);
          detail::parallel_for(test.size(), [&](std::size_t t) {
            preds[t] = nearest_centroid_predict(model, cached[test[t]]);
          });
        }
      } catch (const DegenerateTrainingError& e) {
        throw DegenerateTrainingError("iteration " + std::to_string(r) + ", member '" +
                                      member.id + "': " + e.what());
      }

      for (std::size_t t = 0; t < test.size(); ++t) {
        decisions[k * test.size() + t] = preds[t].decision;
        scores[k * test.size() + t] = preds[t].score;
        run.predictions.push_back({r, member.id, m.entries[test[t]].image_id,
                                   preds[t].decision, preds[t].score});
      }
    }

    const DecisionMatrix d(model_ids, plan.iterations[r].test, std::move(decisions), m.codebook);
    const ScoreMatrix s(model_ids, plan.iterations[r].test, std::move(scores));
    results.push_back(evaluate_iteration(test_truth, d, s, options.positive));
  }

  json config = {{"mode", "internal"}};
  config.update(plan_json(plan));
  config["positive_label"] = options.positive.code;
  config["input_side"] = committee.input_side;
  if (options.augment) {
    config["augmentation"] = {{"enabled", true},
                              {"reflect_probability", aug.reflect_probability},
                              {"translate", {aug.translate_lo, aug.translate_hi}},
                              {"scale", {aug.scale_lo, aug.scale_hi}}};
  } else {
    config["augmentation"] = {{"enabled", false}};
  }
  config["committee"] = committee_json(committee);
  config["train"] = train_json(committee.train);
  run.report = aggregate(model_ids, results, std::move(config));
  return run;
}

EvalReport run_external(const DatasetManifest& m, const SplitPlan& plan,
                        std::span<const PredictionRecord> records, const RunOptions& options) {
  check_plan(plan);
  m.codebook.check(options.positive);
  if (records.empty()) throw CoverageError("no prediction records supplied");
  const auto index = index_manifest(m);

  std::vector<std::string> model_ids;
  using Key = std::tuple<long long, std::string, std::string>;
  std::map<Key, const PredictionRecord*> lookup;
  for (const auto& rec : records) {
    if (rec.model_id == kEnsembleId) throw UsageError("model id 'ensemble' is reserved");
    m.codebook.check(rec.decision);
    if (std::find(model_ids.begin(), model_ids.end(), rec.model_id) == model_ids.end()) {
      model_ids.push_back(rec.model_id);
    }
    const long long it = rec.iteration ? static_cast<long long>(*rec.iteration) : -1;
    if (!lookup.emplace(Key{it, rec.model_id, rec.image_id}, &rec).second) {
      throw ParseError("duplicate record for model '" + rec.model_id + "', image '" +
                       rec.image_id + "'");
    }
  }

  std::vector<std::string> missing;
  std::vector<IterationResult> results;
  for (std::size_t r = 0; r < plan.iterations.size(); ++r) {
    const auto& test_ids = plan.iterations[r].test;
    const auto test = resolve(test_ids, index);
    std::vector<ClassLabel> decisions;
    std::vector<double> scores;
    for (const auto& model : model_ids) {
      for (const auto& image : test_ids) {
        auto it = lookup.find(Key{static_cast<long long>(r), model, image});
        if (it == lookup.end()) it = lookup.find(Key{-1, model, image});
        if (it == lookup.end()) {
          missing.push_back("iteration " + std::to_string(r) + " model '" + model +
                            "' image '" + image + "'");
          decisions.push_back(m.codebook.codes().front());
          scores.push_back(0.0);
          continue;
        }
        decisions.push_back(it->second->decision);
        scores.push_back(it->second->score);
      }
    }
    if (!missing.empty()) continue;
    const DecisionMatrix d(model_ids, test_ids, std::move(decisions), m.codebook);
    const ScoreMatrix s(model_ids, test_ids, std::move(scores));
    results.push_back(evaluate_iteration(truth_of(m, test), d, s, options.positive));
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " (model, image) pair(s) lack predictions:";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + missing[i];
    if (shown < missing.size()) msg += "\n  ...";
    throw CoverageError(msg);
  }

  json config = {{"mode", "external"}};
  config.update(plan_json(plan));
  config["positive_label"] = options.positive.code;
  config["committee"] = model_ids;
  return aggregate(model_ids, results, std::move(config));
}

}  // namespace ensemble
