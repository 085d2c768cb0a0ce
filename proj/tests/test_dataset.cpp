#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "ensemble/dataset.hpp"
#include "ensemble/error.hpp"
#include "ensemble/predictions.hpp"
#include "ensemble/table.hpp"
#include "test_util.hpp"

namespace ensemble {
namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

DatasetManifest synthetic_manifest(std::size_t negatives, std::size_t positives) {
  DatasetManifest m;
  for (std::size_t i = 0; i < negatives + positives; ++i) {
    m.entries.push_back({"img" + std::to_string(i), "img.png",
                         i < negatives ? kNegativeOne : kPositiveOne});
  }
  return m;
}

TEST(Table, DelimiterDetectionAndComments) {
  const auto t = DelimitedTable::parse("# comment\na\tb\n\n 1 \t x\n# skip\n2\ty\n", "mem");
  EXPECT_EQ(t.header(), (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.rows()[0].fields, (std::vector<std::string>{"1", "x"}));
  EXPECT_EQ(t.rows()[1].line, 6u);
  EXPECT_THROW(DelimitedTable::parse("a,b\n1\n", "mem"), ParseError);
  EXPECT_THROW(DelimitedTable::parse("", "mem"), ParseError);
  EXPECT_THROW(t.column("zzz"), ParseError);
}

TEST(Manifest, LoadsTwoEntries) {
  testing::TempDir dir("manifest");
  write_text(dir / "m.csv", "image_id,path,label\na,imgs/a.png,-1\nb,/abs/b.png,1\n");
  const DatasetManifest m = load_manifest(dir / "m.csv");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.entries[0].path, dir / "imgs/a.png");
  EXPECT_EQ(m.entries[1].path, std::filesystem::path("/abs/b.png"));
  EXPECT_EQ(m.entries[1].label, kPositiveOne);
  EXPECT_EQ(m.class_counts(), (std::vector<std::size_t>{1, 1}));
}

TEST(Manifest, RejectsDuplicatesAndUnknownLabels) {
  testing::TempDir dir("manifest_bad");
  write_text(dir / "dup.csv", "image_id,path,label\na,a.png,-1\na,b.png,1\n");
  try {
    load_manifest(dir / "dup.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate image_id 'a'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos);
  }
  write_text(dir / "label.csv", "image_id,path,label\na,a.png,0\n");
  EXPECT_THROW(load_manifest(dir / "label.csv"), LabelError);
  write_text(dir / "nolabel.csv", "image_id,path\na,a.png\n");
  EXPECT_THROW(load_manifest(dir / "nolabel.csv"), ParseError);
  write_text(dir / "truth.csv", "image_id,label\na,1\n");
  EXPECT_THROW(load_manifest(dir / "truth.csv"), ParseError);
  EXPECT_EQ(load_truth(dir / "truth.csv").size(), 1u);
  EXPECT_THROW(load_manifest(dir / "nope.csv"), IoError);
}

TEST(Manifest, LargeManifestClassCounts) {
  testing::TempDir dir("manifest746");
  std::string text = "image_id,path,label\n";
  for (int i = 0; i < 746; ++i) {
    text += "ct" + std::to_string(i) + ",ct" + std::to_string(i) + ".png," +
            (i < 349 ? "-1" : "1") + "\n";
  }
  write_text(dir / "m.csv", text);
  const DatasetManifest m = load_manifest(dir / "m.csv");
  EXPECT_EQ(m.size(), 746u);
  EXPECT_EQ(m.class_counts(), (std::vector<std::size_t>{349, 397}));
}

TEST(Splits, ExactFractions) {
  const DatasetManifest m = synthetic_manifest(5, 5);
  const SplitPlan plan = make_splits(m, {5, 0.8}, 1);
  ASSERT_EQ(plan.iterations.size(), 5u);
  for (const auto& s : plan.iterations) {
    EXPECT_EQ(s.train.size(), 8u);
    EXPECT_EQ(s.test.size(), 2u);
    int neg_test = 0;
    for (const auto& id : s.test) neg_test += m.find(id).label == kNegativeOne;
    EXPECT_EQ(neg_test, 1);
  }
}

TEST(Splits, SameSeedSamePlan) {
  const DatasetManifest m = synthetic_manifest(30, 41);
  EXPECT_EQ(make_splits(m, {5, 0.8}, 42), make_splits(m, {5, 0.8}, 42));
  EXPECT_NE(make_splits(m, {5, 0.8}, 42), make_splits(m, {5, 0.8}, 43));
}

TEST(Splits, LargeManifestRounding) {
  // round(0.8 * 746) = round(596.8) = 597; largest remainder gives the extra
  // image to the +1 class (397*597/746 has remainder 0.70 vs 0.29).
  EXPECT_EQ(train_count(746, 0.8), 597u);
  EXPECT_EQ(train_count(10, 0.8), 8u);
  const DatasetManifest m = synthetic_manifest(349, 397);
  const SplitPlan plan = make_splits(m, {5, 0.8}, 42);
  for (const auto& s : plan.iterations) {
    EXPECT_EQ(s.train.size(), 597u);
    EXPECT_EQ(s.test.size(), 149u);
    int neg_train = 0;
    for (const auto& id : s.train) neg_train += m.find(id).label == kNegativeOne;
    EXPECT_EQ(neg_train, 279);
  }
}

TEST(Splits, Errors) {
  EXPECT_THROW(make_splits(synthetic_manifest(5, 0), {5, 0.8}, 1), StratificationError);
  EXPECT_THROW(make_splits(synthetic_manifest(1, 5), {5, 0.8}, 1), StratificationError);
  EXPECT_THROW(make_splits(synthetic_manifest(5, 5), {0, 0.8}, 1), DomainError);
  EXPECT_THROW(make_splits(synthetic_manifest(5, 5), {5, 1.0}, 1), DomainError);
}

TEST(SplitsProperty, DisjointCoveringAndStratified) {
  Rng rng(90);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t neg = 2 + rng.below(60), pos = 2 + rng.below(60);
    const DatasetManifest m = synthetic_manifest(neg, pos);
    const double fraction = rng.uniform(0.3, 0.9);
    const SplitPlan plan = make_splits(m, {3, fraction}, rng.next());
    const std::size_t k = neg + pos;
    const double share = static_cast<double>(train_count(k, fraction)) / static_cast<double>(k);
    for (const auto& s : plan.iterations) {
      std::set<std::string> train(s.train.begin(), s.train.end());
      std::set<std::string> test(s.test.begin(), s.test.end());
      ASSERT_EQ(train.size() + test.size(), k);
      for (const auto& id : test) ASSERT_EQ(train.count(id), 0u);
      std::size_t neg_test = 0;
      for (const auto& id : s.test) neg_test += m.find(id).label == kNegativeOne;
      const double expected_neg_test = static_cast<double>(neg) * (1.0 - share);
      ASSERT_LT(std::abs(static_cast<double>(neg_test) - expected_neg_test), 1.0);
      ASSERT_GE(neg_test, 1u);
      ASSERT_LT(neg_test, neg);
    }
  }
}

TEST(Splits, PlanFileRoundTrip) {
  testing::TempDir dir("plan");
  const SplitPlan plan = make_splits(synthetic_manifest(7, 9), {4, 0.75}, 5);
  save_split_plan(dir / "p.json", plan);
  EXPECT_EQ(load_split_plan(dir / "p.json"), plan);
  write_text(dir / "bad.json", "{\"schema\": \"other\", \"version\": 1}");
  EXPECT_THROW(load_split_plan(dir / "bad.json"), Error);
}

TEST(Predictions, ReadWriteAndIterationColumn) {
  testing::TempDir dir("pred");
  const std::vector<PredictionRecord> recs{
      {0, "m1", "a", kNegativeOne, 0.1 + 0.2},
      {1, "m1", "a", kPositiveOne, 2.0 / 3.0},
      {std::nullopt, "m2", "a", kPositiveOne, 1.0},
  };
  write_predictions(dir / "p.csv", recs);
  EXPECT_EQ(read_predictions(dir / "p.csv"), recs);

  write_text(dir / "plain.tsv", "model_id\timage_id\tdecision\tscore\nm\tx\t-1\t0.75\n");
  const auto plain = read_predictions(dir / "plain.tsv");
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_FALSE(plain[0].iteration.has_value());
  EXPECT_EQ(plain[0].score, 0.75);
}

TEST(Predictions, Validation) {
  testing::TempDir dir("pred_bad");
  write_text(dir / "range.csv", "model_id,image_id,decision,score\nnetA,img7,1,1.2\n");
  try {
    read_predictions(dir / "range.csv");
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("netA"), std::string::npos);
    EXPECT_NE(msg.find("img7"), std::string::npos);
  }
  write_text(dir / "dup1.csv", "model_id,image_id,decision,score\nm,a,1,0.5\n");
  const std::vector<std::filesystem::path> both{dir / "dup1.csv", dir / "dup1.csv"};
  EXPECT_THROW(read_predictions(both), ParseError);
  write_text(dir / "label.csv", "model_id,image_id,decision,score\nm,a,2,0.5\n");
  EXPECT_THROW(read_predictions(dir / "label.csv"), LabelError);
  write_text(dir / "nan.csv", "model_id,image_id,decision,score\nm,a,1,nan\n");
  EXPECT_THROW(read_predictions(dir / "nan.csv"), ParseError);
  write_text(dir / "cols.csv", "model_id,image_id,score\nm,a,0.5\n");
  EXPECT_THROW(read_predictions(dir / "cols.csv"), ParseError);
}

}  // namespace
}  // namespace ensemble
