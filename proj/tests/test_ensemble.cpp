#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthetic.hpp"
#include "tmark/ensemble.hpp"

using namespace tmark;
using namespace tmark::testing;

namespace {

const std::vector<FeatureClass> kSearchClasses = {FeatureClass::A, FeatureClass::N, FeatureClass::S, FeatureClass::T,
                                                  FeatureClass::V};

std::vector<Example> slice(const std::vector<Example>& v, std::size_t from, std::size_t to) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

}  // namespace

TEST(EnumerateConfigs, Counts) {
    EXPECT_EQ(enumerate_configs({FeatureClass::V}).size(), 1u);
    std::vector<FeatureClass> nine(kLinguisticClasses.begin(), kLinguisticClasses.end() - 1);
    EXPECT_EQ(enumerate_configs(nine).size(), 511u);
    std::vector<FeatureClass> ten(kLinguisticClasses.begin(), kLinguisticClasses.end());
    EXPECT_EQ(enumerate_configs(ten).size(), 1023u);
    EXPECT_THROW(enumerate_configs({}), ConfigError);
}

TEST(EnumerateConfigs, ThreeClassesLexicographic) {
    auto configs = enumerate_configs({FeatureClass::V, FeatureClass::A, FeatureClass::S});
    std::vector<std::string> names;
    for (const auto& c : configs) names.push_back(c.to_string());
    EXPECT_EQ(names, (std::vector<std::string>{"A", "AS", "ASV", "AV", "S", "SV", "V"}));
}

TEST(FeatureSearch, PlantedClassRanksFirst) {
    auto data = planted_examples(1500, 1, FeatureClass::V, {FeatureClass::A, FeatureClass::N, FeatureClass::S, FeatureClass::T});
    auto train = slice(data, 0, 1200), dev = slice(data, 1200, 1500);
    for (auto kind : {ModelKind::Disjunctive, ModelKind::Conjunctive}) {
        auto ranked = feature_search(train, dev, kind, kSearchClasses, MarkerSet::standard());
        ASSERT_EQ(ranked.size(), 31u);
        EXPECT_EQ(ranked.front().config.to_string(), "V");
        EXPECT_DOUBLE_EQ(ranked.front().dev_accuracy, 1.0);
        for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_GE(ranked[i - 1].dev_accuracy, ranked[i].dev_accuracy);
    }
    EXPECT_THROW(feature_search(train, {}, ModelKind::Disjunctive, kSearchClasses, MarkerSet::standard()), ConfigError);
}

TEST(FeatureSearch, MatchesSeparatelyTrainedModels) {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto toy = random_toy(rng);
        auto dev_toy = toy.train;
        for (auto& ex : dev_toy) {
            ex.main = random_bundle(rng, toy.config, 4);
            ex.sub = random_bundle(rng, toy.config, 4);
        }
        auto classes = toy.config.classes();
        for (auto kind : {ModelKind::Disjunctive, ModelKind::Conjunctive}) {
            for (const auto& r : feature_search(toy.train, dev_toy, kind, classes, toy.markers)) {
                auto model = MarkerModel::train(toy.train, kind, r.config, toy.markers);
                EXPECT_EQ(r.dev_accuracy, accuracy(model, dev_toy)) << r.config.to_string();
            }
        }
    }
}

TEST(FeatureSearch, EqualAccuracyOrdersByString) {
    // every example identical: all configs score the same
    auto data = planted_examples(40, 2, FeatureClass::V, {FeatureClass::A});
    for (auto& ex : data) ex.marker = "when";
    auto ranked = feature_search(data, data, ModelKind::Disjunctive, {FeatureClass::V, FeatureClass::A},
                                 MarkerSet::standard());
    std::vector<std::string> names;
    for (const auto& r : ranked) names.push_back(r.config.to_string());
    EXPECT_EQ(names, (std::vector<std::string>{"A", "V", "AV"}));
}

TEST(ComponentSpec, RoundTrip) {
    auto spec = ComponentSpec::parse("disj:SV");
    EXPECT_EQ(spec.kind, ModelKind::Disjunctive);
    EXPECT_EQ(spec.to_string(), "disj:SV");
    EXPECT_EQ(ComponentSpec::parse("conj:VS").to_string(), "conj:SV");
    EXPECT_EQ(ComponentSpec::parse("conjunctive:NPV").to_string(), "conj:NPV");
    EXPECT_THROW(ComponentSpec::parse("SV"), ConfigError);
    EXPECT_THROW(ComponentSpec::parse("word:W"), ConfigError);
    EXPECT_THROW(ComponentSpec::parse("disj:Q"), ConfigError);
}

TEST(Presets, SizesAndFiles) {
    EXPECT_EQ(preset_roster("conjunctive-ensemble").size(), 22u);
    EXPECT_EQ(preset_roster("disjunctive-ensemble").size(), 12u);
    EXPECT_EQ(preset_roster("fusion-conjunctive-ensemble").size(), 8u);
    EXPECT_EQ(preset_roster("fusion-disjunctive-ensemble").size(), 19u);
    EXPECT_THROW(preset_roster("nope"), ConfigError);
    for (const auto& [name, text] : preset_rosters()) {
        for (const auto& spec : parse_roster(text)) {
            EXPECT_EQ(ComponentSpec::parse(spec.to_string()), spec);
            if (name.find("fusion") != std::string::npos) {
                EXPECT_FALSE(spec.config.contains(FeatureClass::P));
            }
        }
        std::ifstream in(std::filesystem::path(TMARK_DATA_DIR) / "presets" / (name + ".txt"));
        ASSERT_TRUE(in) << name;
        std::stringstream file;
        file << in.rdbuf();
        EXPECT_EQ(file.str(), text) << name;
    }
}

TEST(Presets, RosterParsing) {
    auto roster = parse_roster("# comment\n disj:SV \n\ndisj:VS\nconj:NPV # trailing\n");
    ASSERT_EQ(roster.size(), 2u);
    EXPECT_THROW(parse_roster("# nothing\n"), ConfigError);
}

TEST(TrainEnsemble, SingleComponentMatchesComponent) {
    auto data = planted_examples(900, 3, FeatureClass::V, {FeatureClass::N});
    // corrupt a slice so the component is imperfect
    for (std::size_t i = 0; i < data.size(); i += 4) data[i].main.values[FeatureClass::V] = {"m_when"};
    auto primary = slice(data, 0, 500), secondary = slice(data, 500, 700), test = slice(data, 700, 900);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V")};
    auto ens = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 5});
    ASSERT_EQ(ens.component_secondary_accuracy.size(), 1u);
    EXPECT_GE(ens.secondary_accuracy + 1e-12, ens.component_secondary_accuracy[0]);
    // pass-through tree: ensemble agrees with the component wherever its output was seen
    const auto& model = ens.components()[0].model;
    const auto& root = ens.tree().nodes().front();
    ASSERT_TRUE(root.attribute.has_value());
    std::size_t checked = 0;
    for (const auto& ex : test) {
        auto out = model.predict_marker(ex.main, ex.sub).chosen;
        if (!root.branches.count(out)) continue;
        EXPECT_EQ(ens.predict(ex), out);
        ++checked;
    }
    EXPECT_GT(checked, test.size() / 2);
}

TEST(TrainEnsemble, ComplementaryComponents) {
    auto data = complementary_examples(2000, 4);
    auto primary = slice(data, 0, 1000), secondary = slice(data, 1000, 1500), test = slice(data, 1500, 2000);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V"), ComponentSpec::parse("disj:N")};
    auto ens = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 10});
    double best = 0.0;
    for (const auto& c : ens.components()) best = std::max(best, accuracy(c.model, test));
    std::size_t ok = 0;
    for (const auto& ex : test) ok += ens.predict(ex) == ex.marker;
    double acc = static_cast<double>(ok) / static_cast<double>(test.size());
    EXPECT_GT(acc, best);
    EXPECT_GT(ens.cv_accuracy, 0.95);
    for (double component : ens.component_secondary_accuracy) EXPECT_GT(ens.secondary_accuracy, component);
}

TEST(TrainEnsemble, DeterministicJson) {
    auto data = complementary_examples(600, 5);
    auto primary = slice(data, 0, 300), secondary = slice(data, 300, 600);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V"), ComponentSpec::parse("conj:NV")};
    auto a = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 3});
    auto b = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 3});
    EXPECT_EQ(a.to_json({"m0", "m1"}).dump(), b.to_json({"m0", "m1"}).dump());

    std::map<std::string, MarkerModel> store = {{"m0", a.components()[0].model}, {"m1", a.components()[1].model}};
    auto back = StackedEnsemble::from_json(a.to_json({"m0", "m1"}), [&](const std::string& ref) { return store.at(ref); });
    EXPECT_EQ(back.tree(), a.tree());
    for (const auto& ex : secondary) EXPECT_EQ(back.predict(ex), a.predict(ex));
}

TEST(TrainEnsemble, Fusion) {
    auto data = planted_examples(800, 6, FeatureClass::V, {FeatureClass::N});
    auto primary = slice(data, 0, 400), secondary = slice(data, 400, 600), test = slice(data, 600, 800);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V"), ComponentSpec::parse("disj:N")};
    auto ens = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Fusion, 5, 2, 9});
    auto cases = make_fusion_cases(test, 9);
    std::size_t ok = 0;
    for (const auto& c : cases) ok += ens.predict(c) == to_string(c.gold);
    EXPECT_GT(static_cast<double>(ok) / static_cast<double>(cases.size()), 0.95);

    std::vector<ComponentSpec> with_position = {ComponentSpec::parse("disj:PV")};
    EXPECT_THROW(train_ensemble(with_position, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Fusion, 5}),
                 ConfigError);
}

TEST(TrainEnsemble, Errors) {
    auto data = planted_examples(30, 7, FeatureClass::V, {});
    auto primary = slice(data, 0, 20), secondary = slice(data, 20, 30);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V")};
    EXPECT_THROW(train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 11}),
                 ConfigError);
    EXPECT_THROW(train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation, 1}),
                 ConfigError);
    EXPECT_THROW(train_ensemble({}, primary, secondary, MarkerSet::standard()), ConfigError);
}

TEST(FusionCases, HideSideAndPosition) {
    auto data = planted_examples(10, 8, FeatureClass::V, {});
    for (auto& ex : data) {
        ex.main.values[FeatureClass::P] = {"sub_first"};
        ex.main.side = Side::Main;
    }
    for (const auto& c : make_fusion_cases(data, 1)) {
        EXPECT_FALSE(c.a.side.has_value());
        EXPECT_FALSE(c.b.side.has_value());
        EXPECT_FALSE(c.a.values.count(FeatureClass::P));
        EXPECT_FALSE(c.b.values.count(FeatureClass::P));
    }
}
