#include "modelcard/error.hpp"
#include "modelcard/metrics_json.hpp"
#include "modelcard/pipeline.hpp"
#include "modelcard/versioning.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <thread>

using namespace modelcard;
using namespace std::chrono;
using testing_support::TempDir;

namespace {

constexpr sys_seconds kFrozen = sys_days{2025y / March / 1};

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an exception";
    return ErrorCode::Internal;
}

CardManifest manifest_for(const std::filesystem::path& config_path, std::string_view version)
{
    return build_card(load_valid_config(config_path), version, kFrozen).manifest;
}

CardManifest fake(std::string_view version, std::string hash)
{
    CardManifest m;
    m.version = VersionString::parse(version);
    m.manifest_hash = std::move(hash);
    m.created_at = "2025-03-01T00:00:00Z";
    m.config = nlohmann::json::object();
    const ConfusionMatrix cm(std::make_shared<const ClassLabelMap>(std::vector<std::string>{"a", "b"}), {3, 1, 1, 3});
    m.metrics = metrics_document(cm, derive_metrics(cm), nullptr);
    return m;
}

// Independent accuracy of a two-column prediction CSV.
double csv_accuracy(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    int n = 0, correct = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        ++n;
        if (line.substr(0, comma) == line.substr(comma + 1)) ++correct;
    }
    return static_cast<double>(correct) / n;
}

} // namespace

TEST(VersionString, ParseAndOrder)
{
    EXPECT_EQ(VersionString::parse("1.0").components(), (std::vector<std::uint64_t>{1, 0}));
    EXPECT_EQ(VersionString::parse("0.1.0").raw(), "0.1.0");
    for (const char* bad : {"", "1.", ".1", "a", "1.2.3.4", "-1", "1..2", "v1.0", "1.0 ", "1.x"})
        EXPECT_EQ(code_of([&] { VersionString::parse(bad); }), ErrorCode::InvalidVersion) << bad;

    const auto v = [](const char* s) { return VersionString::parse(s); };
    EXPECT_TRUE(v("1") == v("1.0"));
    EXPECT_TRUE(v("1.0") == v("1.0.0"));
    EXPECT_TRUE(v("0.1.0") < v("1.0"));
    EXPECT_TRUE(v("1.0") < v("1.0.1"));
    EXPECT_TRUE(v("1.9") < v("1.10"));
    EXPECT_TRUE(v("2") > v("1.99.99"));
}

TEST(Digest, Sha256KnownVectors)
{
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, HashIndependentOfYamlLayout)
{
    const auto dir = testing_support::fixtures_dir() / "faced";
    const std::string reordered =
        "uncertainty: {seed: 42, replicates: 2000, level: 0.95}\n"
        "assets:\n  images:\n    - {caption: \"Electrode montage (10-20 system)\", path: logs/montage.png}\n"
        "  epoch_log: logs/history.csv\n  prediction_log:   logs/predictions.csv\n  folder: logs\n"
        "references: [\"FACED dataset release notes (2023).\"]\n"
        "limitations:\n"
        "  - Subject demographics are skewed, so per-group performance may differ from the aggregate.\n"
        "  - 'Recordings with bad channels were kept; artifacts can lower accuracy.'\n"
        "model: {parameter_count: 0.56M, batch_size: 32, learning_rate: 1.0e-3, model_type: CNN (Xception-based),\n"
        "        output_desc: \"Class labels, Confidence intervals\", input_desc: 30-channel EEG time-series data}\n"
        "dataset:\n  preprocessing: [Band-Pass Filtering, Common Spatial Patterns (CSP), Normalization]\n"
        "  split: '80:20'\n  ground_truth: [Negative, Neutral, Positive]\n  num_classes: 3\n  name: FACED Dataset\n"
        "intended_use: Research on EEG-based affective computing; not for clinical decisions.\n"
        "overview: Three-way valence classifier for multichannel EEG recordings. Reports per-class metrics with "
        "bootstrap confidence intervals alongside the training setup.\n"
        "title: EEG Emotion Classifier\n";
    const auto parsed = parse_config_string(reordered, dir);
    ASSERT_TRUE(parsed.config) << parsed.report.errors.front().path;
    const auto a = build_card(load_valid_config(dir / "config.yaml"), "1.0", kFrozen);
    const auto b = build_card(*parsed.config, "1.0", kFrozen);
    EXPECT_EQ(canonical_config(a.config).dump(), canonical_config(b.config).dump());
    EXPECT_EQ(a.manifest.manifest_hash, b.manifest.manifest_hash);
    EXPECT_EQ(a.document.html, b.document.html);
}

TEST(Manifest, HashSensitiveToEveryInput)
{
    const auto a = build_card(load_valid_config(testing_support::fixtures_dir() / "faced/config.yaml"), "1.0", kFrozen);
    ManifestInputs base;
    base.canonical_config = a.manifest.config;
    base.metrics = a.manifest.metrics;
    for (const auto& c : a.charts) base.chart_svgs.push_back(c.svg);
    base.input_digests = a.manifest.input_digests;
    const auto h = manifest_hash(base);
    EXPECT_EQ(h, a.manifest.manifest_hash);

    auto m1 = base;
    m1.canonical_config["model"]["batch_size"] = 33;
    auto m2 = base;
    m2.metrics["accuracy"] = 0.5;
    auto m3 = base;
    m3.chart_svgs[1] += " ";
    auto m4 = base;
    m4.input_digests.begin()->second[0] ^= 1;
    auto m5 = base;
    m5.chart_svgs.pop_back();
    // Moving bytes between adjacent framed fields must not collide.
    auto m6 = base;
    m6.chart_svgs[0] += m6.chart_svgs[1].substr(0, 1);
    m6.chart_svgs[1].erase(0, 1);
    for (const auto* m : {&m1, &m2, &m3, &m4, &m5, &m6}) EXPECT_NE(manifest_hash(*m), h);
}

TEST(Manifest, JsonRoundTrip)
{
    const auto m = manifest_for(testing_support::fixtures_dir() / "tuh/config.yaml", "0.1.0");
    const auto back = manifest_from_json(nlohmann::json::parse(to_json(m).dump()));
    EXPECT_EQ(back.version.raw(), "0.1.0");
    EXPECT_EQ(back.manifest_hash, m.manifest_hash);
    EXPECT_EQ(back.input_digests, m.input_digests);
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.metrics, m.metrics);
    EXPECT_EQ(back.created_at, "2025-03-01T00:00:00Z");
}

TEST(Registry, AddIdempotentConflict)
{
    TempDir tmp;
    const auto reg = tmp / kRegistryFileName;
    EXPECT_TRUE(load_registry(reg).empty());
    EXPECT_EQ(register_card(fake("1.0", std::string(64, 'a')), reg), RegisterOutcome::Added);
    ASSERT_EQ(load_registry(reg).size(), 1u);
    const std::string bytes = text::read_file(reg);
    EXPECT_EQ(register_card(fake("1.0", std::string(64, 'a')), reg), RegisterOutcome::AlreadyPresent);
    EXPECT_EQ(text::read_file(reg), bytes);
    EXPECT_EQ(code_of([&] { register_card(fake("1.0", std::string(64, 'b')), reg); }), ErrorCode::VersionConflict);
    EXPECT_EQ(text::read_file(reg), bytes);
    EXPECT_TRUE(nlohmann::json::parse(bytes).is_array());
}

TEST(Registry, SortedRegardlessOfInsertionOrder)
{
    TempDir tmp;
    const auto reg = tmp / kRegistryFileName;
    const std::vector<std::string> inserted = {"1.10", "0.1.0", "2", "1.0", "1.9", "1", "1.0.1"};
    for (std::size_t i = 0; i < inserted.size(); ++i) register_card(fake(inserted[i], std::to_string(i)), reg);
    std::vector<std::string> listed;
    for (const auto& e : load_registry(reg)) listed.push_back(e.version.raw());
    EXPECT_EQ(listed, (std::vector<std::string>{"0.1.0", "1", "1.0", "1.0.1", "1.9", "1.10", "2"}));
    const auto raw = nlohmann::json::parse(text::read_file(reg));
    for (std::size_t i = 0; i < listed.size(); ++i) EXPECT_EQ(raw[i]["version"], listed[i]);
}

TEST(Registry, LockedRegistryIsRetryableIoError)
{
    TempDir tmp;
    const auto reg = tmp / kRegistryFileName;
    testing_support::write(std::filesystem::path(reg).concat(".lock"), "");
    EXPECT_EQ(code_of([&] { register_card(fake("1.0", "x"), reg); }), ErrorCode::IoError);
    EXPECT_FALSE(std::filesystem::exists(reg));
}

TEST(Registry, ConcurrentWritersNeverCorrupt)
{
    TempDir tmp;
    const auto reg = tmp / kRegistryFileName;
    std::vector<std::jthread> writers;
    std::atomic<int> added{0};
    for (int t = 0; t < 8; ++t)
        writers.emplace_back([&, t] {
            for (int attempt = 0; attempt < 2000; ++attempt) {
                try {
                    register_card(fake("1." + std::to_string(t), std::to_string(t)), reg);
                    ++added;
                    return;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::IoError) throw;
                    std::this_thread::yield();
                }
            }
        });
    writers.clear();
    EXPECT_EQ(added.load(), 8);
    EXPECT_EQ(load_registry(reg).size(), 8u);
}

TEST(Registry, CorruptFileReported)
{
    TempDir tmp;
    const auto reg = tmp / kRegistryFileName;
    testing_support::write(reg, "{not json");
    EXPECT_THROW(load_registry(reg), Error);
}

TEST(Diff, SelfIsEmpty)
{
    const auto m = manifest_for(testing_support::fixtures_dir() / "faced/config.yaml", "1.0");
    const auto d = diff_manifests(m, m);
    EXPECT_TRUE(d.empty());
    EXPECT_EQ(format_diff(d), "no changes\n");
}

TEST(Diff, LearningRateOnly)
{
    TempDir tmp;
    const auto dir = testing_support::copy_fixture("faced", tmp.path());
    std::string yaml = text::read_file(dir / "config.yaml");
    const auto a = manifest_for(dir / "config.yaml", "1.0");
    yaml.replace(yaml.find("learning_rate: 0.001"), 20, "learning_rate: 1e-05");
    testing_support::write(dir / "config.yaml", yaml);
    const auto b = manifest_for(dir / "config.yaml", "1.1");

    const auto d = diff_manifests(a, b);
    ASSERT_EQ(d.config_changes.size(), 1u);
    EXPECT_EQ(d.config_changes[0], (ConfigChange{"model.learning_rate", "0.001", "1e-05"}));
    EXPECT_TRUE(d.asset_changes.empty());
    const auto back = diff_manifests(b, a);
    ASSERT_EQ(back.metric_deltas.size(), d.metric_deltas.size());
    for (std::size_t i = 0; i < d.metric_deltas.size(); ++i) EXPECT_EQ(back.metric_deltas[i].delta, -d.metric_deltas[i].delta);
    EXPECT_EQ(format_diff(d), "config  model.learning_rate: 0.001 -> 1e-05\n");
}

TEST(Diff, TwoExtraErrors)
{
    TempDir tmp;
    const auto dir = testing_support::copy_fixture("tuh", tmp.path());
    const std::string before = text::read_file(dir / "logs/predictions.csv");
    const auto a = manifest_for(dir / "config.yaml", "1.0");

    // Flip the first two correct rows to the other class.
    std::string after;
    std::istringstream in(before);
    std::string line;
    int flipped = 0;
    std::getline(in, line);
    after += line + "\n";
    while (std::getline(in, line)) {
        if (flipped < 2 && line == "0,0") {
            line = "0,1";
            ++flipped;
        } else if (flipped < 2 && line == "1,1") {
            line = "1,0";
            ++flipped;
        }
        after += line + "\n";
    }
    ASSERT_EQ(flipped, 2);
    testing_support::write(dir / "logs/predictions.csv", after);
    const auto b = manifest_for(dir / "config.yaml", "1.1");

    const auto d = diff_manifests(a, b);
    EXPECT_TRUE(d.config_changes.empty());
    ASSERT_FALSE(d.metric_deltas.empty());
    EXPECT_EQ(d.metric_deltas[0].metric, "accuracy");
    const double old_acc = csv_accuracy(before), new_acc = csv_accuracy(after);
    EXPECT_EQ(d.metric_deltas[0].old_value, old_acc);
    EXPECT_EQ(d.metric_deltas[0].new_value, new_acc);
    EXPECT_NEAR(new_acc - old_acc, -2.0 / 80.0, 1e-15);
    EXPECT_NEAR(d.metric_deltas[0].delta, std::round(new_acc * 1e4) / 1e4 - std::round(old_acc * 1e4) / 1e4, 1e-12);
    ASSERT_EQ(d.asset_changes.size(), 1u);
    EXPECT_EQ(d.asset_changes[0].path, "logs/predictions.csv");
    EXPECT_EQ(d.asset_changes[0].kind, AssetChangeKind::Modified);

    const auto back = diff_manifests(b, a);
    ASSERT_EQ(back.metric_deltas.size(), d.metric_deltas.size());
    for (std::size_t i = 0; i < d.metric_deltas.size(); ++i) {
        EXPECT_EQ(back.metric_deltas[i].metric, d.metric_deltas[i].metric);
        EXPECT_EQ(back.metric_deltas[i].delta, -d.metric_deltas[i].delta);
    }
}

TEST(Diff, AddedAndRemovedAssets)
{
    auto a = fake("1.0", "a");
    auto b = fake("1.1", "b");
    a.input_digests = {{"logs/x.png", "1"}, {"logs/p.csv", "2"}};
    b.input_digests = {{"logs/y.png", "3"}, {"logs/p.csv", "2"}};
    const auto d = diff_manifests(a, b);
    ASSERT_EQ(d.asset_changes.size(), 2u);
    EXPECT_EQ(d.asset_changes[0].path, "logs/x.png");
    EXPECT_EQ(d.asset_changes[0].kind, AssetChangeKind::Removed);
    EXPECT_EQ(d.asset_changes[1].kind, AssetChangeKind::Added);
}

TEST(Diff, UnknownVersion)
{
    const std::vector<CardManifest> reg = {fake("1.0", "a")};
    EXPECT_EQ(code_of([&] { diff_cards(reg, "1.0", "9.9"); }), ErrorCode::UnknownVersion);
    // Lookup is by exact string: "1" orders equal to "1.0" but is not the same entry.
    EXPECT_EQ(code_of([&] { diff_cards(reg, "1", "1.0"); }), ErrorCode::UnknownVersion);
    EXPECT_TRUE(diff_cards(reg, "1.0", "1.0").empty());
}
