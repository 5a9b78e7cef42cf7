// Acceptance checks. Prints one PASS/FAIL line per criterion and exits 1 if
// any fail.

#include "modelcard/cardspec.hpp"
#include "modelcard/error.hpp"
#include "modelcard/ingest.hpp"
#include "modelcard/metrics.hpp"
#include "modelcard/uncertainty.hpp"
#include "modelcard/versioning.hpp"

#include "mutants.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace modelcard;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

const std::string kCli = MODELCARD_CLI_PATH;
const fs::path kGolden = fs::path(MODELCARD_SOURCE_DIR) / "tests/golden/faced_card.sha256";
constexpr const char* kFreeze = "2025-03-01T12:00:00Z";

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Check {
public:
    void expect(bool cond, const std::string& what)
    {
        if (!cond && failures_.empty()) failures_ = what;
        if (!cond) ++count_;
    }
    Outcome outcome(std::string detail) const
    {
        if (count_ == 0) return {true, std::move(detail)};
        return {false, failures_ + (count_ > 1 ? " (+" + std::to_string(count_ - 1) + " more)" : "")};
    }

private:
    std::string failures_;
    std::size_t count_ = 0;
};

std::string fmt(double v, int precision = 3)
{
    std::ostringstream os;
    os.precision(precision);
    os << std::fixed << v;
    return os.str();
}

CommandResult cli(const std::string& args) { return run_command("'" + kCli + "' " + args); }

CommandResult generate(const fs::path& dir, const std::string& version, const std::string& extra = "")
{
    return cli("generate --config " + quote(dir / "config.yaml") + " --output " + quote(dir / "out/model_card.html") +
               " --version " + version + " --freeze-timestamp " + kFreeze + (extra.empty() ? "" : " " + extra));
}

// Straight from the definitions, sharing nothing with the library.
struct OracleMetrics {
    std::vector<std::vector<std::uint64_t>> cm;
    double accuracy = 0;
    std::vector<double> precision, recall, f1;
    double macro_p = 0, macro_r = 0, macro_f1 = 0;
};

OracleMetrics oracle(const std::vector<std::pair<int, int>>& rows, int k)
{
    OracleMetrics o;
    o.cm.assign(k, std::vector<std::uint64_t>(k, 0));
    for (int t = 0; t < k; ++t)
        for (int p = 0; p < k; ++p)
            for (const auto& [rt, rp] : rows)
                if (rt == t && rp == p) ++o.cm[t][p];
    std::uint64_t correct = 0;
    for (const auto& [rt, rp] : rows) correct += rt == rp;
    o.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
    for (int c = 0; c < k; ++c) {
        std::uint64_t tp = 0, predicted = 0, actual = 0;
        for (const auto& [rt, rp] : rows) {
            tp += rt == c && rp == c;
            predicted += rp == c;
            actual += rt == c;
        }
        const double p = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        const double r = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        o.precision.push_back(p);
        o.recall.push_back(r);
        o.f1.push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
    }
    for (int c = 0; c < k; ++c) {
        o.macro_p += o.precision[c] / k;
        o.macro_r += o.recall[c] / k;
        o.macro_f1 += o.f1[c] / k;
    }
    return o;
}

Outcome metrics_oracle()
{
    Check check;
    std::mt19937_64 rng(20250301);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int k = std::uniform_int_distribution<int>(2, 5)(rng);
        const int n = std::uniform_int_distribution<int>(1, 50)(rng);
        std::vector<std::string> names;
        for (int c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
        const ClassLabelMap labels(names);

        std::vector<std::pair<int, int>> rows;
        std::string csv = "true_label,predicted_label\n";
        std::uniform_int_distribution<int> pick(0, k - 1);
        for (int i = 0; i < n; ++i) {
            rows.emplace_back(pick(rng), pick(rng));
            csv += std::to_string(rows.back().first) + "," + std::to_string(rows.back().second) + "\n";
        }
        const auto cm = build_confusion_matrix(parse_prediction_csv(csv, labels));
        const auto m = derive_metrics(cm);
        const auto o = oracle(rows, k);
        const std::string tag = "trial " + std::to_string(trial);

        for (int t = 0; t < k; ++t)
            for (int p = 0; p < k; ++p) check.expect(cm.at(t, p) == o.cm[t][p], tag + ": matrix cell differs");
        check.expect(cm.total() == static_cast<std::uint64_t>(n), tag + ": total differs");

        auto near = [&](double a, double b, const char* what) {
            worst = std::max(worst, std::abs(a - b));
            check.expect(std::abs(a - b) <= 1e-12, tag + ": " + what + " off by " + std::to_string(std::abs(a - b)));
        };
        near(m.accuracy, o.accuracy, "accuracy");
        near(m.macro_precision, o.macro_p, "macro precision");
        near(m.macro_recall, o.macro_r, "macro recall");
        near(m.macro_f1, o.macro_f1, "macro F1");
        for (int c = 0; c < k; ++c) {
            near(m.per_class[c].precision, o.precision[c], "precision");
            near(m.per_class[c].recall, o.recall[c], "recall");
            near(m.per_class[c].f1, o.f1[c], "F1");
        }
    }
    std::ostringstream d;
    d << "200 logs, max ratio error " << worst;
    return check.outcome(d.str());
}

Outcome wilson()
{
    Check check;
    // Two-sided 97.5% normal quantile to double precision.
    const double z = 1.959963984540054;
    auto closed_form = [&](double k, double n) {
        const double p = k / n, z2 = z * z;
        const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
        const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
        return std::pair{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    };

    const auto ci = wilson_interval(80, 100, 0.95);
    const auto [lo, hi] = closed_form(80, 100);
    check.expect(std::abs(ci.lower - lo) <= 1e-6 && std::abs(ci.upper - hi) <= 1e-6, "(80,100) differs from closed form");
    // Arbitrary-precision evaluation of the same formula.
    check.expect(std::abs(ci.lower - 0.711170833635750597) <= 1e-6 && std::abs(ci.upper - 0.866633067102851643) <= 1e-6,
                 "(80,100) differs from reference values");

    std::size_t cases = 0;
    for (std::uint64_t n : {1, 2, 5, 10, 100, 1000}) {
        for (std::uint64_t k = 0; k <= n; ++k, ++cases) {
            const auto w = wilson_interval(k, n, 0.95);
            const double p = static_cast<double>(k) / static_cast<double>(n);
            const std::string tag = "(" + std::to_string(k) + "," + std::to_string(n) + ")";
            check.expect(0.0 <= w.lower && w.lower <= w.upper && w.upper <= 1.0, tag + " outside [0,1]");
            check.expect(w.contains(p), tag + " does not contain k/n");
            const auto [a, b] = closed_form(static_cast<double>(k), static_cast<double>(n));
            check.expect(std::abs(w.lower - a) <= 1e-6 && std::abs(w.upper - b) <= 1e-6, tag + " differs from closed form");
        }
    }
    return check.outcome("[" + fmt(ci.lower, 4) + ", " + fmt(ci.upper, 4) + "], " + std::to_string(cases) + " sweep cases");
}

Outcome bootstrap_coverage()
{
    Check check;
    const auto labels = std::make_shared<const ClassLabelMap>(std::vector<std::string>{"wrong", "right"});
    std::mt19937_64 rng(7);
    std::bernoulli_distribution hit(0.8);
    std::size_t covered = 0;
    const std::size_t trials = 500;
    for (std::size_t t = 0; t < trials; ++t) {
        PredictionLog log;
        log.label_map = labels;
        for (int i = 0; i < 200; ++i) log.records.push_back({1, hit(rng) ? 1u : 0u, {}});
        BootstrapOptions opt;
        opt.replicates = 1000;
        opt.seed = 1000 + t;
        opt.level = 0.95;
        covered += bootstrap_ci(log, MetricSelector{MetricKind::Accuracy, 0}, opt).contains(0.8);
    }
    const double coverage = static_cast<double>(covered) / trials;
    check.expect(coverage >= 0.90 && coverage <= 0.99, "coverage " + fmt(coverage) + " outside [0.90, 0.99]");
    return check.outcome("coverage " + fmt(coverage));
}

Outcome determinism()
{
    Check check;
    TempDir tmp;
    fs::create_directories(tmp / "a");
    fs::create_directories(tmp / "b");
    const auto a = copy_fixture("faced", tmp / "a");
    const auto b = copy_fixture("faced", tmp / "b");
    const auto ra = generate(a, "1.0", "--seed 42");
    const auto rb = generate(b, "1.0", "--seed 42");
    check.expect(ra.exit_code == 0 && rb.exit_code == 0, "generate failed: " + ra.err + rb.err);
    if (ra.exit_code != 0 || rb.exit_code != 0) return check.outcome("");

    const std::string first = text::read_file(a / "out/model_card.html");
    check.expect(first == text::read_file(b / "out/model_card.html"), "two runs differ");
    const auto again = generate(a, "1.0", "--seed 42");
    check.expect(again.exit_code == 0 && text::read_file(a / "out/model_card.html") == first, "rerun in place differs");

    // Golden digest recorded from a different compiler build of the same sources.
    const std::string digest = sha256_hex(first);
    if (fs::exists(kGolden)) {
        std::string golden = text::read_file(kGolden);
        golden = golden.substr(0, golden.find_first_of(" \n"));
        check.expect(digest == golden, "card sha256 " + digest + " differs from golden " + golden);
    } else {
        check.expect(false, "golden digest missing at " + kGolden.string());
    }
    return check.outcome("sha256 " + digest.substr(0, 16) + "...");
}

std::vector<std::string> h2_titles(const std::string& html)
{
    std::vector<std::string> out;
    for (std::size_t pos = html.find("<h2>"); pos != std::string::npos; pos = html.find("<h2>", pos + 1)) {
        const auto end = html.find("</h2>", pos);
        out.push_back(html.substr(pos + 4, end - pos - 4));
    }
    return out;
}

Outcome card_fidelity()
{
    Check check;
    TempDir tmp;
    const auto faced = copy_fixture("faced", tmp.path());
    const auto tuh = copy_fixture("tuh", tmp.path());
    const auto rf = generate(faced, "1.0");
    const auto rt = generate(tuh, "1.0");
    check.expect(rf.exit_code == 0 && rt.exit_code == 0, "generate failed: " + rf.err + rt.err);
    if (rf.exit_code != 0 || rt.exit_code != 0) return check.outcome("");

    const std::vector<std::string> sections = {"Overview",    "Dataset",     "Model Details", "Performance",
                                               "Limitations", "Uncertainty", "References"};
    for (const auto& [dir, name] : {std::pair{faced, "FACED"}, std::pair{tuh, "TUH"}}) {
        const std::string html = text::read_file(dir / "out/model_card.html");
        auto titles = h2_titles(html);
        titles.resize(std::min(titles.size(), sections.size()));
        check.expect(titles == sections, std::string(name) + ": sections missing or out of order");
        const auto refs = external_references(html);
        check.expect(refs.empty(), std::string(name) + ": external reference " + (refs.empty() ? "" : refs.front()));
        check.expect(html.find("<p class=\"version\">Version 1.0</p>") != std::string::npos,
                     std::string(name) + ": version 1.0 not in header");
        check.expect(html.find("Training/Validation Split: 80:20") != std::string::npos,
                     std::string(name) + ": split missing");
    }

    const std::string f = text::read_file(faced / "out/model_card.html");
    for (const char* s : {"Dataset: FACED Dataset", "Band-Pass Filtering", "Common Spatial Patterns (CSP)", "Normalization"})
        check.expect(f.find(s) != std::string::npos, std::string("FACED: missing ") + s);
    const std::string t = text::read_file(tuh / "out/model_card.html");
    for (const char* s : {"Learning Rate: 1e-05", "Independent Component Analysis", "Band-Pass Filtering", "Normalization"})
        check.expect(t.find(s) != std::string::npos, std::string("TUH: missing ") + s);
    return check.outcome("FACED and TUH cards, 7 sections each, no external references");
}

bool antisymmetric(const CardDiff& ab, const CardDiff& ba)
{
    if (ab.metric_deltas.size() != ba.metric_deltas.size()) return false;
    for (std::size_t i = 0; i < ab.metric_deltas.size(); ++i) {
        const auto& x = ab.metric_deltas[i];
        const auto& y = ba.metric_deltas[i];
        if (x.metric != y.metric || std::abs(x.delta + y.delta) > 1e-12 || x.old_value != y.new_value) return false;
    }
    return true;
}

Outcome diff_correctness()
{
    Check check;
    TempDir tmp;
    const auto dir = copy_fixture("faced", tmp.path());
    check.expect(generate(dir, "1.0").exit_code == 0, "generate 1.0 failed");

    std::string yaml = text::read_file(dir / "config.yaml");
    yaml.replace(yaml.find("learning_rate: 0.001"), 20, "learning_rate: 1e-05");
    write(dir / "config.yaml", yaml);
    check.expect(generate(dir, "1.1").exit_code == 0, "generate 1.1 failed");

    // A third version also changes predictions, so the deltas are not all zero.
    std::string preds = text::read_file(dir / "logs/predictions.csv");
    for (int i = 0; i < 10; ++i) preds.erase(preds.rfind('\n', preds.size() - 2) + 1);
    write(dir / "logs/predictions.csv", preds);
    check.expect(generate(dir, "1.2").exit_code == 0, "generate 1.2 failed");

    const auto registry = load_registry(dir / "out/cards.registry.json");
    const auto lr = diff_cards(registry, "1.0", "1.1");
    check.expect(lr.config_changes.size() == 1 && lr.config_changes[0].path == "model.learning_rate",
                 "learning-rate change did not yield exactly one config change");
    check.expect(lr.asset_changes.empty(), "learning-rate change reported asset changes");
    check.expect(antisymmetric(lr, diff_cards(registry, "1.1", "1.0")), "learning-rate deltas not antisymmetric");

    const auto pr = diff_cards(registry, "1.1", "1.2");
    check.expect(!pr.metric_deltas.empty(), "prediction change produced no metric deltas");
    check.expect(antisymmetric(pr, diff_cards(registry, "1.2", "1.1")), "prediction deltas not antisymmetric");

    for (const char* v : {"1.0", "1.1", "1.2"}) check.expect(diff_cards(registry, v, v).empty(), std::string("diff(") + v + ") not empty");

    const auto out = cli("diff --registry " + quote(dir / "out/cards.registry.json") + " --old 1.0 --new 1.1");
    check.expect(out.out == "config  model.learning_rate: 0.001 -> 1e-05\n", "CLI diff output: " + out.out);
    return check.outcome("1 config change, " + std::to_string(pr.metric_deltas.size()) +
                         " antisymmetric deltas for a prediction change");
}

Outcome validation_completeness()
{
    Check check;
    const auto base = YAML::Load(text::read_file(fixtures_dir() / "faced/config.yaml"));
    const auto mutants = config_mutants();
    check.expect(mutants.size() >= 50, "only " + std::to_string(mutants.size()) + " mutants");
    for (const auto& m : mutants) {
        YAML::Node copy = YAML::Clone(base);
        m.apply(copy);
        const auto r = parse_config_string(emit(copy), fixtures_dir() / "faced");
        check.expect(names_path(r.report, m.path), "mutant '" + m.description + "' not reported at " + m.path);
    }
    return check.outcome(std::to_string(mutants.size()) + " mutants reported");
}

struct Criterion {
    const char* name;
    double limit_seconds; // 0 = no limit
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"metrics-oracle", 5, metrics_oracle},
        {"wilson", 5, wilson},
        {"bootstrap-coverage", 60, bootstrap_coverage},
        {"determinism", 0, determinism},
        {"card-fidelity", 0, card_fidelity},
        {"diff-correctness", 0, diff_correctness},
        {"validation-completeness", 0, validation_completeness},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.ok && c.limit_seconds > 0 && secs >= c.limit_seconds) {
            o.ok = false;
            o.detail = "took " + fmt(secs) + " s, limit " + fmt(c.limit_seconds, 0) + " s";
        }
        std::cout << (o.ok ? "PASS " : "FAIL ") << c.name << " (" << fmt(secs) << " s): " << o.detail << "\n";
        failed += !o.ok;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << "\n";
    return failed ? 1 : 0;
}
