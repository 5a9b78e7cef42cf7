#include "modelcard/cardspec.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"
#include "yaml_strict.hpp"

#include <algorithm>
#include <set>
#include <system_error>

#include <yaml-cpp/yaml.h>

namespace fs = std::filesystem;

namespace modelcard {

fs::path CardConfig::resolve(const std::string& path) const
{
    const fs::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

fs::path CardConfig::asset_folder() const
{
    if (assets.folder) return resolve(*assets.folder);
    return resolve(assets.prediction_log).parent_path();
}

ClassLabelMap CardConfig::label_map() const { return ClassLabelMap(dataset.ground_truth); }

CardConfig apply_defaults(CardConfig config)
{
    auto& u = config.uncertainty;
    if (!u.level) u.level = kDefaultLevel;
    if (!u.replicates) u.replicates = kDefaultReplicates;
    if (!u.seed) u.seed = kDefaultSeed;
    return config;
}

namespace {

std::string join(std::string_view parent, std::string_view key)
{
    return parent.empty() ? std::string(key) : std::string(parent) + "." + std::string(key);
}

std::string indexed(std::string_view parent, std::size_t i)
{
    return std::string(parent) + "[" + std::to_string(i) + "]";
}

// Walks the YAML tree once, filling a CardConfig and recording every
// violation with its dotted path.
class Validator {
public:
    Validator(const fs::path& base_dir) { config_.base_dir = base_dir; }

    ParseResult run(const YAML::Node& root)
    {
        if (!root.IsMap()) {
            error("<root>", "card specification must be a YAML mapping");
            return finish();
        }
        check_keys(root, "",
                   {"title", "overview", "intended_use", "dataset", "model", "limitations", "references", "assets",
                    "uncertainty", "extra_sections"});

        config_.title = optional_text(root, "", "title");
        config_.overview = required_text(root, "", "overview").value_or("");
        config_.intended_use = optional_text(root, "", "intended_use");
        dataset(root);
        model(root);
        config_.limitations = text_list(root, "", "limitations", true);
        config_.references = text_list(root, "", "references", false);
        assets(root);
        uncertainty(root);
        extra_sections(root);
        return finish();
    }

private:
    void error(std::string path, std::string message) { report_.errors.push_back({std::move(path), std::move(message)}); }
    void warning(std::string path, std::string message)
    {
        report_.warnings.push_back({std::move(path), std::move(message)});
    }

    ParseResult finish()
    {
        ParseResult result;
        result.report = std::move(report_);
        if (result.report.accepted()) result.config = apply_defaults(std::move(config_));
        return result;
    }

    void check_keys(const YAML::Node& map, std::string_view parent, std::initializer_list<std::string_view> known)
    {
        for (const auto& kv : map) {
            const std::string key = kv.first.IsScalar() ? kv.first.Scalar() : std::string("<complex key>");
            if (std::find(known.begin(), known.end(), key) == known.end())
                warning(join(parent, key), "unknown key is ignored");
        }
    }

    // Returns the child or an undefined node; records "missing" via the caller.
    static YAML::Node child(const YAML::Node& map, std::string_view key)
    {
        return map[std::string(key)];
    }

    static bool present(const YAML::Node& n) { return n.IsDefined() && !n.IsNull(); }

    std::optional<std::string> scalar_text(const YAML::Node& n, const std::string& path)
    {
        if (!n.IsScalar()) {
            error(path, "must be text");
            return std::nullopt;
        }
        return n.Scalar();
    }

    std::optional<std::string> required_text(const YAML::Node& map, std::string_view parent, std::string_view key)
    {
        const std::string path = join(parent, key);
        const YAML::Node n = child(map, key);
        if (!present(n)) {
            error(path, "required field is missing");
            return std::nullopt;
        }
        auto s = scalar_text(n, path);
        if (s && text::trim(*s).empty()) {
            error(path, "must not be empty");
            return std::nullopt;
        }
        return s;
    }

    std::optional<std::string> optional_text(const YAML::Node& map, std::string_view parent, std::string_view key)
    {
        const std::string path = join(parent, key);
        const YAML::Node n = child(map, key);
        if (!present(n)) {
            warning(path, "not provided");
            return std::nullopt;
        }
        auto s = scalar_text(n, path);
        if (s && text::trim(*s).empty()) {
            warning(path, "is empty; treated as not provided");
            return std::nullopt;
        }
        return s;
    }

    std::vector<std::string> text_list(const YAML::Node& map, std::string_view parent, std::string_view key,
                                       bool required)
    {
        const std::string path = join(parent, key);
        const YAML::Node n = child(map, key);
        std::vector<std::string> out;
        if (!present(n)) {
            if (required)
                error(path, "required list is missing");
            else
                warning(path, "not provided");
            return out;
        }
        if (!n.IsSequence()) {
            error(path, "must be a list of text items");
            return out;
        }
        if (n.size() == 0) warning(path, "list is empty");
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string item_path = indexed(path, i);
            if (!n[i].IsScalar()) {
                error(item_path, "must be text");
                continue;
            }
            if (text::trim(n[i].Scalar()).empty()) {
                error(item_path, "must not be empty");
                continue;
            }
            out.push_back(n[i].Scalar());
        }
        return out;
    }

    std::optional<long long> integer(const YAML::Node& map, std::string_view parent, std::string_view key,
                                     long long min, bool required)
    {
        const std::string path = join(parent, key);
        const YAML::Node n = child(map, key);
        if (!present(n)) {
            if (required)
                error(path, "required field is missing");
            else
                warning(path, "not provided; default applied");
            return std::nullopt;
        }
        auto v = n.IsScalar() ? text::parse_int(n.Scalar()) : std::nullopt;
        if (!v) {
            error(path, "must be an integer");
            return std::nullopt;
        }
        if (*v < min) {
            error(path, "must be at least " + std::to_string(min) + ", got " + std::to_string(*v));
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> real(const YAML::Node& map, std::string_view parent, std::string_view key, bool required)
    {
        const std::string path = join(parent, key);
        const YAML::Node n = child(map, key);
        if (!present(n)) {
            if (required)
                error(path, "required field is missing");
            else
                warning(path, "not provided; default applied");
            return std::nullopt;
        }
        auto v = n.IsScalar() ? text::parse_double(n.Scalar()) : std::nullopt;
        if (!v) error(path, "must be a number");
        return v;
    }

    const YAML::Node section(const YAML::Node& root, std::string_view key, bool required)
    {
        const YAML::Node n = child(root, key);
        if (!present(n)) {
            if (required)
                error(std::string(key), "required section is missing");
            else
                warning(std::string(key), "not provided");
            return YAML::Node(YAML::NodeType::Undefined);
        }
        if (!n.IsMap()) {
            error(std::string(key), "must be a mapping");
            return YAML::Node(YAML::NodeType::Undefined);
        }
        return n;
    }

    void dataset(const YAML::Node& root)
    {
        const YAML::Node d = section(root, "dataset", true);
        if (!d.IsDefined()) return;
        check_keys(d, "dataset", {"name", "num_classes", "ground_truth", "split", "preprocessing"});
        auto& ds = config_.dataset;
        ds.name = required_text(d, "dataset", "name").value_or("");
        const auto num_classes = integer(d, "dataset", "num_classes", 2, true);
        ds.num_classes = num_classes.value_or(0);
        ds.split = required_text(d, "dataset", "split").value_or("");
        ds.preprocessing = text_list(d, "dataset", "preprocessing", true);

        const std::string gt_path = "dataset.ground_truth";
        const YAML::Node gt = child(d, "ground_truth");
        if (!present(gt)) {
            error(gt_path, "required list is missing");
            return;
        }
        if (!gt.IsSequence()) {
            error(gt_path, "must be a list of label names or `index: name` entries");
            return;
        }
        try {
            YAML::Emitter e;
            e << gt;
            ds.ground_truth = parse_label_map_yaml(e.c_str()).names();
        } catch (const Error& e) {
            error(gt_path, e.what());
            return;
        }
        if (num_classes && static_cast<long long>(ds.ground_truth.size()) != *num_classes)
            error(gt_path, "has " + std::to_string(ds.ground_truth.size()) + " labels but dataset.num_classes is " +
                               std::to_string(*num_classes));
    }

    void model(const YAML::Node& root)
    {
        const YAML::Node m = section(root, "model", true);
        if (!m.IsDefined()) return;
        check_keys(m, "model",
                   {"input_desc", "output_desc", "model_type", "learning_rate", "batch_size", "parameter_count"});
        auto& md = config_.model;
        md.input_desc = required_text(m, "model", "input_desc").value_or("");
        md.output_desc = required_text(m, "model", "output_desc").value_or("");
        md.model_type = required_text(m, "model", "model_type").value_or("");
        if (auto lr = real(m, "model", "learning_rate", true)) {
            if (*lr <= 0.0)
                error("model.learning_rate", "must be positive");
            else
                md.learning_rate = *lr;
        }
        md.batch_size = integer(m, "model", "batch_size", 1, true).value_or(0);
        md.parameter_count = required_text(m, "model", "parameter_count").value_or("");
    }

    void require_file(const std::string& path, const std::string& value)
    {
        std::error_code ec;
        const fs::path resolved = config_.resolve(value);
        if (!fs::is_regular_file(resolved, ec)) error(path, "file not found: " + resolved.string());
    }

    void assets(const YAML::Node& root)
    {
        const YAML::Node a = section(root, "assets", true);
        if (!a.IsDefined()) return;
        check_keys(a, "assets", {"folder", "prediction_log", "epoch_log", "images"});
        auto& as = config_.assets;

        if (auto folder = optional_text(a, "assets", "folder")) {
            std::error_code ec;
            const fs::path resolved = config_.resolve(*folder);
            if (!fs::is_directory(resolved, ec))
                error("assets.folder", "directory not found: " + resolved.string());
            as.folder = folder;
        }
        if (auto log = required_text(a, "assets", "prediction_log")) {
            require_file("assets.prediction_log", *log);
            as.prediction_log = *log;
        }
        if (auto log = optional_text(a, "assets", "epoch_log")) {
            require_file("assets.epoch_log", *log);
            as.epoch_log = log;
        }

        const YAML::Node images = child(a, "images");
        if (!present(images)) {
            warning("assets.images", "not provided");
            return;
        }
        if (!images.IsSequence()) {
            error("assets.images", "must be a list of {path, caption} entries");
            return;
        }
        for (std::size_t i = 0; i < images.size(); ++i) {
            const std::string p = indexed("assets.images", i);
            const YAML::Node img = images[i];
            if (!img.IsMap()) {
                error(p, "must be a mapping with path and caption");
                continue;
            }
            check_keys(img, p, {"path", "caption"});
            ImageAsset asset;
            if (auto path = required_text(img, p, "path")) {
                std::string ext = fs::path(*path).extension().string();
                std::transform(ext.begin(), ext.end(), ext.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                if (ext != ".png" && ext != ".svg")
                    error(p + ".path", "only .png and .svg images can be embedded");
                else
                    require_file(p + ".path", *path);
                asset.path = *path;
            }
            asset.caption = required_text(img, p, "caption").value_or("");
            as.images.push_back(std::move(asset));
        }
    }

    void uncertainty(const YAML::Node& root)
    {
        const YAML::Node u = section(root, "uncertainty", false);
        if (!u.IsDefined()) return;
        check_keys(u, "uncertainty", {"level", "replicates", "seed"});
        auto& us = config_.uncertainty;
        if (auto level = real(u, "uncertainty", "level", false)) {
            if (*level <= 0.0 || *level >= 1.0)
                error("uncertainty.level", "must lie strictly between 0 and 1");
            else
                us.level = level;
        }
        us.replicates = integer(u, "uncertainty", "replicates", 100, false);

        const YAML::Node seed = child(u, "seed");
        if (!present(seed)) {
            warning("uncertainty.seed", "not provided; default applied");
        } else if (auto v = seed.IsScalar() ? text::parse_uint(seed.Scalar()) : std::nullopt) {
            us.seed = v;
        } else {
            error("uncertainty.seed", "must be a non-negative 64-bit integer");
        }
    }

    void extra_sections(const YAML::Node& root)
    {
        const YAML::Node x = child(root, "extra_sections");
        if (!present(x)) {
            warning("extra_sections", "not provided");
            return;
        }
        if (!x.IsSequence()) {
            error("extra_sections", "must be a list of {name, text} entries");
            return;
        }
        static constexpr std::string_view canonical[] = {"Overview",    "Dataset",     "Model Details", "Performance",
                                                         "Limitations", "Uncertainty", "References"};
        std::set<std::string> names;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::string p = indexed("extra_sections", i);
            if (!x[i].IsMap()) {
                error(p, "must be a mapping with name and text");
                continue;
            }
            check_keys(x[i], p, {"name", "text"});
            ExtraSection s;
            s.name = required_text(x[i], p, "name").value_or("");
            s.text = required_text(x[i], p, "text").value_or("");
            if (!s.name.empty()) {
                if (std::find(std::begin(canonical), std::end(canonical), s.name) != std::end(canonical))
                    error(p + ".name", "'" + s.name + "' is a built-in section");
                else if (!names.insert(s.name).second)
                    error(p + ".name", "duplicate section name '" + s.name + "'");
            }
            config_.extra_sections.push_back(std::move(s));
        }
    }

    CardConfig config_;
    ValidationReport report_;
};

} // namespace

ParseResult parse_config_string(std::string_view yaml, const fs::path& base_dir, std::string_view source)
{
    const YAML::Node root = detail::load_yaml_strict(yaml, source);
    return Validator(base_dir).run(root);
}

ParseResult parse_config(const fs::path& path)
{
    const std::string yaml = text::read_file(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse_config_string(yaml, base, path.string());
}

std::string to_yaml(const CardConfig& c)
{
    YAML::Emitter out;
    auto str = [&](const std::string& s) -> YAML::Emitter& { return out << YAML::DoubleQuoted << s; };
    auto list = [&](const char* key, const std::vector<std::string>& items) {
        out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
        for (const auto& s : items) str(s);
        out << YAML::EndSeq;
    };

    out << YAML::BeginMap;
    if (c.title) { out << YAML::Key << "title" << YAML::Value; str(*c.title); }
    out << YAML::Key << "overview" << YAML::Value;
    str(c.overview);
    if (c.intended_use) { out << YAML::Key << "intended_use" << YAML::Value; str(*c.intended_use); }

    out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value; str(c.dataset.name);
    out << YAML::Key << "num_classes" << YAML::Value << c.dataset.num_classes;
    list("ground_truth", c.dataset.ground_truth);
    out << YAML::Key << "split" << YAML::Value; str(c.dataset.split);
    list("preprocessing", c.dataset.preprocessing);
    out << YAML::EndMap;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "input_desc" << YAML::Value; str(c.model.input_desc);
    out << YAML::Key << "output_desc" << YAML::Value; str(c.model.output_desc);
    out << YAML::Key << "model_type" << YAML::Value; str(c.model.model_type);
    out << YAML::Key << "learning_rate" << YAML::Value << text::shortest(c.model.learning_rate);
    out << YAML::Key << "batch_size" << YAML::Value << c.model.batch_size;
    out << YAML::Key << "parameter_count" << YAML::Value; str(c.model.parameter_count);
    out << YAML::EndMap;

    list("limitations", c.limitations);
    list("references", c.references);

    out << YAML::Key << "assets" << YAML::Value << YAML::BeginMap;
    if (c.assets.folder) { out << YAML::Key << "folder" << YAML::Value; str(*c.assets.folder); }
    out << YAML::Key << "prediction_log" << YAML::Value; str(c.assets.prediction_log);
    if (c.assets.epoch_log) { out << YAML::Key << "epoch_log" << YAML::Value; str(*c.assets.epoch_log); }
    out << YAML::Key << "images" << YAML::Value << YAML::BeginSeq;
    for (const auto& img : c.assets.images) {
        out << YAML::BeginMap;
        out << YAML::Key << "path" << YAML::Value; str(img.path);
        out << YAML::Key << "caption" << YAML::Value; str(img.caption);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    const CardConfig d = apply_defaults(c);
    out << YAML::Key << "uncertainty" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "level" << YAML::Value << text::shortest(*d.uncertainty.level);
    out << YAML::Key << "replicates" << YAML::Value << *d.uncertainty.replicates;
    out << YAML::Key << "seed" << YAML::Value << *d.uncertainty.seed;
    out << YAML::EndMap;

    out << YAML::Key << "extra_sections" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.extra_sections) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value; str(s.name);
        out << YAML::Key << "text" << YAML::Value; str(s.text);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace modelcard
