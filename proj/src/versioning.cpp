#include "modelcard/versioning.hpp"

#include "modelcard/error.hpp"
#include "modelcard/metrics_json.hpp"
#include "modelcard/text.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <memory>

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace modelcard {

VersionString VersionString::parse(std::string_view raw)
{
    VersionString v;
    v.raw_ = std::string(raw);
    const auto parts = text::split(raw, '.');
    if (raw.empty() || parts.size() > 3)
        throw Error(ErrorCode::InvalidVersion, "version must be MAJOR[.MINOR[.PATCH]], got '" + v.raw_ + "'");
    for (auto p : parts) {
        const bool digits = !p.empty() && std::all_of(p.begin(), p.end(), [](char c) { return c >= '0' && c <= '9'; });
        auto n = digits ? text::parse_uint(p) : std::nullopt;
        if (!n)
            throw Error(ErrorCode::InvalidVersion, "version must be MAJOR[.MINOR[.PATCH]], got '" + v.raw_ + "'");
        v.parts_.push_back(*n);
    }
    return v;
}

std::weak_ordering VersionString::operator<=>(const VersionString& other) const
{
    for (std::size_t i = 0; i < 3; ++i) {
        const std::uint64_t a = i < parts_.size() ? parts_[i] : 0;
        const std::uint64_t b = i < other.parts_.size() ? other.parts_[i] : 0;
        if (a != b) return a < b ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    return std::weak_ordering::equivalent;
}

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw Error(ErrorCode::Internal, "SHA-256 computation failed");
    constexpr char digits[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += digits[md[i] >> 4];
        hex += digits[md[i] & 0xF];
    }
    return hex;
}

json canonical_config(const CardConfig& input)
{
    const CardConfig c = apply_defaults(input);
    json j;
    auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
    j["title"] = opt(c.title);
    j["overview"] = c.overview;
    j["intended_use"] = opt(c.intended_use);
    j["dataset"] = {{"name", c.dataset.name},
                    {"num_classes", c.dataset.num_classes},
                    {"ground_truth", c.dataset.ground_truth},
                    {"split", c.dataset.split},
                    {"preprocessing", c.dataset.preprocessing}};
    j["model"] = {{"input_desc", c.model.input_desc},           {"output_desc", c.model.output_desc},
                  {"model_type", c.model.model_type},           {"learning_rate", c.model.learning_rate},
                  {"batch_size", c.model.batch_size},           {"parameter_count", c.model.parameter_count}};
    j["limitations"] = c.limitations;
    j["references"] = c.references;
    json images = json::array();
    for (const auto& img : c.assets.images) images.push_back({{"path", img.path}, {"caption", img.caption}});
    j["assets"] = {{"folder", opt(c.assets.folder)},
                   {"prediction_log", c.assets.prediction_log},
                   {"epoch_log", opt(c.assets.epoch_log)},
                   {"images", images}};
    j["uncertainty"] = {{"level", *c.uncertainty.level},
                        {"replicates", *c.uncertainty.replicates},
                        {"seed", *c.uncertainty.seed}};
    json extra = json::array();
    for (const auto& s : c.extra_sections) extra.push_back({{"name", s.name}, {"text", s.text}});
    j["extra_sections"] = extra;
    return j;
}

std::string manifest_hash(const ManifestInputs& in)
{
    std::string buf;
    auto frame = [&](std::string_view tag, std::string_view payload) {
        buf += tag;
        buf += ':';
        buf += std::to_string(payload.size());
        buf += ':';
        buf += payload;
        buf += '\n';
    };
    frame("config", in.canonical_config.dump());
    frame("metrics", in.metrics.dump());
    for (const auto& svg : in.chart_svgs) frame("chart", svg);
    for (const auto& [path, digest] : in.input_digests) {
        frame("asset", path);
        frame("digest", digest);
    }
    return sha256_hex(buf);
}

ordered_json to_json(const CardManifest& m)
{
    ordered_json j;
    j["version"] = m.version.raw();
    j["manifest_hash"] = m.manifest_hash;
    j["created_at"] = m.created_at;
    j["input_digests"] = m.input_digests;
    j["config"] = m.config;
    j["metrics"] = m.metrics;
    return j;
}

CardManifest manifest_from_json(const json& j)
{
    try {
        CardManifest m;
        m.version = VersionString::parse(j.at("version").get<std::string>());
        m.manifest_hash = j.at("manifest_hash").get<std::string>();
        m.created_at = j.at("created_at").get<std::string>();
        m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
        m.config = j.at("config");
        m.metrics = j.at("metrics");
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed registry entry: ") + e.what());
    }
}

namespace {

void sort_registry(std::vector<CardManifest>& entries)
{
    std::stable_sort(entries.begin(), entries.end(), [](const CardManifest& a, const CardManifest& b) {
        const auto c = a.version <=> b.version;
        if (c != 0) return c < 0;
        return a.version.raw() < b.version.raw();
    });
}

class RegistryLock {
public:
    explicit RegistryLock(const fs::path& registry)
        : path_(fs::path(registry).concat(".lock"))
    {
        std::error_code ec;
        if (registry.has_parent_path()) fs::create_directories(registry.parent_path(), ec);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            if (errno == EEXIST)
                throw Error(ErrorCode::IoError, "registry " + registry.string() +
                                                    " is locked by another writer (" + path_.string() +
                                                    "); retry later");
            throw Error(ErrorCode::IoError, "cannot lock registry " + registry.string() + ": " + std::strerror(errno));
        }
    }
    ~RegistryLock()
    {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
    RegistryLock(const RegistryLock&) = delete;
    RegistryLock& operator=(const RegistryLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

} // namespace

std::vector<CardManifest> load_registry(const fs::path& registry_path)
{
    std::error_code ec;
    if (!fs::exists(registry_path, ec)) return {};
    const std::string bytes = text::read_file(registry_path);
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, "registry " + registry_path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::IoError, "registry " + registry_path.string() + " must be a JSON array");
    std::vector<CardManifest> entries;
    for (const auto& item : doc) entries.push_back(manifest_from_json(item));
    sort_registry(entries);
    return entries;
}

void check_registrable(const std::vector<CardManifest>& registry, const CardManifest& manifest)
{
    for (const auto& e : registry)
        if (e.version.raw() == manifest.version.raw() && e.manifest_hash != manifest.manifest_hash)
            throw Error(ErrorCode::VersionConflict,
                        "version " + manifest.version.raw() + " is already registered with manifest " +
                            e.manifest_hash + "; this card hashes to " + manifest.manifest_hash +
                            ". Bump the version to record the change.");
}

RegisterOutcome register_card(const CardManifest& manifest, const fs::path& registry_path)
{
    RegistryLock lock(registry_path);
    auto entries = load_registry(registry_path);
    check_registrable(entries, manifest);
    for (const auto& e : entries)
        if (e.version.raw() == manifest.version.raw()) return RegisterOutcome::AlreadyPresent;

    entries.push_back(manifest);
    sort_registry(entries);
    ordered_json doc = ordered_json::array();
    for (const auto& e : entries) doc.push_back(to_json(e));
    text::write_file_atomic(registry_path, doc.dump(2) + "\n");
    return RegisterOutcome::Added;
}

std::string_view to_string(AssetChangeKind kind) noexcept
{
    switch (kind) {
    case AssetChangeKind::Added: return "added";
    case AssetChangeKind::Removed: return "removed";
    case AssetChangeKind::Modified: return "modified";
    }
    return "modified";
}

namespace {

std::string leaf_text(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return text::shortest(v.get<double>());
    return v.dump();
}

void flatten(const json& v, const std::string& path, std::map<std::string, std::string>& out)
{
    if (v.is_object()) {
        for (const auto& [k, child] : v.items()) flatten(child, path.empty() ? k : path + "." + k, out);
    } else if (v.is_array()) {
        if (v.empty()) out[path] = "[]";
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", out);
    } else {
        out[path] = leaf_text(v);
    }
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::vector<std::string> metric_order(std::size_t k)
{
    std::vector<std::string> ids = {"accuracy",        "macro_precision", "macro_recall", "macro_f1",
                                    "micro_precision", "micro_recall",    "micro_f1"};
    for (std::size_t c = 0; c < k; ++c)
        for (const char* m : {"precision_", "recall_", "f1_"}) ids.push_back(m + std::to_string(c));
    return ids;
}

} // namespace

CardDiff diff_manifests(const CardManifest& a, const CardManifest& b)
{
    CardDiff d;

    std::map<std::string, std::string> fa, fb;
    flatten(a.config, "", fa);
    flatten(b.config, "", fb);
    std::vector<std::string> keys;
    for (const auto& [k, _] : fa) keys.push_back(k);
    for (const auto& [k, _] : fb)
        if (!fa.contains(k)) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) {
        const auto ia = fa.find(k);
        const auto ib = fb.find(k);
        const std::string va = ia == fa.end() ? "<absent>" : ia->second;
        const std::string vb = ib == fb.end() ? "<absent>" : ib->second;
        if (va != vb) d.config_changes.push_back({k, va, vb});
    }

    const auto ea = metric_estimates(a.metrics);
    const auto eb = metric_estimates(b.metrics);
    const std::size_t k = std::max(a.metrics.at("per_class").size(), b.metrics.at("per_class").size());
    for (const auto& id : metric_order(k)) {
        const auto ia = ea.find(id);
        const auto ib = eb.find(id);
        if (ia == ea.end() || ib == eb.end()) continue;
        const double ra = round4(ia->second), rb = round4(ib->second);
        if (ra != rb) d.metric_deltas.push_back({id, ia->second, ib->second, rb - ra});
    }

    for (const auto& [path, digest] : a.input_digests) {
        const auto it = b.input_digests.find(path);
        if (it == b.input_digests.end())
            d.asset_changes.push_back({path, AssetChangeKind::Removed});
        else if (it->second != digest)
            d.asset_changes.push_back({path, AssetChangeKind::Modified});
    }
    for (const auto& [path, _] : b.input_digests)
        if (!a.input_digests.contains(path)) d.asset_changes.push_back({path, AssetChangeKind::Added});
    std::sort(d.asset_changes.begin(), d.asset_changes.end(),
              [](const AssetChange& x, const AssetChange& y) { return x.path < y.path; });
    return d;
}

CardDiff diff_cards(const std::vector<CardManifest>& registry, std::string_view old_version,
                    std::string_view new_version)
{
    auto find = [&](std::string_view v) -> const CardManifest& {
        for (const auto& e : registry)
            if (e.version.raw() == v) return e;
        throw Error(ErrorCode::UnknownVersion, "version " + std::string(v) + " is not in the registry");
    };
    const CardManifest& a = find(old_version);
    const CardManifest& b = find(new_version);
    return diff_manifests(a, b);
}

std::string format_diff(const CardDiff& d)
{
    if (d.empty()) return "no changes\n";
    std::string out;
    for (const auto& c : d.config_changes)
        out += "config  " + c.path + ": " + c.old_value + " -> " + c.new_value + "\n";
    for (const auto& m : d.metric_deltas) {
        std::string delta = text::fixed(m.delta, 4);
        if (!delta.starts_with('-')) delta = "+" + delta;
        out += "metric  " + m.metric + ": " + text::fixed(m.old_value, 4) + " -> " + text::fixed(m.new_value, 4) +
               " (" + delta + ")\n";
    }
    for (const auto& a : d.asset_changes) out += "asset   " + a.path + ": " + std::string(to_string(a.kind)) + "\n";
    return out;
}

} // namespace modelcard
