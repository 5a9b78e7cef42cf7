#include "modelcard/ingest.hpp"

#include "modelcard/error.hpp"
#include "modelcard/text.hpp"
#include "yaml_strict.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <system_error>

namespace fs = std::filesystem;

namespace modelcard {

ClassLabelMap::ClassLabelMap(std::vector<std::string> names) : names_(std::move(names))
{
    if (names_.size() < 2)
        throw Error(ErrorCode::InvalidLabelMap, "label map needs at least 2 classes");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (text::trim(names_[i]).empty())
            throw Error(ErrorCode::InvalidLabelMap, "label " + std::to_string(i) + " has an empty name");
        if (!seen.insert(names_[i]).second)
            throw Error(ErrorCode::InvalidLabelMap, "duplicate label name '" + names_[i] + "'");
    }
}

ClassLabelMap ClassLabelMap::from_pairs(std::vector<std::pair<long long, std::string>> pairs)
{
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> names;
    names.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].first != static_cast<long long>(i))
            throw Error(ErrorCode::InvalidLabelMap,
                        "label indices must be 0..K-1 without gaps or duplicates (found " +
                            std::to_string(pairs[i].first) + " at position " + std::to_string(i) + ")");
        names.push_back(std::move(pairs[i].second));
    }
    return ClassLabelMap(std::move(names));
}

ClassLabelMap parse_label_map_yaml(std::string_view yaml)
{
    const YAML::Node root = detail::load_yaml_strict(yaml, "label map");
    if (!root.IsSequence())
        throw Error(ErrorCode::InvalidLabelMap, "label map must be a YAML sequence");

    std::vector<std::pair<long long, std::string>> pairs;
    long long position = 0;
    for (const auto& item : root) {
        if (item.IsScalar()) {
            pairs.emplace_back(position, item.Scalar());
        } else if (item.IsMap() && item.size() == 1) {
            const auto entry = *item.begin();
            auto index = text::parse_int(entry.first.Scalar());
            if (!index || !entry.second.IsScalar())
                throw Error(ErrorCode::InvalidLabelMap,
                            "label map entry at " + detail::describe_mark(item.Mark()) +
                                " must be `index: name`");
            pairs.emplace_back(*index, entry.second.Scalar());
        } else {
            throw Error(ErrorCode::InvalidLabelMap,
                        "label map entry at " + detail::describe_mark(item.Mark()) +
                            " must be a name or `index: name`");
        }
        ++position;
    }
    return ClassLabelMap::from_pairs(std::move(pairs));
}

ClassLabelMap load_label_map(const fs::path& path)
{
    return parse_label_map_yaml(text::read_file(path));
}

std::size_t argmax_lowest(const std::vector<double>& scores)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

namespace {

constexpr std::string_view kProbabilityDirective = "# scores: probability";
constexpr std::string_view kEpochHeader = "epoch,train_loss,val_loss,train_acc,val_acc";

// Splits into lines, dropping a UTF-8 BOM, CR of CRLF endings, and the empty
// tail produced by a final newline.
std::vector<std::string_view> csv_lines(std::string_view csv)
{
    if (csv.starts_with("\xEF\xBB\xBF")) csv.remove_prefix(3);
    auto lines = text::split(csv, '\n');
    for (auto& line : lines)
        if (line.ends_with('\r')) line.remove_suffix(1);
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string prediction_header(std::size_t k, bool with_scores)
{
    std::string h = "true_label,predicted_label";
    if (with_scores)
        for (std::size_t i = 0; i < k; ++i) h += ",score_" + std::to_string(i);
    return h;
}

std::string where(std::string_view source, std::size_t row)
{
    return std::string(source) + ": row " + std::to_string(row) + ": ";
}

std::size_t parse_label(std::string_view field, std::size_t k, std::string_view source,
                        std::size_t row, std::string_view column)
{
    auto v = text::parse_int(field);
    if (!v)
        throw Error(ErrorCode::MalformedRow, where(source, row) + std::string(column) +
                                                 " '" + std::string(field) + "' is not an integer");
    if (*v < 0 || static_cast<std::size_t>(*v) >= k)
        throw Error(ErrorCode::UnknownLabel,
                    where(source, row) + "unknown label " + std::to_string(*v) + " in " +
                        std::string(column) + " (expected 0.." + std::to_string(k - 1) + ")");
    return static_cast<std::size_t>(*v);
}

} // namespace

PredictionLog parse_prediction_csv(std::string_view csv, const ClassLabelMap& labels,
                                   std::string source_path)
{
    const std::size_t k = labels.size();
    if (k < 2) throw Error(ErrorCode::InvalidLabelMap, "label map needs at least 2 classes");
    const std::string& src = source_path;

    PredictionLog log;
    log.label_map = std::make_shared<const ClassLabelMap>(labels);
    log.source_path = source_path;

    auto lines = csv_lines(csv);
    std::size_t cursor = 0;
    while (cursor < lines.size() && lines[cursor].starts_with('#')) {
        if (text::trim(lines[cursor]) == kProbabilityDirective) log.scores_are_probabilities = true;
        ++cursor;
    }
    if (cursor == lines.size())
        throw Error(ErrorCode::MalformedHeader, src + ": missing header row");

    const std::string_view header = lines[cursor++];
    bool with_scores = false;
    if (header == prediction_header(k, false)) {
        with_scores = false;
    } else if (header == prediction_header(k, true)) {
        with_scores = true;
    } else {
        throw Error(ErrorCode::MalformedHeader,
                    src + ": header must be exactly '" + prediction_header(k, false) + "' or '" +
                        prediction_header(k, true) + "', got '" + std::string(header) + "'");
    }
    const std::size_t columns = with_scores ? 2 + k : 2;

    for (std::size_t row = 1; cursor < lines.size(); ++cursor, ++row) {
        const auto fields = text::split(lines[cursor], ',');
        if (fields.size() != columns)
            throw Error(ErrorCode::MalformedRow, where(src, row) + "expected " + std::to_string(columns) +
                                                     " fields, got " + std::to_string(fields.size()));
        PredictionRecord rec;
        rec.true_label = parse_label(fields[0], k, src, row, "true_label");
        rec.predicted_label = parse_label(fields[1], k, src, row, "predicted_label");
        if (with_scores) {
            rec.scores.reserve(k);
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                auto v = text::parse_double(fields[2 + c]);
                if (!v)
                    throw Error(ErrorCode::MalformedRow, where(src, row) + "score_" + std::to_string(c) +
                                                             " '" + std::string(fields[2 + c]) +
                                                             "' is not a finite number");
                if (log.scores_are_probabilities && (*v < 0.0 || *v > 1.0))
                    throw Error(ErrorCode::ScoreOutOfRange, where(src, row) + "score_" + std::to_string(c) +
                                                                " is not a probability");
                sum += *v;
                rec.scores.push_back(*v);
            }
            if (log.scores_are_probabilities && std::abs(sum - 1.0) > 1e-6)
                throw Error(ErrorCode::ScoreOutOfRange,
                            where(src, row) + "probabilities sum to " + text::shortest(sum));
            const auto top = argmax_lowest(rec.scores);
            if (top != rec.predicted_label)
                throw Error(ErrorCode::ArgmaxMismatch,
                            where(src, row) + "predicted_label " + std::to_string(rec.predicted_label) +
                                " but argmax of scores is " + std::to_string(top));
        }
        log.records.push_back(std::move(rec));
    }
    if (log.records.empty()) throw Error(ErrorCode::EmptyLog, src + ": prediction log has no data rows");
    return log;
}

PredictionLog parse_prediction_log(const fs::path& path, const ClassLabelMap& labels)
{
    return parse_prediction_csv(text::read_file(path), labels, path.string());
}

std::string serialize_prediction_log(const PredictionLog& log)
{
    std::string out;
    if (log.scores_are_probabilities) out += std::string(kProbabilityDirective) + "\n";
    out += prediction_header(log.num_classes(), log.has_scores()) + "\n";
    for (const auto& r : log.records) {
        out += std::to_string(r.true_label) + "," + std::to_string(r.predicted_label);
        for (double s : r.scores) out += "," + text::shortest(s);
        out += "\n";
    }
    return out;
}

std::vector<EpochRecord> parse_epoch_csv(std::string_view csv, std::string_view source)
{
    auto lines = csv_lines(csv);
    if (lines.empty() || lines.front() != kEpochHeader)
        throw Error(ErrorCode::MalformedHeader,
                    std::string(source) + ": header must be exactly '" + std::string(kEpochHeader) + "'");

    std::vector<EpochRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i;
        const auto fields = text::split(lines[i], ',');
        if (fields.size() != 5)
            throw Error(ErrorCode::MalformedRow, where(source, row) + "expected 5 fields, got " +
                                                     std::to_string(fields.size()));
        EpochRecord rec;
        auto epoch = text::parse_int(fields[0]);
        if (!epoch)
            throw Error(ErrorCode::MalformedRow, where(source, row) + "epoch is not an integer");
        if (*epoch < 1)
            throw Error(ErrorCode::ValueOutOfRange, where(source, row) + "epoch must be positive");
        rec.epoch = *epoch;

        constexpr std::string_view names[] = {"train_loss", "val_loss", "train_acc", "val_acc"};
        double values[4];
        for (int c = 0; c < 4; ++c) {
            auto v = text::parse_double(fields[1 + c]);
            if (!v)
                throw Error(ErrorCode::MalformedRow,
                            where(source, row) + std::string(names[c]) + " is not a finite number");
            values[c] = *v;
        }
        rec.train_loss = values[0];
        rec.val_loss = values[1];
        rec.train_acc = values[2];
        rec.val_acc = values[3];
        if (rec.train_loss < 0.0 || rec.val_loss < 0.0)
            throw Error(ErrorCode::ValueOutOfRange, where(source, row) + "loss must be non-negative");
        for (double acc : {rec.train_acc, rec.val_acc})
            if (acc < 0.0 || acc > 1.0)
                throw Error(ErrorCode::ValueOutOfRange,
                            where(source, row) + "accuracy " + text::shortest(acc) + " outside [0,1]");
        if (!records.empty() && rec.epoch <= records.back().epoch)
            throw Error(ErrorCode::NonMonotonicEpochs,
                        where(source, row) + "epoch " + std::to_string(rec.epoch) +
                            " does not increase on " + std::to_string(records.back().epoch));
        records.push_back(rec);
    }
    return records;
}

std::vector<EpochRecord> parse_epoch_log(const fs::path& path)
{
    return parse_epoch_csv(text::read_file(path), path.string());
}

AssetFolder scan_assets(const fs::path& root)
{
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw Error(ErrorCode::MissingFolder, "asset folder not found: " + root.string());

    AssetFolder folder;
    folder.root = root;
    try {
        for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
            if (!it->is_regular_file()) continue;
            const fs::path rel = fs::relative(it->path(), root);
            std::string ext = it->path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (ext == ".svg" || ext == ".png")
                folder.images.push_back(rel);
            else if (ext == ".csv")
                folder.logs.push_back(rel);
            else
                folder.warnings.push_back("ignoring " + rel.generic_string() + " (unsupported extension)");
        }
    } catch (const fs::filesystem_error& e) {
        if (e.code() == std::errc::permission_denied)
            throw Error(ErrorCode::PermissionDenied, "permission denied: " + e.path1().string());
        throw Error(ErrorCode::IoError, std::string("cannot scan asset folder: ") + e.what());
    }
    auto by_name = [](const fs::path& a, const fs::path& b) {
        return a.generic_string() < b.generic_string();
    };
    std::sort(folder.images.begin(), folder.images.end(), by_name);
    std::sort(folder.logs.begin(), folder.logs.end(), by_name);
    std::sort(folder.warnings.begin(), folder.warnings.end());
    return folder;
}

} // namespace modelcard
