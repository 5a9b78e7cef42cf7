#include "modelcard/metrics_json.hpp"

#include "modelcard/error.hpp"

namespace modelcard {
namespace {

ordered_json interval_json(const ConfidenceInterval& ci, double estimate)
{
    ordered_json j;
    j["estimate"] = estimate;
    j["lower"] = ci.lower;
    j["upper"] = ci.upper;
    j["level"] = ci.level;
    j["method"] = std::string(to_string(ci.method));
    return j;
}

} // namespace

ordered_json metrics_document(const ConfusionMatrix& cm, const MetricSet& m, const CIReport* cis)
{
    ordered_json doc;
    doc["schema"] = kMetricsSchemaId;
    doc["n"] = cm.total();
    doc["labels"] = cm.labels().names();

    ordered_json matrix = ordered_json::array();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < cm.size(); ++j) row.push_back(cm.at(i, j));
        matrix.push_back(std::move(row));
    }
    doc["confusion_matrix"] = std::move(matrix);

    doc["accuracy"] = m.accuracy;
    doc["macro_precision"] = m.macro_precision;
    doc["macro_recall"] = m.macro_recall;
    doc["macro_f1"] = m.macro_f1;
    doc["micro_precision"] = m.micro_precision;
    doc["micro_recall"] = m.micro_recall;
    doc["micro_f1"] = m.micro_f1;

    ordered_json per_class = ordered_json::array();
    for (const auto& s : m.per_class) {
        ordered_json c;
        c["index"] = s.class_index;
        c["name"] = cm.labels().name(s.class_index);
        c["support"] = s.support();
        c["tp"] = s.tp;
        c["fp"] = s.fp;
        c["fn"] = s.fn;
        c["tn"] = s.tn;
        c["precision"] = s.precision;
        c["recall"] = s.recall;
        c["f1"] = s.f1;
        c["degenerate_precision"] = s.degenerate_precision;
        c["degenerate_recall"] = s.degenerate_recall;
        per_class.push_back(std::move(c));
    }
    doc["per_class"] = std::move(per_class);

    if (cis) {
        ordered_json ci;
        for (const auto& mi : cis->intervals) ci[mi.metric.id()] = interval_json(mi.ci, mi.estimate);
        ci["accuracy_wilson"] = interval_json(cis->accuracy_wilson, m.accuracy);
        ordered_json meta;
        meta["seed"] = cis->seed;
        meta["replicates"] = cis->replicates;
        meta["level"] = cis->level;
        ci["meta"] = std::move(meta);
        doc["ci"] = std::move(ci);
    }
    return doc;
}

std::map<std::string, double> metric_estimates(const nlohmann::json& doc)
{
    std::map<std::string, double> out;
    try {
        for (const char* key : {"accuracy", "macro_precision", "macro_recall", "macro_f1", "micro_precision",
                                "micro_recall", "micro_f1"})
            out[key] = doc.at(key).get<double>();
        for (const auto& c : doc.at("per_class")) {
            const std::string idx = std::to_string(c.at("index").get<std::size_t>());
            out["precision_" + idx] = c.at("precision").get<double>();
            out["recall_" + idx] = c.at("recall").get<double>();
            out["f1_" + idx] = c.at("f1").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Internal, std::string("malformed metrics document: ") + e.what());
    }
    return out;
}

} // namespace modelcard
