#include "yaml_strict.hpp"

#include "modelcard/error.hpp"

#include <sstream>

#include <yaml-cpp/eventhandler.h>

namespace modelcard::detail {
namespace {

struct AnchorError {
    YAML::Mark mark;
    bool alias;
};

class AnchorRejector final : public YAML::EventHandler {
public:
    void OnDocumentStart(const YAML::Mark&) override {}
    void OnDocumentEnd() override {}
    void OnNull(const YAML::Mark& mark, YAML::anchor_t anchor) override { check(mark, anchor); }
    void OnAlias(const YAML::Mark& mark, YAML::anchor_t) override { throw AnchorError{mark, true}; }
    void OnScalar(const YAML::Mark& mark, const std::string&, YAML::anchor_t anchor,
                  const std::string&) override
    {
        check(mark, anchor);
    }
    void OnSequenceStart(const YAML::Mark& mark, const std::string&, YAML::anchor_t anchor,
                         YAML::EmitterStyle::value) override
    {
        check(mark, anchor);
    }
    void OnSequenceEnd() override {}
    void OnMapStart(const YAML::Mark& mark, const std::string&, YAML::anchor_t anchor,
                    YAML::EmitterStyle::value) override
    {
        check(mark, anchor);
    }
    void OnMapEnd() override {}
    void OnAnchor(const YAML::Mark& mark, const std::string&) override { throw AnchorError{mark, false}; }

private:
    static void check(const YAML::Mark& mark, YAML::anchor_t anchor)
    {
        if (anchor != YAML::NullAnchor) throw AnchorError{mark, false};
    }
};

} // namespace

std::string describe_mark(const YAML::Mark& mark)
{
    return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1);
}

YAML::Node load_yaml_strict(std::string_view text, std::string_view source)
{
    const std::string doc(text);
    try {
        std::istringstream events(doc);
        YAML::Parser parser(events);
        AnchorRejector rejector;
        int documents = 0;
        while (parser.HandleNextDocument(rejector)) {
            if (++documents > 1)
                throw Error(ErrorCode::YamlSyntaxError,
                            std::string(source) + ": multiple YAML documents are not supported");
        }
        return YAML::Load(doc);
    } catch (const AnchorError& e) {
        throw Error(ErrorCode::YamlSyntaxError,
                    std::string(source) + ": " + describe_mark(e.mark) + ": YAML " +
                        (e.alias ? "aliases" : "anchors") + " are not allowed");
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::YamlSyntaxError,
                    std::string(source) + ": " + describe_mark(e.mark) + ": " + e.msg);
    }
}

} // namespace modelcard::detail
