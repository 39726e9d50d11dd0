#include "saga/annotation.hpp"

#include <json.hpp>

#include "saga/errors.hpp"

namespace saga {

SourceAnnotation parseSourceAnnotation(const std::string& jsonText) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(jsonText);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("annotation is not valid JSON: ") +
                          e.what());
    }
    if (!doc.is_object())
        throw FormatError("annotation must be a JSON object keyed by "
                          "\"<file>:<procedure>\"");

    SourceAnnotation out;
    for (const auto& [qualifier, labels] : doc.items()) {
        if (!labels.is_object())
            throw FormatError("annotation for '" + qualifier +
                              "' must be an object of label -> symbol list");
        LabeledSymbols entry;
        for (const auto& [label, symbols] : labels.items()) {
            if (!symbols.is_array())
                throw FormatError("label '" + label + "' of '" + qualifier +
                                  "' must be a list of strings");
            std::set<std::string> values;
            for (const auto& symbol : symbols) {
                if (!symbol.is_string())
                    throw FormatError("label '" + label + "' of '" +
                                      qualifier + "' contains a non-string");
                values.insert(symbol.get<std::string>());
            }
            entry[label] = std::move(values);
        }
        out[qualifier] = std::move(entry);
    }
    return out;
}

LabeledSymbols annotationFor(const SourceAnnotation& annotation,
                             const std::string& qualifier) {
    auto exact = annotation.find(qualifier);
    if (exact != annotation.end()) return exact->second;

    size_t colon = qualifier.rfind(':');
    std::string name =
        colon == std::string::npos ? qualifier : qualifier.substr(colon + 1);
    const LabeledSymbols* match = nullptr;
    int count = 0;
    for (const auto& [key, value] : annotation) {
        size_t keyColon = key.rfind(':');
        std::string keyName =
            keyColon == std::string::npos ? key : key.substr(keyColon + 1);
        if (keyName == name) {
            match = &value;
            ++count;
        }
    }
    if (count == 1) return *match;
    return {};
}

}  // namespace saga
