#include "saga/report.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include <json.hpp>

namespace saga {

namespace {

std::uint64_t fnv1a(const std::string& text, std::uint64_t hash) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::uint64_t reportId(const ReportInputs& inputs) {
    std::uint64_t hash = 14695981039346656037ULL;
    hash = fnv1a(inputs.procedure, hash);
    hash = fnv1a("\n", hash);
    hash = fnv1a(inputs.sourceAnnotation, hash);
    hash = fnv1a("\n", hash);
    hash = fnv1a(inputs.definition, hash);
    return hash;
}

std::vector<Alarm> sortedAlarms(std::vector<Alarm> alarms) {
    std::stable_sort(alarms.begin(), alarms.end(),
                     [](const Alarm& a, const Alarm& b) {
                         if (a.line != b.line) return a.line < b.line;
                         return a.step < b.step;
                     });
    return alarms;
}

}  // namespace

std::string renderReport(const ReportInputs& inputs,
                         const std::vector<Alarm>& alarms) {
    std::ostringstream out;
    out << "<StaticAspectAnalysis (id " << reportId(inputs) << "):\n";
    out << "   - procedure = " << inputs.procedure << "\n";
    out << "   - source_annotation = " << inputs.sourceAnnotation << "\n";
    out << "   - static_aspect_definition = " << inputs.definition << "\n";
    out << "   - alarms:\n";
    std::vector<Alarm> sorted = sortedAlarms(alarms);
    int lastLine = -1;
    for (const Alarm& alarm : sorted) {
        if (alarm.line != lastLine) {
            out << "      - line " << alarm.line << "\n";
            lastLine = alarm.line;
        }
        out << "         " << alarm.aspect << " = " << alarm.value.repr()
            << " at step " << alarm.step << "\n";
    }
    out << ">\n";
    return out.str();
}

std::string renderReportJson(const ReportInputs& inputs,
                             const std::vector<Alarm>& alarms) {
    nlohmann::json doc;
    doc["id"] = reportId(inputs);
    doc["procedure"] = inputs.procedure;
    doc["source_annotation"] = inputs.sourceAnnotation;
    doc["static_aspect_definition"] = inputs.definition;
    doc["alarms"] = nlohmann::json::array();
    for (const Alarm& alarm : sortedAlarms(alarms)) {
        nlohmann::json entry;
        entry["line"] = alarm.line;
        entry["step"] = alarm.step;
        entry["traversal"] = alarm.traversal;
        entry["aspect"] = alarm.aspect;
        entry["value"] = alarm.value.repr();
        doc["alarms"].push_back(entry);
    }
    return doc.dump(2) + "\n";
}

}  // namespace saga
