#ifndef SAGA_REPORT_HPP
#define SAGA_REPORT_HPP

#include <string>
#include <vector>

#include "saga/engine.hpp"

namespace saga {

struct ReportInputs {
    std::string procedure;         // displayed qualifier
    std::string sourceAnnotation;  // annotation file as passed
    std::string definition;        // aspect-definition file(s) as passed
};

// Human-readable analysis report. Alarms are grouped by source line in
// ascending order, each with "<aspect> = <value> at step <n>" lines in step
// order. Output is byte-stable for identical inputs.
std::string renderReport(const ReportInputs& inputs,
                         const std::vector<Alarm>& alarms);

// Same content as JSON.
std::string renderReportJson(const ReportInputs& inputs,
                             const std::vector<Alarm>& alarms);

}  // namespace saga

#endif
