#ifndef SAGA_METRICS_HPP
#define SAGA_METRICS_HPP

#include <set>
#include <string>
#include <vector>

namespace saga {

// Ground truth and detections for one vulnerability, as line sets:
// truthBefore/detectBefore on the vulnerable revision, truthAfter/
// detectAfter on the fixed revision.
struct VulnRecord {
    std::string id;
    std::set<int> truthBefore;
    std::set<int> truthAfter;
    std::set<int> detectBefore;
    std::set<int> detectAfter;
};

VulnRecord parseVulnRecord(const std::string& jsonText);
std::string vulnRecordToJson(const VulnRecord& record);

struct ConfusionMatrix {
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    long long tn = 0;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix& other) const = default;
};

// Strict matching: detected lines must coincide with ground-truth lines.
ConfusionMatrix confusionStrict(const VulnRecord& record);
// Relaxed matching: only cardinalities are compared.
ConfusionMatrix confusionRelaxed(const VulnRecord& record);

struct Rates {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
};

// Ratios from an (aggregated) matrix; a zero denominator yields 0.
Rates rates(const ConfusionMatrix& matrix);

struct WilcoxonResult {
    double pValue = 1.0;
    double effectSize = 0.5;  // R+ / (R+ + R-) with zeros split half-half
};

// Two-sided paired signed-rank test. Exact distribution up to 25 non-zero
// differences, normal approximation with tie correction beyond that.
WilcoxonResult wilcoxonSignedRank(const std::vector<double>& first,
                                  const std::vector<double>& second);

}  // namespace saga

#endif
