#include "saga/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <json.hpp>

#include "saga/errors.hpp"

namespace saga {

namespace {

std::set<int> readLineSet(const nlohmann::json& doc, const std::string& key) {
    if (!doc.contains(key)) {
        throw FormatError("vulnerability record is missing field '" + key + "'");
    }
    const nlohmann::json& arr = doc.at(key);
    if (!arr.is_array()) {
        throw FormatError("field '" + key + "' must be an array of line numbers");
    }
    std::set<int> lines;
    for (const nlohmann::json& item : arr) {
        if (!item.is_number_integer()) {
            throw FormatError("field '" + key + "' must contain integers only");
        }
        int line = item.get<int>();
        if (line <= 0) {
            throw FormatError("field '" + key + "' has non-positive line " +
                              std::to_string(line));
        }
        lines.insert(line);
    }
    return lines;
}

nlohmann::json lineSetToJson(const std::set<int>& lines) {
    nlohmann::json arr = nlohmann::json::array();
    for (int line : lines) arr.push_back(line);
    return arr;
}

long long setMinus(const std::set<int>& a, const std::set<int>& b) {
    long long count = 0;
    for (int x : a) {
        if (!b.count(x)) ++count;
    }
    return count;
}

long long setIntersect(const std::set<int>& a, const std::set<int>& b) {
    long long count = 0;
    for (int x : a) {
        if (b.count(x)) ++count;
    }
    return count;
}

double phiTwoSided(double z) {
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

}  // namespace

VulnRecord parseVulnRecord(const std::string& jsonText) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(jsonText);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid vulnerability record: ") +
                          e.what());
    }
    if (!doc.is_object()) {
        throw FormatError("vulnerability record must be an object");
    }
    VulnRecord record;
    if (!doc.contains("id") || !doc.at("id").is_string()) {
        throw FormatError("vulnerability record needs a string 'id'");
    }
    record.id = doc.at("id").get<std::string>();
    record.truthBefore = readLineSet(doc, "truth_before");
    record.truthAfter = readLineSet(doc, "truth_after");
    record.detectBefore = readLineSet(doc, "detect_before");
    record.detectAfter = readLineSet(doc, "detect_after");
    return record;
}

std::string vulnRecordToJson(const VulnRecord& record) {
    nlohmann::json doc;
    doc["id"] = record.id;
    doc["truth_before"] = lineSetToJson(record.truthBefore);
    doc["truth_after"] = lineSetToJson(record.truthAfter);
    doc["detect_before"] = lineSetToJson(record.detectBefore);
    doc["detect_after"] = lineSetToJson(record.detectAfter);
    return doc.dump(2) + "\n";
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    tp += other.tp;
    fn += other.fn;
    fp += other.fp;
    tn += other.tn;
    return *this;
}

ConfusionMatrix confusionStrict(const VulnRecord& record) {
    ConfusionMatrix cm;
    cm.tp = setIntersect(record.truthBefore, record.detectBefore);
    cm.fn = setMinus(record.truthBefore, record.detectBefore);
    cm.tn = setMinus(record.truthAfter, record.detectAfter);
    cm.fp = setMinus(record.detectBefore, record.truthBefore) +
            static_cast<long long>(record.detectAfter.size());
    return cm;
}

ConfusionMatrix confusionRelaxed(const VulnRecord& record) {
    long long tb = static_cast<long long>(record.truthBefore.size());
    long long ta = static_cast<long long>(record.truthAfter.size());
    long long db = static_cast<long long>(record.detectBefore.size());
    long long da = static_cast<long long>(record.detectAfter.size());
    ConfusionMatrix cm;
    cm.tp = std::min(tb, db);
    cm.fn = std::max(tb - db, 0LL);
    cm.tn = std::max(ta - da, 0LL);
    cm.fp = std::max(db - tb, 0LL) + da;
    return cm;
}

Rates rates(const ConfusionMatrix& matrix) {
    Rates r;
    if (matrix.tp + matrix.fn > 0) {
        r.sensitivity = static_cast<double>(matrix.tp) /
                        static_cast<double>(matrix.tp + matrix.fn);
    }
    if (matrix.tn + matrix.fp > 0) {
        r.specificity = static_cast<double>(matrix.tn) /
                        static_cast<double>(matrix.tn + matrix.fp);
    }
    if (matrix.tp + matrix.fp > 0) {
        r.precision = static_cast<double>(matrix.tp) /
                      static_cast<double>(matrix.tp + matrix.fp);
    }
    return r;
}

WilcoxonResult wilcoxonSignedRank(const std::vector<double>& first,
                                  const std::vector<double>& second) {
    if (first.empty() || first.size() != second.size()) {
        throw ContractError(
            "signed-rank test needs two equally long non-empty samples");
    }
    size_t n = first.size();
    std::vector<double> diffs(n);
    for (size_t i = 0; i < n; ++i) diffs[i] = first[i] - second[i];

    // Rank all differences (zeros included) by |d|, midranks for ties.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::fabs(diffs[a]) < std::fabs(diffs[b]);
    });
    std::vector<double> rank(n, 0.0);
    size_t pos = 0;
    while (pos < n) {
        size_t end = pos;
        while (end + 1 < n && std::fabs(diffs[order[end + 1]]) ==
                                  std::fabs(diffs[order[pos]])) {
            ++end;
        }
        double mid = (static_cast<double>(pos + 1) +
                      static_cast<double>(end + 1)) /
                     2.0;
        for (size_t k = pos; k <= end; ++k) rank[order[k]] = mid;
        pos = end + 1;
    }

    double rPlus = 0.0;
    double rMinus = 0.0;
    std::vector<double> nonZeroRanks;
    double observed = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0) {
            rPlus += rank[i];
            nonZeroRanks.push_back(rank[i]);
            observed += rank[i];
        } else if (diffs[i] < 0) {
            rMinus += rank[i];
            nonZeroRanks.push_back(rank[i]);
        } else {
            rPlus += rank[i] / 2.0;
            rMinus += rank[i] / 2.0;
        }
    }

    WilcoxonResult result;
    result.effectSize = rPlus / (rPlus + rMinus);

    size_t m = nonZeroRanks.size();
    if (m == 0) {
        result.pValue = 1.0;
        return result;
    }

    if (m <= 25) {
        // Exact law of T = sum of positive ranks, fixing the observed rank
        // values; doubling makes midranks integral.
        std::vector<long long> twice(m);
        long long total = 0;
        for (size_t i = 0; i < m; ++i) {
            twice[i] = std::llround(nonZeroRanks[i] * 2.0);
            total += twice[i];
        }
        std::vector<std::uint64_t> count(static_cast<size_t>(total) + 1, 0);
        count[0] = 1;
        for (size_t i = 0; i < m; ++i) {
            for (long long s = total; s >= twice[i]; --s) {
                count[static_cast<size_t>(s)] +=
                    count[static_cast<size_t>(s - twice[i])];
            }
        }
        long long t = std::llround(observed * 2.0);
        std::uint64_t below = 0;
        std::uint64_t above = 0;
        for (long long s = 0; s <= total; ++s) {
            if (s <= t) below += count[static_cast<size_t>(s)];
            if (s >= t) above += count[static_cast<size_t>(s)];
        }
        double denom = std::ldexp(1.0, static_cast<int>(m));
        double lo = static_cast<double>(below) / denom;
        double hi = static_cast<double>(above) / denom;
        result.pValue = std::min(1.0, 2.0 * std::min(lo, hi));
        return result;
    }

    // Large samples: signs are fair coins on the fixed rank values, so
    // mean and variance of T follow directly; ties and zeros are already
    // reflected in the midranks.
    double mean = 0.0;
    double var = 0.0;
    for (double r : nonZeroRanks) {
        mean += r / 2.0;
        var += r * r / 4.0;
    }
    if (var <= 0.0) {
        result.pValue = 1.0;
        return result;
    }
    double z = (observed - mean) / std::sqrt(var);
    result.pValue = std::min(1.0, phiTwoSided(z));
    return result;
}

}  // namespace saga
