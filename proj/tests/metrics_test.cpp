#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "saga/errors.hpp"
#include "saga/metrics.hpp"

using namespace saga;

namespace {

VulnRecord sample() {
    VulnRecord r;
    r.id = "cve-demo";
    r.truthBefore = {4, 6};
    r.truthAfter = {2, 3};
    r.detectBefore = {4, 9};
    r.detectAfter = {3};
    return r;
}

// Brute-force reference for the exact two-sided signed-rank p-value:
// midranks over |d| (zeros included), then every sign assignment of the
// non-zero ranks, counted over doubled integer sums.
struct Reference {
    double pValue;
    double effectSize;
};

Reference referenceSignedRank(const std::vector<double>& diffs) {
    size_t n = diffs.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::fabs(diffs[a]) < std::fabs(diffs[b]);
    });
    std::vector<double> rank(n);
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n &&
               std::fabs(diffs[order[j]]) == std::fabs(diffs[order[i]]))
            ++j;
        double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
        for (size_t k = i; k < j; ++k) rank[order[k]] = mid;
        i = j;
    }

    double rPlus = 0, rMinus = 0;
    std::vector<long long> twice;
    long long observed = 0;
    for (size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0) rPlus += rank[i];
        if (diffs[i] < 0) rMinus += rank[i];
        if (diffs[i] == 0) {
            rPlus += rank[i] / 2;
            rMinus += rank[i] / 2;
            continue;
        }
        twice.push_back(std::llround(2 * rank[i]));
        if (diffs[i] > 0) observed += std::llround(2 * rank[i]);
    }

    Reference ref;
    ref.effectSize =
        rPlus + rMinus > 0 ? rPlus / (rPlus + rMinus) : 0.5;
    size_t m = twice.size();
    if (m == 0) {
        ref.pValue = 1.0;
        return ref;
    }
    long long below = 0, above = 0;
    for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
        long long sum = 0;
        for (size_t i = 0; i < m; ++i)
            if (mask & (size_t{1} << i)) sum += twice[i];
        if (sum <= observed) ++below;
        if (sum >= observed) ++above;
    }
    double denom = std::ldexp(1.0, static_cast<int>(m));
    ref.pValue = std::min(
        1.0, 2 * std::min(static_cast<double>(below) / denom,
                          static_cast<double>(above) / denom));
    return ref;
}

}  // namespace

TEST_CASE("vulnerability records survive a json round trip") {
    VulnRecord r = sample();
    VulnRecord back = parseVulnRecord(vulnRecordToJson(r));
    CHECK(back.id == r.id);
    CHECK(back.truthBefore == r.truthBefore);
    CHECK(back.truthAfter == r.truthAfter);
    CHECK(back.detectBefore == r.detectBefore);
    CHECK(back.detectAfter == r.detectAfter);
}

TEST_CASE("malformed records are rejected with the offending field") {
    CHECK_THROWS_WITH_AS(parseVulnRecord("{nope"),
                         doctest::Contains("invalid vulnerability record"),
                         FormatError);
    CHECK_THROWS_WITH_AS(parseVulnRecord("[1]"),
                         "vulnerability record must be an object", FormatError);
    CHECK_THROWS_WITH_AS(parseVulnRecord("{}"),
                         "vulnerability record needs a string 'id'",
                         FormatError);
    CHECK_THROWS_WITH_AS(parseVulnRecord(R"({"id": 7})"),
                         "vulnerability record needs a string 'id'",
                         FormatError);
    CHECK_THROWS_WITH_AS(
        parseVulnRecord(R"({"id": "x"})"),
        "vulnerability record is missing field 'truth_before'", FormatError);
    CHECK_THROWS_WITH_AS(
        parseVulnRecord(R"({"id": "x", "truth_before": 3})"),
        "field 'truth_before' must be an array of line numbers", FormatError);
    CHECK_THROWS_WITH_AS(
        parseVulnRecord(R"({"id": "x", "truth_before": ["4"]})"),
        "field 'truth_before' must contain integers only", FormatError);
    CHECK_THROWS_WITH_AS(
        parseVulnRecord(R"({"id": "x", "truth_before": [0]})"),
        "field 'truth_before' has non-positive line 0", FormatError);
}

TEST_CASE("strict matching compares line sets") {
    ConfusionMatrix cm = confusionStrict(sample());
    CHECK(cm.tp == 1);  // line 4 found
    CHECK(cm.fn == 1);  // line 6 missed
    CHECK(cm.tn == 1);  // line 2 stays quiet after the fix
    CHECK(cm.fp == 2);  // line 9 off target plus the post-fix alarm

    VulnRecord perfect;
    perfect.id = "ok";
    perfect.truthBefore = {5};
    perfect.truthAfter = {5};
    perfect.detectBefore = {5};
    ConfusionMatrix p = confusionStrict(perfect);
    CHECK(p == ConfusionMatrix{1, 0, 0, 1});
    Rates r = rates(p);
    CHECK(r.sensitivity == 1.0);
    CHECK(r.specificity == 1.0);
    CHECK(r.precision == 1.0);
}

TEST_CASE("relaxed matching compares cardinalities only") {
    ConfusionMatrix cm = confusionRelaxed(sample());
    CHECK(cm.tp == 2);
    CHECK(cm.fn == 0);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 1);

    VulnRecord wide;
    wide.id = "wide";
    wide.truthBefore = {1};
    wide.detectBefore = {7, 8, 9};
    wide.detectAfter = {2};
    ConfusionMatrix w = confusionRelaxed(wide);
    CHECK(w.tp == 1);
    CHECK(w.fn == 0);
    CHECK(w.tn == 0);
    CHECK(w.fp == 3);  // two surplus detections plus one post-fix alarm
}

TEST_CASE("matrices aggregate by summation") {
    ConfusionMatrix total;
    total += ConfusionMatrix{1, 2, 3, 4};
    total += ConfusionMatrix{10, 20, 30, 40};
    CHECK(total == ConfusionMatrix{11, 22, 33, 44});
}

TEST_CASE("rates reproduce the worked precision example") {
    ConfusionMatrix balanced;
    balanced.tp = 9;
    balanced.fn = 1;
    balanced.fp = 2;
    balanced.tn = 8;
    Rates r = rates(balanced);
    CHECK(r.sensitivity == doctest::Approx(0.90));
    CHECK(r.specificity == doctest::Approx(0.80));
    CHECK(r.precision == doctest::Approx(9.0 / 11.0));

    ConfusionMatrix scaled;
    scaled.tp = 9;
    scaled.fn = 1;
    scaled.fp = 18;
    scaled.tn = 72;
    Rates s = rates(scaled);
    CHECK(s.sensitivity == doctest::Approx(0.90));
    CHECK(s.specificity == doctest::Approx(0.80));
    CHECK(s.precision == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rates fall back to zero on empty denominators") {
    Rates r = rates(ConfusionMatrix{});
    CHECK(r.sensitivity == 0.0);
    CHECK(r.specificity == 0.0);
    CHECK(r.precision == 0.0);
}

TEST_CASE("identical samples give no effect and p of one") {
    std::vector<double> x{0.4, 0.9, 0.7, 0.2};
    WilcoxonResult w = wilcoxonSignedRank(x, x);
    CHECK(w.pValue == 1.0);
    CHECK(w.effectSize == 0.5);
}

TEST_CASE("uniform improvement pushes the effect size to one") {
    std::vector<double> first{0.9, 0.8, 0.7, 0.95};
    std::vector<double> second{0.5, 0.6, 0.3, 0.9};
    WilcoxonResult w = wilcoxonSignedRank(first, second);
    CHECK(w.effectSize == 1.0);
    WilcoxonResult swapped = wilcoxonSignedRank(second, first);
    CHECK(swapped.effectSize == 0.0);
    CHECK(swapped.pValue == doctest::Approx(w.pValue));
}

TEST_CASE("a mixed three-pair comparison stays insignificant") {
    std::vector<double> first{0.9, 0.8, 0.7};
    std::vector<double> second{0.5, 0.8, 0.9};
    WilcoxonResult w = wilcoxonSignedRank(first, second);
    CHECK(w.effectSize == doctest::Approx(3.5 / 6.0));
    CHECK(w.pValue == 1.0);
}

TEST_CASE("the exact p-value matches sign enumeration on random samples") {
    std::mt19937 gen(20240817);
    std::uniform_int_distribution<int> step(-3, 3);
    std::uniform_int_distribution<int> size(1, 12);
    for (int round = 0; round < 60; ++round) {
        size_t n = static_cast<size_t>(size(gen));
        std::vector<double> first(n), second(n), diffs(n);
        for (size_t i = 0; i < n; ++i) {
            first[i] = step(gen) * 0.1;  // coarse grid forces ties and zeros
            second[i] = step(gen) * 0.1;
            diffs[i] = first[i] - second[i];
        }
        Reference ref = referenceSignedRank(diffs);
        WilcoxonResult got = wilcoxonSignedRank(first, second);
        CAPTURE(round);
        CHECK(std::fabs(got.pValue - ref.pValue) < 1e-12);
        CHECK(std::fabs(got.effectSize - ref.effectSize) < 1e-12);
    }
}

TEST_CASE("large samples switch to the normal approximation") {
    std::vector<double> first(30), second(30, 0.0);
    for (size_t i = 0; i < first.size(); ++i)
        first[i] = static_cast<double>(i + 1);
    WilcoxonResult w = wilcoxonSignedRank(first, second);
    CHECK(w.effectSize == 1.0);
    CHECK(w.pValue < 1e-4);

    // Hand-computed: observed 465, mean 232.5, var 2363.75.
    double z = 232.5 / std::sqrt(2363.75);
    CHECK(w.pValue == doctest::Approx(std::erfc(z / std::sqrt(2.0))));

    WilcoxonResult sym = wilcoxonSignedRank(second, first);
    CHECK(sym.pValue == doctest::Approx(w.pValue));
    CHECK(sym.effectSize == 0.0);
}

TEST_CASE("sample shape violations are contract errors") {
    CHECK_THROWS_WITH_AS(
        wilcoxonSignedRank({}, {}),
        "signed-rank test needs two equally long non-empty samples",
        ContractError);
    CHECK_THROWS_WITH_AS(
        wilcoxonSignedRank({1.0}, {1.0, 2.0}),
        "signed-rank test needs two equally long non-empty samples",
        ContractError);
}
