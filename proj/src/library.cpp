#include "saga/library.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "saga/errors.hpp"

namespace fs = std::filesystem;

namespace saga {

namespace {

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void scanExpr(const adv::Expr* expr, const std::string& var,
              std::set<std::string>& labels);

void scanBlock(const adv::Block& block, const std::string& var,
               std::set<std::string>& labels) {
    for (const adv::StmtPtr& stmt : block) {
        scanExpr(stmt->targetIndex.get(), var, labels);
        scanExpr(stmt->value.get(), var, labels);
        for (const auto& [cond, body] : stmt->arms) {
            scanExpr(cond.get(), var, labels);
            scanBlock(body, var, labels);
        }
        scanBlock(stmt->elseBody, var, labels);
        scanExpr(stmt->iterable.get(), var, labels);
        scanBlock(stmt->body, var, labels);
    }
}

void scanExpr(const adv::Expr* expr, const std::string& var,
              std::set<std::string>& labels) {
    if (!expr) return;
    if (expr->kind == adv::Expr::Kind::Subscript && expr->object &&
        expr->object->kind == adv::Expr::Kind::Name &&
        expr->object->name == var && expr->index &&
        expr->index->kind == adv::Expr::Kind::StrLit) {
        labels.insert(expr->index->strVal);
    }
    for (const adv::ExprPtr& child : expr->elements) {
        scanExpr(child.get(), var, labels);
    }
    for (const auto& [key, value] : expr->items) {
        scanExpr(key.get(), var, labels);
        scanExpr(value.get(), var, labels);
    }
    scanExpr(expr->lhs.get(), var, labels);
    scanExpr(expr->rhs.get(), var, labels);
    scanExpr(expr->receiver.get(), var, labels);
    for (const adv::ExprPtr& arg : expr->args) {
        scanExpr(arg.get(), var, labels);
    }
    scanExpr(expr->object.get(), var, labels);
    scanExpr(expr->index.get(), var, labels);
}

// Labels the definition reads from its source annotation, found by walking
// every advice block for <annotationVar>["label"] subscripts.
std::set<std::string> annotationSchema(const SableProgram& program) {
    std::set<std::string> labels;
    for (const TraversalDef& traversal : program.traversals) {
        if (!traversal.annotationVar) continue;
        const std::string& var = *traversal.annotationVar;
        for (const UtilityDef& utility : traversal.utilities) {
            scanBlock(utility.body, var, labels);
        }
        for (const PointcutDef& pointcut : traversal.pointcuts) {
            scanBlock(pointcut.advice, var, labels);
        }
        if (traversal.merge) scanBlock(traversal.merge->body, var, labels);
    }
    return labels;
}

struct ShippedDef {
    const char* file;
    const char* name;
    const char* doc;
};

const ShippedDef kShipped[] = {
    {"source_tainting.sable", "SourceTainting",
     "Taint propagation from annotated sources through assignments, with "
     "sink and sanitizer symbol sets; alarms when a tainted symbol reaches "
     "a sink call."},
    {"check_end_proc.sable", "CheckEndProc",
     "Requires designated symbols to be checked in a condition or passed "
     "through a sanitizing call before the procedure can end."},
    {"check_calls.sable", "CheckCalls",
     "Requires every function in one set to be called before any function "
     "in a second set on each path to a return."},
    {"involved_symbols.sable", "InvolvedSymbols",
     "Collects the symbols a region involves and reports expected-but-"
     "missing or forbidden-but-present ones at its end."},
    {"contextual_value.sable", "ContextualValue",
     "Restricts calls of certain functions to contexts where a setter was "
     "called with an approved literal argument."},
};

int readOptionalInt(const nlohmann::json& doc, const std::string& key) {
    if (!doc.contains(key)) return 0;
    if (!doc.at(key).is_number_integer()) {
        throw FormatError("fixture field '" + key + "' must be an integer");
    }
    return doc.at(key).get<int>();
}

std::string readString(const nlohmann::json& doc, const std::string& key,
                       const std::string& context) {
    if (!doc.contains(key) || !doc.at(key).is_string()) {
        throw FormatError(context + " needs a string field '" + key + "'");
    }
    return doc.at(key).get<std::string>();
}

Fixture parseFixture(const std::string& assetDir, const fs::path& dir) {
    std::string manifestPath = (dir / "fixture.json").string();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(readFile(manifestPath));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid fixture manifest " + manifestPath + ": " +
                          e.what());
    }
    Fixture fixture;
    fixture.dir = dir.string();
    fixture.name = doc.value("name", dir.filename().string());
    if (doc.contains("entry")) {
        fixture.entry = readString(doc, "entry", manifestPath);
    }
    if (doc.contains("sable")) {
        fixture.sablePath =
            (fs::path(assetDir) / doc.at("sable").get<std::string>()).string();
    }
    if (fixture.entry.empty() == fixture.sablePath.empty()) {
        throw FormatError(manifestPath +
                          " must name exactly one of 'entry' or 'sable'");
    }
    fixture.annotationPath =
        (dir / readString(doc, "annotation", manifestPath)).string();
    fixture.documentedFalsePositive =
        doc.value("documented_false_positive", false);
    fixture.note = doc.value("note", std::string());
    if (!doc.contains("cases") || !doc.at("cases").is_array()) {
        throw FormatError(manifestPath + " needs a 'cases' array");
    }
    for (const nlohmann::json& caseDoc : doc.at("cases")) {
        FixtureCase fixtureCase;
        fixtureCase.sourcePath =
            (dir / readString(caseDoc, "source", manifestPath)).string();
        fixtureCase.procedure = readString(caseDoc, "procedure", manifestPath);
        if (caseDoc.contains("alarms")) {
            for (const nlohmann::json& alarmDoc : caseDoc.at("alarms")) {
                ExpectedAlarm alarm;
                alarm.line = readOptionalInt(alarmDoc, "line");
                alarm.aspect = readString(alarmDoc, "aspect", manifestPath);
                alarm.step = readOptionalInt(alarmDoc, "step");
                if (alarm.line <= 0) {
                    throw FormatError(manifestPath +
                                      " has an alarm without a positive line");
                }
                fixtureCase.expectedAlarms.push_back(std::move(alarm));
            }
        }
        fixture.cases.push_back(std::move(fixtureCase));
    }
    return fixture;
}

}  // namespace

std::string resolveAssetDir(const std::string& override_) {
    if (!override_.empty()) return override_;
    if (const char* env = std::getenv("SAGA_LIBRARY_DIR")) {
        if (*env) return env;
    }
    return SAGA_DEFAULT_ASSET_DIR;
}

std::vector<LibraryEntry> loadLibrary(const std::string& assetDir) {
    std::vector<LibraryEntry> entries;
    for (const ShippedDef& shipped : kShipped) {
        LibraryEntry entry;
        entry.name = shipped.name;
        entry.path =
            (fs::path(assetDir) / "library" / shipped.file).string();
        entry.program = parseSable(readFile(entry.path));
        entry.annotationSchema = annotationSchema(entry.program);
        entry.doc = shipped.doc;
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::optional<LibraryEntry> findLibraryEntry(const std::string& assetDir,
                                             const std::string& name) {
    for (LibraryEntry& entry : loadLibrary(assetDir)) {
        if (entry.name == name) return std::move(entry);
    }
    return std::nullopt;
}

std::vector<Fixture> loadFixtureCorpus(const std::string& assetDir) {
    fs::path root = fs::path(assetDir) / "fixtures";
    if (!fs::is_directory(root)) {
        throw FormatError("fixture directory not found: " + root.string());
    }
    std::vector<fs::path> dirs;
    for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<Fixture> corpus;
    for (const fs::path& dir : dirs) {
        corpus.push_back(parseFixture(assetDir, dir));
    }
    return corpus;
}

}  // namespace saga
