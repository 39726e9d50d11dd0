#include "saga/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "saga/annotation.hpp"
#include "saga/engine.hpp"
#include "saga/errors.hpp"
#include "saga/frontend.hpp"
#include "saga/library.hpp"
#include "saga/metrics.hpp"
#include "saga/report.hpp"
#include "saga/sable.hpp"
#include "saga/scfg.hpp"

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

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

std::string shortNum(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

struct AnalyzeConfig {
    std::string source;
    std::vector<std::string> procedures;
    std::vector<std::string> sables;
    std::string libraryEntry;
    std::string annotationPath;
    std::string libraryDir;
    int maxLoopIters = 1000;
    std::string format = "text";
};

struct ProcedureOutcome {
    std::string qualifier;
    std::string text;
    std::string json;
    size_t alarmCount = 0;
};

int runAnalyze(const AnalyzeConfig& cfg, std::ostream& out,
               std::ostream& err) {
    std::string sourceText = readFile(cfg.source);

    SableProgram program;
    std::string definitionLabel;
    if (!cfg.libraryEntry.empty()) {
        std::string assetDir = resolveAssetDir(cfg.libraryDir);
        std::optional<LibraryEntry> entry =
            findLibraryEntry(assetDir, cfg.libraryEntry);
        if (!entry) {
            throw FormatError("unknown library entry: " + cfg.libraryEntry);
        }
        program = std::move(entry->program);
        definitionLabel = entry->name;
    } else {
        std::vector<SableProgram> parts;
        for (const std::string& path : cfg.sables) {
            try {
                parts.push_back(parseSable(readFile(path)));
            } catch (const Error& e) {
                throw FormatError(path + ": " + e.what());
            }
            if (!definitionLabel.empty()) definitionLabel += ", ";
            definitionLabel += path;
        }
        program = mergePrograms(std::move(parts));
    }

    SourceAnnotation annotation;
    std::string annotationLabel = "(none)";
    if (!cfg.annotationPath.empty()) {
        annotation = parseSourceAnnotation(readFile(cfg.annotationPath));
        annotationLabel = cfg.annotationPath;
    }

    std::string base = fs::path(cfg.source).filename().string();
    EngineOptions options;
    options.maxLoopIters = cfg.maxLoopIters;

    auto work = [&](const std::string& qualifier) {
        ProcedureIR proc = parseProcedure(sourceText, qualifier);
        Scfg scfg = buildScfg(proc);
        LabeledSymbols labels = annotationFor(annotation, qualifier);
        Analyzer analyzer(scfg, program, labels, options);
        AnalysisResult result = analyzer.run();
        ReportInputs inputs{qualifier, annotationLabel, definitionLabel};
        ProcedureOutcome outcome;
        outcome.qualifier = qualifier;
        outcome.text = renderReport(inputs, result.alarms);
        outcome.json = renderReportJson(inputs, result.alarms);
        outcome.alarmCount = result.alarms.size();
        return outcome;
    };

    std::vector<std::string> qualifiers;
    for (const std::string& name : cfg.procedures) {
        qualifiers.push_back(base + ":" + name);
    }

    std::vector<std::future<ProcedureOutcome>> futures;
    for (const std::string& qualifier : qualifiers) {
        futures.push_back(
            std::async(std::launch::async, work, qualifier));
    }

    bool failed = false;
    size_t totalAlarms = 0;
    std::vector<ProcedureOutcome> outcomes;
    for (size_t i = 0; i < futures.size(); ++i) {
        try {
            outcomes.push_back(futures[i].get());
            totalAlarms += outcomes.back().alarmCount;
        } catch (const std::exception& e) {
            err << "error: " << qualifiers[i] << ": " << e.what() << "\n";
            failed = true;
        }
    }
    for (const ProcedureOutcome& outcome : outcomes) {
        out << (cfg.format == "machine" ? outcome.json : outcome.text);
    }
    if (failed) return 2;
    return totalAlarms > 0 ? 1 : 0;
}

int runDump(const std::string& source,
            const std::vector<std::string>& procedures, std::ostream& out) {
    std::string sourceText = readFile(source);
    std::string base = fs::path(source).filename().string();
    for (const std::string& name : procedures) {
        ProcedureIR proc = parseProcedure(sourceText, base + ":" + name);
        out << buildScfg(proc).dump();
    }
    return 0;
}

int runCheck(const std::vector<std::string>& paths, std::ostream& out) {
    std::vector<SableProgram> parts;
    for (const std::string& path : paths) {
        try {
            parts.push_back(parseSable(readFile(path)));
        } catch (const Error& e) {
            throw FormatError(path + ": " + e.what());
        }
    }
    SableProgram program = mergePrograms(std::move(parts));
    std::vector<const TraversalDef*> order = orderTraversals(program);
    out << "traversal order:";
    for (const TraversalDef* traversal : order) {
        out << " " << traversal->name;
    }
    out << "\n";
    return 0;
}

std::map<std::string, VulnRecord> loadRecords(const std::string& dir) {
    std::vector<fs::path> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, VulnRecord> records;
    for (const fs::path& file : files) {
        VulnRecord record;
        try {
            record = parseVulnRecord(readFile(file.string()));
        } catch (const Error& e) {
            throw FormatError(file.string() + ": " + e.what());
        }
        if (!records.emplace(record.id, record).second) {
            throw FormatError("duplicate record id: " + record.id);
        }
    }
    if (records.empty()) {
        throw FormatError("no .json records in " + dir);
    }
    return records;
}

int runEval(const std::string& recordsDir, const std::string& mode,
            const std::string& compareDir, const std::string& format,
            std::ostream& out) {
    auto confusion = [&](const VulnRecord& record) {
        return mode == "relaxed" ? confusionRelaxed(record)
                                 : confusionStrict(record);
    };

    std::map<std::string, VulnRecord> records = loadRecords(recordsDir);
    ConfusionMatrix aggregate;
    std::vector<std::pair<std::string, ConfusionMatrix>> perRecord;
    for (const auto& [id, record] : records) {
        ConfusionMatrix cm = confusion(record);
        aggregate += cm;
        perRecord.emplace_back(id, cm);
    }
    Rates aggregateRates = rates(aggregate);

    bool haveComparison = false;
    WilcoxonResult comparison;
    if (!compareDir.empty()) {
        std::map<std::string, VulnRecord> others = loadRecords(compareDir);
        std::vector<double> mine;
        std::vector<double> theirs;
        for (const auto& [id, record] : records) {
            auto it = others.find(id);
            if (it == others.end()) {
                throw FormatError("record " + id + " missing from " +
                                  compareDir);
            }
            mine.push_back(rates(confusion(record)).sensitivity);
            theirs.push_back(rates(confusion(it->second)).sensitivity);
        }
        if (others.size() != records.size()) {
            throw FormatError("record sets differ in size");
        }
        comparison = wilcoxonSignedRank(mine, theirs);
        haveComparison = true;
    }

    if (format == "machine") {
        nlohmann::json doc;
        doc["mode"] = mode;
        doc["records"] = nlohmann::json::array();
        for (const auto& [id, cm] : perRecord) {
            nlohmann::json entry;
            entry["id"] = id;
            entry["tp"] = cm.tp;
            entry["fn"] = cm.fn;
            entry["tn"] = cm.tn;
            entry["fp"] = cm.fp;
            doc["records"].push_back(entry);
        }
        doc["aggregate"] = {{"tp", aggregate.tp},
                            {"fn", aggregate.fn},
                            {"tn", aggregate.tn},
                            {"fp", aggregate.fp}};
        doc["sensitivity"] = aggregateRates.sensitivity;
        doc["specificity"] = aggregateRates.specificity;
        doc["precision"] = aggregateRates.precision;
        if (haveComparison) {
            doc["comparison"] = {{"p_value", comparison.pValue},
                                 {"effect_size", comparison.effectSize}};
        }
        out << doc.dump(2) << "\n";
        return 0;
    }

    size_t idWidth = std::string("aggregate").size();
    for (const auto& [id, cm] : perRecord) {
        idWidth = std::max(idWidth, id.size());
    }
    auto row = [&](const std::string& id, const ConfusionMatrix& cm) {
        out << id << std::string(idWidth - id.size(), ' ');
        char buf[64];
        std::snprintf(buf, sizeof buf, " %6lld %6lld %6lld %6lld",
                      static_cast<long long>(cm.tp),
                      static_cast<long long>(cm.fn),
                      static_cast<long long>(cm.tn),
                      static_cast<long long>(cm.fp));
        out << buf << "\n";
    };
    out << "id" << std::string(idWidth - 2, ' ')
        << "     tp     fn     tn     fp\n";
    for (const auto& [id, cm] : perRecord) row(id, cm);
    row("aggregate", aggregate);
    out << "sensitivity = " << percent(aggregateRates.sensitivity) << "\n";
    out << "specificity = " << percent(aggregateRates.specificity) << "\n";
    out << "precision = " << percent(aggregateRates.precision) << "\n";
    if (haveComparison) {
        out << "wilcoxon: p = " << shortNum(comparison.pValue)
            << ", E = " << shortNum(comparison.effectSize) << "\n";
    }
    return 0;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
    CLI::App app{"Static vulnerability analyzer for Python procedures"};
    app.require_subcommand(1);

    AnalyzeConfig cfg;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Run aspect definitions over procedures and report alarms");
    analyze->add_option("source", cfg.source, "Python source file")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--procedure", cfg.procedures,
                        "Procedure (or dotted class member) to analyze")
        ->required();
    CLI::Option* sableOpt = analyze->add_option(
        "--sable", cfg.sables, "Aspect definition file(s)");
    CLI::Option* entryOpt = analyze->add_option(
        "--library-entry", cfg.libraryEntry, "Shipped definition name");
    sableOpt->excludes(entryOpt);
    analyze->add_option("--annotation", cfg.annotationPath,
                        "Source annotation file");
    analyze->add_option("--library-dir", cfg.libraryDir,
                        "Asset directory (default: $SAGA_LIBRARY_DIR)");
    analyze->add_option("--max-loop-iters", cfg.maxLoopIters,
                        "Fixpoint iteration cap per loop")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--format", cfg.format, "Report format")
        ->check(CLI::IsMember({"text", "machine"}));

    std::string dumpSource;
    std::vector<std::string> dumpProcedures;
    CLI::App* dump = app.add_subcommand(
        "dump-scfg", "Print the symbolic control-flow graph of procedures");
    dump->add_option("source", dumpSource, "Python source file")
        ->required()
        ->check(CLI::ExistingFile);
    dump->add_option("--procedure", dumpProcedures, "Procedure to dump")
        ->required();

    std::vector<std::string> checkPaths;
    CLI::App* check = app.add_subcommand(
        "check", "Validate aspect definition files and show traversal order");
    check->add_option("files", checkPaths, "Aspect definition file(s)")
        ->required()
        ->check(CLI::ExistingFile);

    std::string recordsDir;
    std::string mode = "strict";
    std::string compareDir;
    std::string evalFormat = "text";
    CLI::App* eval = app.add_subcommand(
        "eval", "Compute evaluation metrics over vulnerability records");
    eval->add_option("records", recordsDir, "Directory of record files")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval->add_option("--mode", mode, "Location matching mode")
        ->check(CLI::IsMember({"strict", "relaxed"}));
    eval->add_option("--compare", compareDir,
                     "Second record directory for a paired signed-rank test")
        ->check(CLI::ExistingDirectory);
    eval->add_option("--format", evalFormat, "Summary format")
        ->check(CLI::IsMember({"text", "machine"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) {
            if (cfg.sables.empty() && cfg.libraryEntry.empty()) {
                throw FormatError(
                    "analyze needs --sable or --library-entry");
            }
            return runAnalyze(cfg, out, err);
        }
        if (dump->parsed()) return runDump(dumpSource, dumpProcedures, out);
        if (check->parsed()) return runCheck(checkPaths, out);
        if (eval->parsed()) {
            return runEval(recordsDir, mode, compareDir, evalFormat, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace saga
