#ifndef SAGA_LIBRARY_HPP
#define SAGA_LIBRARY_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saga/sable.hpp"

namespace saga {

// One reusable aspect definition shipped with the analyzer.
struct LibraryEntry {
    std::string name;   // e.g. "SourceTainting"
    std::string path;   // .sable file
    SableProgram program;
    std::set<std::string> annotationSchema;  // labels its advice reads
    std::string doc;
};

// Asset directory resolution: explicit argument, then $SAGA_LIBRARY_DIR,
// then the compiled-in default.
std::string resolveAssetDir(const std::string& override_ = "");

// Loads and validates the five shipped definitions.
std::vector<LibraryEntry> loadLibrary(const std::string& assetDir);
std::optional<LibraryEntry> findLibraryEntry(const std::string& assetDir,
                                             const std::string& name);

struct ExpectedAlarm {
    int line = 0;
    std::string aspect;
    int step = 0;  // 0 when the fixture does not pin a step
};

struct FixtureCase {
    std::string sourcePath;
    std::string procedure;
    std::vector<ExpectedAlarm> expectedAlarms;
};

// A fixture pairs source files with the definition and annotation used to
// analyze them plus the expected alarms.
struct Fixture {
    std::string name;
    std::string dir;
    std::string entry;      // library entry name, or empty when sablePath set
    std::string sablePath;  // explicit definition file
    std::string annotationPath;
    bool documentedFalsePositive = false;
    std::string note;
    std::vector<FixtureCase> cases;
};

std::vector<Fixture> loadFixtureCorpus(const std::string& assetDir);

}  // namespace saga

#endif
