// mcsc: run scenarios, compare strategies, and re-derive metrics from event logs.

#include "mcsc/config.hpp"
#include "mcsc/error.hpp"
#include "mcsc/harness.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mcsc;

namespace {

// Relative output paths land in MCSC_OUTPUT_DIR when it is set.
fs::path outputPath(const std::string& name)
{
    fs::path p(name);
    if (p.is_absolute())
        return p;
    if (const char* dir = std::getenv("MCSC_OUTPUT_DIR"); dir && *dir) {
        fs::create_directories(dir);
        return fs::path(dir) / p;
    }
    return p;
}

void writeFile(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidConfig("cannot write " + path.string());
    out << text;
}

int cmdRun(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
           const std::string& logName)
{
    harness::ScenarioConfig cfg = harness::loadConfig(harness::resolveConfigPath(config));
    if (seed)
        cfg.rngSeed = *seed;
    const harness::RunResult result = harness::runScenario(cfg);
    const std::string csv = harness::formatCsv({result.metrics});
    if (out.empty())
        std::cout << csv;
    else
        writeFile(outputPath(out), csv);
    if (!logName.empty()) {
        std::ofstream log(outputPath(logName), std::ios::binary);
        if (!log)
            throw InvalidConfig("cannot write " + logName);
        harness::writeEventLog(log, result.log);
    }
    return 0;
}

int cmdCompare(const std::vector<std::string>& configs, std::optional<std::uint64_t> seed, const std::string& out)
{
    std::vector<harness::ScenarioConfig> cfgs;
    for (const auto& c : configs) {
        cfgs.push_back(harness::loadConfig(harness::resolveConfigPath(c)));
        if (seed)
            cfgs.back().rngSeed = *seed;
    }
    const auto rows = harness::compareStrategies(cfgs);
    std::cout << harness::formatTable(rows);
    const std::string csv = harness::formatCsv(rows);
    if (out.empty())
        std::cout << '\n' << csv;
    else
        writeFile(outputPath(out), csv);
    return 0;
}

int cmdReplay(const std::string& logPath, const std::string& out)
{
    std::ifstream in(logPath, std::ios::binary);
    if (!in)
        throw LogFormatError("cannot open " + logPath);
    const harness::EventLog log = harness::readEventLog(in);
    harness::checkConservation(log);
    const std::string csv = harness::formatCsv({harness::summarize(log)});
    if (out.empty())
        std::cout << csv;
    else
        writeFile(outputPath(out), csv);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"MCSC protocol simulator"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string logName;
    auto* run = app.add_subcommand("run", "run one scenario and write its metrics as CSV");
    run->add_option("--config", config, "scenario file or preset name")->required();
    run->add_option("--seed", seed, "RNG seed, overrides rng_seed");
    run->add_option("--out", out, "CSV output file (default: stdout)");
    run->add_option("--log", logName, "also write the JSONL event log here");

    app.add_subcommand("list-presets", "print the shipped scenario presets");

    std::vector<std::string> configs;
    std::optional<std::uint64_t> compareSeed;
    std::string compareOut;
    auto* compare = app.add_subcommand("compare", "run scenarios that differ only in strategy, side by side");
    compare->add_option("--configs", configs, "scenario files or preset names")->required()->expected(2, -1);
    compare->add_option("--seed", compareSeed, "RNG seed applied to every scenario");
    compare->add_option("--out", compareOut, "CSV output file (the table always goes to stdout)");

    std::string logPath;
    std::string replayOut;
    auto* replay = app.add_subcommand("replay", "re-derive the metrics CSV from an event log");
    replay->add_option("--log", logPath, "JSONL event log")->required();
    replay->add_option("--out", replayOut, "CSV output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmdRun(config, seed, out, logName);
        if (compare->parsed())
            return cmdCompare(configs, compareSeed, compareOut);
        if (replay->parsed())
            return cmdReplay(logPath, replayOut);
        for (const auto& name : harness::listPresets())
            std::cout << name << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << fmt::format("{}: {}\n", e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return 3;
    }
}
