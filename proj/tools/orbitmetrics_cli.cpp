#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "orbitmetrics/serialize.hpp"
#include "orbitmetrics/verify.hpp"

namespace {

using namespace orbitmetrics;
using serialize::CsvRow;
using serialize::Json;
using spaces::StatePoint;
using systems::SystemDescriptor;

[[noreturn]] void configError(const std::string& what) { throw std::invalid_argument(what); }

struct CommonOpts {
    std::string configPath;
    std::optional<std::uint64_t> seed;
    std::string outDir = ".";
    std::string format = "json";
    unsigned threads = 0;  // 0: pick from hardware
    std::string scheduleCsv;
};

struct TaskOutput {
    Json effectiveConfig;  // the hash-covered, fully resolved document
    Json provenance;
    Json payload;
    std::vector<CsvRow> rows;
    bool verdictFailure = false;  // verify suites reporting failures
};

Json loadConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) configError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& err) {
        configError("config '" + path + "': " + err.what());
    }
}

std::vector<std::size_t> parseScheduleCsv(const std::string& csv) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string token = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stoull(token));
        } catch (const std::exception&) {
            configError("--schedule: bad entry '" + token + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) configError("--schedule: empty list");
    return out;
}

std::string taskOf(const Json& config, const std::string& subcommand) {
    if (config.contains("task")) {
        std::string declared = config["task"].get<std::string>();
        if (declared != subcommand)
            configError("config task '" + declared + "' does not match subcommand '" + subcommand + "'");
    }
    return subcommand;
}

SystemDescriptor requireSystem(const Json& config) {
    if (!config.contains("system")) configError("config requires a 'system' block");
    return serialize::systemFromJson(config["system"]);
}

std::uint64_t effectiveSeed(const Json& config, const CommonOpts& opts, std::uint64_t fallback) {
    if (opts.seed) return *opts.seed;
    if (config.contains("seed")) {
        const Json& s = config["seed"];
        if (!s.is_number_integer() && !s.is_number_unsigned()) configError("'seed' must be an integer");
        return s.get<std::uint64_t>();
    }
    return fallback;
}

classify::ProbeConfig resolveProbeConfig(const Json& config, const CommonOpts& opts,
                                         const SystemDescriptor& system) {
    classify::ProbeConfig probe =
        serialize::probeConfigFromJson(config.value("probe", Json::object()), system);
    probe.seed = effectiveSeed(config, opts, probe.seed);
    if (!opts.scheduleCsv.empty()) probe.schedule = parseScheduleCsv(opts.scheduleCsv);
    classify::validateProbeConfig(system, probe);
    return probe;
}

Json provenanceFor(const SystemDescriptor& system, const std::vector<std::size_t>& schedule,
                   std::uint64_t seed) {
    Json p;
    p["seed"] = seed;
    p["schedule"] = schedule;
    p["truncationBound"] = serialize::rationalToJson(spaces::truncationBound(system.space));
    return p;
}

void appendWitnessRows(std::vector<CsvRow>& rows, const std::vector<classify::Witness>& witnesses,
                       const std::string& idPrefix, const std::string& statKind) {
    for (std::size_t i = 0; i < witnesses.size(); ++i)
        rows.push_back({idPrefix + std::to_string(i), statKind, witnesses[i].n,
                        witnesses[i].statistic.value});
}

// --- metric ---------------------------------------------------------------------

TaskOutput runMetric(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    SystemDescriptor system = requireSystem(config);
    std::uint64_t seed = effectiveSeed(config, opts, 0x20260819ULL);

    std::vector<std::size_t> schedule;
    if (!opts.scheduleCsv.empty()) {
        schedule = parseScheduleCsv(opts.scheduleCsv);
    } else if (config.contains("schedule")) {
        for (const Json& n : config["schedule"]) schedule.push_back(n.get<std::size_t>());
    } else {
        schedule = orbitstats::defaultSchedule(system.space);
    }
    if (schedule.empty()) configError("metric: empty schedule");

    unsigned tailWindow = config.value("tailWindow", orbitstats::kDefaultTailWindow);
    Rational tolerance = config.contains("tolerance")
                             ? serialize::rationalFromJson(config["tolerance"])
                             : orbitstats::defaultTolerance();

    std::vector<orbitstats::SegmentStatKind> stats;
    if (config.contains("stats")) {
        for (const Json& k : config["stats"]) stats.push_back(serialize::statKindFromJson(k, system.space));
    } else {
        stats = {orbitstats::WeakMeanStat{}, orbitstats::BesicovitchStat{}};
    }

    std::vector<std::pair<StatePoint, StatePoint>> pairs;
    if (config.contains("pairs")) {
        for (const Json& pj : config["pairs"])
            pairs.emplace_back(serialize::pointFromJson(pj.at("x")),
                               serialize::pointFromJson(pj.at("y")));
    } else {
        pairs.emplace_back(spaces::originPoint(system.space),
                           spaces::samplePoint(system.space, spaces::Uniform{}, deriveSeed(seed, 1)));
    }

    Json pairsJson = Json::array();
    Json series = Json::array();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        std::string pairId = "pair" + std::to_string(p);
        Json pj;
        pj["pairId"] = pairId;
        pj["x"] = serialize::pointToJson(pairs[p].first);
        pj["y"] = serialize::pointToJson(pairs[p].second);
        pairsJson.push_back(pj);

        systems::OrbitSegment ox = systems::orbitSegment(system, pairs[p].first, schedule.back());
        systems::OrbitSegment oy = systems::orbitSegment(system, pairs[p].second, schedule.back());
        for (const auto& kind : stats) {
            orbitstats::LimitEstimate estimate = orbitstats::estimateLimit(
                [&](std::size_t n) {
                    return orbitstats::segmentStat(kind, orbitstats::segmentPrefix(ox, n),
                                                   orbitstats::segmentPrefix(oy, n));
                },
                schedule, tailWindow, tolerance);
            Json sj;
            sj["pairId"] = pairId;
            sj["statKind"] = serialize::statKindToJson(kind);
            sj["estimate"] = serialize::limitEstimateToJson(estimate);
            series.push_back(sj);
            for (std::size_t i = 0; i < schedule.size(); ++i)
                out.rows.push_back({pairId, orbitstats::statKindName(kind), schedule[i],
                                    estimate.samples[i].value});
        }
    }

    out.effectiveConfig = Json{{"task", "metric"},
                               {"system", serialize::systemToJson(system)},
                               {"schedule", schedule},
                               {"tailWindow", tailWindow},
                               {"tolerance", serialize::rationalToJson(tolerance)},
                               {"pairs", pairsJson},
                               {"seed", seed}};
    Json statsJson = Json::array();
    for (const auto& kind : stats) statsJson.push_back(serialize::statKindToJson(kind));
    out.effectiveConfig["stats"] = statsJson;
    out.provenance = provenanceFor(system, schedule, seed);
    out.payload = Json{{"pairs", pairsJson}, {"series", series}};
    return out;
}

// --- density ---------------------------------------------------------------------

struct IntegerSetSpec {
    Json canonical;
    orbitstats::IntegerSetView view;
    std::vector<std::size_t> defaultSchedule;
};

IntegerSetSpec resolveIntegerSet(const Json& config) {
    IntegerSetSpec spec;
    Json setJson = config.value("set", Json{{"kind", "geometricBlocks"}, {"base", 4}, {"count", 10}});
    std::string kind = setJson.value("kind", std::string("geometricBlocks"));
    if (kind == "explicit") {
        std::vector<std::size_t> indices;
        for (const Json& i : setJson.at("indices")) indices.push_back(i.get<std::size_t>());
        auto horizon = setJson.at("horizon").get<std::size_t>();
        spec.view = orbitstats::explicitSet(indices, horizon);
        for (std::size_t n = 2; n < horizon; n *= 2) spec.defaultSchedule.push_back(n);
        spec.defaultSchedule.push_back(horizon);
    } else if (kind == "geometricBlocks") {
        // union over k <= count of [base^k, 2 * base^k)
        auto base = setJson.value("base", std::size_t{4});
        auto count = setJson.value("count", std::size_t{10});
        if (base < 3) configError("geometricBlocks: base must be >= 3");
        std::size_t horizon = 2;
        for (std::size_t k = 0; k < count; ++k) horizon *= base;
        spec.view.horizon = horizon * 2;
        spec.view.member = [base](std::size_t x) {
            if (x == 0) return false;
            std::size_t power = 1;
            while (power * base <= x) power *= base;  // power = base^floor(log_base x)
            return x < 2 * power;
        };
        std::size_t power = 1;
        for (std::size_t k = 1; k <= count; ++k) {
            power *= base;
            spec.defaultSchedule.push_back(power);       // density trough
            spec.defaultSchedule.push_back(2 * power);   // density peak
        }
        setJson = Json{{"kind", "geometricBlocks"}, {"base", base}, {"count", count}};
    } else {
        configError("unknown integer set kind '" + kind + "'");
    }
    spec.canonical = setJson;
    return spec;
}

TaskOutput runDensity(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    IntegerSetSpec set = resolveIntegerSet(config);
    std::uint64_t seed = effectiveSeed(config, opts, 0x20260819ULL);

    std::vector<std::size_t> schedule = set.defaultSchedule;
    if (!opts.scheduleCsv.empty()) {
        schedule = parseScheduleCsv(opts.scheduleCsv);
    } else if (config.contains("schedule")) {
        schedule.clear();
        for (const Json& n : config["schedule"]) schedule.push_back(n.get<std::size_t>());
    }
    if (schedule.empty() || schedule.back() > set.view.horizon)
        configError("density: schedule must be nonempty and stay within the horizon");

    unsigned tailWindow = config.value("tailWindow", orbitstats::kDefaultTailWindow);
    Rational tolerance = config.contains("tolerance")
                             ? serialize::rationalFromJson(config["tolerance"])
                             : orbitstats::defaultTolerance();

    orbitstats::LimitEstimate estimate =
        orbitstats::densityEstimate(set.view, schedule, tailWindow, tolerance);

    out.effectiveConfig = Json{{"task", "density"},
                               {"set", set.canonical},
                               {"schedule", schedule},
                               {"tailWindow", tailWindow},
                               {"tolerance", serialize::rationalToJson(tolerance)},
                               {"seed", seed}};
    out.provenance = Json{{"seed", seed}, {"schedule", schedule}, {"truncationBound", Json(nullptr)}};
    out.payload = Json{{"estimate", serialize::limitEstimateToJson(estimate)},
                       {"upperDensity", serialize::boundedToJson(orbitstats::upperDensity(estimate))},
                       {"lowerDensity", serialize::boundedToJson(orbitstats::lowerDensity(estimate))}};
    for (std::size_t i = 0; i < schedule.size(); ++i)
        out.rows.push_back({"set0", "density", schedule[i], estimate.samples[i].value});
    return out;
}

// --- probe / tuple-search / dichotomy ------------------------------------------------

TaskOutput runProbe(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    SystemDescriptor system = requireSystem(config);
    classify::ProbeConfig probe = resolveProbeConfig(config, opts, system);
    StatePoint x = config.contains("x") ? serialize::pointFromJson(config["x"])
                                        : spaces::originPoint(system.space);

    std::string mode = config.value("mode", std::string("weakMean"));
    classify::ProbeVerdict verdict;
    Json modeJson = Json{{"name", mode}};
    if (mode == "weakMean") {
        verdict = classify::probeWeakMeanEquicontinuousPoint(system, x, probe);
    } else if (mode == "inMean") {
        verdict = classify::probeEquicontinuousInMeanPoint(system, x, probe);
    } else if (mode == "density") {
        Rational t = config.contains("t") ? serialize::rationalFromJson(config["t"])
                                          : makeRational(1, 2);
        verdict = classify::probeDensityTEquicontinuity(system, x, t, probe);
        modeJson["t"] = serialize::rationalToJson(t);
    } else if (mode == "observable") {
        auto registry = orbitstats::observableRegistry(system.space);
        std::string name = config.value("observable", registry.front().name);
        const orbitstats::Observable* found = nullptr;
        for (const auto& f : registry)
            if (f.name == name) found = &f;
        if (!found) configError("unknown observable '" + name + "'");
        std::string obsMode = config.value("observableMode", std::string("mean"));
        if (obsMode != "mean" && obsMode != "inMean")
            configError("observableMode must be 'mean' or 'inMean'");
        verdict = classify::probeObservableEquicontinuity(
            system, x, *found, probe,
            obsMode == "mean" ? classify::ObservableProbeMode::mean
                              : classify::ObservableProbeMode::inMean);
        modeJson["observable"] = name;
        modeJson["observableMode"] = obsMode;
    } else {
        configError("unknown probe mode '" + mode + "'");
    }

    out.effectiveConfig = Json{{"task", "probe"},
                               {"system", serialize::systemToJson(system)},
                               {"x", serialize::pointToJson(x)},
                               {"mode", modeJson},
                               {"probe", serialize::probeConfigToJson(probe)},
                               {"seed", probe.seed}};
    out.provenance = provenanceFor(system, probe.schedule, probe.seed);
    out.payload = Json{{"mode", modeJson}, {"verdict", serialize::probeVerdictToJson(verdict)}};
    appendWitnessRows(out.rows, verdict.witnesses, "witness", mode);
    return out;
}

classify::TupleKind tupleKindFromName(const std::string& name) {
    if (name == "mean") return classify::TupleKind::meanTuple;
    if (name == "inMean") return classify::TupleKind::inMeanTuple;
    if (name == "weakInMean") return classify::TupleKind::weakInMeanTuple;
    if (name == "density") return classify::TupleKind::densityTuple;
    configError("unknown tuple kind '" + name + "'");
}

TaskOutput runTupleSearch(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    SystemDescriptor system = requireSystem(config);
    classify::ProbeConfig probe = resolveProbeConfig(config, opts, system);
    std::string kindName = config.value("kind", std::string("inMean"));
    classify::TupleKind kind = tupleKindFromName(kindName);

    std::vector<classify::TupleCandidate> rows = classify::searchSensitiveTuples(system, probe, kind);
    Json tuples = Json::array();
    for (const auto& row : rows) tuples.push_back(serialize::tupleCandidateToJson(row));

    out.effectiveConfig = Json{{"task", "tuple-search"},
                               {"system", serialize::systemToJson(system)},
                               {"kind", kindName},
                               {"probe", serialize::probeConfigToJson(probe)},
                               {"seed", probe.seed}};
    out.provenance = provenanceFor(system, probe.schedule, probe.seed);
    out.payload = Json{{"kind", kindName}, {"tuples", tuples}};
    for (std::size_t i = 0; i < rows.size(); ++i)
        appendWitnessRows(out.rows, rows[i].witnesses, "tuple" + std::to_string(i) + ".w", kindName);
    return out;
}

TaskOutput runDichotomy(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    SystemDescriptor system = requireSystem(config);
    classify::ProbeConfig probe = resolveProbeConfig(config, opts, system);
    std::string modeName = config.value("mode", std::string("strongMean"));
    if (modeName != "strongMean" && modeName != "strongInMean")
        configError("unknown sensitivity mode '" + modeName + "'");
    classify::SensitivityMode mode = modeName == "strongMean"
                                         ? classify::SensitivityMode::strongMean
                                         : classify::SensitivityMode::strongInMean;

    classify::DichotomyReport report = classify::dichotomyReport(system, probe, mode);

    out.effectiveConfig = Json{{"task", "dichotomy"},
                               {"system", serialize::systemToJson(system)},
                               {"mode", modeName},
                               {"probe", serialize::probeConfigToJson(probe)},
                               {"seed", probe.seed}};
    out.provenance = provenanceFor(system, probe.schedule, probe.seed);
    out.payload = serialize::dichotomyToJson(report);
    appendWitnessRows(out.rows, report.sensitivity.witnesses, "ball", modeName);
    return out;
}

// --- verify -----------------------------------------------------------------------

TaskOutput runVerifyTask(const Json& config, const CommonOpts& opts, const std::string& levelFlag) {
    TaskOutput out;
    std::string levelName = !levelFlag.empty() ? levelFlag : config.value("level", std::string("quick"));
    if (levelName != "quick" && levelName != "full")
        configError("verify level must be 'quick' or 'full'");
    verify::VerifyLevel level =
        levelName == "quick" ? verify::VerifyLevel::quick : verify::VerifyLevel::full;
    std::uint64_t seed = effectiveSeed(config, opts, 0x5EEDULL);

    verify::VerifyReport report = verify::runVerify(level, seed);
    Json suites = Json::array();
    for (const auto& s : report.suites) {
        Json sj;
        sj["name"] = s.name;
        sj["checksRun"] = s.checksRun;
        sj["failures"] = s.failures;
        sj["firstFailure"] = s.firstFailure;
        suites.push_back(sj);
        out.rows.push_back({s.name, "failures", s.checksRun, Rational(static_cast<long>(s.failures))});
        std::printf("%-28s %6zu checks  %zu failures  %s\n", s.name.c_str(), s.checksRun, s.failures,
                    s.passed() ? "pass" : ("FAIL: " + s.firstFailure).c_str());
    }
    std::printf("verify %s: %s (%zu checks)\n", levelName.c_str(),
                report.allPassed() ? "PASS" : "FAIL", report.totalChecks());

    out.effectiveConfig = Json{{"task", "verify"}, {"level", levelName}, {"seed", seed}};
    out.provenance = Json{{"seed", seed}, {"schedule", Json::array()}, {"truncationBound", Json(nullptr)}};
    out.payload = Json{{"level", levelName}, {"allPassed", report.allPassed()}, {"suites", suites}};
    out.verdictFailure = !report.allPassed();
    return out;
}

// --- sweep ------------------------------------------------------------------------

TaskOutput runSingleTask(const std::string& task, const Json& config, const CommonOpts& opts);

TaskOutput runSweep(const Json& config, const CommonOpts& opts) {
    TaskOutput out;
    Json items = config.value("items", Json::array());
    if (!items.is_array()) configError("sweep: 'items' must be an array");

    std::vector<Json> itemConfigs;
    for (const Json& item : items) {
        if (!item.contains("task")) configError("sweep items must each declare a task");
        if (item["task"] == "sweep") configError("sweep items cannot nest sweeps");
        Json withSeed = item;
        if (!withSeed.contains("seed") && config.contains("seed"))
            withSeed["seed"] = config["seed"];
        itemConfigs.push_back(std::move(withSeed));
    }

    std::vector<TaskOutput> results(itemConfigs.size());
    std::vector<std::exception_ptr> errors(itemConfigs.size());
    unsigned threads = opts.threads ? opts.threads
                                    : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = std::min<unsigned>(threads, std::max<std::size_t>(itemConfigs.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        CommonOpts itemOpts = opts;
        itemOpts.scheduleCsv.clear();  // per-item schedules come from the item config
        for (std::size_t i = next.fetch_add(1); i < itemConfigs.size(); i = next.fetch_add(1)) {
            try {
                results[i] = runSingleTask(itemConfigs[i]["task"].get<std::string>(),
                                           itemConfigs[i], itemOpts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::invalid_argument& err) {
            configError("sweep item " + std::to_string(i) + ": " + err.what());
        }
        // anything else (logic_error etc.) propagates unchanged
    }

    // merge in config order, regardless of completion order
    Json mergedItems = Json::array();
    Json effectiveItems = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        Json ij;
        ij["task"] = itemConfigs[i]["task"];
        ij["configHash"] = serialize::contentHash(results[i].effectiveConfig);
        ij["payload"] = results[i].payload;
        mergedItems.push_back(ij);
        effectiveItems.push_back(results[i].effectiveConfig);
        std::string prefix = "item" + std::to_string(i) + ":";
        for (CsvRow row : results[i].rows) {
            row.pairId = prefix + row.pairId;
            out.rows.push_back(std::move(row));
        }
        out.verdictFailure = out.verdictFailure || results[i].verdictFailure;
    }
    out.effectiveConfig = Json{{"task", "sweep"}, {"items", effectiveItems}};
    out.provenance = Json{{"seed", effectiveSeed(config, opts, 0x20260819ULL)},
                          {"schedule", Json::array()},
                          {"truncationBound", Json(nullptr)}};
    out.payload = Json{{"items", mergedItems}};
    return out;
}

TaskOutput runSingleTask(const std::string& task, const Json& config, const CommonOpts& opts) {
    if (task == "metric") return runMetric(config, opts);
    if (task == "density") return runDensity(config, opts);
    if (task == "probe") return runProbe(config, opts);
    if (task == "tuple-search") return runTupleSearch(config, opts);
    if (task == "dichotomy") return runDichotomy(config, opts);
    if (task == "verify") return runVerifyTask(config, opts, "");
    if (task == "sweep") return runSweep(config, opts);
    configError("unknown task '" + task + "'");
}

// --- output -----------------------------------------------------------------------

void writeOutputs(const TaskOutput& out, const CommonOpts& opts) {
    if (opts.format != "json" && opts.format != "csv" && opts.format != "both")
        configError("--format must be json, csv, or both");
    std::filesystem::path dir(opts.outDir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) configError("cannot create output directory '" + opts.outDir + "'");

    serialize::ResultRecord record =
        serialize::makeResultRecord(out.effectiveConfig, out.provenance, out.payload);
    if (opts.format == "json" || opts.format == "both") {
        std::ofstream json(dir / "result.json");
        if (!json) configError("cannot write result.json under '" + opts.outDir + "'");
        json << serialize::resultToJson(record).dump(2) << "\n";
    }
    if (opts.format == "csv" || opts.format == "both") {
        std::ofstream csv(dir / "table.csv");
        if (!csv) configError("cannot write table.csv under '" + opts.outDir + "'");
        csv << serialize::csvTable(out.rows);
    }
    std::printf("configHash=%s rows=%zu out=%s\n", record.configHash.c_str(), out.rows.size(),
                opts.outDir.c_str());
}

void addCommonOptions(CLI::App* sub, CommonOpts& opts, bool configRequired) {
    auto* configOpt = sub->add_option("--config", opts.configPath, "experiment config (JSON)");
    if (configRequired) configOpt->required();
    sub->add_option("--seed", opts.seed, "override the config seed");
    sub->add_option("--out", opts.outDir, "output directory (default: current)");
    sub->add_option("--format", opts.format, "json | csv | both (default: json)");
    sub->add_option("--threads", opts.threads, "sweep worker pool size");
    sub->add_option("--schedule", opts.scheduleCsv, "comma-separated n schedule override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact orbit-matching statistics and equicontinuity/sensitivity probes"};
    app.require_subcommand(1);

    static const char* kTasks[] = {"metric",    "density", "probe", "tuple-search",
                                   "dichotomy", "sweep",   "verify"};
    CommonOpts opts;
    std::string verifyLevel;
    for (const char* task : kTasks) {
        CLI::App* sub = app.add_subcommand(task, std::string("run the ") + task + " task");
        addCommonOptions(sub, opts, std::string(task) != "verify");
        if (std::string(task) == "verify")
            sub->add_option("--level", verifyLevel, "quick | full (default: quick)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 2;  // bad flags are configuration errors
    }

    try {
        std::string task = app.get_subcommands().front()->get_name();
        Json config = opts.configPath.empty() ? Json::object() : loadConfigFile(opts.configPath);
        task = taskOf(config, task);
        TaskOutput out = task == "verify" ? runVerifyTask(config, opts, verifyLevel)
                                          : runSingleTask(task, config, opts);
        writeOutputs(out, opts);
        return out.verdictFailure ? 1 : 0;
    } catch (const std::invalid_argument& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return 2;
    } catch (const std::logic_error& err) {
        std::fprintf(stderr, "internal invariant violation: %s\n", err.what());
        return 3;
    }
}
