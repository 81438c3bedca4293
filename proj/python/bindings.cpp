#include <pybind11/pybind11.h>

#include <string>

#include "orbitmetrics/serialize.hpp"
#include "orbitmetrics/verify.hpp"

namespace py = pybind11;

namespace {

using namespace orbitmetrics;
using serialize::Json;

Json parseDoc(const std::string& text, const char* what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& err) {
        throw std::invalid_argument(std::string(what) + ": " + err.what());
    }
}

std::string distanceOp(const std::string& spaceJson, const std::string& xJson,
                       const std::string& yJson) {
    spaces::SpaceDescriptor space = serialize::spaceFromJson(parseDoc(spaceJson, "space"));
    BoundedValue d = spaces::distance(space, serialize::pointFromJson(parseDoc(xJson, "x")),
                                      serialize::pointFromJson(parseDoc(yJson, "y")));
    return serialize::boundedToJson(d).dump();
}

std::string orbitStatOp(const std::string& systemJson, const std::string& xJson,
                        const std::string& yJson, const std::string& statJson, std::size_t n) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    orbitstats::SegmentStatKind kind =
        serialize::statKindFromJson(parseDoc(statJson, "stat"), system.space);
    systems::OrbitSegment ox =
        systems::orbitSegment(system, serialize::pointFromJson(parseDoc(xJson, "x")), n);
    systems::OrbitSegment oy =
        systems::orbitSegment(system, serialize::pointFromJson(parseDoc(yJson, "y")), n);
    return serialize::boundedToJson(orbitstats::segmentStat(kind, ox, oy)).dump();
}

std::string orbitSeriesOp(const std::string& systemJson, const std::string& xJson,
                          const std::string& yJson, const std::string& statJson,
                          const std::string& scheduleJson) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    orbitstats::SegmentStatKind kind =
        serialize::statKindFromJson(parseDoc(statJson, "stat"), system.space);
    Json scheduleDoc = parseDoc(scheduleJson, "schedule");
    std::vector<std::size_t> schedule;
    for (const Json& n : scheduleDoc) schedule.push_back(n.get<std::size_t>());
    if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");
    systems::OrbitSegment ox = systems::orbitSegment(
        system, serialize::pointFromJson(parseDoc(xJson, "x")), schedule.back());
    systems::OrbitSegment oy = systems::orbitSegment(
        system, serialize::pointFromJson(parseDoc(yJson, "y")), schedule.back());
    orbitstats::LimitEstimate estimate = orbitstats::estimateLimit(
        [&](std::size_t n) {
            return orbitstats::segmentStat(kind, orbitstats::segmentPrefix(ox, n),
                                           orbitstats::segmentPrefix(oy, n));
        },
        schedule, orbitstats::kDefaultTailWindow, orbitstats::defaultTolerance());
    return serialize::limitEstimateToJson(estimate).dump();
}

classify::ProbeConfig probeFromText(const std::string& probeJson,
                                    const systems::SystemDescriptor& system) {
    classify::ProbeConfig config =
        serialize::probeConfigFromJson(parseDoc(probeJson, "probe"), system);
    classify::validateProbeConfig(system, config);
    return config;
}

std::string defaultProbeConfigOp(const std::string& systemJson) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    return serialize::probeConfigToJson(classify::defaultProbeConfig(system)).dump();
}

std::string probeOp(const std::string& systemJson, const std::string& xJson,
                    const std::string& probeJson, const std::string& mode,
                    const std::string& extraJson) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    spaces::StatePoint x = serialize::pointFromJson(parseDoc(xJson, "x"));
    classify::ProbeConfig config = probeFromText(probeJson, system);
    Json extra = extraJson.empty() ? Json::object() : parseDoc(extraJson, "extra");

    classify::ProbeVerdict verdict;
    if (mode == "weakMean") {
        verdict = classify::probeWeakMeanEquicontinuousPoint(system, x, config);
    } else if (mode == "inMean") {
        verdict = classify::probeEquicontinuousInMeanPoint(system, x, config);
    } else if (mode == "density") {
        Rational t = extra.contains("t") ? serialize::rationalFromJson(extra["t"])
                                         : makeRational(1, 2);
        verdict = classify::probeDensityTEquicontinuity(system, x, t, config);
    } else if (mode == "observable") {
        auto registry = orbitstats::observableRegistry(system.space);
        std::string name = extra.value("observable", registry.front().name);
        const orbitstats::Observable* found = nullptr;
        for (const auto& f : registry)
            if (f.name == name) found = &f;
        if (!found) throw std::invalid_argument("unknown observable '" + name + "'");
        std::string obsMode = extra.value("observableMode", std::string("mean"));
        if (obsMode != "mean" && obsMode != "inMean")
            throw std::invalid_argument("observableMode must be 'mean' or 'inMean'");
        verdict = classify::probeObservableEquicontinuity(
            system, x, *found, config,
            obsMode == "mean" ? classify::ObservableProbeMode::mean
                              : classify::ObservableProbeMode::inMean);
    } else {
        throw std::invalid_argument("unknown probe mode '" + mode + "'");
    }
    return serialize::probeVerdictToJson(verdict).dump();
}

std::string searchTuplesOp(const std::string& systemJson, const std::string& probeJson,
                           const std::string& kindName) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    classify::ProbeConfig config = probeFromText(probeJson, system);
    classify::TupleKind kind;
    if (kindName == "mean") kind = classify::TupleKind::meanTuple;
    else if (kindName == "inMean") kind = classify::TupleKind::inMeanTuple;
    else if (kindName == "weakInMean") kind = classify::TupleKind::weakInMeanTuple;
    else if (kindName == "density") kind = classify::TupleKind::densityTuple;
    else throw std::invalid_argument("unknown tuple kind '" + kindName + "'");
    Json rows = Json::array();
    for (const auto& row : classify::searchSensitiveTuples(system, config, kind))
        rows.push_back(serialize::tupleCandidateToJson(row));
    return rows.dump();
}

std::string dichotomyOp(const std::string& systemJson, const std::string& probeJson,
                        const std::string& modeName) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    classify::ProbeConfig config = probeFromText(probeJson, system);
    if (modeName != "strongMean" && modeName != "strongInMean")
        throw std::invalid_argument("unknown sensitivity mode '" + modeName + "'");
    classify::DichotomyReport report = classify::dichotomyReport(
        system, config,
        modeName == "strongMean" ? classify::SensitivityMode::strongMean
                                 : classify::SensitivityMode::strongInMean);
    return serialize::dichotomyToJson(report).dump();
}

std::string agreementOp(const std::string& systemJson, const std::string& probeJson) {
    systems::SystemDescriptor system = serialize::systemFromJson(parseDoc(systemJson, "system"));
    classify::ProbeConfig config = probeFromText(probeJson, system);
    return serialize::agreementToJson(classify::checkMeanVsInMeanAgreement(system, config)).dump();
}

std::string densityOp(const std::string& indicesJson, std::size_t horizon,
                      const std::string& scheduleJson) {
    Json indicesDoc = parseDoc(indicesJson, "indices");
    std::vector<std::size_t> indices;
    for (const Json& i : indicesDoc) indices.push_back(i.get<std::size_t>());
    Json scheduleDoc = parseDoc(scheduleJson, "schedule");
    std::vector<std::size_t> schedule;
    for (const Json& n : scheduleDoc) schedule.push_back(n.get<std::size_t>());
    orbitstats::LimitEstimate estimate =
        orbitstats::densityEstimate(orbitstats::explicitSet(indices, horizon), schedule,
                                    orbitstats::kDefaultTailWindow, orbitstats::defaultTolerance());
    Json out;
    out["estimate"] = serialize::limitEstimateToJson(estimate);
    out["upperDensity"] = serialize::boundedToJson(orbitstats::upperDensity(estimate));
    out["lowerDensity"] = serialize::boundedToJson(orbitstats::lowerDensity(estimate));
    return out.dump();
}

std::string verifyOp(const std::string& levelName, std::uint64_t seed) {
    if (levelName != "quick" && levelName != "full")
        throw std::invalid_argument("verify level must be 'quick' or 'full'");
    verify::VerifyReport report = verify::runVerify(
        levelName == "quick" ? verify::VerifyLevel::quick : verify::VerifyLevel::full, seed);
    Json suites = Json::array();
    for (const auto& s : report.suites) {
        Json sj;
        sj["name"] = s.name;
        sj["checksRun"] = s.checksRun;
        sj["failures"] = s.failures;
        sj["firstFailure"] = s.firstFailure;
        suites.push_back(sj);
    }
    Json out;
    out["level"] = levelName;
    out["allPassed"] = report.allPassed();
    out["suites"] = suites;
    return out.dump();
}

std::string contentHashOp(const std::string& docJson) {
    return serialize::contentHash(parseDoc(docJson, "document"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact orbit-matching statistics and equicontinuity/sensitivity probes";
    m.def("version", [] { return std::string(serialize::kToolVersion); });
    m.def("distance", &distanceOp, py::arg("space"), py::arg("x"), py::arg("y"),
          "exact distance with truncation error, JSON in/out");
    m.def("orbit_stat", &orbitStatOp, py::arg("system"), py::arg("x"), py::arg("y"),
          py::arg("stat"), py::arg("n"), "one segment statistic at length n");
    m.def("orbit_series", &orbitSeriesOp, py::arg("system"), py::arg("x"), py::arg("y"),
          py::arg("stat"), py::arg("schedule"), "limit estimate of a statistic over a schedule");
    m.def("default_probe_config", &defaultProbeConfigOp, py::arg("system"));
    m.def("probe", &probeOp, py::arg("system"), py::arg("x"), py::arg("probe"), py::arg("mode"),
          py::arg("extra") = std::string(), "pointwise equicontinuity/sensitivity probe");
    m.def("search_tuples", &searchTuplesOp, py::arg("system"), py::arg("probe"), py::arg("kind"));
    m.def("dichotomy", &dichotomyOp, py::arg("system"), py::arg("probe"), py::arg("mode"));
    m.def("agreement", &agreementOp, py::arg("system"), py::arg("probe"));
    m.def("density_estimate", &densityOp, py::arg("indices"), py::arg("horizon"),
          py::arg("schedule"), "natural density of an explicit integer set");
    m.def("verify", &verifyOp, py::arg("level") = std::string("quick"),
          py::arg("seed") = std::uint64_t{0x5EED},
          "run the self-check suites; returns per-suite results");
    m.def("content_hash", &contentHashOp, py::arg("document"));
}
