#include "orbitmetrics/serialize.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>
#include <variant>

namespace orbitmetrics::serialize {

namespace {

using spaces::CirclePoint;
using spaces::CircleSpace;
using spaces::IntervalPoint;
using spaces::IntervalSpace;
using spaces::ProductPoint;
using spaces::ProductSpace;
using spaces::SampleStrategy;
using spaces::SpaceDescriptor;
using spaces::StatePoint;
using spaces::SymbolicSpace;
using spaces::SymbolPoint;
using spaces::SymbolStream;
using spaces::TailRule;
using systems::SystemDescriptor;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) fail(std::string("missing field '") + name + "'");
    return *it;
}

std::string kindOf(const Json& j) {
    const Json& k = field(j, "kind");
    if (!k.is_string()) fail("field 'kind' must be a string");
    return k.get<std::string>();
}

std::uint64_t getUnsigned(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(std::string("field '") + name + "' must be an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) fail(std::string("field '") + name + "' must be nonnegative");
    return v.get<std::uint64_t>();
}

std::vector<std::uint8_t> getSymbols(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_array()) fail(std::string("field '") + name + "' must be an array");
    std::vector<std::uint8_t> out;
    out.reserve(v.size());
    for (const Json& s : v) {
        if (!s.is_number_integer() && !s.is_number_unsigned()) fail(std::string("field '") + name + "' holds non-integer symbols");
        auto val = s.get<std::int64_t>();
        if (val < 0 || val > 255) fail(std::string("field '") + name + "' symbol out of range");
        out.push_back(static_cast<std::uint8_t>(val));
    }
    return out;
}

void streamFields(Json& j, const SymbolStream& s) {
    j["prefix"] = s.head();
    j["rule"] = tailRuleToJson(s.tail());
    j["alphabet"] = s.alphabet();
    j["offset"] = s.offset();
}

SymbolStream streamFromFields(const Json& j) {
    auto alphabet = static_cast<int>(getUnsigned(j, "alphabet"));
    SymbolStream s(getSymbols(j, "prefix"), tailRuleFromJson(field(j, "rule")), alphabet);
    std::uint64_t offset = j.contains("offset") ? getUnsigned(j, "offset") : 0;
    return offset ? s.shifted(offset) : s;
}

std::string modeName(classify::SensitivityMode mode) {
    return mode == classify::SensitivityMode::strongMean ? "strongMean" : "strongInMean";
}

Json cellToJson(const classify::GridCellRecord& c) {
    Json j;
    j["epsilon"] = rationalToJson(c.epsilon);
    j["delta"] = rationalToJson(c.delta);
    j["sampleCount"] = c.sampleCount;
    j["violations"] = c.violations;
    j["unresolved"] = c.unresolved;
    j["satisfied"] = c.satisfied;
    return j;
}

Json optionalRational(const std::optional<Rational>& r) {
    return r ? rationalToJson(*r) : Json(nullptr);
}

std::string csvField(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

}  // namespace

Json rationalToJson(const Rational& r) {
    Json j;
    j["num"] = numeratorString(r);
    j["den"] = denominatorString(r);
    return j;
}

Rational rationalFromJson(const Json& j) {
    const Json& num = field(j, "num");
    const Json& den = field(j, "den");
    if (!num.is_string() || !den.is_string()) fail("rational num/den must be decimal strings");
    return rationalFromParts(num.get<std::string>(), den.get<std::string>());
}

Json boundedToJson(const BoundedValue& v) {
    Json j;
    j["value"] = rationalToJson(v.value);
    j["error"] = rationalToJson(v.error);
    return j;
}

BoundedValue boundedFromJson(const Json& j) {
    return {rationalFromJson(field(j, "value")), rationalFromJson(field(j, "error"))};
}

Json tailRuleToJson(const TailRule& rule) {
    Json j;
    if (const auto* p = std::get_if<spaces::PeriodicTail>(&rule)) {
        j["kind"] = "periodic";
        j["word"] = p->word;
    } else if (const auto* r = std::get_if<spaces::RandomTail>(&rule)) {
        j["kind"] = "random";
        j["seed"] = r->seed;
    } else {
        const auto& s = std::get<spaces::SturmianTail>(rule);
        j["kind"] = "sturmian";
        j["angle"] = rationalToJson(s.angle);
        j["start"] = rationalToJson(s.start);
    }
    return j;
}

TailRule tailRuleFromJson(const Json& j) {
    std::string kind = kindOf(j);
    if (kind == "periodic") return spaces::PeriodicTail{getSymbols(j, "word")};
    if (kind == "random") return spaces::RandomTail{getUnsigned(j, "seed")};
    if (kind == "sturmian")
        return spaces::SturmianTail{rationalFromJson(field(j, "angle")),
                                    rationalFromJson(field(j, "start"))};
    fail("unknown tail rule kind '" + kind + "'");
}

Json pointToJson(const StatePoint& p) {
    Json j;
    if (const auto* c = std::get_if<CirclePoint>(&p)) {
        if (const auto* r = std::get_if<Rational>(&c->rep)) {
            j["kind"] = "circle";
            j["num"] = numeratorString(*r);
            j["den"] = denominatorString(*r);
        } else {
            j["kind"] = "circleStream";
            streamFields(j, std::get<SymbolStream>(c->rep));
        }
    } else if (const auto* iv = std::get_if<IntervalPoint>(&p)) {
        j["kind"] = "interval";
        j["num"] = numeratorString(iv->coord);
        j["den"] = denominatorString(iv->coord);
    } else if (const auto* s = std::get_if<SymbolPoint>(&p)) {
        j["kind"] = "symbolic";
        streamFields(j, s->stream);
    } else {
        const auto& prod = std::get<ProductPoint>(p);
        j["kind"] = "product";
        j["left"] = pointToJson(*prod.left);
        j["right"] = pointToJson(*prod.right);
    }
    return j;
}

StatePoint pointFromJson(const Json& j) {
    std::string kind = kindOf(j);
    if (kind == "circle") return spaces::makeCirclePoint(rationalFromJson(j));
    if (kind == "circleStream") return spaces::makeCircleStreamPoint(streamFromFields(j));
    if (kind == "interval") return spaces::makeIntervalPoint(rationalFromJson(j));
    if (kind == "symbolic") return spaces::makeSymbolPoint(streamFromFields(j));
    if (kind == "product")
        return spaces::makeProductPoint(pointFromJson(field(j, "left")),
                                        pointFromJson(field(j, "right")));
    fail("unknown point kind '" + kind + "'");
}

Json spaceToJson(const SpaceDescriptor& space) {
    Json j;
    if (const auto* c = std::get_if<CircleSpace>(&space)) {
        j["kind"] = "circle";
        j["streamDepth"] = c->streamDepth;
    } else if (std::get_if<IntervalSpace>(&space)) {
        j["kind"] = "interval";
    } else if (const auto* s = std::get_if<SymbolicSpace>(&space)) {
        j["kind"] = "symbolic";
        j["alphabet"] = s->alphabet;
        j["truncationDepth"] = s->truncationDepth;
    } else {
        const auto& prod = std::get<ProductSpace>(space);
        j["kind"] = "product";
        j["left"] = spaceToJson(*prod.left);
        j["right"] = spaceToJson(*prod.right);
    }
    return j;
}

SpaceDescriptor spaceFromJson(const Json& j) {
    std::string kind = kindOf(j);
    if (kind == "circle") return CircleSpace{static_cast<unsigned>(getUnsigned(j, "streamDepth"))};
    if (kind == "interval") return IntervalSpace{};
    if (kind == "symbolic")
        return SymbolicSpace{static_cast<int>(getUnsigned(j, "alphabet")),
                             static_cast<unsigned>(getUnsigned(j, "truncationDepth"))};
    if (kind == "product")
        return spaces::makeProductSpace(spaceFromJson(field(j, "left")),
                                        spaceFromJson(field(j, "right")));
    fail("unknown space kind '" + kind + "'");
}

Json systemToJson(const SystemDescriptor& system) {
    Json j;
    if (const auto* r = std::get_if<systems::Rotation>(&system.kind)) {
        j["kind"] = "rotation";
        j["angle"] = rationalToJson(r->angle);
    } else if (std::get_if<systems::Doubling>(&system.kind)) {
        j["kind"] = "doubling";
    } else if (std::get_if<systems::Tent>(&system.kind)) {
        j["kind"] = "tent";
    } else if (std::get_if<systems::FullShift>(&system.kind)) {
        j["kind"] = "fullShift";
    } else if (const auto* s = std::get_if<systems::Sturmian>(&system.kind)) {
        j["kind"] = "sturmian";
        j["angle"] = rationalToJson(s->angle);
    } else {
        const auto& prod = std::get<systems::ProductMap>(system.kind);
        j["kind"] = "product";
        j["left"] = systemToJson(*prod.left);
        j["right"] = systemToJson(*prod.right);
        return j;  // the product space is rebuilt from the factors
    }
    j["space"] = spaceToJson(system.space);
    return j;
}

SystemDescriptor systemFromJson(const Json& j) {
    std::string kind = kindOf(j);
    if (kind == "product")
        return systems::makeProductSystem(systemFromJson(field(j, "left")),
                                          systemFromJson(field(j, "right")));
    SystemDescriptor sys;
    if (kind == "rotation") {
        sys = systems::makeRotation(rationalFromJson(field(j, "angle")));
    } else if (kind == "doubling") {
        sys = systems::makeDoubling();
    } else if (kind == "tent") {
        sys = systems::makeTent();
    } else if (kind == "fullShift") {
        sys = systems::makeFullShift();
    } else if (kind == "sturmian") {
        sys = systems::makeSturmian(rationalFromJson(field(j, "angle")));
    } else {
        fail("unknown system kind '" + kind + "'");
    }
    if (j.contains("space")) sys.space = spaceFromJson(j["space"]);
    return sys;
}

Json statKindToJson(const orbitstats::SegmentStatKind& kind) {
    Json j;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, orbitstats::WeakMeanStat>) {
                j["kind"] = "weakMean";
            } else if constexpr (std::is_same_v<T, orbitstats::BesicovitchStat>) {
                j["kind"] = "besicovitch";
            } else if constexpr (std::is_same_v<T, orbitstats::SupPermStat>) {
                j["kind"] = "supPerm";
            } else if constexpr (std::is_same_v<T, orbitstats::ExceedanceStat>) {
                j["kind"] = "exceedance";
                j["epsilon"] = rationalToJson(k.epsilon);
            } else if constexpr (std::is_same_v<T, orbitstats::BesicovitchExceedanceStat>) {
                j["kind"] = "besicovitchExceedance";
                j["epsilon"] = rationalToJson(k.epsilon);
            } else if constexpr (std::is_same_v<T, orbitstats::ObservableStat>) {
                j["kind"] = "observable";
                j["name"] = k.f.name;
            } else {
                j["kind"] = "observableExceedance";
                j["name"] = k.f.name;
                j["delta"] = rationalToJson(k.delta);
            }
        },
        kind);
    return j;
}

orbitstats::SegmentStatKind statKindFromJson(const Json& j, const SpaceDescriptor& space) {
    std::string kind = kindOf(j);
    if (kind == "weakMean") return orbitstats::WeakMeanStat{};
    if (kind == "besicovitch") return orbitstats::BesicovitchStat{};
    if (kind == "supPerm") return orbitstats::SupPermStat{};
    if (kind == "exceedance") return orbitstats::ExceedanceStat{rationalFromJson(field(j, "epsilon"))};
    if (kind == "besicovitchExceedance")
        return orbitstats::BesicovitchExceedanceStat{rationalFromJson(field(j, "epsilon"))};
    if (kind == "observable" || kind == "observableExceedance") {
        const Json& name = field(j, "name");
        if (!name.is_string()) fail("observable name must be a string");
        for (const auto& f : orbitstats::observableRegistry(space)) {
            if (f.name != name.get<std::string>()) continue;
            if (kind == "observable") return orbitstats::ObservableStat{f};
            return orbitstats::ObservableExceedanceStat{f, rationalFromJson(field(j, "delta"))};
        }
        fail("unknown observable '" + name.get<std::string>() + "' for this space");
    }
    fail("unknown stat kind '" + kind + "'");
}

Json sampleStrategyToJson(const SampleStrategy& s) {
    Json j;
    if (std::get_if<spaces::Uniform>(&s)) {
        j["kind"] = "uniform";
    } else if (const auto* d = std::get_if<spaces::Dyadic>(&s)) {
        j["kind"] = "dyadic";
        j["depth"] = d->depth;
    } else if (const auto* g = std::get_if<spaces::RationalGrid>(&s)) {
        j["kind"] = "rationalGrid";
        j["modulus"] = g->modulus;
    } else if (const auto* p = std::get_if<spaces::PeriodicTailStrategy>(&s)) {
        j["kind"] = "periodicTail";
        j["period"] = p->period;
    } else {
        j["kind"] = "stream";
    }
    return j;
}

SampleStrategy sampleStrategyFromJson(const Json& j) {
    std::string kind = kindOf(j);
    if (kind == "uniform") return spaces::Uniform{};
    if (kind == "dyadic") return spaces::Dyadic{static_cast<unsigned>(getUnsigned(j, "depth"))};
    if (kind == "rationalGrid")
        return spaces::RationalGrid{static_cast<long>(getUnsigned(j, "modulus"))};
    if (kind == "periodicTail")
        return spaces::PeriodicTailStrategy{static_cast<unsigned>(getUnsigned(j, "period"))};
    if (kind == "stream") return spaces::Stream{};
    fail("unknown sample strategy kind '" + kind + "'");
}

namespace {

Json rationalArray(const std::vector<Rational>& values) {
    Json arr = Json::array();
    for (const auto& v : values) arr.push_back(rationalToJson(v));
    return arr;
}

std::vector<Rational> rationalVector(const Json& j, const char* name) {
    const Json& arr = field(j, name);
    if (!arr.is_array()) fail(std::string("field '") + name + "' must be an array");
    std::vector<Rational> out;
    for (const Json& v : arr) out.push_back(rationalFromJson(v));
    return out;
}

}  // namespace

Json probeConfigToJson(const classify::ProbeConfig& config) {
    Json j;
    j["epsGrid"] = rationalArray(config.epsGrid);
    j["deltaGrid"] = rationalArray(config.deltaGrid);
    j["schedule"] = config.schedule;
    j["tailWindow"] = config.tailWindow;
    j["tolerance"] = rationalToJson(config.tolerance);
    Json samplers = Json::array();
    for (const auto& s : config.samplers) samplers.push_back(sampleStrategyToJson(s));
    j["samplers"] = samplers;
    Json adversarial = Json::array();
    for (const auto& p : config.adversarial) adversarial.push_back(pointToJson(p));
    j["adversarial"] = adversarial;
    j["samplesPerBall"] = config.samplesPerBall;
    j["centerCount"] = config.centerCount;
    j["minWitnessN"] = config.minWitnessN;
    j["candidateConstants"] = rationalArray(config.candidateConstants);
    j["tGrid"] = rationalArray(config.tGrid);
    j["seed"] = config.seed;
    return j;
}

classify::ProbeConfig probeConfigFromJson(const Json& j, const SystemDescriptor& system) {
    classify::ProbeConfig c = classify::defaultProbeConfig(system);
    if (j.contains("epsGrid")) c.epsGrid = rationalVector(j, "epsGrid");
    if (j.contains("deltaGrid")) c.deltaGrid = rationalVector(j, "deltaGrid");
    if (j.contains("schedule")) {
        const Json& arr = field(j, "schedule");
        if (!arr.is_array()) fail("field 'schedule' must be an array");
        c.schedule.clear();
        for (const Json& n : arr) {
            if (!n.is_number_integer() && !n.is_number_unsigned()) fail("schedule entries must be integers");
            c.schedule.push_back(n.get<std::size_t>());
        }
    }
    if (j.contains("tailWindow")) c.tailWindow = static_cast<unsigned>(getUnsigned(j, "tailWindow"));
    if (j.contains("tolerance")) c.tolerance = rationalFromJson(j["tolerance"]);
    if (j.contains("samplers")) {
        const Json& arr = field(j, "samplers");
        if (!arr.is_array()) fail("field 'samplers' must be an array");
        c.samplers.clear();
        for (const Json& s : arr) c.samplers.push_back(sampleStrategyFromJson(s));
    }
    if (j.contains("adversarial")) {
        const Json& arr = field(j, "adversarial");
        if (!arr.is_array()) fail("field 'adversarial' must be an array");
        c.adversarial.clear();
        for (const Json& p : arr) c.adversarial.push_back(pointFromJson(p));
    }
    if (j.contains("samplesPerBall")) c.samplesPerBall = getUnsigned(j, "samplesPerBall");
    if (j.contains("centerCount")) c.centerCount = getUnsigned(j, "centerCount");
    if (j.contains("minWitnessN")) c.minWitnessN = getUnsigned(j, "minWitnessN");
    if (j.contains("candidateConstants")) c.candidateConstants = rationalVector(j, "candidateConstants");
    if (j.contains("tGrid")) c.tGrid = rationalVector(j, "tGrid");
    if (j.contains("seed")) c.seed = getUnsigned(j, "seed");
    return c;
}

Json limitEstimateToJson(const orbitstats::LimitEstimate& est) {
    Json j;
    j["schedule"] = est.schedule;
    Json samples = Json::array();
    for (const auto& s : est.samples) samples.push_back(boundedToJson(s));
    j["samples"] = samples;
    j["limsup"] = boundedToJson(est.limsupEstimate);
    j["liminf"] = boundedToJson(est.liminfEstimate);
    j["tailWindow"] = est.tailWindow;
    j["tolerance"] = rationalToJson(est.tolerance);
    j["converged"] = est.converged;
    return j;
}

Json witnessToJson(const classify::Witness& w) {
    Json j;
    j["a"] = pointToJson(w.a);
    j["b"] = pointToJson(w.b);
    j["n"] = w.n;
    j["statistic"] = boundedToJson(w.statistic);
    j["origin"] = w.origin;
    return j;
}

Json probeVerdictToJson(const classify::ProbeVerdict& v) {
    Json j;
    j["verdict"] = classify::verdictName(v.verdict);
    j["achievedConstant"] = optionalRational(v.achievedConstant);
    Json witnesses = Json::array();
    for (const auto& w : v.witnesses) witnesses.push_back(witnessToJson(w));
    j["witnesses"] = witnesses;
    Json cells = Json::array();
    for (const auto& c : v.diagnostics) cells.push_back(cellToJson(c));
    j["diagnostics"] = cells;
    return j;
}

Json tupleCandidateToJson(const classify::TupleCandidate& t) {
    Json j;
    j["anchor1"] = pointToJson(t.anchor1);
    j["anchor2"] = pointToJson(t.anchor2);
    j["epsilon"] = rationalToJson(t.epsilon);
    j["frequencyBound"] = rationalToJson(t.frequencyBound);
    Json witnesses = Json::array();
    for (const auto& w : t.witnesses) witnesses.push_back(witnessToJson(w));
    j["witnesses"] = witnesses;
    return j;
}

Json agreementToJson(const classify::AgreementReport& r) {
    Json j;
    j["agree"] = r.agree;
    j["resolutionInsufficient"] = r.resolutionInsufficient;
    j["mean"] = probeVerdictToJson(r.meanVerdict);
    j["inMean"] = probeVerdictToJson(r.inMeanVerdict);
    return j;
}

Json dichotomyToJson(const classify::DichotomyReport& r) {
    Json j;
    j["side"] = classify::dichotomySideName(r.side);
    j["mode"] = modeName(r.mode);
    j["achievedConstant"] = optionalRational(r.achievedConstant);
    j["sensitivity"] = probeVerdictToJson(r.sensitivity);
    Json probes = Json::array();
    for (const auto& p : r.pointProbes) probes.push_back(probeVerdictToJson(p));
    j["pointProbes"] = probes;
    return j;
}

Json densityEquivalenceToJson(const classify::DensityEquivalenceReport& r) {
    Json j;
    j["anyDisagreement"] = r.anyDisagreement;
    j["resolutionInsufficient"] = r.resolutionInsufficient;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json rj;
        rj["centerIndex"] = row.centerIndex;
        rj["weakMeanVerdict"] = classify::verdictName(row.weakMeanVerdict);
        Json densities = Json::array();
        for (const auto& [t, verdict] : row.densityVerdicts) {
            Json dj;
            dj["t"] = rationalToJson(t);
            dj["verdict"] = classify::verdictName(verdict);
            densities.push_back(dj);
        }
        rj["densityVerdicts"] = densities;
        rj["disagree"] = row.disagree;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j;
}

Json observableImplicationsToJson(const classify::ObservableImplicationReport& r) {
    Json j;
    j["weakMeanVerdict"] = classify::verdictName(r.weakMeanVerdict);
    j["anyViolation"] = r.anyViolation;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json rj;
        rj["observable"] = row.observableName;
        rj["verdict"] = classify::verdictName(row.observableVerdict);
        rj["violatesImplication"] = row.violatesImplication;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j;
}

std::string contentHash(const Json& j) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char byte : j.dump()) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

std::string utcTimestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

ResultRecord makeResultRecord(Json config, Json provenance, Json payload) {
    ResultRecord record;
    record.toolVersion = kToolVersion;
    record.timestamp = utcTimestamp();
    record.configHash = contentHash(config);
    record.config = std::move(config);
    record.provenance = std::move(provenance);
    record.payload = std::move(payload);
    return record;
}

Json resultToJson(const ResultRecord& record) {
    Json j;
    j["schemaVersion"] = kSchemaVersion;
    j["toolVersion"] = record.toolVersion;
    j["configHash"] = record.configHash;
    j["timestamp"] = record.timestamp;
    j["config"] = record.config;
    j["provenance"] = record.provenance;
    j["payload"] = record.payload;
    return j;
}

std::string csvHeader() { return "pairId,statKind,n,num,den,approx"; }

std::string csvLine(const CsvRow& row) {
    return csvField(row.pairId) + "," + csvField(row.statKind) + "," + std::to_string(row.n) + "," +
           numeratorString(row.value) + "," + denominatorString(row.value) + "," +
           approxDecimal(row.value);
}

std::string csvTable(const std::vector<CsvRow>& rows) {
    std::string out = csvHeader() + "\n";
    for (const auto& row : rows) out += csvLine(row) + "\n";
    return out;
}

}  // namespace orbitmetrics::serialize
