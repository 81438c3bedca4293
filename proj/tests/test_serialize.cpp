#include <doctest.h>

#include <stdexcept>
#include <variant>

#include "orbitmetrics/serialize.hpp"

using namespace orbitmetrics;
using namespace orbitmetrics::spaces;
using namespace orbitmetrics::systems;
using namespace orbitmetrics::serialize;

TEST_CASE("rationals round-trip as decimal strings") {
    for (const Rational& r : {goldenConvergentAngle(), Rational(0), makeRational(1, 4),
                              makeRational(-3, 7)}) {
        Json j = rationalToJson(r);
        CHECK(j["num"].is_string());
        CHECK(j["den"].is_string());
        CHECK(rationalFromJson(j) == r);
    }
    CHECK_THROWS_AS(rationalFromJson(Json{{"num", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(rationalFromJson(Json{{"num", 1}, {"den", 4}}), std::invalid_argument);
    CHECK_THROWS_AS(rationalFromJson(Json{{"num", "x"}, {"den", "4"}}), std::invalid_argument);

    BoundedValue v{makeRational(1, 3), makeRational(1, 128)};
    BoundedValue back = boundedFromJson(boundedToJson(v));
    CHECK(back.value == v.value);
    CHECK(back.error == v.error);
}

TEST_CASE("points of every kind round-trip") {
    auto roundTrip = [](const StatePoint& p) { return pointFromJson(pointToJson(p)); };

    StatePoint circle = makeCirclePoint(makeRational(3, 7));
    CHECK(pointToJson(circle)["kind"] == "circle");
    CHECK(distance(CircleSpace{}, circle, roundTrip(circle)).value == 0);

    StatePoint interval = makeIntervalPoint(makeRational(2, 5));
    CHECK(distance(IntervalSpace{}, interval, roundTrip(interval)).value == 0);

    SymbolStream stream({1, 0, 1}, RandomTail{99}, 2);
    StatePoint circleStream = makeCircleStreamPoint(stream.shifted(2));
    Json cj = pointToJson(circleStream);
    CHECK(cj["kind"] == "circleStream");
    CHECK(cj["offset"] == 2);
    CHECK(distance(CircleSpace{}, circleStream, roundTrip(circleStream)).value == 0);

    StatePoint symbolic = makeSymbolPoint(SymbolStream({0, 1, 2}, PeriodicTail{{2, 1}}, 3));
    Json sj = pointToJson(symbolic);
    CHECK(sj["kind"] == "symbolic");
    CHECK(sj["rule"]["kind"] == "periodic");
    CHECK(distance(SymbolicSpace{3}, symbolic, roundTrip(symbolic)).value == 0);

    StatePoint sturmianBacked = makeSymbolPoint(
        SymbolStream({}, SturmianTail{makeRational(2, 7), makeRational(1, 7)}, 2));
    CHECK(distance(SymbolicSpace{2}, sturmianBacked, roundTrip(sturmianBacked)).value == 0);

    StatePoint product = makeProductPoint(circle, symbolic);
    SpaceDescriptor prodSpace = makeProductSpace(CircleSpace{}, SymbolicSpace{3});
    CHECK(pointToJson(product)["kind"] == "product");
    CHECK(distance(prodSpace, product, roundTrip(product)).value == 0);

    CHECK_THROWS_AS(pointFromJson(Json{{"kind", "nope"}}), std::invalid_argument);
    CHECK_THROWS_AS(pointFromJson(Json{{"num", "1"}, {"den", "2"}}), std::invalid_argument);
}

TEST_CASE("spaces and systems round-trip and re-serialize to the same document") {
    for (const SpaceDescriptor& space :
         {SpaceDescriptor(CircleSpace{32}), SpaceDescriptor(IntervalSpace{}),
          SpaceDescriptor(SymbolicSpace{3, 16}),
          makeProductSpace(CircleSpace{}, SymbolicSpace{2, 64})}) {
        Json j = spaceToJson(space);
        SpaceDescriptor back = spaceFromJson(j);
        CHECK(sameSpace(space, back));
        CHECK(spaceToJson(back) == j);
    }

    Json rotJson = systemToJson(makeRotation(goldenConvergentAngle()));
    CHECK(rotJson["kind"] == "rotation");
    CHECK(rotJson["angle"]["num"].is_string());
    SystemDescriptor rotBack = systemFromJson(rotJson);
    CHECK(std::get<Rotation>(rotBack.kind).angle == goldenConvergentAngle());
    CHECK(systemToJson(rotBack) == rotJson);

    for (const SystemDescriptor& sys :
         {makeDoubling(), makeTent(), makeFullShift(3, 32), makeSturmian(makeRational(2, 7)),
          makeProductSystem(makeRotation(makeRational(1, 3)), makeDoubling())}) {
        Json j = systemToJson(sys);
        SystemDescriptor back = systemFromJson(j);
        CHECK(back.kind.index() == sys.kind.index());
        CHECK(sameSpace(back.space, sys.space));
        CHECK(systemToJson(back) == j);
    }

    // a missing space block falls back to the factory default
    SystemDescriptor bare = systemFromJson(Json{{"kind", "doubling"}});
    CHECK(sameSpace(bare.space, makeDoubling().space));
    CHECK_THROWS_AS(systemFromJson(Json{{"kind", "spiral"}}), std::invalid_argument);
}

TEST_CASE("stat kinds round-trip, resolving observables by registry name") {
    auto space = SpaceDescriptor(CircleSpace{});
    std::vector<orbitstats::SegmentStatKind> kinds = {
        orbitstats::WeakMeanStat{},
        orbitstats::BesicovitchStat{},
        orbitstats::SupPermStat{},
        orbitstats::ExceedanceStat{makeRational(1, 8)},
        orbitstats::BesicovitchExceedanceStat{makeRational(1, 5)},
        orbitstats::ObservableStat{orbitstats::coordinateObservable(space)},
        orbitstats::ObservableExceedanceStat{orbitstats::coordinateObservable(space),
                                             makeRational(1, 16)},
    };
    for (const auto& kind : kinds) {
        Json j = statKindToJson(kind);
        orbitstats::SegmentStatKind back = statKindFromJson(j, space);
        CHECK(statKindToJson(back) == j);
        CHECK(orbitstats::statKindName(back) == orbitstats::statKindName(kind));
    }
    CHECK_THROWS_AS(statKindFromJson(Json{{"kind", "observable"}, {"name", "ghost"}}, space),
                    std::invalid_argument);
    CHECK_THROWS_AS(statKindFromJson(Json{{"kind", "nope"}}, space), std::invalid_argument);
}

TEST_CASE("sample strategies round-trip") {
    for (const SampleStrategy& s :
         {SampleStrategy(Uniform{}), SampleStrategy(Dyadic{20}), SampleStrategy(RationalGrid{577}),
          SampleStrategy(PeriodicTailStrategy{6}), SampleStrategy(Stream{})}) {
        Json j = sampleStrategyToJson(s);
        CHECK(sampleStrategyToJson(sampleStrategyFromJson(j)) == j);
    }
    CHECK_THROWS_AS(sampleStrategyFromJson(Json{{"kind", "lattice"}}), std::invalid_argument);
}

TEST_CASE("probe configs round-trip and merge over defaults") {
    auto dbl = makeDoubling();
    classify::ProbeConfig c = classify::defaultProbeConfig(dbl);
    c.schedule = {16, 32, 64};
    c.adversarial = {makeCirclePoint(makeRational(1, 3))};
    c.seed = 77;
    Json j = probeConfigToJson(c);
    classify::ProbeConfig back = probeConfigFromJson(j, dbl);
    CHECK(probeConfigToJson(back) == j);

    // partial documents override only the named fields
    classify::ProbeConfig merged = probeConfigFromJson(Json{{"schedule", Json::array({16, 32})}}, dbl);
    CHECK(merged.schedule == std::vector<std::size_t>{16, 32});
    CHECK(merged.epsGrid == classify::defaultProbeConfig(dbl).epsGrid);
    CHECK(merged.seed == classify::defaultProbeConfig(dbl).seed);

    classify::ProbeConfig untouched = probeConfigFromJson(Json::object(), dbl);
    CHECK(probeConfigToJson(untouched) == probeConfigToJson(classify::defaultProbeConfig(dbl)));
}

TEST_CASE("verdict records embed witnesses and name every enum") {
    classify::Witness w{makeCirclePoint(Rational(0)), makeCirclePoint(makeRational(1, 4)), 64,
                        BoundedValue{makeRational(1, 4)}, "dyadic:20"};
    Json wj = witnessToJson(w);
    CHECK(wj["n"] == 64);
    CHECK(wj["origin"] == "dyadic:20");
    CHECK(rationalFromJson(wj["statistic"]["value"]) == makeRational(1, 4));

    classify::ProbeVerdict v;
    v.verdict = classify::VerdictKind::sensitiveWitnessed;
    v.witnesses = {w};
    v.achievedConstant = makeRational(1, 5);
    v.diagnostics = {classify::GridCellRecord{makeRational(1, 4), makeRational(1, 8), 4, 1, 0, false}};
    Json vj = probeVerdictToJson(v);
    CHECK(vj["verdict"] == "sensitive-witnessed");
    CHECK(rationalFromJson(vj["achievedConstant"]) == makeRational(1, 5));
    CHECK(vj["witnesses"].size() == 1);
    CHECK(vj["diagnostics"][0]["violations"] == 1);

    v.verdict = classify::VerdictKind::equicontinuousConsistent;
    v.achievedConstant.reset();
    v.witnesses.clear();
    CHECK(probeVerdictToJson(v)["achievedConstant"].is_null());

    classify::DichotomyReport d;
    d.side = classify::DichotomySide::sensitiveSide;
    d.mode = classify::SensitivityMode::strongInMean;
    d.achievedConstant = makeRational(1, 4);
    Json dj = dichotomyToJson(d);
    CHECK(dj["side"] == "sensitive-side");
    CHECK(dj["mode"] == "strongInMean");
    CHECK(dj["pointProbes"].is_array());
}

TEST_CASE("content hash is deterministic and frozen against an independent oracle") {
    // Oracles computed with python's json + a hand-rolled FNV-1a 64.
    Json doc;
    doc["kind"] = "rotation";
    doc["angle"] = Json{{"num", "1"}, {"den", "4"}};
    CHECK(contentHash(doc) == "7f3184918f27903c");
    CHECK(contentHash(Json("a")) == "d4272417d7c77eea");
    CHECK(contentHash(doc) == contentHash(doc));
    CHECK(contentHash(Json("b")) != contentHash(Json("a")));
}

TEST_CASE("result records cover payloads with the hash but not the timestamp") {
    Json config = Json{{"task", "metric"}, {"seed", 7}};
    Json provenance = Json{{"seed", 7}};
    Json payload = Json{{"rows", Json::array()}};
    ResultRecord r1 = makeResultRecord(config, provenance, payload);
    ResultRecord r2 = makeResultRecord(config, provenance, payload);
    CHECK(r1.configHash == r2.configHash);
    CHECK(r1.configHash == contentHash(config));
    CHECK(r1.payload.dump() == r2.payload.dump());
    CHECK(makeResultRecord(Json{{"task", "probe"}}, provenance, payload).configHash != r1.configHash);

    Json out = resultToJson(r1);
    CHECK(out["schemaVersion"] == kSchemaVersion);
    CHECK(out["toolVersion"] == kToolVersion);
    CHECK(out["configHash"] == r1.configHash);
    std::string stamp = out["timestamp"].get<std::string>();
    REQUIRE(stamp.size() == 20);
    CHECK(stamp[10] == 'T');
    CHECK(stamp[19] == 'Z');
}

TEST_CASE("csv rows flatten to the fixed column order") {
    CHECK(csvHeader() == "pairId,statKind,n,num,den,approx");
    CsvRow row{"pair0", "weakMean", 16, makeRational(1, 4)};
    CHECK(csvLine(row) == "pair0,weakMean,16,1,4,0.25");
    CsvRow quoted{"a,b", "exceedance", 4, makeRational(1, 3)};
    CHECK(csvLine(quoted) == "\"a,b\",exceedance,4,1,3,0.333333");
    std::string table = csvTable({row});
    CHECK(table == "pairId,statKind,n,num,den,approx\npair0,weakMean,16,1,4,0.25\n");
}
