#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "orbitmetrics/classify.hpp"

namespace orbitmetrics::serialize {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// All from-functions throw std::invalid_argument on malformed documents,
// naming the offending field. Rationals travel as decimal num/den strings;
// floats never appear in machine-readable output.

[[nodiscard]] Json rationalToJson(const Rational& r);
[[nodiscard]] Rational rationalFromJson(const Json& j);
[[nodiscard]] Json boundedToJson(const BoundedValue& v);
[[nodiscard]] BoundedValue boundedFromJson(const Json& j);

[[nodiscard]] Json tailRuleToJson(const spaces::TailRule& rule);
[[nodiscard]] spaces::TailRule tailRuleFromJson(const Json& j);
[[nodiscard]] Json pointToJson(const spaces::StatePoint& p);
[[nodiscard]] spaces::StatePoint pointFromJson(const Json& j);
[[nodiscard]] Json spaceToJson(const spaces::SpaceDescriptor& space);
[[nodiscard]] spaces::SpaceDescriptor spaceFromJson(const Json& j);
[[nodiscard]] Json systemToJson(const systems::SystemDescriptor& system);
[[nodiscard]] systems::SystemDescriptor systemFromJson(const Json& j);

[[nodiscard]] Json statKindToJson(const orbitstats::SegmentStatKind& kind);
/// Observable kinds are resolved by name against the space's registry.
[[nodiscard]] orbitstats::SegmentStatKind statKindFromJson(const Json& j,
                                                           const spaces::SpaceDescriptor& space);

[[nodiscard]] Json sampleStrategyToJson(const spaces::SampleStrategy& s);
[[nodiscard]] spaces::SampleStrategy sampleStrategyFromJson(const Json& j);

/// Missing fields fall back to the system's default probe configuration.
[[nodiscard]] Json probeConfigToJson(const classify::ProbeConfig& config);
[[nodiscard]] classify::ProbeConfig probeConfigFromJson(const Json& j,
                                                        const systems::SystemDescriptor& system);

[[nodiscard]] Json limitEstimateToJson(const orbitstats::LimitEstimate& est);
[[nodiscard]] Json witnessToJson(const classify::Witness& w);
[[nodiscard]] Json probeVerdictToJson(const classify::ProbeVerdict& v);
[[nodiscard]] Json tupleCandidateToJson(const classify::TupleCandidate& t);
[[nodiscard]] Json agreementToJson(const classify::AgreementReport& r);
[[nodiscard]] Json dichotomyToJson(const classify::DichotomyReport& r);
[[nodiscard]] Json densityEquivalenceToJson(const classify::DensityEquivalenceReport& r);
[[nodiscard]] Json observableImplicationsToJson(const classify::ObservableImplicationReport& r);

// --- result records -----------------------------------------------------------

/// 64-bit FNV-1a over the compact dump, as 16 hex digits; the content address
/// for config identity.
[[nodiscard]] std::string contentHash(const Json& j);
[[nodiscard]] std::string utcTimestamp();

/// The timestamp lives outside the hash-covered region: payloads from equal
/// configs and seeds must be byte-identical across runs.
struct ResultRecord {
    std::string toolVersion;
    std::string timestamp;
    std::string configHash;
    Json config;
    Json provenance;  // schedule, seed, truncation bounds
    Json payload;
};

[[nodiscard]] ResultRecord makeResultRecord(Json config, Json provenance, Json payload);
[[nodiscard]] Json resultToJson(const ResultRecord& record);

// --- CSV ------------------------------------------------------------------------

struct CsvRow {
    std::string pairId;
    std::string statKind;
    std::size_t n = 0;
    Rational value;
};

[[nodiscard]] std::string csvHeader();  // pairId,statKind,n,num,den,approx
[[nodiscard]] std::string csvLine(const CsvRow& row);
[[nodiscard]] std::string csvTable(const std::vector<CsvRow>& rows);

}  // namespace orbitmetrics::serialize
