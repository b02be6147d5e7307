#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "qdyn/certificates.hpp"
#include "qdyn/config.hpp"
#include "qdyn/cvitanovic.hpp"
#include "qdyn/oracles.hpp"

// Serialization uses nlohmann::json; CSV writers emit a header row and are
// byte-stable for fixed inputs (doubles print shortest-round-trip).

#include <nlohmann/json.hpp>

namespace qdyn {

using json = nlohmann::ordered_json;

json to_json(const RunConfig& cfg);
json to_json(const SeriesBound& sb);
json to_json(const RenormFixedPointApprox& a);
json to_json(const DeltaCertificate& cert);
json to_json(const AreaCertificate& cert);
json to_json(const DimensionEstimate& est);
json to_json(const CascadeOracle& o);
json to_json(const EscapeFraction& fr);
json to_json(const ExpansionSweepReport& rep);

RenormFixedPointApprox renorm_approx_from_json(const json& j);

void write_text_file(const std::string& path, const std::string& body);
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

std::string lemma_class_csv(const std::vector<LemmaClassRow>& rows);
std::string level_sums_csv(const LevelSums& levels);

// Human-readable certificate summary.
std::string summarize(const DeltaCertificate& cert);
std::string summarize(const AreaCertificate& cert);

// Per-run manifest: config snapshot, tool version, wall time.
json make_manifest(const std::string& command, const RunConfig& cfg, double wall_seconds);

extern const char* kToolVersion;

}  // namespace qdyn
