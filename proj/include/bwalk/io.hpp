#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "bwalk/lattice.hpp"
#include "bwalk/surface.hpp"

namespace bwalk {

using Json = nlohmann::json;

Json diagram_to_json(const YoungDiagram& d);
YoungDiagram diagram_from_json(const Json& j);

Json config_to_json(const ParticleConfig& c);
ParticleConfig config_from_json(const Json& j);

// CSV "x,t,H", row-major in t then x, 17 significant digits. Metadata go in
// leading '#' comment lines.
void write_height_field_csv(const HeightField& f, const std::string& path,
                            const std::vector<std::string>& metadata = {});
HeightField read_height_field_csv(const std::string& path);

void write_ensemble_jsonl(const WalkEnsemble& w, const std::string& path,
                          const std::vector<std::string>& metadata = {});

BoundaryProfile read_boundary_profile_csv(const std::string& path);
void write_boundary_profile_csv(const BoundaryProfile& p, const std::string& path);

// Replayable run configuration: JSON object with a required "version" field;
// unknown fields are rejected.
struct RunConfig {
    Json data;

    static RunConfig from_file(const std::string& path,
                               const std::vector<std::string>& allowed_fields);
    uint64_t hash() const;  // FNV-1a over the canonical dump
    std::string metadata_line(uint64_t seed) const;
};

std::string format_g17(double v);

}  // namespace bwalk
