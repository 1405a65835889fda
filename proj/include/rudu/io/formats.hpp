#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rudu/oracle/exact.hpp"
#include "rudu/oran/scenario.hpp"
#include "rudu/pack/instance.hpp"
#include "rudu/pack/state.hpp"

namespace rudu::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

json read_json(const std::filesystem::path& path);
void write_json_atomic(const std::filesystem::path& path, const json& value);

/// Throws rudu::Error(invalid_argument) naming the first key not in `allowed`.
void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed,
                         const std::string& where);

// {"w_star": int, "items": [{"w": int, "h": int}, ...], "seed": int}
json instance_to_json(const pack::Instance& instance);
pack::Instance instance_from_json(const json& j);

/// Packing outcome. Placements also carry the item width, and the result
/// records w_star and h_star, so a file can be rendered on its own.
struct PackResult {
  std::vector<pack::Placement> placements;
  int h_tilde = 0;
  double reward = 0.0;
  std::optional<double> utilization;
  bool dead = false;
  int w_star = 0;
  double h_star = 0.0;
};

PackResult make_pack_result(const pack::PackState& state);
json pack_result_to_json(const PackResult& result);
PackResult pack_result_from_json(const json& j);

json oracle_result_to_json(const oracle::OracleResult& result, const pack::Instance& instance);

json region_to_json(const oran::Region& region);
oran::Region region_from_json(const json& j);

/// `id,x_km,y_km,mu_cpu,delta_cpu` with 24 optional load columns `h00..h23`.
std::string sites_to_csv(const std::vector<oran::Site>& sites, bool with_load = true);
std::vector<oran::Site> sites_from_csv(const std::string& text);

}  // namespace rudu::io
