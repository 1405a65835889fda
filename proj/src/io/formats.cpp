#include "rudu/io/formats.hpp"

#include <fstream>
#include <sstream>

#include "rudu/error.hpp"

namespace rudu::io {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::missing_file, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + temp.string());
    out << content;
    if (!out) fail(ErrorKind::io, "failed writing " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

json read_json(const std::filesystem::path& path) {
  const auto text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, path.string() + ": " + e.what());
  }
}

void write_json_atomic(const std::filesystem::path& path, const json& value) {
  write_text_atomic(path, value.dump(2) + "\n");
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  require(object.is_object(), where + ": expected a JSON object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::invalid_argument, where + ": unknown key '" + key + "'");
  }
}

json instance_to_json(const pack::Instance& instance) {
  json items = json::array();
  for (const auto& item : instance.items) items.push_back({{"w", item.w}, {"h", item.h}});
  return {{"w_star", instance.w_star}, {"items", std::move(items)}, {"seed", instance.seed}};
}

pack::Instance instance_from_json(const json& j) {
  try {
    reject_unknown_keys(j, {"w_star", "items", "seed"}, "instance");
    pack::Instance instance;
    instance.w_star = j.at("w_star").get<int>();
    instance.seed = j.value("seed", std::uint64_t{0});
    for (const auto& item : j.at("items")) {
      instance.items.push_back({instance.size(), item.at("w").get<int>(), item.at("h").get<int>()});
    }
    return instance;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("instance: ") + e.what());
  }
}

PackResult make_pack_result(const pack::PackState& state) {
  PackResult result;
  result.placements = state.grid().placements();
  result.h_tilde = state.filled_height();
  result.reward = state.terminal_reward();
  result.utilization = pack::utilization(state);
  result.dead = !state.all_packed();
  result.w_star = state.width();
  result.h_star = state.lower_bound().to_double();
  return result;
}

json pack_result_to_json(const PackResult& result) {
  json placements = json::array();
  for (const auto& p : result.placements) {
    placements.push_back({{"item", p.item}, {"x", p.x}, {"w", p.w}, {"rows", p.rows}});
  }
  json out = {{"placements", std::move(placements)},
              {"h_tilde", result.h_tilde},
              {"reward", result.reward},
              {"status", result.dead ? "dead" : "packed"},
              {"w_star", result.w_star},
              {"h_star", result.h_star}};
  out["utilization"] = result.utilization ? json(*result.utilization) : json(nullptr);
  return out;
}

PackResult pack_result_from_json(const json& j) {
  try {
    PackResult result;
    for (const auto& p : j.at("placements")) {
      result.placements.push_back({p.at("item").get<int>(), p.at("x").get<int>(), p.value("w", 0),
                                   p.at("rows").get<std::vector<int>>()});
    }
    result.h_tilde = j.at("h_tilde").get<int>();
    result.reward = j.at("reward").get<double>();
    if (j.contains("utilization") && !j["utilization"].is_null()) {
      result.utilization = j["utilization"].get<double>();
    }
    result.dead = j.at("status").get<std::string>() == "dead";
    result.w_star = j.value("w_star", 0);
    result.h_star = j.value("h_star", 0.0);
    return result;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("packing result: ") + e.what());
  }
}

json oracle_result_to_json(const oracle::OracleResult& result, const pack::Instance& instance) {
  json witness = json::array();
  for (const auto& a : result.witness) witness.push_back({{"item", a.item}, {"x", a.x}});
  const auto bound = pack::h_star(instance);
  return {{"min_height", result.min_height},
          {"witness", std::move(witness)},
          {"nodes_expanded", result.nodes_expanded},
          {"reward", bound.to_double() / result.min_height}};
}

namespace {

json site_to_json(const oran::Site& s) {
  return {{"id", s.id}, {"x_km", s.position.x_km}, {"y_km", s.position.y_km},
          {"mu_cpu", s.mu_cpu}, {"delta_cpu", s.delta_cpu}, {"load_curve", s.load_curve}};
}

oran::Site site_from_json(const json& j) {
  oran::Site s;
  s.id = j.at("id").get<int>();
  s.position = {j.at("x_km").get<double>(), j.at("y_km").get<double>()};
  s.mu_cpu = j.at("mu_cpu").get<double>();
  s.delta_cpu = j.at("delta_cpu").get<double>();
  if (j.contains("load_curve")) s.load_curve = j["load_curve"].get<std::array<double, oran::kHours>>();
  s.validate();
  return s;
}

}  // namespace

json region_to_json(const oran::Region& region) {
  const auto& c = region.config;
  json config = {{"n_sites", c.n_sites}, {"n_dus", c.n_dus}, {"extent_x_km", c.extent_x_km},
                 {"extent_y_km", c.extent_y_km}, {"peak_mu_min", c.peak_mu_min},
                 {"peak_mu_max", c.peak_mu_max}, {"delta", c.delta}, {"capacity", c.capacity},
                 {"t_max", c.t_max}, {"w_star", c.w_star}, {"rus_per_du", c.rus_per_du}};
  json sites = json::array();
  for (const auto& s : region.sites) sites.push_back(site_to_json(s));
  json dus = json::array();
  for (const auto& d : region.dus) {
    dus.push_back({{"id", d.id}, {"x_km", d.position.x_km}, {"y_km", d.position.y_km},
                   {"capacity", d.capacity}, {"t_max", d.t_max}, {"w_star", d.w_star},
                   {"connected_rus", d.connected_rus}});
  }
  return {{"config", std::move(config)}, {"seed", region.seed}, {"sites", std::move(sites)},
          {"dus", std::move(dus)}};
}

oran::Region region_from_json(const json& j) {
  try {
    oran::Region region;
    const auto& c = j.at("config");
    auto& rc = region.config;
    rc.n_sites = c.at("n_sites").get<int>();
    rc.n_dus = c.at("n_dus").get<int>();
    rc.extent_x_km = c.at("extent_x_km").get<double>();
    rc.extent_y_km = c.at("extent_y_km").get<double>();
    rc.peak_mu_min = c.at("peak_mu_min").get<double>();
    rc.peak_mu_max = c.at("peak_mu_max").get<double>();
    rc.delta = c.at("delta").get<double>();
    rc.capacity = c.at("capacity").get<int>();
    rc.t_max = c.at("t_max").get<int>();
    rc.w_star = c.at("w_star").get<int>();
    rc.rus_per_du = c.at("rus_per_du").get<int>();
    region.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("sites")) region.sites.push_back(site_from_json(s));
    for (const auto& d : j.at("dus")) {
      oran::DUSite du;
      du.id = d.at("id").get<int>();
      du.position = {d.at("x_km").get<double>(), d.at("y_km").get<double>()};
      du.capacity = d.at("capacity").get<int>();
      du.t_max = d.at("t_max").get<int>();
      du.w_star = d.at("w_star").get<int>();
      du.connected_rus = d.at("connected_rus").get<std::vector<int>>();
      region.dus.push_back(std::move(du));
    }
    return region;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("region: ") + e.what());
  }
}

std::string sites_to_csv(const std::vector<oran::Site>& sites, bool with_load) {
  std::ostringstream out;
  out.precision(17);
  out << "id,x_km,y_km,mu_cpu,delta_cpu";
  if (with_load) {
    for (int h = 0; h < oran::kHours; ++h) out << ",h" << (h < 10 ? "0" : "") << h;
  }
  out << '\n';
  for (const auto& s : sites) {
    out << s.id << ',' << s.position.x_km << ',' << s.position.y_km << ',' << s.mu_cpu << ','
        << s.delta_cpu;
    if (with_load) {
      for (double v : s.load_curve) out << ',' << v;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<oran::Site> sites_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "sites CSV is empty");
  std::vector<oran::Site> sites;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    const std::string where = "sites CSV line " + std::to_string(line_no);
    require(fields.size() == 5 || fields.size() == 5 + oran::kHours,
            where + ": expected 5 or 29 columns");
    try {
      oran::Site s;
      s.id = std::stoi(fields[0]);
      s.position = {std::stod(fields[1]), std::stod(fields[2])};
      s.mu_cpu = std::stod(fields[3]);
      s.delta_cpu = std::stod(fields[4]);
      if (fields.size() > 5) {
        for (int h = 0; h < oran::kHours; ++h) s.load_curve[h] = std::stod(fields[5 + h]);
      }
      s.validate();
      sites.push_back(s);
    } catch (const std::logic_error&) {
      fail(ErrorKind::invalid_argument, where + ": malformed number");
    }
  }
  return sites;
}

}  // namespace rudu::io
