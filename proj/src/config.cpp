#include "sitcog/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "sitcog/csv.h"

namespace sitcog {

namespace {

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("bad boolean '" + std::string(text) + "' for key '" + std::string(key) + "'");
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Entry field(std::string key, T RunConfig::*member) {
  return {key,
          [member, key](RunConfig& c, std::string_view v) { c.*member = parse_value<T>(key, v); },
          [member](const RunConfig& c) { return csv::format(c.*member); }};
}

template <class Group, class T>
Entry field(std::string key, Group RunConfig::*group, T Group::*member) {
  return {key,
          [group, member, key](RunConfig& c, std::string_view v) { (c.*group).*member = parse_value<T>(key, v); },
          [group, member](const RunConfig& c) { return csv::format((c.*group).*member); }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    using C = RunConfig;
    std::vector<Entry> e;
    e.push_back(field("seed", &C::seed));
    e.push_back({"social", [](C& c, std::string_view v) { c.social = parse_bool("social", v); },
                 [](const C& c) { return std::string(c.social ? "true" : "false"); }});
    e.push_back(field("cycles", &C::cycles));
    e.push_back(field("sample_every", &C::sample_every));
    e.push_back(field("n_consumers", &C::n_consumers));

    e.push_back(field("n_types", &C::products, &ProductParams::n_types));
    e.push_back(field("replicas_per_type", &C::products, &ProductParams::replicas_per_type));
    e.push_back(field("min_type_distance", &C::products, &ProductParams::min_type_distance));
    e.push_back(field("type_attempts", &C::products, &ProductParams::type_attempts));
    e.push_back(field("utility_slope", &C::products, &ProductParams::utility_slope));

    e.push_back(field("grid_width", &C::space, &SpaceParams::grid_width));
    e.push_back(field("grid_height", &C::space, &SpaceParams::grid_height));
    e.push_back(field("field_radius", &C::space, &SpaceParams::field_radius));
    e.push_back(field("respawn_sigma", &C::space, &SpaceParams::respawn_sigma));

    e.push_back(field("perception_rows", &C::cognition, &CognitionParams::perception_rows));
    e.push_back(field("perception_cols", &C::cognition, &CognitionParams::perception_cols));
    e.push_back(field("conception_nodes", &C::cognition, &CognitionParams::conception_nodes));
    e.push_back(field("som_alpha0", &C::cognition, &CognitionParams::som_alpha0));
    e.push_back(field("som_alpha_decay", &C::cognition, &CognitionParams::som_alpha_decay));
    e.push_back(field("som_alpha_floor", &C::cognition, &CognitionParams::som_alpha_floor));
    e.push_back(field("som_radius_decay", &C::cognition, &CognitionParams::som_radius_decay));
    e.push_back(field("som_radius_floor", &C::cognition, &CognitionParams::som_radius_floor));
    e.push_back(field("conception_radius0", &C::cognition, &CognitionParams::conception_radius0));
    e.push_back(field("threshold_rate", &C::cognition, &CognitionParams::threshold_rate));
    e.push_back(field("initial_threshold", &C::cognition, &CognitionParams::initial_threshold));

    e.push_back(field("boredom_cycles", &C::agent, &AgentParams::boredom_cycles));
    e.push_back(field("frustration_count", &C::agent, &AgentParams::frustration_count));
    e.push_back(field("friend_strength_floor", &C::agent, &AgentParams::friend_strength_floor));
    e.push_back(field("friend_degree_max", &C::agent, &AgentParams::friend_degree_max));
    e.push_back(field("max_valuation", &C::agent, &AgentParams::max_valuation));
    e.push_back(field("consumption_cycles", &C::agent, &AgentParams::consumption_cycles));
    e.push_back(field("admiration_window", &C::agent, &AgentParams::admiration_window));
    e.push_back(field("experiential_rate", &C::agent, &AgentParams::experiential_rate));
    e.push_back(field("social_rate", &C::agent, &AgentParams::social_rate));
    e.push_back(field("perturbation", &C::agent, &AgentParams::perturbation));
    e.push_back(field("relocation_radius", &C::agent, &AgentParams::relocation_radius));
    e.push_back(field("navigation_max_steps", &C::agent, &AgentParams::navigation_max_steps));

    e.push_back(field("ws_degree", &C::network, &NetworkParams::ws_degree));
    e.push_back(field("ws_rewire", &C::network, &NetworkParams::ws_rewire));
    e.push_back(field("tie_initial", &C::network, &NetworkParams::tie_initial));
    e.push_back(field("tie_strengthen", &C::network, &NetworkParams::tie_strengthen));
    e.push_back(field("tie_decay", &C::network, &NetworkParams::tie_decay));
    e.push_back(field("tie_floor", &C::network, &NetworkParams::tie_floor));
    e.push_back(field("referral_strength", &C::network, &NetworkParams::referral_strength));

    e.push_back(field("coverage_cell_width", &C::analysis, &AnalysisParams::coverage_cell_width));
    e.push_back(field("transient_cycles", &C::analysis, &AnalysisParams::transient_cycles));
    e.push_back(field("kde_bandwidth", &C::analysis, &AnalysisParams::kde_bandwidth));
    return e;
  }();
  return entries;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

SomSchedule RunConfig::som_schedule() const {
  SomSchedule s;
  s.alpha0 = cognition.som_alpha0;
  s.alpha_decay = cognition.som_alpha_decay;
  s.alpha_floor = cognition.som_alpha_floor;
  s.radius_decay = cognition.som_radius_decay;
  s.radius_floor = cognition.som_radius_floor;
  return s;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  for (const auto& e : registry()) {
    if (e.key == key) {
      e.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : registry()) out.emplace_back(e.key, e.get(*this));
  return out;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.key);
  return out;
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad.emplace_back(key);
  };
  require(cycles > 0, "cycles");
  require(sample_every > 0 && cycles % std::max(sample_every, 1) == 0, "sample_every");
  require(n_consumers >= 1, "n_consumers");
  require(products.n_types >= 1, "n_types");
  require(products.replicas_per_type >= 1, "replicas_per_type");
  require(products.min_type_distance >= 0.0, "min_type_distance");
  require(products.type_attempts >= 1, "type_attempts");
  require(products.utility_slope > 0.0, "utility_slope");
  require(space.grid_width >= 1, "grid_width");
  require(space.grid_height >= 1, "grid_height");
  const long cells = static_cast<long>(space.grid_width) * space.grid_height;
  require(n_consumers <= cells, "n_consumers");
  require(n_products() <= cells, "replicas_per_type");
  require(space.field_radius >= 1, "field_radius");
  require(space.respawn_sigma >= 0.0, "respawn_sigma");
  require(cognition.perception_rows >= 1, "perception_rows");
  require(cognition.perception_cols >= 1, "perception_cols");
  require(cognition.conception_nodes >= 1, "conception_nodes");
  require(cognition.som_alpha0 > 0.0 && cognition.som_alpha0 <= 1.0, "som_alpha0");
  require(cognition.som_alpha_decay > 0.0 && cognition.som_alpha_decay <= 1.0, "som_alpha_decay");
  require(cognition.som_alpha_floor > 0.0 && cognition.som_alpha_floor <= 1.0, "som_alpha_floor");
  require(cognition.som_radius_decay > 0.0 && cognition.som_radius_decay <= 1.0, "som_radius_decay");
  require(cognition.som_radius_floor > 0.0, "som_radius_floor");
  require(cognition.threshold_rate >= 0.0 && cognition.threshold_rate <= 1.0, "threshold_rate");
  require(cognition.initial_threshold >= -1.0 && cognition.initial_threshold <= 1.0, "initial_threshold");
  require(agent.boredom_cycles >= 1, "boredom_cycles");
  require(agent.frustration_count >= 1, "frustration_count");
  require(agent.friend_degree_max >= 0, "friend_degree_max");
  require(agent.max_valuation >= 0.0, "max_valuation");
  require(agent.consumption_cycles >= 1, "consumption_cycles");
  require(agent.admiration_window >= 1, "admiration_window");
  require(agent.experiential_rate >= 0.0 && agent.experiential_rate <= 1.0, "experiential_rate");
  require(agent.social_rate >= 0.0 && agent.social_rate <= 1.0, "social_rate");
  require(agent.perturbation >= 0.0, "perturbation");
  require(agent.relocation_radius >= 1, "relocation_radius");
  require(agent.navigation_max_steps >= 1, "navigation_max_steps");
  require(network.ws_degree >= 2 && network.ws_degree % 2 == 0 && network.ws_degree < n_consumers, "ws_degree");
  require(network.ws_rewire >= 0.0 && network.ws_rewire <= 1.0, "ws_rewire");
  require(network.tie_initial > 0.0 && network.tie_initial <= 1.0, "tie_initial");
  require(network.tie_strengthen >= 0.0 && network.tie_strengthen <= 1.0, "tie_strengthen");
  require(network.tie_decay >= 0.0, "tie_decay");
  require(network.tie_floor >= 0.0 && network.tie_floor < 1.0, "tie_floor");
  require(network.referral_strength > 0.0 && network.referral_strength <= 1.0, "referral_strength");
  require(analysis.coverage_cell_width > 0.0, "coverage_cell_width");
  require(analysis.transient_cycles >= 0, "transient_cycles");
  return bad;
}

std::vector<std::string> RunConfig::warnings() const {
  // Reference densities: 40 consumers and 50 products on 165 x 165 cells.
  constexpr double kConsumerDensity = 40.0 / (165.0 * 165.0);
  constexpr double kProductDensity = 50.0 / (165.0 * 165.0);
  std::vector<std::string> out;
  const double cells = static_cast<double>(space.grid_width) * space.grid_height;
  const double cd = n_consumers / cells / kConsumerDensity;
  const double pd = n_products() / cells / kProductDensity;
  if (cd < 0.5 || cd > 1.5)
    out.push_back("consumer density is " + csv::format(cd) + "x the reference density");
  if (pd < 0.5 || pd > 1.5)
    out.push_back("product density is " + csv::format(pd) + "x the reference density");
  return out;
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::vector<std::string> unknown;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto keys = RunConfig::keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      unknown.emplace_back(key);
      continue;
    }
    config.set(key, trim(line.substr(eq + 1)));
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str());
}

std::string config_text(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.entries()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace sitcog
