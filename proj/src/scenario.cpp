#include "gridplan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gridplan/error.hpp"

namespace gridplan {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorKind::SchemaViolation, message); }
[[noreturn]] void invariant(const std::string& message) { throw Error(ErrorKind::InvariantViolation, message); }

double parse_double(const std::string& raw, const std::string& where) {
    std::string text = raw;
    text.erase(0, text.find_first_not_of(" \t\r"));
    text.erase(text.find_last_not_of(" \t\r") + 1);
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == ".inf" || lower == "+inf" || lower == "+.inf" || lower == "infinity") return kInf;
    if (lower == "-inf" || lower == "-.inf") return -kInf;
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) schema(where + ": not a number: '" + raw + "'");
    return value;
}

std::string path_of(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

YAML::Node child(const YAML::Node& node, const std::string& key, const std::string& where) {
    if (!node.IsMap()) schema(where + " must be a mapping");
    YAML::Node c = node[key];
    if (!c) schema("missing field " + path_of(where, key));
    return c;
}

double get_double(const YAML::Node& node, const std::string& key, const std::string& where) {
    YAML::Node c = child(node, key, where);
    if (!c.IsScalar()) schema(path_of(where, key) + " must be a number");
    return parse_double(c.Scalar(), path_of(where, key));
}

double get_double(const YAML::Node& node, const std::string& key, const std::string& where, double fallback) {
    if (!node[key]) return fallback;
    return get_double(node, key, where);
}

/// Quantity given under exactly one of several unit-suffixed keys.
double get_quantity(const YAML::Node& node, const std::string& base, const std::string& where,
                    std::initializer_list<std::pair<const char*, double>> units, std::optional<double> fallback = {}) {
    std::optional<double> found;
    for (const auto& [suffix, factor] : units) {
        const std::string key = base + suffix;
        if (node[key]) {
            if (found) schema(path_of(where, base) + " given in more than one unit");
            found = get_double(node, key, where) * factor;
        }
    }
    if (found) return *found;
    if (fallback) return *fallback;
    std::string keys;
    for (const auto& [suffix, factor] : units) keys += (keys.empty() ? "" : " or ") + base + suffix;
    schema("missing field " + path_of(where, keys));
}

std::string get_string(const YAML::Node& node, const std::string& key, const std::string& where) {
    YAML::Node c = child(node, key, where);
    if (!c.IsScalar()) schema(path_of(where, key) + " must be a string");
    return c.Scalar();
}

bool get_bool(const YAML::Node& node, const std::string& key, const std::string& where, bool fallback) {
    if (!node[key]) return fallback;
    const std::string text = get_string(node, key, where);
    if (text == "true" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "no" || text == "off") return false;
    schema(path_of(where, key) + " must be true or false, got '" + text + "'");
}

const std::pair<const char*, double> kGw{"_gw", 1000.0};
const std::pair<const char*, double> kMw{"_mw", 1.0};
const std::pair<const char*, double> kGwh{"_gwh", 1000.0};
const std::pair<const char*, double> kTwh{"_twh", 1e6};
const std::pair<const char*, double> kMwh{"_mwh", 1.0};

Technology parse_technology(const YAML::Node& n, const std::string& where) {
    Technology t;
    t.id = get_string(n, "id", where);
    const std::string w = where + "[" + t.id + "]";
    try {
        t.kind = tech_kind_from_string(get_string(n, "kind", w));
    } catch (const Error&) {
        schema(w + ".kind must be one of thermal, renewable, storage, reservoir, electrolysis");
    }
    t.overnight_cost = get_double(n, "overnight_cost", w, 0.0);
    t.overnight_cost_energy = get_double(n, "overnight_cost_energy", w, 0.0);
    t.fixed_om = get_double(n, "fixed_om", w, 0.0);
    t.lifetime = get_double(n, "lifetime", w, 1.0);
    t.interest_rate = get_double(n, "interest_rate", w, 0.0);
    t.efficiency = get_double(n, "efficiency", w, 1.0);
    t.efficiency_charge = get_double(n, "efficiency_charge", w, 1.0);
    t.fuel_cost = get_double(n, "fuel_cost", w, 0.0);
    t.carbon_content = get_double(n, "carbon_content", w, 0.0);
    t.availability = get_double(n, "availability", w, 1.0);
    t.marginal_cost_adder = get_double(n, "marginal_cost_adder", w, 0.0);
    t.marginal_cost_charge = get_double(n, "marginal_cost_charge", w, 0.0);
    t.gas_fired = get_bool(n, "gas_fired", w, false);
    t.coal_fired = get_bool(n, "coal_fired", w, false);
    t.wind = get_bool(n, "wind", w, false);
    t.counts_as_res = get_bool(n, "counts_as_res", w, false);
    return t;
}

void apply_sensitivities(Scenario& s) {
    const std::string focal = s.focal_zone().id;
    for (auto& b : s.bounds) {
        if (b.zone != focal) continue;
        const Technology* t = s.find_technology(b.tech);
        if (!t) continue;
        if (s.policy.coal_phase_out && t->coal_fired) {
            b.min = 0.0;
            b.max = 0.0;
        }
        if (s.policy.wind_cap_removed && t->wind) b.max = kInf;
    }
    if (s.policy.re_drought_week) {
        const int week = *s.policy.re_drought_week;
        const int first = (week - 1) * 168;
        const int last = week * 168;
        if (week < 1 || last > s.series.hours) {
            invariant("policy.re_drought_week " + std::to_string(week) + " lies outside the " +
                      std::to_string(s.series.hours) + "-hour horizon");
        }
        for (auto& [key, cf] : s.series.capacity_factor) {
            const auto dot = key.find('.');
            const Technology* t = dot == std::string::npos ? nullptr : s.find_technology(key.substr(dot + 1));
            if (!t || t->kind != TechKind::Renewable) continue;
            for (int h = first; h < last; ++h) cf[static_cast<std::size_t>(h)] = 0.0;
        }
    }
}

void check_length(const std::vector<double>& v, int hours, const std::string& what) {
    if (static_cast<int>(v.size()) != hours) {
        throw Error(ErrorKind::LengthMismatch, what + " has " + std::to_string(v.size()) + " entries, horizon is " +
                                                   std::to_string(hours));
    }
}

void check_finite(const std::vector<double>& v, const std::string& what) {
    for (std::size_t h = 0; h < v.size(); ++h) {
        if (!std::isfinite(v[h])) invariant(what + " hour " + std::to_string(h + 1) + " is not finite");
    }
}

}  // namespace

std::string_view to_string(TechKind kind) {
    switch (kind) {
        case TechKind::Thermal: return "thermal";
        case TechKind::Renewable: return "renewable";
        case TechKind::Storage: return "storage";
        case TechKind::Reservoir: return "reservoir";
        case TechKind::Electrolysis: return "electrolysis";
    }
    return "unknown";
}

TechKind tech_kind_from_string(const std::string& text) {
    for (TechKind k : {TechKind::Thermal, TechKind::Renewable, TechKind::Storage, TechKind::Reservoir,
                       TechKind::Electrolysis}) {
        if (text == to_string(k)) return k;
    }
    schema("unknown technology kind '" + text + "'");
}

const Zone& Scenario::focal_zone() const {
    for (const auto& z : zones)
        if (z.is_investment_zone) return z;
    invariant("no investment zone defined");
}

const Technology* Scenario::find_technology(const std::string& id) const {
    for (const auto& t : technologies)
        if (t.id == id) return &t;
    return nullptr;
}

const Technology& Scenario::technology(const std::string& id) const {
    if (const Technology* t = find_technology(id)) return *t;
    invariant("unknown technology " + id);
}

const CapacityBound* Scenario::find_bound(const std::string& zone, const std::string& tech) const {
    for (const auto& b : bounds)
        if (b.zone == zone && b.tech == tech) return &b;
    return nullptr;
}

const RolloutSpec& Scenario::active_rollout() const {
    auto it = rollouts.find(rollout);
    if (it == rollouts.end()) invariant("active rollout '" + rollout + "' is not defined");
    return it->second;
}

bool ScenarioOverrides::empty() const {
    return !ep_ratio_hours && !rollout && !gas_price && !carbon_price && !coal_phase_out && !wind_cap_removed &&
           !re_drought_week && !hp_additionality;
}

std::string ScenarioOverrides::describe() const {
    std::ostringstream out;
    auto sep = [&] { return out.tellp() > 0 ? " " : ""; };
    if (rollout) out << sep() << "rollout=" << *rollout;
    if (ep_ratio_hours) out << sep() << "ep_ratio_hours=" << format_number(*ep_ratio_hours);
    if (gas_price) out << sep() << "gas_price=" << format_number(*gas_price);
    if (carbon_price) out << sep() << "carbon_price=" << format_number(*carbon_price);
    if (coal_phase_out) out << sep() << "coal_phase_out=" << (*coal_phase_out ? "true" : "false");
    if (wind_cap_removed) out << sep() << "wind_cap_removed=" << (*wind_cap_removed ? "true" : "false");
    if (re_drought_week) out << sep() << "re_drought_week=" << *re_drought_week;
    if (hp_additionality) out << sep() << "hp_additionality=" << (*hp_additionality ? "true" : "false");
    return out.str();
}

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

CsvTable read_series_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) schema(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        if (cell != "hour") schema(path.string() + ": first header column must be 'hour'");
        while (std::getline(ss, cell, ',')) {
            if (cell.empty()) schema(path.string() + ": empty column name in header");
            if (std::find(table.header.begin(), table.header.end(), cell) != table.header.end()) {
                schema(path.string() + ": duplicate column " + cell);
            }
            table.header.push_back(cell);
        }
    }
    table.columns.resize(table.header.size());
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const std::string where = path.string() + " row " + std::to_string(row);
        const double hour = parse_double(cell, where + " column hour");
        if (hour != row) schema(where + ": hour index " + cell + " out of sequence (expected " + std::to_string(row) + ")");
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= table.header.size()) schema(where + ": more cells than header columns");
            table.columns[col].push_back(parse_double(cell, where + " column " + table.header[col]));
            ++col;
        }
        if (col != table.header.size()) schema(where + ": expected " + std::to_string(table.header.size()) + " values");
    }
    table.rows = row;
    return table;
}

void write_series_csv(const fs::path& path, const std::vector<std::string>& header,
                      const std::vector<const std::vector<double>*>& columns) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
    out << "hour";
    for (const auto& h : header) out << ',' << h;
    out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (std::size_t r = 0; r < rows; ++r) {
        out << (r + 1);
        for (const auto* c : columns) out << ',' << format_number((*c)[r]);
        out << '\n';
    }
}

double annuity_factor(double rate, double lifetime) {
    if (!(lifetime >= 1.0)) throw Error(ErrorKind::DomainError, "annuity lifetime must be >= 1, got " + format_number(lifetime));
    if (!(rate >= 0.0)) throw Error(ErrorKind::DomainError, "annuity rate must be >= 0, got " + format_number(rate));
    if (rate == 0.0) return 1.0 / lifetime;
    const double g = std::pow(1.0 + rate, lifetime);
    return rate * g / (g - 1.0);
}

double marginal_cost(const Technology& tech, const PolicySettings& policy) {
    if (!(tech.efficiency > 0.0)) throw Error(ErrorKind::DomainError, "technology " + tech.id + " has zero efficiency");
    const double fuel = tech.gas_fired ? policy.gas_price : tech.fuel_cost;
    return (fuel + tech.carbon_content * policy.carbon_price) / tech.efficiency + tech.marginal_cost_adder;
}

void validate(const Scenario& s) {
    if (s.hours_per_year < 1) invariant("hours_per_year must be positive");
    if (!(s.value_of_lost_load > 0.0)) invariant("value_of_lost_load must be positive");
    if (s.series.hours < 1) throw Error(ErrorKind::LengthMismatch, "horizon has no hours");

    std::set<std::string> zone_ids;
    int focal = 0;
    for (const auto& z : s.zones) {
        if (!zone_ids.insert(z.id).second) invariant("zone ids unique: duplicate " + z.id);
        focal += z.is_investment_zone;
    }
    if (focal != 1) invariant("exactly one investment zone required, found " + std::to_string(focal));
    const std::string focal_id = s.focal_zone().id;

    std::set<std::string> tech_ids;
    for (const auto& t : s.technologies) {
        const std::string w = "technology " + t.id;
        if (!tech_ids.insert(t.id).second) invariant("technology ids unique: duplicate " + t.id);
        if (!(t.efficiency > 0.0 && t.efficiency <= 1.0)) invariant(w + ": 0 < efficiency <= 1");
        if (t.kind == TechKind::Storage && !(t.efficiency_charge > 0.0 && t.efficiency_charge <= 1.0)) {
            invariant(w + ": 0 < efficiency_charge <= 1");
        }
        if (t.overnight_cost < 0 || t.overnight_cost_energy < 0 || t.fixed_om < 0 || t.fuel_cost < 0 ||
            t.marginal_cost_adder < 0 || t.marginal_cost_charge < 0 || t.carbon_content < 0) {
            invariant(w + ": costs >= 0");
        }
        if (!(t.lifetime >= 1.0)) invariant(w + ": lifetime >= 1");
        if (!(t.interest_rate >= 0.0)) invariant(w + ": interest_rate >= 0");
        if (!(t.availability >= 0.0 && t.availability <= 1.0)) invariant(w + ": 0 <= availability <= 1");
    }

    std::set<std::pair<std::string, std::string>> bound_keys;
    for (const auto& b : s.bounds) {
        const std::string w = "bound " + b.zone + "/" + b.tech;
        if (!zone_ids.count(b.zone)) invariant(w + " names unknown zone " + b.zone);
        if (!tech_ids.count(b.tech)) invariant(w + " names unknown technology " + b.tech);
        if (!bound_keys.insert({b.zone, b.tech}).second) invariant(w + " defined twice");
        if (!(b.min >= 0.0) || !(b.min <= b.max)) invariant(w + ": 0 <= min <= max");
        const Technology& t = s.technology(b.tech);
        if (t.kind == TechKind::Storage && (!(b.energy_min >= 0.0) || !(b.energy_min <= b.energy_max))) {
            invariant(w + ": 0 <= energy_min <= energy_max");
        }
        if (b.zone != focal_id && t.kind == TechKind::Renewable && !b.fixed()) {
            invariant(w + ": renewable capacity outside the investment zone must be fixed (min = max)");
        }
        if (t.kind == TechKind::Electrolysis) invariant(w + ": electrolysis capacity is set by policy.electrolysis_capacity");
    }

    std::set<std::pair<std::string, std::string>> links;
    for (const auto& l : s.trade) {
        const std::string w = "trade link " + l.from + "->" + l.to;
        if (!zone_ids.count(l.from) || !zone_ids.count(l.to)) invariant(w + " names an unknown zone");
        if (l.from == l.to) invariant(w + " connects a zone to itself");
        if (!(l.ntc >= 0.0)) invariant(w + ": ntc >= 0");
        if (!links.insert({std::min(l.from, l.to), std::max(l.from, l.to)}).second) invariant(w + " defined twice");
    }

    const int H = s.series.hours;
    std::set<std::string> load_zones;
    for (const auto& [zone, v] : s.series.load) {
        if (!zone_ids.count(zone)) invariant("load series for unknown zone " + zone);
        check_length(v, H, "load." + zone);
        check_finite(v, "load." + zone);
        load_zones.insert(zone);
    }
    if (load_zones != zone_ids) invariant("every zone needs a load series and every load series a zone");
    for (const auto& [key, v] : s.series.capacity_factor) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) schema("capacity factor column '" + key + "' is not zone.tech");
        const std::string zone = key.substr(0, dot);
        const std::string tech = key.substr(dot + 1);
        if (!zone_ids.count(zone) || !tech_ids.count(tech)) invariant("capacity factor column " + key + " names an unknown zone or technology");
        if (s.technology(tech).kind != TechKind::Renewable) invariant("capacity factor column " + key + " is not a renewable");
        check_length(v, H, "capacity_factor." + key);
        for (std::size_t h = 0; h < v.size(); ++h) {
            if (!(v[h] >= 0.0 && v[h] <= 1.0)) {
                invariant("capacity factor " + key + " hour " + std::to_string(h + 1) + " outside [0,1]");
            }
        }
    }
    for (const auto& b : s.bounds) {
        if (s.technology(b.tech).kind == TechKind::Renewable && b.max > 0.0 &&
            !s.series.capacity_factor.count(b.zone + "." + b.tech)) {
            invariant("renewable " + b.zone + "." + b.tech + " has a capacity bound but no capacity factor series");
        }
        if (s.technology(b.tech).kind == TechKind::Reservoir && b.max > 0.0 && !s.series.hydro_inflow.count(b.zone)) {
            invariant("reservoir in " + b.zone + " has no hydro inflow series");
        }
    }
    for (const auto& [zone, v] : s.series.hydro_inflow) {
        if (!zone_ids.count(zone)) invariant("hydro inflow series for unknown zone " + zone);
        check_length(v, H, "hydro_inflow." + zone);
        for (double x : v)
            if (!(x >= 0.0)) invariant("hydro inflow " + zone + " must be >= 0");
    }
    check_length(s.series.ev_profile, H, "ev_profile");
    for (double x : s.series.ev_profile)
        if (!(x >= 0.0)) invariant("ev_profile entries must be >= 0");
    check_length(s.series.temperature, H, "temperature");
    check_finite(s.series.temperature, "temperature");

    std::set<std::string> archetype_ids;
    for (const auto& a : s.heat.archetypes) {
        if (!archetype_ids.insert(a.id).second) invariant("archetype ids unique: duplicate " + a.id);
        if (!(a.annual_heat_demand >= 0.0)) invariant("archetype " + a.id + ": annual heat demand >= 0");
        auto it = s.series.heat_demand.find(a.id);
        if (it == s.series.heat_demand.end()) invariant("archetype " + a.id + " has no heat demand series");
        for (const auto& [name, r] : s.rollouts) {
            auto sh = a.shares.find(name);
            if (sh == a.shares.end()) invariant("archetype " + a.id + " has no shares for rollout " + name);
            const auto& v = sh->second;
            if (!(v.air >= 0.0 && v.air <= 1.0 && v.ground >= 0.0 && v.ground <= 1.0 && v.air + v.ground <= 1.0 + 1e-12)) {
                invariant("archetype " + a.id + " shares for rollout " + name + " must lie in [0,1]");
            }
        }
    }
    for (const auto& [id, v] : s.series.heat_demand) {
        if (!archetype_ids.count(id)) invariant("heat demand series for unknown archetype " + id);
        check_length(v, H, "heat_demand." + id);
        for (double x : v)
            if (!(x >= 0.0)) invariant("heat demand " + id + " must be >= 0");
    }
    if (!(s.heat.standing_loss >= 0.0 && s.heat.standing_loss < 1.0)) invariant("heat.standing_loss in [0,1)");

    for (const auto& [name, r] : s.rollouts) {
        const std::string w = "rollout " + name;
        if (name != r.name) invariant(w + " name mismatch");
        if (std::abs(r.share_air + r.share_ground - 1.0) > 1e-9) invariant(w + ": share_air + share_ground = 1");
        if (!(r.thermal_capacity > 0.0)) invariant(w + ": thermal_capacity > 0");
        if (!(r.yearly_heat >= 0.0)) invariant(w + ": yearly_heat >= 0");
    }
    s.active_rollout();

    const auto& p = s.policy;
    if (!(p.res_share_target >= 0.0 && p.res_share_target <= 1.0)) invariant("policy: 0 <= res_share_target <= 1");
    if (!(p.ep_ratio_hours >= 0.0)) invariant("policy: ep_ratio_hours >= 0");
    if (!(p.h2_conversion > 0.0 && p.h2_conversion <= 1.0)) invariant("policy: h2_conversion in (0,1]");
    if (!(p.electrolysis_capacity >= 0.0) || !(p.h2_demand >= 0.0) || !(p.ev_annual_energy >= 0.0)) {
        invariant("policy: electrolysis capacity, hydrogen demand and EV energy >= 0");
    }
    if (!(p.gas_price >= 0.0) || !(p.carbon_price >= 0.0)) invariant("policy: prices >= 0");
    if (p.bio_energy_budget && !(*p.bio_energy_budget >= 0.0)) invariant("policy: bio_energy_budget >= 0");
}

Scenario apply_overrides(Scenario s, const ScenarioOverrides& o) {
    if (o.ep_ratio_hours) s.policy.ep_ratio_hours = *o.ep_ratio_hours;
    if (o.rollout) s.rollout = *o.rollout;
    if (o.gas_price) s.policy.gas_price = *o.gas_price;
    if (o.carbon_price) s.policy.carbon_price = *o.carbon_price;
    if (o.coal_phase_out) s.policy.coal_phase_out = s.policy.coal_phase_out || *o.coal_phase_out;
    if (o.wind_cap_removed) s.policy.wind_cap_removed = s.policy.wind_cap_removed || *o.wind_cap_removed;
    if (o.re_drought_week) s.policy.re_drought_week = *o.re_drought_week;
    if (o.hp_additionality) s.policy.hp_additionality = *o.hp_additionality;
    validate(s);
    apply_sensitivities(s);
    validate(s);
    return s;
}

Scenario load_scenario(const fs::path& config_path, const ScenarioOverrides& overrides) {
    if (!fs::exists(config_path)) throw Error(ErrorKind::MissingFile, "config not found: " + config_path.string());
    YAML::Node root;
    try {
        root = YAML::LoadFile(config_path.string());
    } catch (const YAML::Exception& e) {
        schema(config_path.string() + ": " + e.what());
    }
    if (!root.IsMap()) schema(config_path.string() + ": top level must be a mapping");
    const fs::path base = config_path.parent_path();

    Scenario s;
    s.name = get_string(root, "name", "");
    s.hours_per_year = static_cast<int>(get_double(root, "hours_per_year", "", 8760));
    s.value_of_lost_load = get_double(root, "value_of_lost_load", "", 3000.0);

    const YAML::Node zones = child(root, "zones", "");
    if (!zones.IsSequence()) schema("zones must be a list");
    for (std::size_t i = 0; i < zones.size(); ++i) {
        const std::string w = "zones[" + std::to_string(i) + "]";
        s.zones.push_back(Zone{get_string(zones[i], "id", w), get_bool(zones[i], "investment", w, false)});
    }

    const YAML::Node techs = child(root, "technologies", "");
    if (!techs.IsSequence()) schema("technologies must be a list");
    for (std::size_t i = 0; i < techs.size(); ++i) {
        s.technologies.push_back(parse_technology(techs[i], "technologies[" + std::to_string(i) + "]"));
    }

    const YAML::Node bounds = child(root, "bounds", "");
    if (!bounds.IsSequence()) schema("bounds must be a list");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const YAML::Node& n = bounds[i];
        const std::string w = "bounds[" + std::to_string(i) + "]";
        CapacityBound b;
        b.zone = get_string(n, "zone", w);
        b.tech = get_string(n, "tech", w);
        const bool has_fixed = n["fixed_gw"] || n["fixed_mw"];
        if (has_fixed) {
            b.min = b.max = get_quantity(n, "fixed", w, {kGw, kMw});
        } else {
            b.min = get_quantity(n, "min", w, {kGw, kMw}, 0.0);
            b.max = get_quantity(n, "max", w, {kGw, kMw});
        }
        if (n["energy_fixed_gwh"] || n["energy_fixed_mwh"] || n["energy_fixed_twh"]) {
            b.energy_min = b.energy_max = get_quantity(n, "energy_fixed", w, {kGwh, kTwh, kMwh});
        } else {
            b.energy_min = get_quantity(n, "energy_min", w, {kGwh, kTwh, kMwh}, 0.0);
            b.energy_max = get_quantity(n, "energy_max", w, {kGwh, kTwh, kMwh}, 0.0);
        }
        s.bounds.push_back(b);
    }

    if (root["trade"]) {
        const YAML::Node trade = root["trade"];
        if (!trade.IsSequence()) schema("trade must be a list");
        for (std::size_t i = 0; i < trade.size(); ++i) {
            const std::string w = "trade[" + std::to_string(i) + "]";
            s.trade.push_back(TradeLink{get_string(trade[i], "from", w), get_string(trade[i], "to", w),
                                        get_quantity(trade[i], "ntc", w, {kGw, kMw})});
        }
    }

    const YAML::Node heat = child(root, "heat", "");
    s.heat.sink_temperature = get_double(heat, "sink_temperature", "heat", 50.0);
    s.heat.ground_source_temperature = get_double(heat, "ground_source_temperature", "heat", 10.0);
    s.heat.eta_air = get_double(heat, "eta_air", "heat", 0.35);
    s.heat.eta_ground = get_double(heat, "eta_ground", "heat", 0.45);
    s.heat.standing_loss = get_double(heat, "standing_loss", "heat", 0.0);
    const YAML::Node archetypes = child(heat, "archetypes", "heat");
    if (!archetypes.IsSequence()) schema("heat.archetypes must be a list");
    for (std::size_t i = 0; i < archetypes.size(); ++i) {
        const YAML::Node& n = archetypes[i];
        const std::string w = "heat.archetypes[" + std::to_string(i) + "]";
        Archetype a;
        a.id = get_string(n, "id", w);
        a.annual_heat_demand = get_quantity(n, "annual_heat_demand", w, {kTwh, kMwh});
        const YAML::Node shares = child(n, "shares", w);
        if (!shares.IsMap()) schema(w + ".shares must be a mapping rollout -> {air, ground}");
        for (const auto& kv : shares) {
            const std::string rollout = kv.first.as<std::string>();
            const std::string ws = w + ".shares." + rollout;
            a.shares[rollout] = ArchetypeShare{get_double(kv.second, "air", ws), get_double(kv.second, "ground", ws)};
        }
        s.heat.archetypes.push_back(std::move(a));
    }

    const YAML::Node rollouts = child(root, "rollouts", "");
    if (!rollouts.IsMap()) schema("rollouts must be a mapping name -> spec");
    for (const auto& kv : rollouts) {
        RolloutSpec r;
        r.name = kv.first.as<std::string>();
        const std::string w = "rollouts." + r.name;
        const YAML::Node& n = kv.second;
        r.n_heat_pumps = get_double(n, "n_heat_pumps_million", w, 0.0);
        r.power_rating_el = get_quantity(n, "power_rating", w, {kGw, kMw}, 0.0);
        r.thermal_capacity = get_quantity(n, "thermal_capacity", w, {kGw, kMw});
        r.share_air = get_double(n, "share_air", w, 0.8);
        r.share_ground = get_double(n, "share_ground", w, 0.2);
        r.yearly_heat = get_quantity(n, "yearly_heat", w, {kTwh, kMwh});
        s.rollouts[r.name] = r;
    }
    s.rollout = get_string(root, "rollout", "");

    const YAML::Node policy = child(root, "policy", "");
    auto& p = s.policy;
    p.res_share_target = get_double(policy, "res_share_target", "policy", 0.8);
    p.hp_additionality = get_bool(policy, "hp_additionality", "policy", true);
    p.gas_price = get_double(policy, "gas_price", "policy");
    p.carbon_price = get_double(policy, "carbon_price", "policy");
    p.ep_ratio_hours = get_double(policy, "ep_ratio_hours", "policy");
    p.electrolysis_capacity = get_quantity(policy, "electrolysis_capacity", "policy", {kGw, kMw}, 0.0);
    p.h2_demand = get_quantity(policy, "h2_demand", "policy", {kTwh, kMwh}, 0.0);
    p.h2_conversion = get_double(policy, "h2_conversion", "policy", 0.71);
    p.ev_annual_energy = get_quantity(policy, "ev_annual_energy", "policy", {kTwh, kMwh}, 0.0);
    p.coal_phase_out = get_bool(policy, "coal_phase_out", "policy", false);
    p.wind_cap_removed = get_bool(policy, "wind_cap_removed", "policy", false);
    if (policy["re_drought_week"] && !policy["re_drought_week"].IsNull()) {
        p.re_drought_week = static_cast<int>(get_double(policy, "re_drought_week", "policy"));
    }
    if (policy["bio_energy_budget_twh"] || policy["bio_energy_budget_mwh"]) {
        p.bio_energy_budget = get_quantity(policy, "bio_energy_budget", "policy", {kTwh, kMwh});
    }

    const YAML::Node series = child(root, "series", "");
    auto csv = [&](const std::string& key) {
        const fs::path rel = get_string(series, key, "series");
        return read_series_csv(rel.is_absolute() ? rel : base / rel);
    };
    const CsvTable load = csv("load");
    s.series.hours = load.rows;
    for (std::size_t c = 0; c < load.header.size(); ++c) s.series.load[load.header[c]] = load.columns[c];
    const CsvTable cf = csv("capacity_factors");
    for (std::size_t c = 0; c < cf.header.size(); ++c) s.series.capacity_factor[cf.header[c]] = cf.columns[c];
    if (series["hydro_inflow"]) {
        const CsvTable inflow = csv("hydro_inflow");
        for (std::size_t c = 0; c < inflow.header.size(); ++c) s.series.hydro_inflow[inflow.header[c]] = inflow.columns[c];
    }
    const CsvTable ev = csv("ev_profile");
    if (ev.header.size() != 1) schema("series.ev_profile must have exactly one data column");
    s.series.ev_profile = ev.columns[0];
    const CsvTable hd = csv("heat_demand");
    for (std::size_t c = 0; c < hd.header.size(); ++c) s.series.heat_demand[hd.header[c]] = hd.columns[c];
    const CsvTable temp = csv("temperature");
    if (temp.header.size() != 1) schema("series.temperature must have exactly one data column");
    s.series.temperature = temp.columns[0];
    // the declared horizon wins; every series is then checked against it
    if (root["horizon_hours"]) s.series.hours = static_cast<int>(get_double(root, "horizon_hours", ""));

    return apply_overrides(std::move(s), overrides);
}

void save_scenario(const Scenario& s, const fs::path& dir) {
    fs::create_directories(dir);
    YAML::Emitter y;
    y.SetDoublePrecision(17);
    auto num = [](double v) { return format_number(v); };
    y << YAML::BeginMap;
    y << YAML::Key << "name" << YAML::Value << s.name;
    y << YAML::Key << "hours_per_year" << YAML::Value << s.hours_per_year;
    y << YAML::Key << "horizon_hours" << YAML::Value << s.series.hours;
    y << YAML::Key << "value_of_lost_load" << YAML::Value << num(s.value_of_lost_load);

    y << YAML::Key << "zones" << YAML::Value << YAML::BeginSeq;
    for (const auto& z : s.zones) {
        y << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << z.id << YAML::Key << "investment"
          << YAML::Value << z.is_investment_zone << YAML::EndMap;
    }
    y << YAML::EndSeq;

    y << YAML::Key << "technologies" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.technologies) {
        y << YAML::BeginMap;
        y << YAML::Key << "id" << YAML::Value << t.id;
        y << YAML::Key << "kind" << YAML::Value << std::string(to_string(t.kind));
        y << YAML::Key << "overnight_cost" << YAML::Value << num(t.overnight_cost);
        y << YAML::Key << "overnight_cost_energy" << YAML::Value << num(t.overnight_cost_energy);
        y << YAML::Key << "fixed_om" << YAML::Value << num(t.fixed_om);
        y << YAML::Key << "lifetime" << YAML::Value << num(t.lifetime);
        y << YAML::Key << "interest_rate" << YAML::Value << num(t.interest_rate);
        y << YAML::Key << "efficiency" << YAML::Value << num(t.efficiency);
        y << YAML::Key << "efficiency_charge" << YAML::Value << num(t.efficiency_charge);
        y << YAML::Key << "fuel_cost" << YAML::Value << num(t.fuel_cost);
        y << YAML::Key << "carbon_content" << YAML::Value << num(t.carbon_content);
        y << YAML::Key << "availability" << YAML::Value << num(t.availability);
        y << YAML::Key << "marginal_cost_adder" << YAML::Value << num(t.marginal_cost_adder);
        y << YAML::Key << "marginal_cost_charge" << YAML::Value << num(t.marginal_cost_charge);
        y << YAML::Key << "gas_fired" << YAML::Value << t.gas_fired;
        y << YAML::Key << "coal_fired" << YAML::Value << t.coal_fired;
        y << YAML::Key << "wind" << YAML::Value << t.wind;
        y << YAML::Key << "counts_as_res" << YAML::Value << t.counts_as_res;
        y << YAML::EndMap;
    }
    y << YAML::EndSeq;

    y << YAML::Key << "bounds" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : s.bounds) {
        y << YAML::Flow << YAML::BeginMap;
        y << YAML::Key << "zone" << YAML::Value << b.zone << YAML::Key << "tech" << YAML::Value << b.tech;
        y << YAML::Key << "min_mw" << YAML::Value << num(b.min) << YAML::Key << "max_mw" << YAML::Value << num(b.max);
        y << YAML::Key << "energy_min_mwh" << YAML::Value << num(b.energy_min);
        y << YAML::Key << "energy_max_mwh" << YAML::Value << num(b.energy_max);
        y << YAML::EndMap;
    }
    y << YAML::EndSeq;

    y << YAML::Key << "trade" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : s.trade) {
        y << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << l.from << YAML::Key << "to"
          << YAML::Value << l.to << YAML::Key << "ntc_mw" << YAML::Value << num(l.ntc) << YAML::EndMap;
    }
    y << YAML::EndSeq;

    y << YAML::Key << "series" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "load" << YAML::Value << "load.csv";
    y << YAML::Key << "capacity_factors" << YAML::Value << "capacity_factors.csv";
    y << YAML::Key << "hydro_inflow" << YAML::Value << "hydro_inflow.csv";
    y << YAML::Key << "ev_profile" << YAML::Value << "ev_profile.csv";
    y << YAML::Key << "heat_demand" << YAML::Value << "heat_demand.csv";
    y << YAML::Key << "temperature" << YAML::Value << "temperature.csv";
    y << YAML::EndMap;

    y << YAML::Key << "heat" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "sink_temperature" << YAML::Value << num(s.heat.sink_temperature);
    y << YAML::Key << "ground_source_temperature" << YAML::Value << num(s.heat.ground_source_temperature);
    y << YAML::Key << "eta_air" << YAML::Value << num(s.heat.eta_air);
    y << YAML::Key << "eta_ground" << YAML::Value << num(s.heat.eta_ground);
    y << YAML::Key << "standing_loss" << YAML::Value << num(s.heat.standing_loss);
    y << YAML::Key << "archetypes" << YAML::Value << YAML::BeginSeq;
    for (const auto& a : s.heat.archetypes) {
        y << YAML::BeginMap;
        y << YAML::Key << "id" << YAML::Value << a.id;
        y << YAML::Key << "annual_heat_demand_mwh" << YAML::Value << num(a.annual_heat_demand);
        y << YAML::Key << "shares" << YAML::Value << YAML::BeginMap;
        for (const auto& [name, sh] : a.shares) {
            y << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "air" << YAML::Value
              << num(sh.air) << YAML::Key << "ground" << YAML::Value << num(sh.ground) << YAML::EndMap;
        }
        y << YAML::EndMap << YAML::EndMap;
    }
    y << YAML::EndSeq << YAML::EndMap;

    y << YAML::Key << "rollouts" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, r] : s.rollouts) {
        y << YAML::Key << name << YAML::Value << YAML::BeginMap;
        y << YAML::Key << "n_heat_pumps_million" << YAML::Value << num(r.n_heat_pumps);
        y << YAML::Key << "power_rating_mw" << YAML::Value << num(r.power_rating_el);
        y << YAML::Key << "thermal_capacity_mw" << YAML::Value << num(r.thermal_capacity);
        y << YAML::Key << "share_air" << YAML::Value << num(r.share_air);
        y << YAML::Key << "share_ground" << YAML::Value << num(r.share_ground);
        y << YAML::Key << "yearly_heat_mwh" << YAML::Value << num(r.yearly_heat);
        y << YAML::EndMap;
    }
    y << YAML::EndMap;
    y << YAML::Key << "rollout" << YAML::Value << s.rollout;

    const auto& p = s.policy;
    y << YAML::Key << "policy" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "res_share_target" << YAML::Value << num(p.res_share_target);
    y << YAML::Key << "hp_additionality" << YAML::Value << p.hp_additionality;
    y << YAML::Key << "gas_price" << YAML::Value << num(p.gas_price);
    y << YAML::Key << "carbon_price" << YAML::Value << num(p.carbon_price);
    y << YAML::Key << "ep_ratio_hours" << YAML::Value << num(p.ep_ratio_hours);
    y << YAML::Key << "electrolysis_capacity_mw" << YAML::Value << num(p.electrolysis_capacity);
    y << YAML::Key << "h2_demand_mwh" << YAML::Value << num(p.h2_demand);
    y << YAML::Key << "h2_conversion" << YAML::Value << num(p.h2_conversion);
    y << YAML::Key << "ev_annual_energy_mwh" << YAML::Value << num(p.ev_annual_energy);
    y << YAML::Key << "coal_phase_out" << YAML::Value << p.coal_phase_out;
    y << YAML::Key << "wind_cap_removed" << YAML::Value << p.wind_cap_removed;
    if (p.re_drought_week) y << YAML::Key << "re_drought_week" << YAML::Value << *p.re_drought_week;
    if (p.bio_energy_budget) y << YAML::Key << "bio_energy_budget_mwh" << YAML::Value << num(*p.bio_energy_budget);
    y << YAML::EndMap;
    y << YAML::EndMap;

    std::ofstream out(dir / "scenario.yaml");
    if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + (dir / "scenario.yaml").string());
    out << y.c_str() << '\n';

    auto write_map = [&](const std::string& file, const std::map<std::string, std::vector<double>>& m) {
        std::vector<std::string> header;
        std::vector<const std::vector<double>*> cols;
        for (const auto& [k, v] : m) {
            header.push_back(k);
            cols.push_back(&v);
        }
        write_series_csv(dir / file, header, cols);
    };
    write_map("load.csv", s.series.load);
    write_map("capacity_factors.csv", s.series.capacity_factor);
    write_map("hydro_inflow.csv", s.series.hydro_inflow);
    write_map("heat_demand.csv", s.series.heat_demand);
    write_series_csv(dir / "ev_profile.csv", {"ev"}, {&s.series.ev_profile});
    write_series_csv(dir / "temperature.csv", {"temperature"}, {&s.series.temperature});
}

}  // namespace gridplan
