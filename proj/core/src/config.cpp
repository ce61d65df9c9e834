#include "tilepress/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tilepress/errors.hpp"

namespace tilepress {

using nlohmann::json;
using nlohmann::ordered_json;

Subsystem RunConfig::make_subsystem() const {
    const MapSpec spec = make_spec();
    if (subsystem_preset == "full") return Subsystem::full(spec);
    if (subsystem_preset == "carpet") return Subsystem::carpet(spec);
    if (!subsystem_preset.empty())
        throw config_error("/subsystem", "unknown preset '" + subsystem_preset + "'");
    return Subsystem(spec, subsystem_labels);
}

Potential RunConfig::make_potential() const {
    Potential pot(coefficients, kappa);
    if (break_gluing) pot.inject_gluing_defect(0.25);
    return pot;
}

EdgeLabel RunConfig::e0_label() const {
    if (e0 == "bottom") return EdgeLabel::bottom;
    if (e0 == "right") return EdgeLabel::right;
    if (e0 == "top") return EdgeLabel::top;
    if (e0 == "left") return EdgeLabel::left;
    throw config_error("/ldp/e0", "expected one of bottom/right/top/left");
}

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw config_error(where + "/" + key, "unknown key rejected");
}

double get_num(const json& obj, const std::string& where, const char* key, double fallback,
               bool require_positive) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw config_error(where + "/" + key, "expected a number");
    const double v = obj[key].get<double>();
    if (require_positive && !(v > 0.0))
        throw config_error(where + "/" + key, "must be positive");
    return v;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error("/", std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("/", "top level must be an object");
    require_keys(root, "", {"map", "subsystem", "potential", "grid", "levels", "ldp", "output"});

    RunConfig cfg;
    if (root.contains("map")) {
        const json& m = root["map"];
        require_keys(m, "/map", {"m"});
        cfg.m = static_cast<std::int64_t>(get_num(m, "/map", "m", 3, true));
        if (cfg.m < 2) throw config_error("/map/m", "subdivision factor must be >= 2");
    }
    if (root.contains("subsystem")) {
        const json& s = root["subsystem"];
        if (s.is_string()) {
            cfg.subsystem_preset = s.get<std::string>();
            if (cfg.subsystem_preset != "full" && cfg.subsystem_preset != "carpet")
                throw config_error("/subsystem", "expected \"full\", \"carpet\" or a label list");
        } else if (s.is_array()) {
            cfg.subsystem_preset.clear();
            cfg.subsystem_labels.clear();
            for (std::size_t k = 0; k < s.size(); ++k) {
                const json& trip = s[k];
                const std::string where = "/subsystem/" + std::to_string(k);
                if (!trip.is_array() || trip.size() != 3 || !trip[0].is_string() ||
                    !trip[1].is_number_integer() || !trip[2].is_number_integer())
                    throw config_error(where, "expected [\"w\"|\"b\", i, j]");
                const std::string f = trip[0].get<std::string>();
                if (f != "w" && f != "b") throw config_error(where + "/0", "face must be w or b");
                cfg.subsystem_labels.push_back(OneTileLabel{
                    f == "w" ? Face::white : Face::black, trip[1].get<std::int32_t>(),
                    trip[2].get<std::int32_t>()});
            }
            if (cfg.subsystem_labels.empty())
                throw config_error("/subsystem", "label list must be nonempty");
        } else {
            throw config_error("/subsystem", "expected a preset string or a label list");
        }
    }
    if (root.contains("potential")) {
        const json& p = root["potential"];
        require_keys(p, "/potential", {"coefficients", "kappa"});
        if (p.contains("coefficients")) {
            const json& c = p["coefficients"];
            if (!c.is_array() || c.size() != Potential::basis_size)
                throw config_error("/potential/coefficients",
                                   "expected 6 basis coefficients");
            for (std::size_t k = 0; k < Potential::basis_size; ++k) {
                if (!c[k].is_number())
                    throw config_error("/potential/coefficients/" + std::to_string(k),
                                       "expected a number");
                cfg.coefficients[k] = c[k].get<double>();
            }
        }
        cfg.kappa = get_num(p, "/potential", "kappa", 1.0, true);
        if (cfg.kappa > 1.0) throw config_error("/potential/kappa", "must be in (0, 1]");
    }
    if (root.contains("grid")) {
        const json& g = root["grid"];
        require_keys(g, "/grid", {"G", "curve_G", "tol", "max_iter"});
        cfg.grid_G = static_cast<int>(get_num(g, "/grid", "G", cfg.grid_G, true));
        cfg.curve_G = static_cast<int>(get_num(g, "/grid", "curve_G", cfg.curve_G, true));
        cfg.tol = get_num(g, "/grid", "tol", cfg.tol, true);
        cfg.max_iter = static_cast<int>(get_num(g, "/grid", "max_iter", cfg.max_iter, true));
        if (cfg.grid_G < 2 || cfg.curve_G < 2)
            throw config_error("/grid", "grid resolutions must be >= 2");
    }
    if (root.contains("levels")) {
        const json& l = root["levels"];
        require_keys(l, "/levels", {"n_max", "capacity", "zn_refine"});
        cfg.n_max = static_cast<int>(get_num(l, "/levels", "n_max", cfg.n_max, true));
        cfg.capacity = static_cast<std::int64_t>(
            get_num(l, "/levels", "capacity", static_cast<double>(cfg.capacity), true));
        if (l.contains("zn_refine")) {
            if (!l["zn_refine"].is_number_integer() || l["zn_refine"].get<int>() < 0)
                throw config_error("/levels/zn_refine", "must be a nonnegative integer");
            cfg.zn_refine = l["zn_refine"].get<int>();
        }
    }
    if (root.contains("ldp")) {
        const json& l = root["ldp"];
        require_keys(l, "/ldp",
                     {"t_min", "t_max", "t_count", "alphas", "alpha_fractions", "e0", "n_range",
                      "pair_refine"});
        cfg.t_min = get_num(l, "/ldp", "t_min", cfg.t_min, false);
        cfg.t_max = get_num(l, "/ldp", "t_max", cfg.t_max, false);
        cfg.t_count = static_cast<int>(get_num(l, "/ldp", "t_count", cfg.t_count, true));
        if (!(cfg.t_min < 1.0 && 1.0 < cfg.t_max))
            throw config_error("/ldp", "t grid must contain t = 1 strictly inside");
        if (cfg.t_count < 3) throw config_error("/ldp/t_count", "need at least 3 points");
        if (l.contains("alphas")) {
            if (!l["alphas"].is_array()) throw config_error("/ldp/alphas", "expected an array");
            cfg.alphas = l["alphas"].get<std::vector<double>>();
        }
        if (l.contains("alpha_fractions")) {
            if (!l["alpha_fractions"].is_array())
                throw config_error("/ldp/alpha_fractions", "expected an array");
            cfg.alpha_fractions = l["alpha_fractions"].get<std::vector<double>>();
            for (double f : cfg.alpha_fractions)
                if (!(f > -1.0 && f < 1.0) || f == 0.0)
                    throw config_error("/ldp/alpha_fractions",
                                       "fractions must be in (-1, 1) and nonzero");
        }
        if (l.contains("e0")) {
            if (!l["e0"].is_string()) throw config_error("/ldp/e0", "expected a string");
            cfg.e0 = l["e0"].get<std::string>();
        }
        if (l.contains("n_range")) {
            const json& r = l["n_range"];
            if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
                !r[1].is_number_integer())
                throw config_error("/ldp/n_range", "expected [lo, hi]");
            cfg.n_lo = r[0].get<int>();
            cfg.n_hi = r[1].get<int>();
            if (cfg.n_lo < 1 || cfg.n_hi < cfg.n_lo)
                throw config_error("/ldp/n_range", "need 1 <= lo <= hi");
        }
        if (l.contains("pair_refine")) {
            if (!l["pair_refine"].is_number_integer() || l["pair_refine"].get<int>() < 0)
                throw config_error("/ldp/pair_refine", "must be a nonnegative integer");
            cfg.pair_refine = l["pair_refine"].get<int>();
        }
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        require_keys(o, "/output", {"directory", "formats"});
        if (o.contains("directory")) {
            if (!o["directory"].is_string())
                throw config_error("/output/directory", "expected a string");
            cfg.out_dir = o["directory"].get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o["formats"].is_array())
                throw config_error("/output/formats", "expected an array");
            cfg.formats = o["formats"].get<std::vector<std::string>>();
            for (const auto& f : cfg.formats)
                if (f != "csv" && f != "json")
                    throw config_error("/output/formats", "supported formats: csv, json");
        }
    }
    // validate the potential/edge label eagerly so errors surface at load time
    cfg.make_potential();
    cfg.e0_label();
    if (!cfg.subsystem_preset.empty() || !cfg.subsystem_labels.empty()) cfg.make_subsystem();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("/", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    ordered_json root;
    root["map"] = {{"m", cfg.m}};
    if (!cfg.subsystem_preset.empty()) {
        root["subsystem"] = cfg.subsystem_preset;
    } else {
        ordered_json labels = ordered_json::array();
        for (const auto& t : cfg.subsystem_labels)
            labels.push_back({std::string(1, face_char(t.home)), t.i, t.j});
        root["subsystem"] = labels;
    }
    root["potential"] = {{"coefficients", cfg.coefficients}, {"kappa", cfg.kappa}};
    root["grid"] = {{"G", cfg.grid_G},
                    {"curve_G", cfg.curve_G},
                    {"tol", cfg.tol},
                    {"max_iter", cfg.max_iter}};
    root["levels"] = {{"n_max", cfg.n_max},
                      {"capacity", cfg.capacity},
                      {"zn_refine", cfg.zn_refine}};
    ordered_json ldp;
    ldp["t_min"] = cfg.t_min;
    ldp["t_max"] = cfg.t_max;
    ldp["t_count"] = cfg.t_count;
    if (!cfg.alphas.empty()) ldp["alphas"] = cfg.alphas;
    if (!cfg.alpha_fractions.empty()) ldp["alpha_fractions"] = cfg.alpha_fractions;
    ldp["e0"] = cfg.e0;
    ldp["n_range"] = {cfg.n_lo, cfg.n_hi};
    ldp["pair_refine"] = cfg.pair_refine;
    root["ldp"] = ldp;
    root["output"] = {{"directory", cfg.out_dir}, {"formats", cfg.formats}};
    return root.dump(2) + "\n";
}

} // namespace tilepress
