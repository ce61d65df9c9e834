// tilepress: thermodynamic formalism on checkerboard pillow maps.
//
// Subcommands (all driven by a JSON config):
//   describe   combinatorial summary + tile dump
//   entropy    tile matrix and h_top of the configured subsystem
//   pressure   certified partition-sum brackets for P(F, phi)
//   gibbs      eigen pair, tile measures, Gibbs constants
//   rate       pressure curve p(t), energy range, rate function I(alpha)
//   deviation  pair deviation sets and the large-deviation bound
//   tiles      tile dump CSV at a chosen level
//   verify     bundled property suite; nonzero exit on any failure
//
// Exit codes: 0 ok, 2 config error, 3 capacity, 4 verification/gate failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tilepress/config.hpp"
#include "tilepress/csv.hpp"
#include "tilepress/errors.hpp"
#include "tilepress/ldp.hpp"
#include "tilepress/sum.hpp"
#include "tilepress/thermo.hpp"
#include "tilepress/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tilepress;

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir_override;
    int threads = 0;  // 0: env or 1
    int n_max_override = 0;
    bool break_gluing = false;
};

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("TILEPRESS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

RunConfig load(const Cli& cli) {
    RunConfig cfg = load_config(cli.config_path);
    if (!cli.out_dir_override.empty()) cfg.out_dir = cli.out_dir_override;
    if (cli.n_max_override > 0) cfg.n_max = cli.n_max_override;
    cfg.break_gluing = cli.break_gluing;
    return cfg;
}

bool wants(const RunConfig& cfg, const char* fmt) {
    for (const auto& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

void write_json(const RunConfig& cfg, const std::string& name, const ordered_json& doc) {
    if (!wants(cfg, "json")) return;
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
    out << doc.dump(2) << "\n";
}

ordered_json mat_json(const Mat2& a) {
    return ordered_json::array({{a.v[0][0], a.v[0][1]}, {a.v[1][0], a.v[1][1]}});
}

void dump_tiles_csv(const RunConfig& cfg, const std::string& name, int level) {
    if (!wants(cfg, "csv")) return;
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    if (count_tiles(spec, sub, level) > cfg.capacity)
        throw capacity_error("tile dump exceeds the capacity cap; lower the level",
                             count_tiles(spec, sub, level), cfg.capacity);
    std::vector<std::vector<std::string>> rows;
    for_each_tile(spec, sub, level, [&](const TileWalker& w) {
        const TileRegion r = w.region();
        rows.push_back({std::to_string(level), TileAddress{w.letters()}.to_string(),
                        std::string(1, face_char(r.color())),
                        std::string(1, face_char(label_position(w.letters().front()))),
                        std::string(1, face_char(r.face)), fmt17(r.x0()), fmt17(r.y0()),
                        fmt17(r.side()), r.touches_equator() ? "1" : "0"});
    });
    fs::create_directories(cfg.out_dir);
    write_csv((fs::path(cfg.out_dir) / name).string(),
              {"level", "word", "color", "position", "face", "a", "b", "side",
               "touches_equator"},
              rows);
}

int cmd_describe(const RunConfig& cfg) {
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    ordered_json doc;
    doc["m"] = spec.m;
    doc["deg"] = spec.degree();
    doc["expansion"] = spec.expansion();
    doc["post_card"] = 4;
    doc["labels"] = sub.size();
    doc["tiles_n1"] = count_tiles(spec, sub, 1);
    doc["pairs_n1"] = spec.degree();
    doc["tile_matrix"] = mat_json(tile_matrix(spec, sub));
    const ClassifyResult cls = classify(spec, sub, 6);
    doc["classify"] = {{"irreducible", cls.irreducible},
                       {"primitive", cls.primitive},
                       {"strongly_irreducible", cls.strongly_irreducible},
                       {"strongly_primitive", cls.strongly_primitive},
                       {"n_f_irreducible", cls.n_f_irreducible ? ordered_json(*cls.n_f_irreducible)
                                                               : ordered_json(nullptr)},
                       {"n_f_primitive", cls.n_f_primitive ? ordered_json(*cls.n_f_primitive)
                                                           : ordered_json(nullptr)},
                       {"search_cap", cls.search_cap}};
    write_json(cfg, "describe.json", doc);
    dump_tiles_csv(cfg, "tiles.csv", std::min(2, cfg.n_max));
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_entropy(const RunConfig& cfg) {
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    const Mat2 a = tile_matrix(spec, sub);
    ordered_json doc;
    doc["A"] = mat_json(a);
    doc["rho"] = spectral_radius(a);
    doc["h_top"] = entropy(a);
    write_json(cfg, "entropy.json", doc);
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_pressure(const RunConfig& cfg, int threads) {
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    const Potential pot = cfg.make_potential();
    const PressureEstimate pe =
        pressure_estimate(spec, sub, pot, cfg.n_max, cfg.zn_refine, threads);
    ordered_json doc;
    doc["n_max"] = cfg.n_max;
    doc["zn_refine"] = cfg.zn_refine;
    doc["P_bracket"] = {pe.lower, pe.fekete_upper};
    doc["width"] = pe.width();
    doc["fekete_upper"] = pe.fekete_upper;
    doc["extrapolated"] = pe.extrapolated;
    write_json(cfg, "pressure.json", doc);
    if (wants(cfg, "csv")) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < pe.seq_center.size(); ++k)
            rows.push_back({std::to_string(k + 1), fmt17(pe.seq_center[k]),
                            fmt17(pe.seq_lower[k]), fmt17(pe.seq_upper[k])});
        fs::create_directories(cfg.out_dir);
        write_csv((fs::path(cfg.out_dir) / "pressure.csv").string(),
                  {"n", "log_zn_over_n", "lower", "upper"}, rows);
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_gibbs(const RunConfig& cfg, int threads) {
    const MapSpec spec = cfg.make_spec();
    const Subsystem sub = cfg.make_subsystem();
    const Potential pot = cfg.make_potential();
    const ClassifyResult cls = classify(spec, sub, 6);
    const EigenPair eig = eigen_pair(spec, sub, pot, cfg.grid_G, cfg.tol, cfg.max_iter, threads);
    const double c0 = std::max(1.0, measure_c0(spec, 4000));
    const DistortionConstants dc =
        distortion_constants(spec, pot, cls.n_f_irreducible.value_or(1), c0);
    const PressureEstimate pe =
        pressure_estimate(spec, sub, pot, cfg.n_max, cfg.zn_refine, threads);
    const int n = std::min(cfg.n_max, 6);
    const TileMeasurePair tm = tile_measures(spec, sub, pot, n, eig, cfg.capacity);
    const GibbsReport gr = gibbs_constants(spec, sub, pot, tm.mu, eig.log_lambda);

    ordered_json doc;
    doc["lambda"] = eig.lambda;
    doc["log_lambda"] = eig.log_lambda;
    doc["residual"] = eig.residual;
    doc["iterations"] = eig.cesaro_steps;
    doc["C0"] = dc.c0;
    doc["C1"] = dc.c1;
    doc["Cbar"] = dc.cbar;
    doc["diam"] = dc.diam;
    doc["P_bracket"] = {pe.lower, pe.fekete_upper};
    doc["measure_level"] = n;
    doc["gibbs"] = {{"C_observed", gr.c_observed},
                    {"C_literal", gr.c_literal},
                    {"worst_tile", gr.worst_tile}};
    doc["face_mass"] = {{"w", eig.dual.face_mass(Face::white)},
                        {"b", eig.dual.face_mass(Face::black)}};
    write_json(cfg, "gibbs.json", doc);

    if (wants(cfg, "csv")) {
        fs::create_directories(cfg.out_dir);
        {
            std::vector<std::vector<std::string>> rows;
            const int G = eig.u_tilde.G;
            for (int f = 0; f < 2; ++f)
                for (int ix = 0; ix < G; ++ix)
                    for (int iy = 0; iy < G; ++iy)
                        rows.push_back({std::string(1, face_char(static_cast<Face>(f))),
                                        std::to_string(ix), std::to_string(iy),
                                        fmt17(eig.u_tilde.at(static_cast<Face>(f), ix, iy))});
            write_csv((fs::path(cfg.out_dir) / "eigenfunction.csv").string(),
                      {"face", "ix", "iy", "value"}, rows);
        }
        {
            std::vector<std::vector<std::string>> rows;
            std::size_t k = 0;
            for_each_tile(spec, sub, n, [&](const TileWalker& w) {
                rows.push_back({TileAddress{w.letters()}.to_string(),
                                fmt17(tm.m.weights[k]), fmt17(tm.mu.weights[k])});
                ++k;
            });
            write_csv((fs::path(cfg.out_dir) / "tile_measures.csv").string(),
                      {"word", "m_weight", "mu_weight"}, rows);
        }
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

std::vector<double> curve_grid(const RunConfig& cfg) {
    std::vector<double> tg;
    for (int k = 0; k < cfg.t_count; ++k)
        tg.push_back(cfg.t_min + (cfg.t_max - cfg.t_min) * k / (cfg.t_count - 1));
    return tg;
}

int cmd_rate(const RunConfig& cfg, int threads) {
    const MapSpec spec = cfg.make_spec();
    const Potential pot = cfg.make_potential();
    CurveOptions copt;
    copt.grid = cfg.curve_G;
    copt.tol = cfg.tol;
    copt.max_iter = cfg.max_iter;
    copt.threads = threads;
    const PressureCurve curve = pressure_curve(spec, pot, curve_grid(cfg), copt);
    const EnergyRange er = energy_range(curve);

    std::vector<double> alphas = cfg.alphas;
    if (alphas.empty()) {
        std::vector<double> fractions = cfg.alpha_fractions;
        if (fractions.empty()) fractions = {-0.6, 0.6};
        for (double f : fractions)
            alphas.push_back(er.gamma_phi + f * ((f > 0 ? er.alpha_max_hat : er.alpha_min_hat) -
                                                 er.gamma_phi) * (f > 0 ? 1.0 : -1.0));
    }
    const RateTable table = rate_function(curve, alphas);

    ordered_json doc;
    doc["gamma_phi"] = er.gamma_phi;
    doc["alpha_min_hat"] = er.alpha_min_hat;
    doc["alpha_max_hat"] = er.alpha_max_hat;
    ordered_json rows = ordered_json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"alpha", r.alpha},
                        {"xi", r.xi},
                        {"rate", r.rate},
                        {"legendre_residual", r.legendre_residual}});
    doc["rows"] = rows;
    write_json(cfg, "rate.json", doc);
    if (wants(cfg, "csv")) {
        fs::create_directories(cfg.out_dir);
        {
            std::vector<std::vector<std::string>> cr;
            for (std::size_t k = 0; k < curve.t.size(); ++k)
                cr.push_back({fmt17(curve.t[k]), fmt17(curve.p[k]), fmt17(curve.dp[k]),
                              fmt17(curve.ddp[k])});
            write_csv((fs::path(cfg.out_dir) / "pressure_curve.csv").string(),
                      {"t", "p", "dp", "ddp"}, cr);
        }
        {
            std::vector<std::vector<std::string>> rr;
            for (const auto& r : table.rows)
                rr.push_back({fmt17(r.alpha), fmt17(r.xi), fmt17(r.rate),
                              fmt17(r.legendre_residual)});
            write_csv((fs::path(cfg.out_dir) / "rate.csv").string(),
                      {"alpha", "xi", "rate", "legendre_residual"}, rr);
        }
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_deviation(const RunConfig& cfg, int threads) {
    const MapSpec spec = cfg.make_spec();
    const Potential pot = cfg.make_potential();
    const Subsystem full = Subsystem::full(spec);
    CurveOptions copt;
    copt.grid = cfg.curve_G;
    copt.tol = cfg.tol;
    copt.max_iter = cfg.max_iter;
    copt.threads = threads;
    const PressureCurve curve = pressure_curve(spec, pot, curve_grid(cfg), copt);
    const EnergyRange er = energy_range(curve);

    std::vector<double> alphas = cfg.alphas;
    if (alphas.empty()) {
        std::vector<double> fractions = cfg.alpha_fractions;
        if (fractions.empty()) fractions = {-0.6, 0.6};
        for (double f : fractions)
            alphas.push_back(f > 0 ? er.gamma_phi + f * (er.alpha_max_hat - er.gamma_phi)
                                   : er.gamma_phi + f * (er.gamma_phi - er.alpha_min_hat));
    }
    const RateTable table = rate_function(curve, alphas);

    const EigenPair eig =
        eigen_pair(spec, full, pot, cfg.grid_G, cfg.tol, cfg.max_iter, threads);
    const double c0 = std::max(1.0, measure_c0(spec, 4000));
    const DistortionConstants dc = distortion_constants(spec, pot, 2, c0);
    const int gibbs_level = std::min(5, cfg.n_max);
    const TileMeasurePair tm = tile_measures(spec, full, pot, gibbs_level, eig, cfg.capacity);
    const GibbsReport gr = gibbs_constants(spec, full, pot, tm.mu, eig.log_lambda);

    ordered_json doc;
    doc["gamma_phi"] = er.gamma_phi;
    doc["alpha_min_hat"] = er.alpha_min_hat;
    doc["alpha_max_hat"] = er.alpha_max_hat;
    doc["C_mu"] = gr.c_literal;
    ordered_json reports = ordered_json::array();
    std::vector<std::vector<std::string>> csv_rows;
    for (double alpha : alphas) {
        const DeviationReport rep =
            deviation_report(spec, pot, cfg.e0_label(), alpha, cfg.n_lo, cfg.n_hi, table, eig,
                             gr.c_literal, dc, cfg.pair_refine, threads);
        ordered_json jr;
        jr["alpha"] = rep.alpha;
        jr["rate"] = rep.rate_value;
        jr["xi"] = rep.xi;
        jr["C_alpha"] = rep.c_alpha;
        jr["C_alpha_components"] = {{"C_mu", rep.c_mu},
                                    {"c1_diam_kappa", rep.c1_diam_kappa},
                                    {"I_prime", rep.xi - 1.0}};
        jr["first_valid_N"] = rep.first_valid_n;
        jr["holds_from_first"] = rep.holds_from_first;
        ordered_json jrows = ordered_json::array();
        for (const auto& row : rep.rows) {
            jrows.push_back({{"n", row.level},
                             {"pairs_possible", row.pairs_possible},
                             {"pairs_certain", row.pairs_certain},
                             {"mass_tiles", row.mass_tiles},
                             {"mass_pairs", row.mass_pairs},
                             {"bound", row.bound},
                             {"slope", row.slope},
                             {"strongly_primitive", row.strongly_primitive}});
            csv_rows.push_back({fmt17(alpha), std::to_string(row.level),
                                fmt17(row.mass_tiles), fmt17(row.mass_pairs), fmt17(row.bound),
                                fmt17(row.slope), std::to_string(row.pairs_possible),
                                std::to_string(row.pairs_certain),
                                row.strongly_primitive ? "1" : "0"});
        }
        jr["rows"] = jrows;
        reports.push_back(jr);
    }
    doc["reports"] = reports;
    write_json(cfg, "deviation.json", doc);
    if (wants(cfg, "csv")) {
        fs::create_directories(cfg.out_dir);
        write_csv((fs::path(cfg.out_dir) / "deviation.csv").string(),
                  {"alpha", "n", "mass_tiles", "mass_pairs", "bound", "slope", "pairs_possible",
                   "pairs_certain", "strongly_primitive"},
                  csv_rows);
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg, int threads) {
    const std::vector<CheckResult> results = run_verification(cfg, threads);
    bool all = true;
    ordered_json doc = ordered_json::array();
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        doc.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    write_json(cfg, "verify.json", doc);
    std::cout << (all ? "verification passed" : "verification FAILED") << "\n";
    return all ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermodynamic formalism on checkerboard pillow maps"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON run configuration")->required();
    app.add_option("--out", cli.out_dir_override, "output directory override");
    app.add_option("--threads", cli.threads,
                   "worker threads (default: TILEPRESS_THREADS or 1; never changes results)");
    app.add_option("--n-max", cli.n_max_override, "override levels.n_max");
    app.add_flag("--break-gluing", cli.break_gluing,
                 "inject a gluing-discontinuous defect into the potential (negative control)");

    int tile_level = 2;
    auto* describe = app.add_subcommand("describe", "combinatorial summary");
    auto* entropy_cmd = app.add_subcommand("entropy", "tile matrix and topological entropy");
    auto* pressure = app.add_subcommand("pressure", "certified pressure brackets");
    auto* gibbs = app.add_subcommand("gibbs", "eigen data, tile measures, Gibbs constants");
    auto* rate = app.add_subcommand("rate", "pressure curve and rate function");
    auto* deviation = app.add_subcommand("deviation", "large-deviation report");
    auto* tiles = app.add_subcommand("tiles", "tile dump CSV");
    tiles->add_option("--level", tile_level, "tile level for the dump");
    auto* verify = app.add_subcommand("verify", "bundled property suite");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load(cli);
        const int threads = resolve_threads(cli.threads);
        if (describe->parsed()) return cmd_describe(cfg);
        if (entropy_cmd->parsed()) return cmd_entropy(cfg);
        if (pressure->parsed()) return cmd_pressure(cfg, threads);
        if (gibbs->parsed()) return cmd_gibbs(cfg, threads);
        if (rate->parsed()) return cmd_rate(cfg, threads);
        if (deviation->parsed()) return cmd_deviation(cfg, threads);
        if (tiles->parsed()) {
            dump_tiles_csv(cfg, "tiles.csv", tile_level);
            std::cout << "wrote tiles.csv (level " << tile_level << ")\n";
            return 0;
        }
        if (verify->parsed()) return cmd_verify(cfg, threads);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what();
        if (e.needed > 0) std::cerr << " (needs " << e.needed << ", cap " << e.cap << ")";
        std::cerr << "; reduce the level or raise levels.capacity\n";
        return 3;
    } catch (const gate_error& e) {
        std::cerr << "gate failure: " << e.what() << "\n";
        return 4;
    } catch (const convergence_error& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
