// Command-line workflow: ingest a potential profile, discretize it into
// blocks, compute scattering data / the discrete spectrum, evaluate the
// large-time KdV solution, and report Haar compression — as JSON/CSV files.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kdvist/blocks.hpp"
#include "kdvist/discretize.hpp"
#include "kdvist/fragmentation.hpp"
#include "kdvist/kdv.hpp"
#include "kdvist/scattering.hpp"
#include "kdvist/spectrum.hpp"
#include "kdvist/splitstep.hpp"
#include "kdvist/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kdvist;

namespace {

constexpr const char* SCHEMA = "kdv-ist/1";

constexpr int EXIT_FAIL = 1;  // validation / convergence failure
constexpr int EXIT_IO = 2;    // missing or unreadable/unwritable files

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------- config --

struct RunConfig {
    json raw;
    std::string config_dir;  // for resolving relative csv paths

    SampledPotential profile;
    std::string profile_desc;
    double xmin = 0.0, xmax = 0.0;  // discretization domain
    int n_blocks = 1;
    BlockRule rule = BlockRule::midpoint;
    BoundMethod bound_method = BoundMethod::q_zero;
    NormingMethod norming_method = NormingMethod::residue;
    double eta = 1e-3;
    int seed_grid = 256;
    std::vector<double> explicit_seeds;
    std::vector<double> times;
    double xg_min = 0.0, xg_max = 0.0;
    int xg_count = 0;
    double kg_min = 0.1, kg_max = 10.0;
    int kg_count = 200;
    fs::path outputs = ".";
    double unitarity_tol = 1e-10;
    // split-step companion run for `solve`
    bool splitstep_enabled = false;
    double ss_dt = 1e-4;
    int ss_grid = 2048;
    double ss_pad = 4.0;
    // haar
    int haar_level = 8;
    double haar_threshold = 0.0;
    bool haar_respectrum = false;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw invalid_input("config file " + path + " is not valid JSON: " + e.what());
    }
    return j;
}

RunConfig parse_config(const std::string& path) {
    RunConfig cfg;
    cfg.raw = load_json_file(path);
    cfg.config_dir = fs::path(path).parent_path().string();
    const json& j = cfg.raw;

    if (!j.contains("profile")) throw invalid_input("config needs a \"profile\" object");
    const json& p = j.at("profile");
    if (p.contains("csv")) {
        fs::path csv = p.at("csv").get<std::string>();
        if (csv.is_relative() && !cfg.config_dir.empty()) csv = cfg.config_dir / csv;
        if (!fs::exists(csv)) throw io_error("input profile file not found: " + csv.string());
        cfg.profile = csv_profile(csv.string());
        cfg.profile_desc = "csv:" + csv.string();
    } else if (p.contains("name")) {
        const std::string name = p.at("name").get<std::string>();
        const double amp = p.value("amplitude", 1.0);
        const double width = p.value("width", 1.0);
        if (!j.contains("domain")) throw invalid_input("named profiles need a \"domain\" [xmin,xmax]");
        const auto dom = j.at("domain").get<std::vector<double>>();
        if (dom.size() != 2) throw invalid_input("\"domain\" must be [xmin, xmax]");
        cfg.profile = named_profile(name, amp, width, dom[0], dom[1]);
        cfg.profile_desc = name + "(amplitude=" + std::to_string(amp) +
                           ", width=" + std::to_string(width) + ")";
    } else {
        throw invalid_input("\"profile\" needs either \"csv\" or \"name\"");
    }
    if (j.contains("domain")) {
        const auto dom = j.at("domain").get<std::vector<double>>();
        if (dom.size() != 2 || !(dom[1] > dom[0]))
            throw invalid_input("\"domain\" must be [xmin, xmax] with xmax > xmin");
        cfg.xmin = dom[0];
        cfg.xmax = dom[1];
    } else {
        cfg.xmin = cfg.profile.xmin;
        cfg.xmax = cfg.profile.xmax;
    }

    cfg.n_blocks = j.value("n_blocks", 100);
    if (cfg.n_blocks < 1) throw invalid_input("n_blocks must be >= 1");
    const std::string rule = j.value("rule", std::string("midpoint"));
    if (rule == "midpoint") cfg.rule = BlockRule::midpoint;
    else if (rule == "cell_average") cfg.rule = BlockRule::cell_average;
    else throw invalid_input("rule must be \"midpoint\" or \"cell_average\", got \"" + rule + "\"");

    const std::string bm = j.value("bound_method", std::string("qzero"));
    if (bm == "invR") cfg.bound_method = BoundMethod::inv_R;
    else if (bm == "invB") cfg.bound_method = BoundMethod::inv_B;
    else if (bm == "qzero") cfg.bound_method = BoundMethod::q_zero;
    else throw invalid_input("bound_method must be invR, invB, or qzero, got \"" + bm + "\"");

    const std::string nm = j.value("norming_method", std::string("residue"));
    if (nm == "residue") cfg.norming_method = NormingMethod::residue;
    else if (nm == "ab") cfg.norming_method = NormingMethod::ab_ratio;
    else throw invalid_input("norming_method must be residue or ab, got \"" + nm + "\"");

    cfg.eta = j.value("eta", 1e-3);
    if (!(cfg.eta > 0.0)) throw invalid_input("eta must be positive");
    cfg.seed_grid = j.value("seed_grid", 256);
    if (j.contains("seeds")) cfg.explicit_seeds = j.at("seeds").get<std::vector<double>>();
    if (j.contains("times")) cfg.times = j.at("times").get<std::vector<double>>();
    if (j.contains("xgrid")) {
        const json& g = j.at("xgrid");
        cfg.xg_min = g.at("min").get<double>();
        cfg.xg_max = g.at("max").get<double>();
        cfg.xg_count = g.at("count").get<int>();
        if (cfg.xg_count < 2 || !(cfg.xg_max > cfg.xg_min))
            throw invalid_input("xgrid needs count >= 2 and max > min");
    }
    if (j.contains("kgrid")) {
        const json& g = j.at("kgrid");
        cfg.kg_min = g.at("min").get<double>();
        cfg.kg_max = g.at("max").get<double>();
        cfg.kg_count = g.at("count").get<int>();
        if (cfg.kg_count < 2 || !(cfg.kg_max > cfg.kg_min) || !(cfg.kg_min > 0.0))
            throw invalid_input("kgrid needs count >= 2 and max > min > 0");
    }
    cfg.outputs = j.value("outputs", std::string("."));
    cfg.unitarity_tol = j.value("unitarity_tol", 1e-10);
    if (!(cfg.unitarity_tol > 0.0)) throw invalid_input("unitarity_tol must be positive");

    if (j.contains("splitstep")) {
        const json& s = j.at("splitstep");
        cfg.splitstep_enabled = s.value("enabled", true);
        cfg.ss_dt = s.value("dt", 1e-4);
        cfg.ss_grid = s.value("grid", 2048);
        cfg.ss_pad = s.value("pad", 4.0);
    }
    if (j.contains("haar")) {
        const json& h = j.at("haar");
        cfg.haar_level = h.value("level", 8);
        cfg.haar_threshold = h.value("threshold", 0.0);
        cfg.haar_respectrum = h.value("rerun_spectrum", false);
    }
    return cfg;
}

// ------------------------------------------------------------------ output --

void atomic_write(const fs::path& path, const std::string& body) {
    if (!path.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create output directory " + path.parent_path().string());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw io_error("cannot write " + tmp.string());
        out << body;
        if (!out.good()) throw io_error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move " + tmp.string() + " into place");
}

json blocks_to_json(const BlockPotential& pot) {
    json wells = json::array();
    for (const BlockWell& w : pot.wells)
        wells.push_back({{"depth_root", w.depth_root}, {"depth", -w.depth_root * w.depth_root}});
    return {{"offset", pot.offset},
            {"grid", pot.grid},
            {"span", pot.span()},
            {"block_width", pot.wells.empty() ? 0.0 : pot.span() / double(pot.wells.size())},
            {"n_blocks", pot.wells.size()},
            {"wells", wells}};
}

json config_echo(const RunConfig& cfg) {
    return {{"profile", cfg.profile_desc},
            {"domain", {cfg.xmin, cfg.xmax}},
            {"n_blocks", cfg.n_blocks},
            {"rule", cfg.rule == BlockRule::midpoint ? "midpoint" : "cell_average"}};
}

// ------------------------------------------------------------- subcommands --

BlockPotential make_blocks(const RunConfig& cfg) {
    SampledPotential prof = cfg.profile;
    prof.xmin = cfg.xmin;
    prof.xmax = cfg.xmax;
    return to_blocks(prof, cfg.n_blocks, cfg.rule);
}

struct SpectrumRun {
    std::vector<double> kappas;
    std::vector<double> c2_residue;
    std::vector<double> c2_ab;
    SeedEstimates seeds;
    RootDiagnostics diag;
};

SpectrumRun compute_spectrum(const RunConfig& cfg, const BlockPotential& pot) {
    SpectrumRun run;
    if (!cfg.explicit_seeds.empty()) {
        run.seeds.kappas_guess = cfg.explicit_seeds;
        run.seeds.source = "user";
    } else {
        // Pad the seed window beyond the support: a box cut exactly at the
        // support edges distorts the shallow eigenvalues (and can park seeds
        // on spurious levels), while bound-state tails decay fast enough that
        // a few extra units of room make the estimates reliable.
        const double pad = std::max(2.0, 0.25 * (cfg.xmax - cfg.xmin));
        run.seeds = spectral_seed(pot, cfg.seed_grid, cfg.xmin - pad, cfg.xmax + pad);
    }
    run.kappas = find_bound_states(pot, run.seeds, cfg.bound_method, &run.diag);
    if (!run.kappas.empty()) {
        run.c2_residue = norming_constants(pot, run.kappas, NormingMethod::residue).norming;
        run.c2_ab = norming_constants(pot, run.kappas, NormingMethod::ab_ratio, cfg.eta).norming;
    }
    return run;
}

DiscreteSpectrum pick_spectrum(const RunConfig& cfg, const SpectrumRun& run) {
    DiscreteSpectrum s;
    s.kappas = run.kappas;
    s.norming = (cfg.norming_method == NormingMethod::residue) ? run.c2_residue : run.c2_ab;
    return s;
}

int cmd_scatter(const RunConfig& cfg) {
    const BlockPotential pot = make_blocks(cfg);
    json out = {{"schema", SCHEMA}, {"command", "scatter"}, {"config", config_echo(cfg)}};
    out["blocks"] = blocks_to_json(pot);

    json rows = json::array();
    double worst = 0.0;
    for (int i = 0; i < cfg.kg_count; ++i) {
        const double k =
            cfg.kg_min + (cfg.kg_max - cfg.kg_min) * i / double(cfg.kg_count - 1);
        const TransitionMatrix lam = compose_lambda(cplx(k, 0.0), pot);
        const cplx R = lam.R(), T = lam.T();
        const double resid = std::abs(std::norm(R) + std::norm(T) - 1.0);
        worst = std::max(worst, resid);
        rows.push_back({{"k", k},
                        {"R_re", R.real()},
                        {"R_im", R.imag()},
                        {"T_re", T.real()},
                        {"T_im", T.imag()},
                        {"unitarity_residual", resid}});
    }
    out["k_grid"] = {{"min", cfg.kg_min}, {"max", cfg.kg_max}, {"count", cfg.kg_count}};
    out["scattering"] = rows;
    out["max_unitarity_residual"] = worst;
    out["unitarity_tol"] = cfg.unitarity_tol;
    const bool ok = worst < cfg.unitarity_tol;
    out["converged"] = ok;
    atomic_write(cfg.outputs / "scatter.json", out.dump(2) + "\n");
    std::cout << "scatter: " << cfg.kg_count << " k-points, max unitarity residual " << worst
              << " -> " << (cfg.outputs / "scatter.json").string() << "\n";
    if (!ok) {
        std::cerr << "scatter: unitarity residual " << worst << " exceeds tolerance "
                  << cfg.unitarity_tol << "\n";
        return EXIT_FAIL;
    }
    return 0;
}

int cmd_spectrum_run(const RunConfig& cfg) {
    const BlockPotential pot = make_blocks(cfg);
    const SpectrumRun run = compute_spectrum(cfg, pot);

    json out = {{"schema", SCHEMA}, {"command", "spectrum"}, {"config", config_echo(cfg)}};
    out["seeds"] = {{"source", run.seeds.source}, {"kappas_guess", run.seeds.kappas_guess}};
    out["kappas"] = run.kappas;
    out["c2_residue"] = run.c2_residue;
    out["c2_ab"] = run.c2_ab;
    out["eta"] = cfg.eta;
    json deltas = json::array();
    for (std::size_t i = 0; i < run.kappas.size(); ++i)
        deltas.push_back(std::abs(run.c2_residue[i] - run.c2_ab[i]));
    out["c2_cross_method_delta"] = deltas;
    out["diagnostics"] = {{"failed_seeds", run.diag.failed_seeds},
                          {"discarded_exceptional", run.diag.discarded_exceptional},
                          {"deduplicated", run.diag.deduplicated}};
    out["converged"] = run.diag.failed_seeds.empty();
    atomic_write(cfg.outputs / "spectrum.json", out.dump(2) + "\n");
    std::cout << "spectrum: " << run.kappas.size() << " bound states -> "
              << (cfg.outputs / "spectrum.json").string() << "\n";
    if (!run.diag.failed_seeds.empty()) {
        std::cerr << "spectrum: " << run.diag.failed_seeds.size()
                  << " seed(s) failed to converge (see diagnostics.failed_seeds)\n";
        return EXIT_FAIL;
    }
    return 0;
}

int cmd_solve(const RunConfig& cfg) {
    if (cfg.times.empty()) throw invalid_input("solve needs a nonempty \"times\" list");
    if (cfg.xg_count < 2) throw invalid_input("solve needs an \"xgrid\" {min,max,count}");

    const BlockPotential pot = make_blocks(cfg);
    const SpectrumRun run = compute_spectrum(cfg, pot);
    if (run.kappas.empty())
        throw invalid_input("potential has no bound states; the large-time solution is pure "
                            "radiation and is not representable by the soliton formulas");
    const DiscreteSpectrum spec = pick_spectrum(cfg, run);

    std::vector<double> xs(cfg.xg_count);
    for (int i = 0; i < cfg.xg_count; ++i)
        xs[i] = cfg.xg_min + (cfg.xg_max - cfg.xg_min) * i / double(cfg.xg_count - 1);

    json summary = {{"schema", SCHEMA},
                    {"command", "solve"},
                    {"config", config_echo(cfg)},
                    {"kappas", spec.kappas},
                    {"c2", spec.norming},
                    {"norming_method",
                     cfg.norming_method == NormingMethod::residue ? "residue" : "ab"}};
    json per_time = json::array();

    for (const double t : cfg.times) {
        const SolitonTrain train = evolve(spec, t);
        const std::vector<double> ua = u_asymptotic(train, xs);
        const std::vector<double> ud = u_determinant(spec, t, xs);
        std::optional<SplitStepResult> ss;
        if (cfg.splitstep_enabled) {
            SampledPotential prof = cfg.profile;
            prof.xmin = cfg.xmin;
            prof.xmax = cfg.xmax;
            ss = split_step_kdv(prof, t, cfg.ss_dt, cfg.ss_grid, cfg.ss_pad);
        }
        // split-step samples live on their own periodic grid; interpolate
        // linearly onto the requested grid where it is covered
        auto ss_at = [&](double x) -> std::optional<double> {
            if (!ss) return std::nullopt;
            const auto& g = ss->xs;
            if (x < g.front() || x > g.back()) return std::nullopt;
            const double h = g[1] - g[0];
            const std::size_t i =
                std::min(g.size() - 2, static_cast<std::size_t>((x - g.front()) / h));
            const double w = (x - g[i]) / h;
            return (1.0 - w) * ss->u[i] + w * ss->u[i + 1];
        };

        char fname[64];
        std::snprintf(fname, sizeof fname, "solve_t%g.csv", t);
        std::string csv = cfg.splitstep_enabled ? "x,u_asymptotic,u_determinant,u_splitstep\n"
                                                : "x,u_asymptotic,u_determinant\n";
        double gap_ad = 0.0, gap_as = 0.0;
        char line[256];
        for (int i = 0; i < cfg.xg_count; ++i) {
            gap_ad = std::max(gap_ad, std::abs(ua[i] - ud[i]));
            if (cfg.splitstep_enabled) {
                const auto v = ss_at(xs[i]);
                const double sv = v.value_or(std::nan(""));
                if (v) gap_as = std::max(gap_as, std::abs(ua[i] - *v));
                std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", xs[i], ua[i],
                              ud[i], sv);
            } else {
                std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", xs[i], ua[i], ud[i]);
            }
            csv += line;
        }
        atomic_write(cfg.outputs / fname, csv);
        json entry = {{"t", t},
                      {"file", fname},
                      {"gap_asymptotic_determinant", gap_ad},
                      {"gammas", train.gammas}};
        if (cfg.splitstep_enabled) {
            entry["gap_asymptotic_splitstep"] = gap_as;
            entry["splitstep"] = {{"dt", ss->dt},
                                  {"steps", ss->steps},
                                  {"mass_drift", std::abs(ss->mass1 - ss->mass0)},
                                  {"momentum_drift", std::abs(ss->momentum1 - ss->momentum0)}};
        }
        per_time.push_back(entry);
        std::cout << "solve: t=" << t << " -> " << (cfg.outputs / fname).string()
                  << " (Linf asymptotic-vs-determinant " << gap_ad << ")\n";
    }
    summary["times"] = per_time;
    atomic_write(cfg.outputs / "solve_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_haar(const RunConfig& cfg) {
    if (cfg.haar_level < 0 || cfg.haar_level > 24)
        throw invalid_input("haar level must be between 0 and 24");
    const std::size_t n = std::size_t{1} << cfg.haar_level;

    SampledPotential prof = cfg.profile;
    prof.xmin = cfg.xmin;
    prof.xmax = cfg.xmax;

    // cell averages at the requested dyadic level, their transform, and the
    // thresholded reconstruction
    const BlockPotential fine = to_blocks(prof, static_cast<int>(n), BlockRule::cell_average);
    std::vector<double> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = fine.wells[n - 1 - i].depth_root;  // wells are right-to-left
        cells[i] = -r * r;
    }
    const HaarCoefficients coeffs = haar_forward(cells);
    std::size_t kept = 0;
    double dropped_mass = 0.0;
    HaarCoefficients thr = coeffs;
    for (double& c : thr.coeffs) {
        if (std::abs(c) < cfg.haar_threshold) {
            dropped_mass += std::abs(c);
            c = 0.0;
        } else {
            ++kept;
        }
    }
    const std::vector<double> back = haar_inverse(thr);
    double recon_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        recon_err = std::max(recon_err, std::abs(back[i] - cells[i]));

    json out = {{"schema", SCHEMA}, {"command", "haar"}, {"config", config_echo(cfg)}};
    out["level"] = cfg.haar_level;
    out["threshold"] = cfg.haar_threshold;
    out["coefficients"] = coeffs.coeffs;
    out["kept"] = kept;
    out["kept_fraction"] = double(kept) / double(n);
    out["dropped_mass"] = dropped_mass;
    out["reconstruction_error"] = recon_err;

    if (cfg.haar_respectrum) {
        const BlockPotential compressed = haar_compress(prof, cfg.haar_level, cfg.haar_threshold);
        RunConfig sub = cfg;
        sub.n_blocks = static_cast<int>(n);
        const SpectrumRun full = compute_spectrum(sub, fine);
        const SpectrumRun comp = compute_spectrum(sub, compressed);
        out["spectrum_uncompressed"] = full.kappas;
        out["spectrum_compressed"] = comp.kappas;
        double delta = 0.0;
        for (std::size_t i = 0; i < std::min(full.kappas.size(), comp.kappas.size()); ++i)
            delta = std::max(delta, std::abs(full.kappas[i] - comp.kappas[i]));
        out["spectrum_max_delta"] =
            (full.kappas.size() == comp.kappas.size()) ? json(delta) : json(nullptr);
        out["spectrum_state_count_changed"] = full.kappas.size() != comp.kappas.size();
    }
    atomic_write(cfg.outputs / "haar.json", out.dump(2) + "\n");
    std::cout << "haar: level " << cfg.haar_level << ", kept " << kept << "/" << n << " -> "
              << (cfg.outputs / "haar.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering data and large-time KdV solutions for piecewise-constant wells"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outputs_override;
    std::string bound_override, norming_override;
    int nblocks_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON config file")->required();
        sub->add_option("-o,--outputs", outputs_override, "output directory (overrides config)");
        sub->add_option("--n-blocks", nblocks_override, "number of blocks (overrides config)");
        sub->add_option("--bound-method", bound_override, "invR|invB|qzero (overrides config)");
        sub->add_option("--norming-method", norming_override, "residue|ab (overrides config)");
    };
    CLI::App* sc = app.add_subcommand("scatter", "R/T on a real-k grid with unitarity residuals");
    CLI::App* sp = app.add_subcommand("spectrum", "bound states and norming constants");
    CLI::App* so = app.add_subcommand("solve", "large-time KdV solution samples");
    CLI::App* ha = app.add_subcommand("haar", "wavelet coefficients and compression report");
    for (CLI::App* sub : {sc, sp, so, ha}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = parse_config(config_path);
        if (!outputs_override.empty()) cfg.outputs = outputs_override;
        if (nblocks_override > 0) cfg.n_blocks = nblocks_override;
        if (!bound_override.empty()) {
            if (bound_override == "invR") cfg.bound_method = BoundMethod::inv_R;
            else if (bound_override == "invB") cfg.bound_method = BoundMethod::inv_B;
            else if (bound_override == "qzero") cfg.bound_method = BoundMethod::q_zero;
            else throw invalid_input("--bound-method must be invR, invB, or qzero");
        }
        if (!norming_override.empty()) {
            if (norming_override == "residue") cfg.norming_method = NormingMethod::residue;
            else if (norming_override == "ab") cfg.norming_method = NormingMethod::ab_ratio;
            else throw invalid_input("--norming-method must be residue or ab");
        }
        if (sc->parsed()) return cmd_scatter(cfg);
        if (sp->parsed()) return cmd_spectrum_run(cfg);
        if (so->parsed()) return cmd_solve(cfg);
        if (ha->parsed()) return cmd_haar(cfg);
        return EXIT_FAIL;  // unreachable: a subcommand is required
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_IO;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_FAIL;
    }
}
