// cvax: counterparty credit engine command-line driver.
//
// Subcommands: calibrate-matrix, gen-scenarios, value, aggregate, run,
// greeks, incremental, wrongway, boundary. Exit codes: 0 success, 2 input
// error, 3 numerical failure, 4 job failure. CVAX_OUTPUT_DIR and
// CVAX_WORKERS override the corresponding flags.

#include "cvax/analytics.hpp"
#include "cvax/errors.hpp"
#include "cvax/gridstore.hpp"
#include "cvax/matrix_calibration.hpp"
#include "cvax/portfolio.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cvax;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitJob = 4;

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    require(os.good(), "cannot write " + path.string());
    os << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream is(path);
    require(is.good(), "cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct CommonOpts {
    RunConfig config;

    void attach(CLI::App* cmd) {
        cmd->add_option("--portfolio", config.portfolio_file,
                        "portfolio JSON file")
            ->required();
        cmd->add_option("--out", config.output_dir, "output directory");
        cmd->add_option("--paths", config.n_paths, "override path count");
        cmd->add_option("--oversample", config.oversample,
                        "override credit oversampling");
        cmd->add_option("--seed", config.seed, "override seed");
        cmd->add_option("--workers", config.workers, "worker thread count");
        cmd->add_option("--framework", config.framework,
                        "forward | backward | aggregate");
    }

    void apply_env() {
        if (const char* dir = std::getenv("CVAX_OUTPUT_DIR"))
            config.output_dir = dir;
        if (const char* w = std::getenv("CVAX_WORKERS"))
            config.workers = static_cast<std::size_t>(std::stoul(w));
    }
};

json result_to_json(const CVAResult& r) {
    return {{"cva", r.cva},
            {"dva", r.dva},
            {"total", r.total},
            {"mc_standard_error", r.mc_standard_error}};
}

std::string exposure_csv(const CVAResult& r) {
    std::ostringstream os;
    os << "t,EE,ENE\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.times.size(); ++i)
        os << r.times[i] << ',' << r.ee_profile[i] << ',' << r.ene_profile[i]
           << '\n';
    return os.str();
}

void print_result(const std::string& label, const CVAResult& r) {
    std::cout << std::left << std::setw(12) << label << std::right
              << std::setw(16) << "CVA" << std::setw(16) << "DVA"
              << std::setw(16) << "total" << std::setw(16) << "MC SE" << '\n'
              << std::setw(12) << ' ' << std::setw(16) << r.cva
              << std::setw(16) << r.dva << std::setw(16) << r.total
              << std::setw(16) << r.mc_standard_error << '\n';
}

// Per-rating PD curves and grid-aligned rating distributions implied by
// the portfolio's annual transition matrix, for the backward framework.
RatingSpreadCurves matrix_spread_curves(const Portfolio& p, double recovery,
                                        double horizon) {
    const auto steps = static_cast<std::size_t>(std::ceil(horizon)) + 1;
    const PropagationResult prop = propagate_matrix(p.matrix, steps);
    RatingSpreadCurves curves;
    for (std::size_t k = 0; k < p.live_ratings.size(); ++k) {
        PDTermStructure c;
        c.rating_or_name = p.live_ratings[k];
        c.recovery = recovery;
        for (std::size_t n = 1; n <= steps; ++n) {
            c.tenors.push_back(static_cast<double>(n));
            c.cumulative_pd.push_back(prop.pd(k, n));
        }
        curves[p.live_ratings[k]] = std::move(c);
    }
    return curves;
}

const CreditEntity& entity_of(const Portfolio& p, const std::string& name) {
    for (const auto& e : p.credit.entities)
        if (e.name == name) return e;
    throw InputError("no entity named " + name);
}

struct RunArtifacts {
    Portfolio portfolio;
    TimeGrid grid;
    MarketScenarioSet market;
    std::vector<ValueCube> cubes; // netting-set deals, manifest order
};

// Scenario generation, job planning and parallel valuation: the shared
// front half of run/aggregate-style commands.
RunArtifacts produce_cubes(const RunConfig& config) {
    RunArtifacts a;
    a.portfolio = load_run_inputs(config);
    const Portfolio& p = a.portfolio;
    a.grid = p.build_grid();
    a.market = generate_market_scenarios(p.params, a.grid, p.n_paths, p.seed,
                                         p.credit.factors);

    const fs::path out = config.output_dir;
    fs::create_directories(out);
    const fs::path store = out / "scenarios.bin";
    ScenarioStore::save(a.market, store);

    ScenarioDescriptor desc;
    desc.id = "base";
    desc.path = store;
    desc.grid_hash = grid_hash(a.grid);
    desc.params_hash = params_hash(p.params);
    desc.n_paths = p.n_paths;

    DealLibrary lib;
    for (const auto& d : p.deals.linear) {
        require(lib.linear.emplace(d.id, d).second, "duplicate deal id " + d.id);
    }
    for (const auto& d : p.deals.bermudan) {
        require(!lib.linear.count(d.id) &&
                    lib.bermudan.emplace(d.id, d).second,
                "duplicate deal id " + d.id);
    }

    const JobManifest manifest = plan_jobs(lib, {desc}, out / "cubes");
    write_text(out / "manifest.json", manifest.to_json());

    const RunReport report = run_manifest(manifest, lib, config.workers);
    if (report.failed) {
        std::cerr << "valuation stage failed (" << report.failed << " jobs):\n";
        for (const auto& e : report.errors) std::cerr << "  " << e << '\n';
        std::exit(kExitJob);
    }

    for (const auto& id : p.set.deal_ids)
        for (const auto& job : manifest.jobs)
            if (job.deal_id == id)
                a.cubes.push_back(load_cube(job.output, desc.grid_hash));
    return a;
}

CVAResult compute_framework(const RunArtifacts& a, const std::string& framework,
                            const CreditScenarioSet* credit) {
    const Portfolio& p = a.portfolio;
    const CreditEntity& cpty = entity_of(p, p.set.counterparty);
    const CreditEntity& own = entity_of(p, p.set.self_entity);
    const ValueCube net = net_values(a.cubes);
    if (framework == "forward")
        return forward_cva(net, a.market, cpty.pd_curve, own.pd_curve);
    if (framework == "backward") {
        const auto cpty_dist = rating_distribution_on_grid(
            p.matrix, cpty.current_rating, a.grid);
        const auto own_dist =
            rating_distribution_on_grid(p.matrix, own.current_rating, a.grid);
        return backward_cva(a.cubes, p.set, a.market, p.live_ratings,
                            cpty_dist, own_dist,
                            matrix_spread_curves(p, cpty.pd_curve.recovery,
                                                 a.grid.horizon()),
                            cpty.pd_curve.recovery, own.pd_curve.recovery);
    }
    require(credit != nullptr, "aggregate framework needs credit scenarios");
    return aggregate_cva(net, a.market, *credit, p.set,
                         cpty.pd_curve.recovery, own.pd_curve.recovery);
}

json provenance(const RunArtifacts& a) {
    return {{"seed", a.portfolio.seed},
            {"n_paths", a.portfolio.n_paths},
            {"oversample", a.portfolio.oversample},
            {"grid_hash", grid_hash(a.grid)},
            {"params_hash", params_hash(a.portfolio.params)},
            {"scenario_hash", scenario_hash(a.market)}};
}

int cmd_calibrate_matrix(const fs::path& targets_file, const fs::path& out_dir) {
    const PDTable targets = PDTable::from_file(targets_file.string());
    const MatrixFitResult fit =
        risk_neutralize_matrix(targets, default_pd_weights(targets));

    fs::create_directories(out_dir);
    write_text(out_dir / "matrix.csv", fit.matrix.to_csv_text());
    write_text(out_dir / "fitted_pd.csv", fit.diagnostics.fitted.to_csv_text());

    std::ostringstream residuals;
    residuals << std::setprecision(17) << "tenor";
    for (const auto& r : targets.ratings) residuals << ',' << r;
    residuals << '\n';
    for (std::size_t i = 0; i < targets.tenors.size(); ++i) {
        residuals << targets.tenors[i];
        for (Eigen::Index j = 0; j < fit.diagnostics.residuals.cols(); ++j)
            residuals << ',' << fit.diagnostics.residuals(static_cast<Eigen::Index>(i), j);
        residuals << '\n';
    }
    write_text(out_dir / "residuals.csv", residuals.str());

    std::cout << "weighted RMS " << fit.diagnostics.weighted_rms << " after "
              << fit.diagnostics.iterations << " iterations\n"
              << fit.matrix.to_csv_text();
    if (!fit.diagnostics.converged) {
        std::cerr << "calibration did not converge; best-so-far written\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_run(const RunConfig& config, bool scenarios_only, bool value_only) {
    const RunArtifacts a = produce_cubes(config);
    if (scenarios_only || value_only) {
        std::cout << (value_only ? "cubes" : "scenarios") << " written to "
                  << config.output_dir << '\n';
        return 0;
    }
    const CreditScenarioSet credit = build_credit(a.portfolio.credit, a.market);
    const CVAResult result = compute_framework(a, config.framework, &credit);
    // The forward framework is cheap; always report it alongside for a
    // cross-framework comparison block.
    const CVAResult forward = compute_framework(a, "forward", nullptr);

    json report;
    report["framework"] = config.framework;
    report["result"] = result_to_json(result);
    report["comparison"] = {{"forward", result_to_json(forward)}};
    report["provenance"] = provenance(a);
    const fs::path out = config.output_dir;
    write_text(out / "cva_report.json", report.dump(2) + "\n");
    write_text(out / "exposure_profile.csv", exposure_csv(result));

    print_result(config.framework, result);
    print_result("forward", forward);
    return 0;
}

int cmd_greeks(const RunConfig& config, double curve_bump, double vol_bump,
               const std::string& cds_entity, double cds_bump) {
    const Portfolio p = load_run_inputs(config);
    const TimeGrid grid = p.build_grid();
    const CreditEntity& cpty = entity_of(p, p.set.counterparty);
    const CreditEntity& own = entity_of(p, p.set.self_entity);

    json report;
    if (curve_bump != 0.0 || vol_bump != 0.0 ||
        (cds_entity.empty() && cds_bump == 0.0)) {
        const GreekResult g = market_greek(
            p.deals, p.params, grid, p.n_paths, p.seed,
            MarketBump{curve_bump, vol_bump}, p.credit, p.set,
            cpty.pd_curve.recovery, own.pd_curve.recovery);
        report["market"] = {{"base", g.base},
                            {"bumped", g.bumped},
                            {"diff", g.diff},
                            {"per_unit", g.per_unit}};
        std::cout << "market greek: base " << g.base << " bumped " << g.bumped
                  << " per-unit " << g.per_unit << '\n';
    }
    if (!cds_entity.empty()) {
        const MarketScenarioSet market = generate_market_scenarios(
            p.params, grid, p.n_paths, p.seed, p.credit.factors);
        std::vector<ValueCube> cubes;
        for (const auto& d : p.deals.linear)
            cubes.push_back(value_cashflow_instrument(d, market));
        for (const auto& d : p.deals.bermudan)
            cubes.push_back(value_bermudan_swaption(d, market));
        const double delta = cds_delta(net_values(cubes), market, p.credit,
                                       p.set, cds_entity, cds_bump,
                                       cpty.pd_curve.recovery,
                                       own.pd_curve.recovery);
        report["cds"] = {{"entity", cds_entity},
                         {"bump", cds_bump},
                         {"delta", delta}};
        std::cout << "cds delta (" << cds_entity << "): " << delta << '\n';
    }
    write_text(fs::path(config.output_dir) / "greeks_report.json",
               report.dump(2) + "\n");
    return 0;
}

int cmd_incremental(const RunConfig& config) {
    const RunArtifacts a = produce_cubes(config);
    const Portfolio& p = a.portfolio;
    const CreditScenarioSet credit = build_credit(p.credit, a.market);
    const CreditEntity& cpty = entity_of(p, p.set.counterparty);
    const CreditEntity& own = entity_of(p, p.set.self_entity);

    json rows = json::array();
    std::vector<ValueCube> base;
    double running = 0.0;
    std::cout << std::left << std::setw(20) << "deal" << std::right
              << std::setw(16) << "incremental" << std::setw(16) << "total\n";
    for (std::size_t i = 0; i < a.cubes.size(); ++i) {
        const IncrementalResult r =
            incremental_cva(base, a.cubes[i], a.market, credit, p.set,
                            cpty.pd_curve.recovery, own.pd_curve.recovery);
        running += r.incremental;
        rows.push_back({{"deal", a.cubes[i].id},
                        {"incremental", r.incremental},
                        {"total", r.new_total}});
        std::cout << std::left << std::setw(20) << a.cubes[i].id << std::right
                  << std::setw(16) << r.incremental << std::setw(16)
                  << r.new_total << '\n';
        base.push_back(a.cubes[i]);
    }
    json report;
    report["incrementals"] = rows;
    report["sum"] = running;
    report["provenance"] = provenance(a);
    write_text(fs::path(config.output_dir) / "incremental_report.json",
               report.dump(2) + "\n");
    return 0;
}

int cmd_wrongway(const RunConfig& config, std::vector<double> correlations) {
    const RunArtifacts a = produce_cubes(config);
    const Portfolio& p = a.portfolio;
    const CreditEntity& cpty = entity_of(p, p.set.counterparty);
    const CreditEntity& own = entity_of(p, p.set.self_entity);
    if (correlations.empty()) correlations = {-0.5, 0.0, 0.5};

    const std::size_t n_entities = p.credit.entities.size();
    const auto points = wrong_way_sweep(
        net_values(a.cubes), a.market, p.credit, p.set, correlations,
        [&](double rho) { return FactorModel::market_plus_entities(rho, n_entities); },
        cpty.pd_curve.recovery, own.pd_curve.recovery);

    json rows = json::array();
    std::cout << std::right << std::setw(12) << "correlation" << std::setw(16)
              << "CVA" << std::setw(16) << "MC SE\n";
    for (const auto& pt : points) {
        if (pt.skipped) {
            rows.push_back({{"correlation", pt.correlation},
                            {"skipped", pt.diagnostic}});
            std::cout << std::setw(12) << pt.correlation << "  skipped: "
                      << pt.diagnostic << '\n';
            continue;
        }
        rows.push_back({{"correlation", pt.correlation},
                        {"result", result_to_json(pt.result)},
                        {"marginal_default_rate", pt.marginal_default_rate}});
        std::cout << std::setw(12) << pt.correlation << std::setw(16)
                  << pt.result.cva << std::setw(16)
                  << pt.result.mc_standard_error << '\n';
    }
    json report;
    report["sweep"] = rows;
    report["provenance"] = provenance(a);
    write_text(fs::path(config.output_dir) / "wrongway_report.json",
               report.dump(2) + "\n");
    return 0;
}

int cmd_boundary(const RunConfig& config, std::vector<double> rates) {
    const Portfolio p = load_run_inputs(config);
    BoundaryStudyConfig study;
    if (!p.deals.bermudan.empty()) {
        const BermudanSwaption& b = p.deals.bermudan.front();
        study.exercise_dates = b.exercise_dates;
        study.swap_end = b.underlying.last_pay_time();
    }
    if (rates.empty()) rates = {0.0, 0.01, 0.02};

    std::vector<double> cashflows, exercises = study.exercise_dates;
    if (exercises.empty())
        for (double t = 1.0; t < study.swap_end; t += 1.0)
            exercises.push_back(t);
    for (double t = 1.0; t <= study.swap_end + 0.5; t += 1.0)
        cashflows.push_back(std::min(t, study.swap_end));
    const TimeGrid grid =
        build_time_grid(study.swap_end, cashflows, exercises, p.density);
    const MarketScenarioSet market = generate_market_scenarios(
        p.params, grid, p.n_paths, p.seed, p.credit.factors);

    const auto points = exercise_boundary_study(market, rates, study);
    json rows = json::array();
    std::cout << std::right << std::setw(14) << "default rate" << std::setw(14)
              << "boundary" << std::setw(16) << "CVA blind" << std::setw(16)
              << "CVA aware\n";
    for (const auto& pt : points) {
        rows.push_back({{"default_rate", pt.default_rate},
                        {"boundary_coupon", pt.boundary_coupon},
                        {"cva_blind", pt.cva_blind},
                        {"cva_aware", pt.cva_aware}});
        std::cout << std::setw(14) << pt.default_rate << std::setw(14)
                  << pt.boundary_coupon << std::setw(16) << pt.cva_blind
                  << std::setw(16) << pt.cva_aware << '\n';
    }
    json report;
    report["boundary"] = rows;
    report["seed"] = p.seed;
    write_text(fs::path(config.output_dir) / "boundary_report.json",
               report.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterparty credit CVA engine"};
    app.require_subcommand(1);

    // calibrate-matrix
    fs::path targets_file, calib_out = "out";
    CLI::App* calibrate = app.add_subcommand(
        "calibrate-matrix", "fit a risk-neutral transition matrix to a PD table");
    calibrate->add_option("--targets", targets_file, "PD table CSV")->required();
    calibrate->add_option("--out", calib_out, "output directory");

    CommonOpts gen, val, agg, run, greeks, incremental, wrongway, boundary;
    CLI::App* c_gen = app.add_subcommand("gen-scenarios",
                                         "generate and persist market scenarios");
    gen.attach(c_gen);
    CLI::App* c_val =
        app.add_subcommand("value", "value all deals into cube files");
    val.attach(c_val);
    CLI::App* c_agg = app.add_subcommand(
        "aggregate", "value (or reuse) cubes and aggregate CVA");
    agg.attach(c_agg);
    CLI::App* c_run =
        app.add_subcommand("run", "scenarios, valuation jobs and aggregation");
    run.attach(c_run);

    double curve_bump = 0.0, vol_bump = 0.0, cds_bump = 0.0;
    std::string cds_entity;
    CLI::App* c_greeks = app.add_subcommand("greeks", "market and CDS greeks");
    greeks.attach(c_greeks);
    c_greeks->add_option("--curve-bump", curve_bump, "parallel zero-rate shift");
    c_greeks->add_option("--vol-bump", vol_bump, "volatility shift");
    c_greeks->add_option("--cds-entity", cds_entity, "entity to bump");
    c_greeks->add_option("--cds-bump", cds_bump, "CDS spread bump");

    CLI::App* c_inc = app.add_subcommand(
        "incremental", "sequential incremental CVA over the netting set");
    incremental.attach(c_inc);

    std::vector<double> correlations, rates;
    CLI::App* c_ww = app.add_subcommand("wrongway",
                                        "CVA vs market-credit correlation");
    wrongway.attach(c_ww);
    c_ww->add_option("--correlations", correlations, "sweep points");

    CLI::App* c_bd = app.add_subcommand(
        "boundary", "Bermudan exercise boundary vs flat default rate");
    boundary.attach(c_bd);
    c_bd->add_option("--rates", rates, "flat annual default rates");

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed()) return cmd_calibrate_matrix(targets_file, calib_out);
        for (CommonOpts* o :
             {&gen, &val, &agg, &run, &greeks, &incremental, &wrongway, &boundary})
            o->apply_env();
        if (c_gen->parsed()) return cmd_run(gen.config, true, false);
        if (c_val->parsed()) return cmd_run(val.config, false, true);
        if (c_agg->parsed()) return cmd_run(agg.config, false, false);
        if (c_run->parsed()) return cmd_run(run.config, false, false);
        if (c_greeks->parsed())
            return cmd_greeks(greeks.config, curve_bump, vol_bump, cds_entity,
                              cds_bump);
        if (c_inc->parsed()) return cmd_incremental(incremental.config);
        if (c_ww->parsed()) return cmd_wrongway(wrongway.config, correlations);
        if (c_bd->parsed()) return cmd_boundary(boundary.config, rates);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
