#include "cvax/portfolio.hpp"
#include "cvax/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cvax {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    require(is.good(), "cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

ZeroCurve parse_curve(const json& j, const std::filesystem::path& base_dir) {
    if (j.is_string())
        return ZeroCurve::from_file((base_dir / j.get<std::string>()).string());
    if (j.contains("file"))
        return ZeroCurve::from_file(
            (base_dir / j.at("file").get<std::string>()).string());
    return ZeroCurve::flat(j.at("flat").get<double>());
}

std::size_t rating_index(const std::vector<std::string>& ratings,
                         const std::string& label) {
    for (std::size_t i = 0; i < ratings.size(); ++i)
        if (ratings[i] == label) return i;
    throw InputError("unknown rating label " + label);
}

CashflowInstrument parse_swap(const json& j) {
    return make_vanilla_swap(
        j.value("id", std::string("swap")), j.at("notional").get<double>(),
        j.at("fixed_rate").get<double>(), j.value("start", 0.0),
        j.at("end").get<double>(), j.value("fixed_frequency", 1),
        j.value("float_frequency", 1), j.at("pay_fixed").get<bool>());
}

void parse_deal(const json& j, PortfolioDeals& deals) {
    const std::string type = j.value("type", "swap");
    if (type == "swap") {
        deals.linear.push_back(parse_swap(j));
    } else if (type == "bermudan") {
        BermudanSwaption b;
        b.id = j.at("id").get<std::string>();
        b.exercise_dates = j.at("exercise_dates").get<std::vector<double>>();
        b.underlying = parse_swap(j.at("underlying"));
        b.underlying.id = b.id + "-underlying";
        b.basis_degree = j.value("basis_degree", 2);
        deals.bermudan.push_back(std::move(b));
    } else {
        throw InputError("unknown deal type " + type);
    }
}

CSATerms parse_csa(const json& j, const std::vector<std::string>& ratings) {
    CSATerms csa = CSATerms::none(ratings.size());
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        auto value_of = [](const json& v) {
            if (v.is_string()) {
                require(v.get<std::string>() == "inf",
                        "threshold must be a number or \"inf\"");
                return CSATerms::kUncollateralized;
            }
            return v.get<double>();
        };
        if (t.is_array()) {
            require(t.size() == ratings.size(),
                    "thresholds array must cover every live rating");
            for (std::size_t k = 0; k < ratings.size(); ++k)
                csa.rating_thresholds[k] = value_of(t[k]);
        } else {
            for (std::size_t k = 0; k < ratings.size(); ++k) {
                require(t.contains(ratings[k]),
                        "no threshold given for rating " + ratings[k]);
                csa.rating_thresholds[k] = value_of(t.at(ratings[k]));
            }
        }
    }
    if (j.contains("ate_rating"))
        csa.ate_rating = rating_index(ratings, j.at("ate_rating"));
    if (j.contains("mutual_put_dates"))
        csa.mutual_put_dates = j.at("mutual_put_dates").get<std::vector<double>>();
    csa.execution_barrier = j.value("execution_barrier", 0.0);
    csa.validate();
    return csa;
}

} // namespace

TimeGrid Portfolio::build_grid() const {
    std::vector<double> cashflow_dates, exercise_dates;
    double horizon = 0.0;
    auto add_linear = [&](const CashflowInstrument& d) {
        for (double t : d.event_dates()) cashflow_dates.push_back(t);
        horizon = std::max(horizon, d.last_pay_time());
    };
    for (const auto& d : deals.linear) add_linear(d);
    for (const auto& d : deals.bermudan) {
        add_linear(d.underlying);
        for (double t : d.exercise_dates) exercise_dates.push_back(t);
    }
    for (double t : set.csa.mutual_put_dates) cashflow_dates.push_back(t);
    require(horizon > 0.0, "portfolio has no cashflows");
    return cvax::build_time_grid(horizon, cashflow_dates, exercise_dates,
                                 density);
}

void Portfolio::validate() const {
    require(n_paths >= 1, "n_paths must be positive");
    require(oversample >= 1, "oversample must be at least 1");
    require(!live_ratings.empty(), "no ratings defined");
    require(!deals.linear.empty() || !deals.bermudan.empty(),
            "portfolio has no deals");
    set.validate();
    matrix.validate(1e-9);
    credit.factors.validate();
    for (const auto& e : credit.entities) {
        require(e.current_rating < live_ratings.size(),
                "entity " + e.name + " has an out-of-range rating");
        e.pd_curve.validate();
    }
    auto known_deal = [&](const std::string& id) {
        for (const auto& d : deals.linear)
            if (d.id == id) return true;
        for (const auto& d : deals.bermudan)
            if (d.id == id) return true;
        return false;
    };
    for (const auto& id : set.deal_ids)
        require(known_deal(id), "netting set references unknown deal " + id);
    auto known_entity = [&](const std::string& name) {
        for (const auto& e : credit.entities)
            if (e.name == name) return true;
        return false;
    };
    require(known_entity(set.counterparty),
            "counterparty " + set.counterparty + " has no entity definition");
    require(known_entity(set.self_entity),
            "self entity " + set.self_entity + " has no entity definition");
}

Portfolio parse_portfolio(const std::string& json_text,
                          const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad portfolio JSON: ") + e.what());
    }

    Portfolio p;
    if (doc.contains("curve")) p.params.curve = parse_curve(doc["curve"], base_dir);
    if (doc.contains("model")) {
        const json& m = doc["model"];
        p.params.mean_reversion = m.value("mean_reversion", 0.03);
        p.params.volatility = m.value("volatility", 0.01);
    }
    p.params.validate();
    p.n_paths = doc.value("n_paths", std::size_t{10000});
    p.oversample = doc.value("oversample", std::size_t{1});
    p.seed = doc.value("seed", std::uint64_t{1});

    p.live_ratings = doc.at("ratings").get<std::vector<std::string>>();
    require(!p.live_ratings.empty(), "ratings list is empty");
    if (doc.contains("matrix")) {
        p.matrix = TransitionMatrix::from_file(
            (base_dir / doc.at("matrix").get<std::string>()).string());
        require(p.matrix.n_live() == p.live_ratings.size(),
                "transition matrix size does not match the ratings list");
    } else {
        std::vector<std::string> labels = p.live_ratings;
        labels.push_back("D");
        p.matrix = TransitionMatrix::identity(labels);
    }

    std::vector<CreditEntity> entities;
    std::vector<std::vector<double>> loadings;
    std::size_t n_sys = 1;
    for (const json& je : doc.at("entities")) {
        CreditEntity e;
        e.name = je.at("name").get<std::string>();
        e.current_rating =
            rating_index(p.live_ratings, je.at("rating").get<std::string>());
        const double recovery = je.value("recovery", 0.4);
        if (je.contains("pd")) {
            e.pd_curve.rating_or_name = e.name;
            e.pd_curve.tenors = je["pd"].at("tenors").get<std::vector<double>>();
            e.pd_curve.cumulative_pd =
                je["pd"].at("cumulative_pd").get<std::vector<double>>();
            e.pd_curve.recovery = recovery;
        } else {
            std::vector<double> tenors;
            for (double t = 1.0; t <= 30.0; t += 1.0) tenors.push_back(t);
            e.pd_curve = pd_from_flat_spread(
                e.name, je.at("spread").get<double>(), recovery, tenors);
        }
        e.pd_curve.validate();
        if (je.contains("fat_tail_df"))
            e.fat_tail_df = je.at("fat_tail_df").get<double>();
        std::vector<double> row =
            je.value("loadings", std::vector<double>{0.0});
        n_sys = std::max(n_sys, row.size());
        loadings.push_back(std::move(row));
        entities.push_back(std::move(e));
    }
    require(!entities.empty(), "no entities defined");

    FactorModel factors;
    factors.market_loadings = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(n_sys));
    factors.market_loadings(0, 0) = 1.0;
    factors.market_idio = Eigen::VectorXd::Zero(1);
    factors.credit_loadings = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(entities.size()), static_cast<Eigen::Index>(n_sys));
    factors.credit_idio = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(entities.size()));
    for (std::size_t i = 0; i < entities.size(); ++i) {
        double ss = 0.0;
        for (std::size_t k = 0; k < loadings[i].size(); ++k) {
            factors.credit_loadings(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(k)) = loadings[i][k];
            ss += loadings[i][k] * loadings[i][k];
        }
        require(ss <= 1.0 + 1e-12,
                "entity " + entities[i].name + " loadings exceed unit variance");
        factors.credit_idio(static_cast<Eigen::Index>(i)) =
            std::sqrt(std::max(0.0, 1.0 - ss));
    }
    factors.validate();

    p.credit.entities = std::move(entities);
    p.credit.factors = std::move(factors);
    p.credit.matrix = p.matrix;
    p.credit.live_ratings = p.live_ratings;
    p.credit.oversample = p.oversample;
    p.credit.seed = p.seed;

    for (const json& jd : doc.at("deals")) parse_deal(jd, p.deals);

    const json& ns = doc.at("netting_set");
    p.set.id = ns.value("id", std::string("ns"));
    p.set.counterparty = ns.at("counterparty").get<std::string>();
    p.set.self_entity = ns.at("self").get<std::string>();
    if (ns.contains("deals")) {
        p.set.deal_ids = ns.at("deals").get<std::vector<std::string>>();
    } else {
        for (const auto& d : p.deals.linear) p.set.deal_ids.push_back(d.id);
        for (const auto& d : p.deals.bermudan) p.set.deal_ids.push_back(d.id);
    }
    if (ns.contains("csa")) p.set.csa = parse_csa(ns.at("csa"), p.live_ratings);
    else p.set.csa = CSATerms::none(p.live_ratings.size());

    p.validate();
    return p;
}

Portfolio load_portfolio(const std::filesystem::path& path) {
    return parse_portfolio(read_file(path), path.parent_path());
}

void RunConfig::validate() const {
    require(std::filesystem::exists(portfolio_file),
            "portfolio file not found: " + portfolio_file.string());
    require(framework == "forward" || framework == "backward" ||
                framework == "aggregate",
            "unknown framework " + framework);
    require(workers >= 1, "workers must be at least 1");
}

Portfolio load_run_inputs(const RunConfig& config) {
    config.validate();
    Portfolio p = load_portfolio(config.portfolio_file);
    if (config.n_paths) p.n_paths = config.n_paths;
    if (config.oversample) {
        p.oversample = config.oversample;
        p.credit.oversample = config.oversample;
    }
    if (config.seed) {
        p.seed = config.seed;
        p.credit.seed = config.seed;
    }
    require(p.n_paths >= 100, "n_paths must be at least 100");
    return p;
}

} // namespace cvax
