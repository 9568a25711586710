#ifndef CVAX_PORTFOLIO_HPP
#define CVAX_PORTFOLIO_HPP

#include "cvax/analytics.hpp"
#include "cvax/cva.hpp"
#include "cvax/market.hpp"
#include "cvax/transition_matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cvax {

// Fully resolved run inputs: market model, entities with factor loadings,
// deals and the netting set, parsed from one JSON portfolio file.
struct Portfolio {
    HullWhiteParams params;
    std::size_t n_paths = 10000;
    std::size_t oversample = 1;
    std::uint64_t seed = 1;
    DensityRule density = DensityRule::standard();

    std::vector<std::string> live_ratings;
    TransitionMatrix matrix; // annual; identity default column when absent
    CreditModelInputs credit;
    PortfolioDeals deals;
    NettingSet set;

    // Grid over the longest deal, carrying every cashflow and exercise
    // date.
    TimeGrid build_grid() const;

    void validate() const;
};

Portfolio parse_portfolio(const std::string& json_text,
                          const std::filesystem::path& base_dir = ".");
Portfolio load_portfolio(const std::filesystem::path& path);

struct RunConfig {
    std::filesystem::path portfolio_file;
    std::filesystem::path output_dir = "out";
    std::size_t n_paths = 0;    // 0: keep the portfolio file's value
    std::size_t oversample = 0; // 0: keep
    std::uint64_t seed = 0;     // 0: keep
    std::size_t workers = 1;
    std::string framework = "aggregate"; // forward | backward | aggregate

    void validate() const; // files exist, effective n_paths >= 100
};

// Portfolio with the config's overrides applied (flags win).
Portfolio load_run_inputs(const RunConfig& config);

} // namespace cvax

#endif
