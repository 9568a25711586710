#include "cvax/transition_matrix.hpp"
#include "cvax/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cvax {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Accepts "6.28%" (percent) or "0.0628" (decimal).
double parse_prob(const std::string& cell, int lineno) {
    std::string s = trim(cell);
    bool pct = false;
    if (!s.empty() && s.back() == '%') {
        pct = true;
        s.pop_back();
    }
    try {
        const double v = std::stod(s);
        return pct ? v / 100.0 : v;
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(lineno) +
                         ": cannot parse probability '" + cell + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

std::vector<std::string> read_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string fmt_pct(double v) {
    std::ostringstream ss;
    ss.precision(10);
    ss << v * 100.0 << "%";
    return ss.str();
}

} // namespace

void TransitionMatrix::validate(double tol) const {
    const Eigen::Index n = static_cast<Eigen::Index>(ratings.size());
    require(n >= 2, "transition matrix needs at least one live rating and D");
    require(q.rows() == n && q.cols() == n, "transition matrix shape mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            require(q(i, j) >= -tol, "transition probability negative");
            sum += q(i, j);
        }
        require(std::abs(sum - 1.0) <= 1e-12 + tol,
                "transition matrix row " + std::to_string(i) +
                    " does not sum to 1");
    }
    // Absorbing default state.
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        require(std::abs(q(n - 1, j)) <= tol, "default state must be absorbing");
    require(std::abs(q(n - 1, n - 1) - 1.0) <= tol,
            "default state must be absorbing");
}

TransitionMatrix TransitionMatrix::identity(std::vector<std::string> ratings) {
    TransitionMatrix m;
    m.q = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(ratings.size()),
                                    static_cast<Eigen::Index>(ratings.size()));
    m.ratings = std::move(ratings);
    return m;
}

TransitionMatrix TransitionMatrix::from_csv_text(const std::string& text) {
    const auto lines = read_lines(text);
    require(!lines.empty(), "empty transition matrix file");
    const auto header = split_csv(lines[0]);
    require(header.size() >= 3, "transition matrix header too short");

    TransitionMatrix m;
    m.ratings.assign(header.begin() + 1, header.end());
    const Eigen::Index n = static_cast<Eigen::Index>(m.ratings.size());
    m.q.resize(n, n);
    Eigen::Index row = 0;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (trim(lines[l]).empty()) continue;
        const auto cells = split_csv(lines[l]);
        if (cells.size() != static_cast<std::size_t>(n) + 1)
            throw InputError("line " + std::to_string(l + 1) +
                             ": expected " + std::to_string(n + 1) + " cells");
        require(row < n, "too many transition matrix rows");
        for (Eigen::Index j = 0; j < n; ++j)
            m.q(row, j) = parse_prob(cells[static_cast<std::size_t>(j) + 1],
                                     static_cast<int>(l + 1));
        ++row;
    }
    require(row == n, "too few transition matrix rows");
    m.validate(1e-6); // ingested tables are rounded; tolerate print noise
    return m;
}

TransitionMatrix TransitionMatrix::from_file(const std::string& path) {
    return from_csv_text(slurp(path));
}

std::string TransitionMatrix::to_csv_text() const {
    std::ostringstream out;
    out << "Transition Matrix";
    for (const auto& r : ratings) out << "," << r;
    out << "\n";
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        out << ratings[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < q.cols(); ++j) out << "," << fmt_pct(q(i, j));
        out << "\n";
    }
    return out.str();
}

PropagationResult propagate_matrix(const TransitionMatrix& m,
                                   std::size_t horizon_steps) {
    m.validate(1e-9);
    const Eigen::Index n = static_cast<Eigen::Index>(m.n_ratings());
    const Eigen::Index live = n - 1;

    PropagationResult out;
    out.distribution.reserve(horizon_steps + 1);
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(live, n);
    for (Eigen::Index r = 0; r < live; ++r) dist(r, r) = 1.0;
    out.distribution.push_back(dist);
    for (std::size_t s = 1; s <= horizon_steps; ++s) {
        dist = dist * m.q;
        out.distribution.push_back(dist);
    }
    return out;
}

void PDTable::validate() const {
    require(!ratings.empty() && !tenors.empty(), "PD table is empty");
    require(pd.rows() == static_cast<Eigen::Index>(tenors.size()) &&
                pd.cols() == static_cast<Eigen::Index>(ratings.size()),
            "PD table shape mismatch");
    for (Eigen::Index c = 0; c < pd.cols(); ++c) {
        double prev = 0.0;
        for (Eigen::Index r = 0; r < pd.rows(); ++r) {
            require(pd(r, c) >= 0.0 && pd(r, c) <= 1.0, "PD outside [0,1]");
            require(pd(r, c) >= prev - 1e-12,
                    "PD table column " + ratings[static_cast<std::size_t>(c)] +
                        " not monotone");
            prev = pd(r, c);
        }
    }
}

PDTable PDTable::from_csv_text(const std::string& text) {
    const auto lines = read_lines(text);
    require(!lines.empty(), "empty PD table file");
    const auto header = split_csv(lines[0]);
    require(header.size() >= 2, "PD table header too short");

    PDTable t;
    t.ratings.assign(header.begin() + 1, header.end());
    std::vector<std::vector<double>> rows;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (trim(lines[l]).empty()) continue;
        const auto cells = split_csv(lines[l]);
        if (cells.size() != t.ratings.size() + 1)
            throw InputError("line " + std::to_string(l + 1) + ": expected " +
                             std::to_string(t.ratings.size() + 1) + " cells");
        try {
            t.tenors.push_back(std::stod(cells[0]));
        } catch (const std::exception&) {
            throw InputError("line " + std::to_string(l + 1) +
                             ": cannot parse tenor '" + cells[0] + "'");
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c)
            row.push_back(parse_prob(cells[c], static_cast<int>(l + 1)));
        rows.push_back(std::move(row));
    }
    t.pd.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(t.ratings.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < t.ratings.size(); ++c)
            t.pd(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
    t.validate();
    return t;
}

PDTable PDTable::from_file(const std::string& path) {
    return from_csv_text(slurp(path));
}

std::string PDTable::to_csv_text() const {
    std::ostringstream out;
    out << "P(Default)";
    for (const auto& r : ratings) out << "," << r;
    out << "\n";
    for (Eigen::Index i = 0; i < pd.rows(); ++i) {
        out << tenors[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < pd.cols(); ++j) out << "," << fmt_pct(pd(i, j));
        out << "\n";
    }
    return out.str();
}

} // namespace cvax
