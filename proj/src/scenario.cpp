#include "robrisk/scenario.hpp"

#include "robrisk/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace robrisk {

namespace {

double checked_total(const std::vector<double>& w, const char* what, bool strictly_positive) {
    if (w.empty())
        throw DomainError(std::string(what) + ": at least one outcome is required");
    double total = 0.0;
    for (double v : w) {
        if (!std::isfinite(v))
            throw DomainError(std::string(what) + ": non-finite weight");
        if (strictly_positive ? !(v > 0.0) : v < 0.0)
            throw DomainError(std::string(what) + (strictly_positive ? ": probabilities must be > 0"
                                                                    : ": weights must be >= 0"));
        total += v;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": weights sum to " << total << ", not 1";
        throw DomainError(os.str());
    }
    return total;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": length " << a << " does not match " << b;
        throw DimensionError(os.str());
    }
}

} // namespace

FiniteScenarioSpace::FiniteScenarioSpace(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
    const double total = checked_total(p_, "FiniteScenarioSpace", true);
    if (total != 1.0)
        for (double& v : p_) v /= total;
}

SpacePtr FiniteScenarioSpace::uniform(std::size_t n) {
    if (n == 0) throw DomainError("FiniteScenarioSpace: at least one outcome is required");
    return std::make_shared<const FiniteScenarioSpace>(
        std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SpacePtr FiniteScenarioSpace::make(std::vector<double> probabilities) {
    return std::make_shared<const FiniteScenarioSpace>(std::move(probabilities));
}

double FiniteScenarioSpace::min_probability() const noexcept {
    return *std::min_element(p_.begin(), p_.end());
}

bool FiniteScenarioSpace::is_uniform() const noexcept {
    const double u = 1.0 / static_cast<double>(p_.size());
    return std::all_of(p_.begin(), p_.end(),
                       [u](double v) { return std::abs(v - u) <= kProbabilityTolerance; });
}

MeasureWeights::MeasureWeights(std::vector<double> weights) : q_(std::move(weights)) {
    const double total = checked_total(q_, "MeasureWeights", false);
    if (total != 1.0)
        for (double& v : q_) v /= total;
}

MeasureWeights MeasureWeights::of(const FiniteScenarioSpace& space) {
    const auto p = space.probabilities();
    return MeasureWeights(std::vector<double>(p.begin(), p.end()));
}

ScenarioVariable::ScenarioVariable(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw DomainError("ScenarioVariable: null scenario space");
    require_same_size(values_.size(), space_->size(), "ScenarioVariable");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("ScenarioVariable: non-finite value");
}

ScenarioVariable ScenarioVariable::constant(SpacePtr space, double c) {
    const std::size_t n = space ? space->size() : 0;
    return ScenarioVariable(std::move(space), std::vector<double>(n, c));
}

bool ScenarioVariable::is_constant() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [first = values_.front()](double v) { return v == first; });
}

double ScenarioVariable::range() const noexcept {
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    return *hi - *lo;
}

ScenarioVariable ScenarioVariable::operator-() const {
    ScenarioVariable out = *this;
    for (double& v : out.values_) v = -v;
    return out;
}

ScenarioVariable& ScenarioVariable::operator+=(const ScenarioVariable& other) {
    require_same_size(other.size(), size(), "ScenarioVariable +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScenarioVariable& ScenarioVariable::operator-=(const ScenarioVariable& other) {
    require_same_size(other.size(), size(), "ScenarioVariable -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScenarioVariable& ScenarioVariable::operator+=(double c) {
    for (double& v : values_) v += c;
    return *this;
}

ScenarioVariable& ScenarioVariable::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

ScenarioVariable operator+(ScenarioVariable lhs, const ScenarioVariable& rhs) { return lhs += rhs; }
ScenarioVariable operator-(ScenarioVariable lhs, const ScenarioVariable& rhs) { return lhs -= rhs; }
ScenarioVariable operator+(ScenarioVariable lhs, double c) { return lhs += c; }
ScenarioVariable operator+(double c, ScenarioVariable rhs) { return rhs += c; }
ScenarioVariable operator-(ScenarioVariable lhs, double c) { return lhs += -c; }
ScenarioVariable operator*(double c, ScenarioVariable rhs) { return rhs *= c; }

double expectation(const ScenarioVariable& x, const MeasureWeights& q) {
    require_same_size(q.size(), x.size(), "expectation");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += q[i] * x[i];
    return sum;
}

double expectation(const ScenarioVariable& x) {
    const auto p = x.space()->probabilities();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += p[i] * x[i];
    return sum;
}

double left_quantile(const ScenarioVariable& x, const MeasureWeights& q, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("left_quantile: alpha must lie in (0,1)");
    require_same_size(q.size(), x.size(), "left_quantile");
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    double cumulative = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
        const double value = x[order[k]];
        // merge the whole atom before comparing
        while (k < order.size() && x[order[k]] == value) cumulative += q[order[k++]];
        if (cumulative >= alpha - kProbabilityTolerance) return value;
    }
    return x[order.back()];
}

double left_quantile(const ScenarioVariable& x, double alpha) {
    return left_quantile(x, MeasureWeights::of(*x.space()), alpha);
}

std::pair<double, double> ess_bounds(const ScenarioVariable& x) {
    const auto v = x.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
}

// ---------------------------------------------------------------------------
// CSV

const ScenarioVariable& ScenarioTable::column(const std::string& name) const {
    return columns[index_of(name)];
}

std::size_t ScenarioTable::index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ParseError("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_decimal(const std::string& cell, std::size_t line_no) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ": '" + cell +
                         "' is not a finite decimal number");
    return value;
}

} // namespace

ScenarioTable read_scenario_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_row(line);
            break;
        }
    }
    if (header.empty()) throw ParseError("CSV input has no header row");

    const bool has_prob = header.front() == "prob";
    const std::size_t first_var = has_prob ? 1 : 0;
    if (header.size() <= first_var) throw ParseError("CSV input has no variable columns");
    for (std::size_t c = first_var; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError("CSV header has an empty column name");
        if (header[c] == "prob") throw ParseError("`prob` is only allowed as the first column");
        if (std::find(header.begin() + first_var, header.begin() + c, header[c]) != header.begin() + c)
            throw ParseError("duplicate column name '" + header[c] + "'");
    }

    std::vector<double> probs;
    std::vector<std::vector<double>> data(header.size() - first_var);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(cells.size()));
        if (has_prob) probs.push_back(parse_decimal(cells[0], line_no));
        for (std::size_t c = first_var; c < cells.size(); ++c)
            data[c - first_var].push_back(parse_decimal(cells[c], line_no));
    }
    if (data.front().empty()) throw ParseError("CSV input has no data rows");

    ScenarioTable table;
    table.space = has_prob ? FiniteScenarioSpace::make(std::move(probs))
                           : FiniteScenarioSpace::uniform(data.front().size());
    table.names.assign(header.begin() + first_var, header.end());
    for (auto& col : data) table.columns.emplace_back(table.space, std::move(col));
    return table;
}

ScenarioTable read_scenario_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_scenario_csv(in);
}

} // namespace robrisk
