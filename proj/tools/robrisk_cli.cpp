// robrisk: batch front end over the C API.
#include "robrisk/robrisk.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

struct Failure {
    int exit_code;
    std::string message;
};

void check(rr_status st) {
    if (st == RR_OK) return;
    throw Failure{st == RR_ERR_CONTRACT ? 2 : 1, std::string(rr_status_name(st)) + ": " + rr_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<rr_dataset, Deleter<rr_dataset, rr_dataset_free>>;
using Score = std::unique_ptr<rr_score, Deleter<rr_score, rr_score_free>>;
using Risk = std::unique_ptr<rr_risk, Deleter<rr_risk, rr_risk_free>>;
using Fit = std::unique_ptr<rr_fit, Deleter<rr_fit, rr_fit_free>>;

// 12 significant digits, so reports are stable under last-bit noise.
Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

struct Config {
    std::string command;
    std::string input;
    std::string risk = "el";
    std::string score = "squared";
    double tol = 1e-8;
    std::string target;
    std::string regressor_list;
    std::vector<std::string> regressors;
    std::string format = "json";
    double grid_step = 1e-4;
    std::string mode = "auto";
};

struct Session {
    Dataset data;
    Risk risk;
    Score score;

    size_t column(const std::string& name) const {
        size_t idx = 0;
        check(rr_dataset_column_index(data.get(), name.c_str(), &idx));
        return idx;
    }
    std::string name(size_t idx) const { return rr_dataset_column_name(data.get(), idx); }
};

Session open_session(const Config& cfg, bool needs_score) {
    Session s;
    rr_dataset* ds = nullptr;
    check(rr_dataset_read_csv(cfg.input.c_str(), &ds));
    s.data.reset(ds);
    rr_risk* r = nullptr;
    check(rr_risk_parse(cfg.risk.c_str(), &r));
    s.risk.reset(r);
    if (needs_score) {
        rr_score* sc = nullptr;
        check(rr_score_parse(cfg.score.c_str(), &sc));
        s.score.reset(sc);
    }
    return s;
}

size_t target_column(const Session& s, const Config& cfg) {
    return cfg.target.empty() ? 0 : s.column(cfg.target);
}

rr_fit_mode fit_mode(const std::string& mode) {
    if (mode == "strict") return RR_FIT_STRICT;
    if (mode == "relaxed") return RR_FIT_RELAXED;
    return RR_FIT_AUTO;
}

Json solve_fields(const rr_solve_result& r) {
    Json j;
    j["r_value"] = number(r.r_value);
    j["d_value"] = number(r.d_value);
    j["argmin_lo"] = number(r.argmin_lo);
    j["argmin_hi"] = number(r.argmin_hi);
    j["evaluations"] = r.evaluations;
    return j;
}

Json header(const Config& cfg, const Session& s, bool with_score) {
    Json j;
    j["command"] = cfg.command;
    j["risk"] = rr_risk_spec(s.risk.get());
    if (with_score) j["score"] = rr_score_spec(s.score.get());
    j["outcomes"] = rr_dataset_outcomes(s.data.get());
    return j;
}

Json run_risk(const Config& cfg) {
    const auto s = open_session(cfg, false);
    const size_t col = target_column(s, cfg);
    double v = 0.0;
    check(rr_risk_evaluate(s.risk.get(), s.data.get(), col, &v));
    Json j = header(cfg, s, false);
    j["column"] = s.name(col);
    j["value"] = number(v);
    return j;
}

Json run_deviation(const Config& cfg) {
    const auto s = open_session(cfg, true);
    const size_t col = target_column(s, cfg);
    rr_solve_result r{};
    check(rr_solve(s.risk.get(), s.score.get(), s.data.get(), col, cfg.tol, &r));
    double index = 0.0;
    check(rr_acceptability_index(s.risk.get(), s.score.get(), s.data.get(), col, &index));
    Json j = header(cfg, s, true);
    j["column"] = s.name(col);
    j["d_value"] = number(r.d_value);
    j["r_value"] = number(r.r_value);
    j["acceptability_index"] = number(index);
    return j;
}

Json run_solve(const Config& cfg) {
    const auto s = open_session(cfg, true);
    const size_t col = target_column(s, cfg);
    rr_solve_result r{};
    check(rr_solve(s.risk.get(), s.score.get(), s.data.get(), col, cfg.tol, &r));
    Json j = header(cfg, s, true);
    j["column"] = s.name(col);
    j.update(solve_fields(r));
    return j;
}

std::vector<size_t> columns(const Session& s, const std::vector<std::string>& names) {
    std::vector<size_t> out;
    for (const auto& n : names) out.push_back(s.column(n));
    return out;
}

// Named regressors, or every column except the target.
std::vector<size_t> explanatory(const Session& s, const std::vector<std::string>& names, size_t target) {
    if (!names.empty()) return columns(s, names);
    std::vector<size_t> out;
    for (size_t i = 0; i < rr_dataset_columns(s.data.get()); ++i)
        if (i != target) out.push_back(i);
    return out;
}

Json named(const Session& s, const std::vector<size_t>& cols, const std::vector<double>& values) {
    Json j = Json::object();
    for (size_t i = 0; i < cols.size(); ++i) j[s.name(cols[i])] = number(values[i]);
    return j;
}

Json run_regress(const Config& cfg) {
    const auto s = open_session(cfg, true);
    const size_t y = target_column(s, cfg);
    const auto xs = explanatory(s, cfg.regressors, y);
    rr_fit* f = nullptr;
    check(rr_regress(s.risk.get(), s.score.get(), s.data.get(), y, xs.data(), xs.size(), cfg.tol,
                     fit_mode(cfg.mode), &f));
    const Fit fit(f);
    std::vector<double> betas(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) betas[i] = rr_fit_beta(fit.get(), i);

    Json j = header(cfg, s, true);
    j["mode"] = cfg.mode;
    j["target"] = s.name(y);
    j["mu"] = number(rr_fit_mu(fit.get()));
    j["betas"] = named(s, xs, betas);
    j["objective"] = number(rr_fit_objective(fit.get()));
    j["cd"] = number(rr_fit_cd(fit.get()));
    j["foc_residual"] = number(rr_fit_foc_residual(fit.get()));
    return j;
}

Json run_portfolio(const Config& cfg) {
    const auto s = open_session(cfg, true);
    std::vector<size_t> assets = columns(s, cfg.regressors);
    if (assets.empty())
        for (size_t i = 0; i < rr_dataset_columns(s.data.get()); ++i) assets.push_back(i);

    Json j = header(cfg, s, true);
    std::vector<double> w[2];
    double dev[2] = {0.0, 0.0};
    const char* names[2] = {"direct", "regression"};
    const rr_portfolio_method methods[2] = {RR_PORTFOLIO_DIRECT, RR_PORTFOLIO_REGRESSION};
    for (int m = 0; m < 2; ++m) {
        w[m].resize(assets.size());
        check(rr_portfolio(s.risk.get(), s.score.get(), s.data.get(), assets.data(), assets.size(), methods[m],
                           cfg.tol, w[m].data(), &dev[m]));
        Json block;
        block["weights"] = named(s, assets, w[m]);
        block["deviation"] = number(dev[m]);
        j[names[m]] = block;
    }
    double gap = 0.0;
    for (size_t i = 0; i < assets.size(); ++i) gap = std::max(gap, std::fabs(w[0][i] - w[1][i]));
    j["weight_discrepancy"] = number(gap);
    j["deviation_discrepancy"] = number(std::fabs(dev[0] - dev[1]));
    return j;
}

Json run_hedge(const Config& cfg) {
    const auto s = open_session(cfg, true);
    const size_t y = target_column(s, cfg);
    const auto xs = explanatory(s, cfg.regressors, y);
    double mu = 0.0, residual = 0.0;
    std::vector<double> w(xs.size());
    check(rr_hedge(s.risk.get(), s.score.get(), s.data.get(), y, xs.data(), xs.size(), cfg.tol,
                   fit_mode(cfg.mode), &mu, w.data(), &residual));
    Json j = header(cfg, s, true);
    j["target"] = s.name(y);
    j["mu"] = number(mu);
    j["w"] = named(s, xs, w);
    j["residual_deviation"] = number(residual);
    return j;
}

Json run_oracle_check(const Config& cfg) {
    const auto s = open_session(cfg, true);
    const size_t col = target_column(s, cfg);
    rr_solve_result exact{}, grid{};
    check(rr_solve(s.risk.get(), s.score.get(), s.data.get(), col, cfg.tol, &exact));
    check(rr_brute_force_oracle(s.risk.get(), s.score.get(), s.data.get(), col, cfg.grid_step, &grid));
    const double d_rel = std::fabs(exact.d_value - grid.d_value) / std::max(std::fabs(grid.d_value), 1e-300);
    const double lo_err = std::fabs(exact.argmin_lo - grid.argmin_lo);
    const double hi_err = std::fabs(exact.argmin_hi - grid.argmin_hi);

    Json j = header(cfg, s, true);
    j["column"] = s.name(col);
    j["grid_step"] = number(cfg.grid_step);
    j["solver"] = solve_fields(exact);
    j["oracle"] = solve_fields(grid);
    j["d_relative_error"] = number(exact.d_value == grid.d_value ? 0.0 : d_rel);
    j["argmin_lo_error"] = number(lo_err);
    j["argmin_hi_error"] = number(hi_err);
    j["agrees"] = (exact.d_value == grid.d_value || d_rel <= 1e-6) && lo_err <= 2 * cfg.grid_step &&
                  hi_err <= 2 * cfg.grid_step;
    return j;
}

void print_plain(const Json& j, const std::string& prefix, std::ostream& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            print_plain(*it, key, out);
        } else if (it->is_string()) {
            out << key << " " << it->get<std::string>() << "\n";
        } else {
            out << key << " " << it->dump() << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust risk and deviation measures from scenario data"};
    app.require_subcommand(1);
    Config cfg;

    struct Spec {
        const char* name;
        const char* help;
        bool score;
        bool fit;
    };
    const Spec specs[] = {
        {"risk", "evaluate a coherent risk measure on a column", false, false},
        {"deviation", "deviation and acceptability index of a column", true, false},
        {"solve", "robust risk, deviation and minimizer interval of a column", true, false},
        {"regress", "robust regression of --target on --regressors", true, true},
        {"portfolio", "minimum-deviation portfolio, direct and via regression", true, false},
        {"hedge", "optimal replication of --target by --regressors", true, true},
        {"oracle-check", "compare the solver with a grid scan", true, false},
    };
    for (const auto& sp : specs) {
        auto* sub = app.add_subcommand(sp.name, sp.help);
        sub->add_option("input", cfg.input, "scenario CSV file")->required();
        sub->add_option("--risk", cfg.risk, "risk measure (el, es:a, evar:a, msd:b, ml)")->capture_default_str();
        if (sp.score) {
            sub->add_option("--score", cfg.score, "score (squared, pinball:a, absolute, huber:b, linex:g, "
                                                  "expectile:a, barron:s, cost:g)")
                ->capture_default_str();
            sub->add_option("--tol", cfg.tol, "solver tolerance")->capture_default_str();
        }
        sub->add_option("--target", cfg.target, "target column (default: first column)");
        if (std::string(sp.name) == "regress" || std::string(sp.name) == "hedge" ||
            std::string(sp.name) == "portfolio")
            sub->add_option("--regressors", cfg.regressor_list,
                            std::string(sp.name) == "portfolio"
                                ? "comma-separated asset columns (default: all columns)"
                                : "comma-separated column names (default: all other columns)");
        if (sp.fit)
            sub->add_option("--mode", cfg.mode, "fit admission mode")
                ->check(CLI::IsMember({"strict", "relaxed", "auto"}))
                ->capture_default_str();
        if (std::string(sp.name) == "oracle-check")
            sub->add_option("--grid-step", cfg.grid_step, "oracle grid spacing")->capture_default_str();
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"json", "plain"}))
            ->capture_default_str();
        sub->final_callback([&cfg, sub] { cfg.command = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::stringstream names(cfg.regressor_list);
        for (std::string name; std::getline(names, name, ',');)
            if (!name.empty()) cfg.regressors.push_back(name);

        Json report;
        if (cfg.command == "risk") report = run_risk(cfg);
        else if (cfg.command == "deviation") report = run_deviation(cfg);
        else if (cfg.command == "solve") report = run_solve(cfg);
        else if (cfg.command == "regress") report = run_regress(cfg);
        else if (cfg.command == "portfolio") report = run_portfolio(cfg);
        else if (cfg.command == "hedge") report = run_hedge(cfg);
        else report = run_oracle_check(cfg);

        if (cfg.format == "plain") print_plain(report, "", std::cout);
        else std::cout << report.dump(2) << "\n";
        return 0;
    } catch (const Failure& f) {
        std::cerr << "robrisk: " << f.message << "\n";
        return f.exit_code;
    }
}
