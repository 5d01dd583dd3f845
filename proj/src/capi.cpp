#include "robrisk/robrisk.h"

#include "robrisk/applications.hpp"
#include "robrisk/conditional.hpp"
#include "robrisk/errors.hpp"
#include "robrisk/risk_measures.hpp"
#include "robrisk/robust_solver.hpp"
#include "robrisk/scenario.hpp"
#include "robrisk/scores.hpp"

#include <algorithm>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct rr_dataset {
    robrisk::ScenarioTable table;
};

struct rr_score {
    robrisk::ScoreFunction score;
    std::string spec;
};

struct rr_risk {
    robrisk::CoherentRiskMeasure risk;
    std::string spec;
};

struct rr_fit {
    robrisk::RegressionFit fit;
};

namespace {

thread_local std::string last_error;

rr_status fail(rr_status status, const std::string& what) {
    last_error = what;
    return status;
}

struct InvalidArgument {
    std::string what;
};

template <class F>
rr_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return RR_OK;
    } catch (const InvalidArgument& e) {
        return fail(RR_ERR_INVALID_ARGUMENT, e.what);
    } catch (const robrisk::DimensionError& e) {
        return fail(RR_ERR_DIMENSION, e.what());
    } catch (const robrisk::DomainError& e) {
        return fail(RR_ERR_DOMAIN, e.what());
    } catch (const robrisk::CapabilityError& e) {
        return fail(RR_ERR_CAPABILITY, e.what());
    } catch (const robrisk::ContractError& e) {
        return fail(RR_ERR_CONTRACT, e.what());
    } catch (const robrisk::SingularDesignError& e) {
        return fail(RR_ERR_SINGULAR_DESIGN, e.what());
    } catch (const robrisk::UnsupportedScoreError& e) {
        return fail(RR_ERR_UNSUPPORTED_SCORE, e.what());
    } catch (const robrisk::ParseError& e) {
        return fail(RR_ERR_PARSE, e.what());
    } catch (const robrisk::IoError& e) {
        return fail(RR_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RR_ERR_INTERNAL, "unknown error");
    }
}

template <class T>
void need(const T* p, const char* what) {
    if (!p) throw InvalidArgument{std::string(what) + " is null"};
}

const robrisk::ScenarioVariable& column_of(const rr_dataset* ds, size_t column) {
    need(ds, "dataset");
    if (column >= ds->table.columns.size())
        throw InvalidArgument{"column index " + std::to_string(column) + " out of range"};
    return ds->table.columns[column];
}

std::vector<robrisk::ScenarioVariable> columns_of(const rr_dataset* ds, const size_t* idx, size_t n) {
    if (n > 0) need(idx, "column index array");
    std::vector<robrisk::ScenarioVariable> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(column_of(ds, idx[i]));
    return out;
}

robrisk::FitMode to_mode(rr_fit_mode mode) {
    switch (mode) {
    case RR_FIT_STRICT: return robrisk::FitMode::Strict;
    case RR_FIT_RELAXED: return robrisk::FitMode::Relaxed;
    case RR_FIT_AUTO: return robrisk::FitMode::Auto;
    }
    throw InvalidArgument{"unknown fit mode"};
}

void copy_result(const robrisk::SolveResult& r, rr_solve_result* out) {
    *out = rr_solve_result{r.d_value, r.argmin_lo, r.argmin_hi, r.r_value, r.tol_achieved, r.evaluations};
}

} // namespace

extern "C" {

const char* rr_last_error(void) { return last_error.c_str(); }

const char* rr_status_name(rr_status status) {
    switch (status) {
    case RR_OK: return "ok";
    case RR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RR_ERR_DIMENSION: return "dimension error";
    case RR_ERR_DOMAIN: return "domain error";
    case RR_ERR_CAPABILITY: return "capability error";
    case RR_ERR_CONTRACT: return "solver contract error";
    case RR_ERR_SINGULAR_DESIGN: return "singular design";
    case RR_ERR_UNSUPPORTED_SCORE: return "unsupported score";
    case RR_ERR_PARSE: return "parse error";
    case RR_ERR_IO: return "io error";
    case RR_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* rr_version(void) { return "0.1.0"; }

rr_status rr_dataset_create(size_t n_outcomes, const double* probabilities, rr_dataset** out) {
    return guarded([&] {
        need(out, "out");
        auto ds = std::make_unique<rr_dataset>();
        ds->table.space = probabilities
                              ? robrisk::FiniteScenarioSpace::make(
                                    std::vector<double>(probabilities, probabilities + n_outcomes))
                              : robrisk::FiniteScenarioSpace::uniform(n_outcomes);
        *out = ds.release();
    });
}

rr_status rr_dataset_add_column(rr_dataset* ds, const char* name, const double* values) {
    return guarded([&] {
        need(ds, "dataset");
        need(name, "name");
        need(values, "values");
        const std::string n(name);
        if (n.empty()) throw robrisk::DomainError("column name is empty");
        auto& names = ds->table.names;
        if (std::find(names.begin(), names.end(), n) != names.end())
            throw robrisk::DomainError("duplicate column name '" + n + "'");
        const size_t len = ds->table.space->size();
        ds->table.columns.emplace_back(ds->table.space, std::vector<double>(values, values + len));
        names.push_back(n);
    });
}

rr_status rr_dataset_read_csv(const char* path, rr_dataset** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto ds = std::make_unique<rr_dataset>();
        ds->table = robrisk::read_scenario_csv_file(path);
        *out = ds.release();
    });
}

rr_status rr_dataset_parse_csv(const char* text, rr_dataset** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        std::istringstream in{std::string(text)};
        auto ds = std::make_unique<rr_dataset>();
        ds->table = robrisk::read_scenario_csv(in);
        *out = ds.release();
    });
}

size_t rr_dataset_outcomes(const rr_dataset* ds) { return ds ? ds->table.space->size() : 0; }
size_t rr_dataset_columns(const rr_dataset* ds) { return ds ? ds->table.columns.size() : 0; }

const char* rr_dataset_column_name(const rr_dataset* ds, size_t column) {
    if (!ds || column >= ds->table.names.size()) return nullptr;
    return ds->table.names[column].c_str();
}

rr_status rr_dataset_column_index(const rr_dataset* ds, const char* name, size_t* out) {
    return guarded([&] {
        need(ds, "dataset");
        need(name, "name");
        need(out, "out");
        *out = ds->table.index_of(name);
    });
}

rr_status rr_dataset_column_values(const rr_dataset* ds, size_t column, double* out) {
    return guarded([&] {
        need(out, "out");
        const auto v = column_of(ds, column).values();
        std::copy(v.begin(), v.end(), out);
    });
}

rr_status rr_dataset_probabilities(const rr_dataset* ds, double* out) {
    return guarded([&] {
        need(ds, "dataset");
        need(out, "out");
        const auto p = ds->table.space->probabilities();
        std::copy(p.begin(), p.end(), out);
    });
}

void rr_dataset_free(rr_dataset* ds) { delete ds; }

rr_status rr_score_parse(const char* spec, rr_score** out) {
    return guarded([&] {
        need(spec, "spec");
        need(out, "out");
        auto s = robrisk::parse_score(spec);
        *out = new rr_score{s, s.spec()};
    });
}

const char* rr_score_spec(const rr_score* s) { return s ? s->spec.c_str() : nullptr; }

rr_status rr_score_evaluate(const rr_score* s, double x, double y, double* out) {
    return guarded([&] {
        need(s, "score");
        need(out, "out");
        *out = s->score.evaluate(x, y);
    });
}

rr_status rr_score_flags(const rr_score* s, int* positively_homogeneous, int* smooth_strictly_convex,
                         int* derivative_convex, int* derivative_concave) {
    return guarded([&] {
        need(s, "score");
        if (positively_homogeneous) *positively_homogeneous = s->score.positively_homogeneous();
        if (smooth_strictly_convex) *smooth_strictly_convex = s->score.smooth_strictly_convex();
        if (derivative_convex) *derivative_convex = s->score.derivative_convex();
        if (derivative_concave) *derivative_concave = s->score.derivative_concave();
    });
}

void rr_score_free(rr_score* s) { delete s; }

const char* rr_score_catalog(void) {
    static const std::string text = robrisk::score_catalog();
    return text.c_str();
}

rr_status rr_risk_parse(const char* spec, rr_risk** out) {
    return guarded([&] {
        need(spec, "spec");
        need(out, "out");
        auto r = robrisk::parse_risk(spec);
        *out = new rr_risk{r, r.spec()};
    });
}

const char* rr_risk_spec(const rr_risk* r) { return r ? r->spec.c_str() : nullptr; }

rr_status rr_risk_evaluate(const rr_risk* r, const rr_dataset* ds, size_t column, double* out) {
    return guarded([&] {
        need(r, "risk");
        need(out, "out");
        *out = r->risk.evaluate(column_of(ds, column));
    });
}

rr_status rr_risk_dual_maximizer(const rr_risk* r, const rr_dataset* ds, size_t column, double* q_out) {
    return guarded([&] {
        need(r, "risk");
        need(q_out, "q_out");
        const auto q = r->risk.dual_maximizer(column_of(ds, column));
        std::copy(q.values().begin(), q.values().end(), q_out);
    });
}

void rr_risk_free(rr_risk* r) { delete r; }

const char* rr_risk_catalog(void) {
    static const std::string text = robrisk::risk_catalog();
    return text.c_str();
}

rr_status rr_solve(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column, double tol,
                   rr_solve_result* out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        need(out, "out");
        copy_result(robrisk::solve(r->risk, s->score, column_of(ds, column), tol), out);
    });
}

rr_status rr_brute_force_oracle(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                                double grid_step, rr_solve_result* out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        need(out, "out");
        copy_result(robrisk::brute_force_oracle(r->risk, s->score, column_of(ds, column), grid_step), out);
    });
}

rr_status rr_acceptability_index(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                                 double* out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        need(out, "out");
        *out = robrisk::acceptability_index(r->risk, s->score, column_of(ds, column));
    });
}

rr_status rr_minimax_check(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                           int n_samples, double tolerance, int* passed, double* d_value, double* sampled_max) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        const auto rep = robrisk::minimax_report(r->risk, s->score, column_of(ds, column), n_samples, tolerance);
        if (passed) *passed = rep.passed;
        if (d_value) *d_value = rep.d_value;
        if (sampled_max) *sampled_max = rep.sampled_max;
    });
}

rr_status rr_regress(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t target,
                     const size_t* regressors, size_t n_regressors, double tol, rr_fit_mode mode, rr_fit** out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        need(out, "out");
        auto res = robrisk::fit(r->risk, s->score, column_of(ds, target), columns_of(ds, regressors, n_regressors),
                                tol, to_mode(mode));
        *out = new rr_fit{std::move(res)};
    });
}

double rr_fit_mu(const rr_fit* f) { return f ? f->fit.mu_star : 0.0; }
size_t rr_fit_num_betas(const rr_fit* f) { return f ? f->fit.betas.size() : 0; }
double rr_fit_beta(const rr_fit* f, size_t i) { return f && i < f->fit.betas.size() ? f->fit.betas[i] : 0.0; }
double rr_fit_objective(const rr_fit* f) { return f ? f->fit.objective : 0.0; }
double rr_fit_cd(const rr_fit* f) { return f ? f->fit.cd : 0.0; }
double rr_fit_foc_residual(const rr_fit* f) { return f ? f->fit.foc_residual : 0.0; }
int64_t rr_fit_iterations(const rr_fit* f) { return f ? f->fit.iterations : 0; }

rr_status rr_fit_conditional_risk(const rr_fit* f, const double* x_row, size_t len, double* out) {
    return guarded([&] {
        need(f, "fit");
        need(out, "out");
        if (len > 0) need(x_row, "x_row");
        *out = robrisk::conditional_risk_row(f->fit, std::vector<double>(x_row, x_row + len));
    });
}

void rr_fit_free(rr_fit* f) { delete f; }

rr_status rr_portfolio(const rr_risk* r, const rr_score* s, const rr_dataset* ds, const size_t* assets,
                       size_t n_assets, rr_portfolio_method method, double tol, double* weights_out,
                       double* deviation_out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        need(weights_out, "weights_out");
        if (method != RR_PORTFOLIO_DIRECT && method != RR_PORTFOLIO_REGRESSION)
            throw InvalidArgument{"unknown portfolio method"};
        const auto m = method == RR_PORTFOLIO_DIRECT ? robrisk::PortfolioMethod::Direct
                                                     : robrisk::PortfolioMethod::Regression;
        const auto res = robrisk::min_deviation_portfolio(r->risk, s->score, columns_of(ds, assets, n_assets), m, tol);
        std::copy(res.weights.w.begin(), res.weights.w.end(), weights_out);
        if (deviation_out) *deviation_out = res.deviation;
    });
}

rr_status rr_hedge(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t target,
                   const size_t* instruments, size_t n_instruments, double tol, rr_fit_mode mode, double* mu_out,
                   double* w_out, double* residual_out) {
    return guarded([&] {
        need(r, "risk");
        need(s, "score");
        if (n_instruments > 0) need(w_out, "w_out");
        const auto res = robrisk::optimal_hedge(r->risk, s->score, column_of(ds, target),
                                                columns_of(ds, instruments, n_instruments), tol, to_mode(mode));
        if (mu_out) *mu_out = res.mu;
        std::copy(res.w.begin(), res.w.end(), w_out);
        if (residual_out) *residual_out = res.residual_deviation;
    });
}

} // extern "C"
