/* C interface to the robrisk library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an rr_status; on failure rr_last_error()
 * returns a message for the calling thread, valid until its next call. */
#ifndef ROBRISK_H
#define ROBRISK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ROBRISK_BUILDING_LIBRARY)
#    define RR_API __declspec(dllexport)
#  else
#    define RR_API __declspec(dllimport)
#  endif
#else
#  define RR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rr_status {
    RR_OK = 0,
    RR_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer, index out of range */
    RR_ERR_DIMENSION = 2,
    RR_ERR_DOMAIN = 3,
    RR_ERR_CAPABILITY = 4,
    RR_ERR_CONTRACT = 5,          /* solver post-condition failed */
    RR_ERR_SINGULAR_DESIGN = 6,
    RR_ERR_UNSUPPORTED_SCORE = 7,
    RR_ERR_PARSE = 8,
    RR_ERR_IO = 9,
    RR_ERR_INTERNAL = 10
} rr_status;

typedef enum rr_fit_mode { RR_FIT_STRICT = 0, RR_FIT_RELAXED = 1, RR_FIT_AUTO = 2 } rr_fit_mode;
typedef enum rr_portfolio_method { RR_PORTFOLIO_DIRECT = 0, RR_PORTFOLIO_REGRESSION = 1 } rr_portfolio_method;

typedef struct rr_dataset rr_dataset;
typedef struct rr_score rr_score;
typedef struct rr_risk rr_risk;
typedef struct rr_fit rr_fit;

typedef struct rr_solve_result {
    double d_value;
    double argmin_lo;
    double argmin_hi;
    double r_value;
    double tol_achieved;
    int64_t evaluations;
} rr_solve_result;

RR_API const char* rr_last_error(void);
RR_API const char* rr_status_name(rr_status status);
RR_API const char* rr_version(void);

/* Scenario data. probabilities may be NULL for a uniform space. */
RR_API rr_status rr_dataset_create(size_t n_outcomes, const double* probabilities, rr_dataset** out);
RR_API rr_status rr_dataset_add_column(rr_dataset* ds, const char* name, const double* values);
RR_API rr_status rr_dataset_read_csv(const char* path, rr_dataset** out);
RR_API rr_status rr_dataset_parse_csv(const char* text, rr_dataset** out);
RR_API size_t rr_dataset_outcomes(const rr_dataset* ds);
RR_API size_t rr_dataset_columns(const rr_dataset* ds);
RR_API const char* rr_dataset_column_name(const rr_dataset* ds, size_t column);
RR_API rr_status rr_dataset_column_index(const rr_dataset* ds, const char* name, size_t* out);
RR_API rr_status rr_dataset_column_values(const rr_dataset* ds, size_t column, double* out);
RR_API rr_status rr_dataset_probabilities(const rr_dataset* ds, double* out);
RR_API void rr_dataset_free(rr_dataset* ds);

/* Scores, e.g. "squared", "pinball:0.05". */
RR_API rr_status rr_score_parse(const char* spec, rr_score** out);
RR_API const char* rr_score_spec(const rr_score* s);
RR_API rr_status rr_score_evaluate(const rr_score* s, double x, double y, double* out);
RR_API rr_status rr_score_flags(const rr_score* s, int* positively_homogeneous, int* smooth_strictly_convex,
                                int* derivative_convex, int* derivative_concave);
RR_API void rr_score_free(rr_score* s);
RR_API const char* rr_score_catalog(void);

/* Risk measures, e.g. "el", "es:0.05". */
RR_API rr_status rr_risk_parse(const char* spec, rr_risk** out);
RR_API const char* rr_risk_spec(const rr_risk* r);
RR_API rr_status rr_risk_evaluate(const rr_risk* r, const rr_dataset* ds, size_t column, double* out);
/* q_out receives rr_dataset_outcomes(ds) weights. */
RR_API rr_status rr_risk_dual_maximizer(const rr_risk* r, const rr_dataset* ds, size_t column, double* q_out);
RR_API void rr_risk_free(rr_risk* r);
RR_API const char* rr_risk_catalog(void);

/* Robust risk and deviation of one column. */
RR_API rr_status rr_solve(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column, double tol,
                          rr_solve_result* out);
RR_API rr_status rr_brute_force_oracle(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                                       double grid_step, rr_solve_result* out);
RR_API rr_status rr_acceptability_index(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                                        double* out);
RR_API rr_status rr_minimax_check(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t column,
                                  int n_samples, double tolerance, int* passed, double* d_value,
                                  double* sampled_max);

/* Regression of one column on others. */
RR_API rr_status rr_regress(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t target,
                            const size_t* regressors, size_t n_regressors, double tol, rr_fit_mode mode,
                            rr_fit** out);
RR_API double rr_fit_mu(const rr_fit* f);
RR_API size_t rr_fit_num_betas(const rr_fit* f);
RR_API double rr_fit_beta(const rr_fit* f, size_t i);
RR_API double rr_fit_objective(const rr_fit* f);
RR_API double rr_fit_cd(const rr_fit* f);
RR_API double rr_fit_foc_residual(const rr_fit* f);
RR_API int64_t rr_fit_iterations(const rr_fit* f);
RR_API rr_status rr_fit_conditional_risk(const rr_fit* f, const double* x_row, size_t len, double* out);
RR_API void rr_fit_free(rr_fit* f);

/* weights_out receives n_assets values. */
RR_API rr_status rr_portfolio(const rr_risk* r, const rr_score* s, const rr_dataset* ds, const size_t* assets,
                              size_t n_assets, rr_portfolio_method method, double tol, double* weights_out,
                              double* deviation_out);
/* w_out receives n_instruments values. */
RR_API rr_status rr_hedge(const rr_risk* r, const rr_score* s, const rr_dataset* ds, size_t target,
                          const size_t* instruments, size_t n_instruments, double tol, rr_fit_mode mode,
                          double* mu_out, double* w_out, double* residual_out);

#ifdef __cplusplus
}
#endif

#endif
