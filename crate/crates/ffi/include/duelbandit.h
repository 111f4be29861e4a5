#ifndef DUELBANDIT_H
#define DUELBANDIT_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DbStatus {
  DB_STATUS_OK = 0,
  DB_STATUS_NULL_POINTER = 1,
  DB_STATUS_INVALID_ARGUMENT = 2,
  DB_STATUS_SOLVER_FAILURE = 3,
  DB_STATUS_CONFIG_ERROR = 4,
  DB_STATUS_PANIC = 5,
} DbStatus;

/**
 * A dueling learner over a finite context set.
 */
typedef struct DbLearner DbLearner;

/**
 * Seeded ChaCha20 generator.
 */
typedef struct DbRng DbRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread.
 */
size_t db_last_error_length(void);

/**
 * Copies the last error message into `buf` as a NUL-terminated string,
 * truncating to `len - 1` bytes. Returns the bytes written, excluding the NUL.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
size_t db_last_error_message(char *buf, size_t len);

struct DbRng *db_rng_new(uint64_t seed);

/**
 * Independent child stream `id` of `rng`; null if `rng` is null.
 *
 * # Safety
 * `rng` must be null or a live handle from this library.
 */
struct DbRng *db_rng_substream(const struct DbRng *rng, uint64_t id);

/**
 * # Safety
 * `rng` must be null or a handle from this library not yet freed.
 */
void db_rng_free(struct DbRng *rng);

/**
 * CCE-DB with confidence level `delta` in (0, 1).
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum DbStatus db_learner_new_ccedb(size_t k, double delta, struct DbLearner **out);

/**
 * MinMaxDB with an exponential-weights oracle over `n_hypotheses`
 * single-context preference matrices stored back to back in `tables`
 * (`n_hypotheses * k * k` doubles).
 *
 * # Safety
 * `tables` must hold `n_hypotheses * k * k` doubles; `out` must be valid.
 */
enum DbStatus db_learner_new_minmaxdb_finite(size_t k,
                                             size_t n_hypotheses,
                                             const double *tables,
                                             double gamma,
                                             struct DbLearner **out);

/**
 * # Safety
 * `learner` must be null or a live handle.
 */
size_t db_learner_k(const struct DbLearner *learner);

/**
 * Picks this round's joint distribution and duel. `joint_out` receives
 * `k * k` doubles; `a_out` and `b_out` the sampled arms.
 *
 * # Safety
 * All pointers must be valid; `joint_out` may be null to skip it.
 */
enum DbStatus db_learner_select(struct DbLearner *learner,
                                size_t context_id,
                                struct DbRng *rng,
                                double *joint_out,
                                size_t *a_out,
                                size_t *b_out);

/**
 * Feeds back the outcome of duel `(a, b)`: `+1` if `a` won, `-1` if `b` won.
 *
 * # Safety
 * `learner` must be a live handle.
 */
enum DbStatus db_learner_observe(struct DbLearner *learner,
                                 size_t context_id,
                                 size_t a,
                                 size_t b,
                                 int32_t outcome);

/**
 * # Safety
 * `learner` must be null or a handle not yet freed.
 */
void db_learner_free(struct DbLearner *learner);

/**
 * Coarse correlated equilibrium of the general-sum game `payoff`.
 *
 * # Safety
 * `payoff` and `joint_out` must hold `k * k` doubles; `violation_out` may be null.
 */
enum DbStatus db_solve_cce(size_t k,
                           const double *payoff,
                           double *joint_out,
                           double *violation_out);

/**
 * Inverse-gap feasibility point for the skew-symmetric prediction `y_hat`.
 *
 * # Safety
 * `y_hat` must hold `k * k` doubles and `p_out` `k`; `violation_out` may be null.
 */
enum DbStatus db_solve_igw(size_t k,
                           const double *y_hat,
                           double gamma,
                           double *p_out,
                           double *violation_out);

/**
 * Maximin strategy of the skew-symmetric game `p`.
 *
 * # Safety
 * `p` must hold `k * k` doubles and `q_out` `k`; `violation_out` may be null.
 */
enum DbStatus db_solve_nash(size_t k, const double *p, double *q_out, double *violation_out);

/**
 * Best-response regret of playing `joint` against `f_star` for one round.
 *
 * # Safety
 * `f_star` and `joint` must hold `k * k` doubles; `out` must be valid.
 */
enum DbStatus db_br_regret_step(size_t k, const double *f_star, const double *joint, double *out);

/**
 * Runs an experiment described by a JSON config. On success `summary_out`
 * receives a JSON array of per-seed summaries, to be released with
 * [`db_string_free`]. A seed that failed mid-run is reported in its summary
 * and also turns the status into `DB_STATUS_SOLVER_FAILURE`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `summary_out` must be valid.
 */
enum DbStatus db_run_experiment(const char *config_json, char **summary_out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void db_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUELBANDIT_H */
