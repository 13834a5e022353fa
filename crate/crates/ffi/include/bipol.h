#ifndef BIPOL_H
#define BIPOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. The non-zero error codes match the CLI exit codes.
 */
typedef enum BipolStatus {
  BIPOL_STATUS_OK = 0,
  BIPOL_STATUS_CONFIG = 1,
  BIPOL_STATUS_DATA = 2,
  BIPOL_STATUS_LABELER = 3,
  BIPOL_STATUS_NULL_POINTER = 4,
  BIPOL_STATUS_INVALID_UTF8 = 5,
  BIPOL_STATUS_PANIC = 6,
} BipolStatus;

/*
 A loaded lexicon.
 */
typedef struct BipolLexicon BipolLexicon;

/*
 A trained bag-of-words classifier.
 */
typedef struct BipolModel BipolModel;

/*
 The result of one evaluation run.
 */
typedef struct BipolReport BipolReport;

/*
 Headline numbers of a report.
 */
typedef struct BipolScores {
  double corpus_score;
  double sentence_score;
  double bipol;
  size_t total_count;
  size_t biased_count;
  size_t scored_count;
} BipolScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or NULL. The
 pointer stays valid until the next bipol call on the same thread.
 */
const char *bipol_last_error(void);

/*
 Library version as a static string.
 */
const char *bipol_version(void);

/*
 Load a builtin lexicon ("en" or "sv").

 # Safety
 `language` must be a NUL-terminated string; `out` must be writable.
 */
enum BipolStatus bipol_lexicon_builtin(const char *language, struct BipolLexicon **out);

/*
 Load a lexicon file.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BipolStatus bipol_lexicon_load(const char *path, struct BipolLexicon **out);

/*
 Parse a lexicon from its text form.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BipolStatus bipol_lexicon_parse(const char *text, struct BipolLexicon **out);

/*
 # Safety
 `lexicon` must be NULL or a handle from a `bipol_lexicon_*` constructor
 that has not been freed.
 */
void bipol_lexicon_free(struct BipolLexicon *lexicon);

/*
 Load a model written by `bipol train`. Any failure is reported as
 `BIPOL_STATUS_LABELER`.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BipolStatus bipol_model_load(const char *path, struct BipolModel **out);

/*
 Probability that `text` is biased under `model`.

 # Safety
 `model` must be a live handle, `text` NUL-terminated, `out` writable.
 */
enum BipolStatus bipol_model_biased_probability(const struct BipolModel *model,
                                                const char *text,
                                                double *out);

/*
 # Safety
 `model` must be NULL or a live handle from [`bipol_model_load`].
 */
void bipol_model_free(struct BipolModel *model);

/*
 Evaluate `n` texts with externally supplied labels: `biased[i]` non-zero
 marks text `i` as biased.

 # Safety
 `lexicon` must be a live handle; `texts` and `biased` must point to `n`
 elements each (either may be NULL when `n` is 0); `out` must be writable.
 */
enum BipolStatus bipol_evaluate_labels(const struct BipolLexicon *lexicon,
                                       const char *const *texts,
                                       const uint8_t *biased,
                                       size_t n,
                                       struct BipolReport **out);

/*
 Evaluate `n` texts labeled by `model` using up to `workers` threads
 (0 means one).

 # Safety
 `lexicon` and `model` must be live handles; `texts` must point to `n`
 NUL-terminated strings; `out` must be writable.
 */
enum BipolStatus bipol_evaluate_model(const struct BipolLexicon *lexicon,
                                      const struct BipolModel *model,
                                      const char *const *texts,
                                      size_t n,
                                      size_t workers,
                                      struct BipolReport **out);

/*
 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum BipolStatus bipol_report_scores(const struct BipolReport *report, struct BipolScores *out);

/*
 Serialize the full report as JSON. Free the string with
 [`bipol_string_free`].

 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum BipolStatus bipol_report_to_json(const struct BipolReport *report, char **out);

/*
 # Safety
 `report` must be NULL or a live handle from a `bipol_evaluate_*` call.
 */
void bipol_report_free(struct BipolReport *report);

/*
 # Safety
 `s` must be NULL or a string returned by this library, not yet freed.
 */
void bipol_string_free(char *s);

/*
 Combine corpus and sentence scores into the bipol score.

 # Safety
 `out` must be writable.
 */
enum BipolStatus bipol_combine(double corpus, double sentence, double *out);

/*
 Error rate and macro F1 for a binary confusion matrix. Returns
 `BIPOL_STATUS_DATA` when either metric is undefined.

 # Safety
 `error_rate` and `macro_f1` must be writable.
 */
enum BipolStatus bipol_confusion_metrics(uint64_t tp,
                                         uint64_t fp,
                                         uint64_t tn,
                                         uint64_t fn_,
                                         double *error_rate,
                                         double *macro_f1);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIPOL_H */
