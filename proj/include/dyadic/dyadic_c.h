#ifndef DYADIC_C_H
#define DYADIC_C_H

#include <stdint.h>

#if defined(_WIN32)
#define DY_API __declspec(dllexport)
#else
#define DY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI reuses them as process exit codes. */
enum {
  DY_OK = 0,
  DY_ERROR = 1,      /* unexpected internal failure */
  DY_ERR_INPUT = 2,  /* malformed instance or arguments */
  DY_ERR_EVAL = 3,   /* named evaluator error */
  DY_ERR_GATE = 4    /* a hard invariant failed */
};

typedef struct dy_instance dy_instance;

typedef struct dy_options {
  uint64_t seed;   /* ascent and suite seed */
  int threads;     /* worker threads for the suite */
  int exact;       /* nonzero: rational arithmetic where supported */
  int atomic;      /* nonzero: whole-leaf allocations */
  int variant;     /* nonzero: alternate readings of the conditions */
  int csv;         /* nonzero: attach a "csv" table to the report */
} dy_options;

DY_API void dy_options_init(dy_options* options);

/* Instances are opaque; every constructor returns DY_OK and writes *out, or
 * returns an error code and leaves *out null. Strings returned through
 * char** are heap-allocated; release them with dy_string_free. */
DY_API int dy_instance_load_file(const char* path, dy_instance** out);
DY_API int dy_instance_parse(const char* json_text, dy_instance** out);
DY_API int dy_instance_dump(const dy_instance* instance, char** json_out);
DY_API void dy_instance_free(dy_instance* instance);

/* what: norm | T | Tstar | mixed | weak | wolff */
DY_API int dy_eval(const dy_instance* instance, const char* what,
                   const dy_options* options, char** report_json);

/* what: thm12 | thm11 | sparse | carleson | dor | lemma45 | lemma47 | weak.
 * Returns DY_ERR_GATE (with the report still written) when a gate fails. */
DY_API int dy_check(const dy_instance* instance, const char* what,
                    const dy_options* options, char** report_json);

/* Runs the randomized property suite; scale multiplies every criterion's
 * instance count (1.0 = the full suite, 0 = empty). The summary is
 * byte-deterministic for a fixed seed. */
DY_API int dy_suite(uint64_t seed, double scale, const dy_options* options,
                    char** summary_json);

DY_API void dy_string_free(char* text);

/* Message for the most recent failure on this thread, or an empty string. */
DY_API const char* dy_last_error(void);

DY_API const char* dy_version(void);

#ifdef __cplusplus
}
#endif

#endif /* DYADIC_C_H */
