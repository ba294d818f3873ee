#ifndef PBT_H
#define PBT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum PbtStatus {
  PBT_STATUS_OK = 0,
  PBT_STATUS_NULL_ARGUMENT = 1,
  PBT_STATUS_INVALID_UTF8 = 2,
  PBT_STATUS_SYNTAX = 3,
  PBT_STATUS_UNKNOWN_PROPERTY = 4,
  // Fuel exhaustion, non-pattern unification, non-ground negation and
  // other search failures.
  PBT_STATUS_RUNTIME = 5,
  PBT_STATUS_PANIC = 6,
} PbtStatus;

// A parsed program.
typedef struct PbtProgram PbtProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failure on this thread, or null. Valid until
// the next call into this library on the same thread.
const char *pbt_last_error(void);

// Parses program text into a new handle stored in `*out`.
//
// # Safety
// `source` is a NUL-terminated string; `out` is valid for a pointer write.
enum PbtStatus pbt_program_parse(const char *source, struct PbtProgram **out);

// Releases a program handle. Null is ignored.
//
// # Safety
// `program` is null or a handle from `pbt_program_parse` not yet freed.
void pbt_program_free(struct PbtProgram *program);

// Solves `goal`, writing a JSON array of `{"bindings": {..}}` objects.
// `max_solutions == 0` asks for all; `fuel == 0` uses the default budget.
//
// # Safety
// Pointers are valid as for `pbt_program_parse`.
enum PbtStatus pbt_solve(const struct PbtProgram *program,
                         const char *goal,
                         size_t max_solutions,
                         uint64_t fuel,
                         char **out_json);

// As `pbt_solve`, restricted to proofs that fit `cert`; each solution also
// carries the resolved certificate.
//
// # Safety
// Pointers are valid as for `pbt_program_parse`.
enum PbtStatus pbt_check(const struct PbtProgram *program,
                         const char *goal,
                         const char *cert,
                         size_t max_solutions,
                         uint64_t fuel,
                         char **out_json);

// Tests a property under `cert`, writing a JSON array of counterexamples
// `{"bindings": {..}, "cert": ".."}`.
//
// # Safety
// Pointers are valid as for `pbt_program_parse`.
enum PbtStatus pbt_run_property(const struct PbtProgram *program,
                                const char *property,
                                const char *cert,
                                uint64_t fuel,
                                char **out_json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void pbt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PBT_H */
