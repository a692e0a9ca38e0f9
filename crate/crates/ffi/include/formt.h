#ifndef FORMT_H
#define FORMT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FormtStatus {
  FORMT_STATUS_OK = 0,
  FORMT_STATUS_NULL_ARGUMENT = 1,
  FORMT_STATUS_INVALID_UTF8 = 2,
  FORMT_STATUS_PARSE_ERROR = 3,
  FORMT_STATUS_SCHEMA_ERROR = 4,
  FORMT_STATUS_VAR_CAP_EXCEEDED = 5,
  FORMT_STATUS_UNKNOWN_NODE = 6,
  FORMT_STATUS_NO_REPORT = 7,
  FORMT_STATUS_INTERNAL = 8,
  FORMT_STATUS_PANIC = 9,
} FormtStatus;

// Opaque project handle.
typedef struct FormtProject FormtProject;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses `spec` and builds a project. `settings_json` may be null for
// defaults. On success `*out` receives a handle.
//
// # Safety
// `spec` and a non-null `settings_json` must be nul-terminated strings;
// `out` must be writable.
enum FormtStatus formt_project_new(const char *spec,
                                   const char *settings_json,
                                   struct FormtProject **out);

// # Safety
// `handle` must come from [`formt_project_new`] and not be used afterwards.
void formt_project_free(struct FormtProject *handle);

// # Safety
// `handle` must be live; `out` must be writable.
enum FormtStatus formt_project_translated(const struct FormtProject *handle, char **out);

// # Safety
// `handle` must be live; `out` must be writable.
enum FormtStatus formt_project_simplified(const struct FormtProject *handle, char **out);

// Mutant list as a JSON array.
//
// # Safety
// `handle` must be live; `out` must be writable.
enum FormtStatus formt_project_mutants_json(const struct FormtProject *handle, char **out);

// Replaces the test base with `{"tests": [...]}`.
//
// # Safety
// `handle` must be live; `tests_json` must be a nul-terminated string.
enum FormtStatus formt_project_set_tests_json(struct FormtProject *handle, const char *tests_json);

// Appends one test case object.
//
// # Safety
// `handle` must be live; `test_json` must be a nul-terminated string.
enum FormtStatus formt_project_add_test_json(struct FormtProject *handle, const char *test_json);

// Runs the kill analysis. When `out` is non-null it receives the report JSON.
//
// # Safety
// `handle` must be live; a non-null `out` must be writable.
enum FormtStatus formt_project_evaluate(struct FormtProject *handle, char **out);

// Latest report as JSON, or [`FormtStatus::NoReport`].
//
// # Safety
// `handle` must be live; `out` must be writable.
enum FormtStatus formt_project_report_json(const struct FormtProject *handle, char **out);

// Scene graph as JSON. A null `grouping_name` selects document order.
//
// # Safety
// `handle` must be live; a non-null `grouping_name` must be a nul-terminated
// string; `out` must be writable.
enum FormtStatus formt_project_scene_json(const struct FormtProject *handle,
                                          const char *grouping_name,
                                          char **out);

// Rendered SVG map. A null `grouping_name` selects document order.
//
// # Safety
// As for [`formt_project_scene_json`].
enum FormtStatus formt_project_scene_svg(const struct FormtProject *handle,
                                         const char *grouping_name,
                                         char **out);

// Conventional-logic reading of the node at `path` ("root" or "0.1").
//
// # Safety
// `handle` must be live; `path` must be a nul-terminated string; `out` must
// be writable.
enum FormtStatus formt_project_node_logic(const struct FormtProject *handle,
                                          const char *path,
                                          char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void formt_string_free(char *s);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *formt_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMT_H */
