#ifndef NECWB_H
#define NECWB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NecwbStatus {
  NECWB_STATUS_OK = 0,
  NECWB_STATUS_NULL_POINTER = 1,
  NECWB_STATUS_INVALID_UTF8 = 2,
  NECWB_STATUS_PARSE = 3,
  NECWB_STATUS_VALIDATION = 4,
  NECWB_STATUS_MISMATCH = 5,
  NECWB_STATUS_LIMIT_EXCEEDED = 6,
  NECWB_STATUS_PRECONDITION = 7,
  NECWB_STATUS_INTERNAL = 8,
} NecwbStatus;

/*
 A network code.
 */
typedef struct NecwbCode NecwbCode;

/*
 A network instance: multiple-unicast, NEC, or NEC with gadget roles.
 */
typedef struct NecwbInstance NecwbInstance;

/*
 The outcome of an exhaustive verification.
 */
typedef struct NecwbReport NecwbReport;

/*
 Message of the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next necwb call on this thread.
 */
const char *necwb_last_error(void);

/*
 Library version as a static string.
 */
const char *necwb_version(void);

/*
 # Safety
 `s` must come from a necwb function returning `char **`, or be NULL.
 */
void necwb_string_free(char *s);

/*
 Parses an instance description.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum NecwbStatus necwb_instance_from_json(const char *json, struct NecwbInstance **out);

/*
 # Safety
 `inst` must be a live instance handle; `out` must be writable.
 */
enum NecwbStatus necwb_instance_to_json(const struct NecwbInstance *inst, char **out);

/*
 Number of branches of a gadget instance, 0 for anything else.

 # Safety
 `inst` must be a live instance handle or NULL.
 */
size_t necwb_instance_branch_count(const struct NecwbInstance *inst);

/*
 # Safety
 `inst` must come from this library and not be used afterwards, or be NULL.
 */
void necwb_instance_free(struct NecwbInstance *inst);

/*
 Wraps a multiple-unicast instance in the reduction gadget.

 # Safety
 `mu` must be a live instance handle; `out` must be writable.
 */
enum NecwbStatus necwb_build_gadget(const struct NecwbInstance *mu, struct NecwbInstance **out);

/*
 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum NecwbStatus necwb_code_from_json(const char *json, struct NecwbCode **out);

/*
 # Safety
 `code` must be a live code handle; `out` must be writable.
 */
enum NecwbStatus necwb_code_to_json(const struct NecwbCode *code, char **out);

/*
 Content fingerprint of a code, `sha256:<hex>`.

 # Safety
 `code` must be a live code handle; `out` must be writable.
 */
enum NecwbStatus necwb_code_fingerprint(const struct NecwbCode *code, char **out);

/*
 # Safety
 `code` must come from this library and not be used afterwards, or be NULL.
 */
void necwb_code_free(struct NecwbCode *code);

/*
 The gadget around the two-relay network with `k` pairs.

 # Safety
 `out` must be writable.
 */
enum NecwbStatus necwb_cx_instance(size_t k, struct NecwbInstance **out);

/*
 The counterexample code at block length `n`; `rate_k` selects the rate-k
 reading instead of the native rate `k - k/n`.

 # Safety
 `out` must be writable.
 */
enum NecwbStatus necwb_cx_code(size_t k, uint32_t n, bool rate_k, struct NecwbCode **out);

/*
 Exhaustively verifies `code` on an NEC instance. A zero limit selects the
 default.

 # Safety
 `inst` and `code` must be live handles; `out` must be writable.
 */
enum NecwbStatus necwb_verify(const struct NecwbInstance *inst,
                              const struct NecwbCode *code,
                              uint64_t max_patterns,
                              uint64_t max_messages,
                              struct NecwbReport **out);

/*
 Writes the exact error fraction as `num / den`.

 # Safety
 `report` must be a live report handle; `num` and `den` must be writable.
 */
enum NecwbStatus necwb_report_epsilon(const struct NecwbReport *report,
                                      uint64_t *num,
                                      uint64_t *den);

/*
 Number of good messages, 0 for NULL.

 # Safety
 `report` must be a live report handle or NULL.
 */
uint64_t necwb_report_good_count(const struct NecwbReport *report);

/*
 Number of bad messages, 0 for NULL.

 # Safety
 `report` must be a live report handle or NULL.
 */
uint64_t necwb_report_bad_count(const struct NecwbReport *report);

/*
 Number of error patterns tried per message, 0 for NULL.

 # Safety
 `report` must be a live report handle or NULL.
 */
uint64_t necwb_report_pattern_count(const struct NecwbReport *report);

/*
 # Safety
 `report` must be a live report handle; `out` must be writable.
 */
enum NecwbStatus necwb_report_to_json(const struct NecwbReport *report, char **out);

/*
 # Safety
 `report` must come from this library and not be used afterwards, or be NULL.
 */
void necwb_report_free(struct NecwbReport *report);

#endif  /* NECWB_H */
