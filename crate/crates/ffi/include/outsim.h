/* C ABI for the outsim exact algebra engine.
 *
 * Requests and responses are JSON strings. A request is one object with a
 * "command" key ("symbol", "isotropy", "quat", "similitude", "outness",
 * "descend", "verify-claims") plus that command's parameters; payloads
 * mirror the CLI flags. The response object carries "code" (0 = decided,
 * 2 = unknown, 1 = error) and either "report" or "error".
 *
 * All returned strings are NUL-terminated UTF-8 owned by the library;
 * release them with outsim_free. The engine is pure and thread-safe.
 */

#ifndef OUTSIM_H
#define OUTSIM_H

#ifdef __cplusplus
extern "C" {
#endif

/* Evaluate a JSON request. Stores the exit code through code_out when it is
 * non-NULL. Returns a newly allocated response string, or NULL if request
 * is NULL or not valid UTF-8. */
char *outsim_eval(const char *request, int *code_out);

/* Release a string returned by this library. NULL is a no-op. */
void outsim_free(char *ptr);

/* Newly allocated engine version string; release with outsim_free. */
char *outsim_version_string(void);

#ifdef __cplusplus
}
#endif

#endif /* OUTSIM_H */
