#ifndef NORMCT_H
#define NORMCT_H

/* C interface to the norm-equation toolkit. All payloads are JSON
 * strings; integers travel as decimal strings. nv_run returns the same
 * exit contract as the CLI: 0 success, 2 obstructed/impossible verdict,
 * 3 inconclusive or budget exhausted, 4 input error. */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct nv_ctx nv_ctx;

nv_ctx* nv_ctx_new(void);
void nv_ctx_free(nv_ctx* ctx);

/* Last error message for this context, or an empty string. The pointer
 * stays valid until the next nv_run on the same context. */
const char* nv_ctx_last_error(const nv_ctx* ctx);

/* Runs one subcommand (hilbert, components, search, solubility, galois,
 * brauer-gens, pair, obstruction-demo, torsor-build, torsor-fiber,
 * density-count, density-beta, density-verify, calibrate-ck) against a
 * problem spec. flags_json may be NULL or "{}". On return *out_json, when
 * non-NULL, holds a report to release with nv_string_free. */
int nv_run(nv_ctx* ctx, const char* command, const char* spec_json,
           const char* flags_json, char** out_json);

void nv_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* NORMCT_H */
