#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "tmnlcs.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        TmnlcsStatus st_ = (call);                                           \
        if (st_ != TMNLCS_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_,               \
                    tmnlcs_last_error_message());                            \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    TmnlcsState *pair = NULL, *kerr = NULL, *parity = NULL;
    CHECK(tmnlcs_state_build("pair", NULL, 1.0, 0.0, 0, TMNLCS_ROUTE_RECURSION, &pair));
    CHECK(tmnlcs_kerr_evolve(pair, 1.5707963267948966, &kerr));
    CHECK(tmnlcs_state_build("parity_pair", NULL, 1.0, 0.0, 0,
                             TMNLCS_ROUTE_PARITY_SUPERPOSITION, &parity));
    double fid = 0.0;
    CHECK(tmnlcs_fidelity(kerr, parity, &fid));
    if (fabs(fid - 1.0) > 1e-12) {
        fprintf(stderr, "fidelity %.17g\n", fid);
        return 1;
    }

    size_t len = tmnlcs_state_len(pair);
    double *buf = malloc(2 * len * sizeof(double));
    CHECK(tmnlcs_state_amplitudes(pair, buf, 2 * len));
    /* c_0 = 1/sqrt(sum 1/(n!)^2) at zeta = 1, q = 0 */
    if (fabs(buf[0] - 0.66232641487188837) > 1e-12) {
        fprintf(stderr, "c0 %.17g\n", buf[0]);
        return 1;
    }
    free(buf);

    TmnlcsState *bad = NULL;
    if (tmnlcs_state_build("nope", NULL, 1.0, 0.0, 0, TMNLCS_ROUTE_RECURSION, &bad) !=
        TMNLCS_STATUS_UNKNOWN_NAME) {
        return 1;
    }

    tmnlcs_state_free(pair);
    tmnlcs_state_free(kerr);
    tmnlcs_state_free(parity);
    printf("ok\n");
    return 0;
}
