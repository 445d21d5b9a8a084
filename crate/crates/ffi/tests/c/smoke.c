#include <math.h>
#include <stdio.h>
#include "calabi.h"

int main(void) {
    CalabiConical *h = NULL;
    if (calabi_solve_conical(1.0, 1.0, 1e-10, &h) != CALABI_STATUS_OK) {
        char msg[256];
        calabi_last_error_message(msg, sizeof msg);
        fprintf(stderr, "solve failed: %s\n", msg);
        return 1;
    }
    double alpha = 0.0, chern = 0.0;
    calabi_conical_alpha(h, &alpha);
    calabi_conical_chern_integral(h, &chern);
    size_t n = calabi_conical_profile_len(h);
    calabi_conical_free(h);
    printf("%.12f %.12f %zu\n", alpha, chern, n);
    if (calabi_solve_conical(-1.0, 1.0, 1e-10, &h) != CALABI_STATUS_DOMAIN || h != NULL) {
        return 2;
    }
    return fabs(chern + 4.0) < 1e-8 && alpha < 0.0 ? 0 : 3;
}
