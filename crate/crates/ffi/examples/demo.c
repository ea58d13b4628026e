#include <stdio.h>
#include <string.h>

#include "shimura_vol.h"

int main(void) {
    ShvContext *ctx = shv_context_new(40);
    ShvSpace *space = NULL;
    char *vol = NULL, *b = NULL, *db = NULL, *k = NULL;
    uint64_t primes[] = {29};
    int64_t coeffs[] = {1};
    int rc = 1;

    if (!ctx || shv_space_parse("D=7;n=3;inv=7:-1", &space) != SHV_STATUS_OK) {
        fprintf(stderr, "setup: %s\n", shv_last_error());
        goto done;
    }
    if (shv_volume_hodge(space, &vol) != SHV_STATUS_OK ||
        shv_coeff_b(ctx, space, 29, &b, &db) != SHV_STATUS_OK ||
        shv_borcherds_weight(ctx, space, primes, coeffs, 1, &k) != SHV_STATUS_OK) {
        fprintf(stderr, "call: %s\n", shv_last_error());
        goto done;
    }
    printf("volume %s\nB %s\nB' %s\nweight %s\n", vol, b, db, k);
    rc = strcmp(vol, "2/21") || strcmp(b, "-5894") || strcmp(k, "5894");

done:
    shv_string_free(vol);
    shv_string_free(b);
    shv_string_free(db);
    shv_string_free(k);
    shv_space_free(space);
    shv_context_free(ctx);
    return rc;
}
