#include <stdio.h>
#include "rotoseen.h"

int main(void) {
    rr_item *item = NULL;
    rr_item_info info;
    rr_blowup b;
    if (rr_item_build(16, RR_RATIO_KIND_SQRT2, 0, 0, 1.0, 1.0, RR_WINDOW_RESONANT, &item) != RR_STATUS_OK) {
        char msg[256];
        rr_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        return 1;
    }
    rr_item_get(item, &info);
    rr_item_blowup(item, &b);
    printf("n=%llu k=%lld l=%lld ratio=%.6f\n", (unsigned long long)info.n, (long long)info.k_n,
           (long long)info.ell_n, b.ratio);
    rr_item_free(item);
    return 0;
}
