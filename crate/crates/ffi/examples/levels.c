#include <stdio.h>
#include "hadspec.h"

int main(void) {
    const char *json = "{\"family\":[{\"N\":4,\"B\":[0,2],\"L\":[0,1]}],\"word\":{\"period\":[1]}}";
    HsSpec *spec = NULL;
    HsLevels *levels = NULL;
    if (hs_spec_from_json(json, &spec) != HS_STATUS_OK) {
        fprintf(stderr, "%s\n", hs_last_error_message());
        return 1;
    }
    if (hs_build_spectrum(spec, 3, 0.2, 1e-4, 8, 40, &levels) != HS_STATUS_OK) {
        fprintf(stderr, "%s\n", hs_last_error_message());
        hs_spec_free(spec);
        return 1;
    }
    int64_t buf[64];
    size_t len = 0;
    hs_levels_get(levels, hs_levels_count(levels), buf, 64, &len);
    for (size_t i = 0; i < len; i++) {
        printf("%lld%c", (long long)buf[i], i + 1 < len ? ' ' : '\n');
    }
    hs_levels_free(levels);
    hs_spec_free(spec);
    return 0;
}
