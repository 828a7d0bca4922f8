#include <math.h>
#include <stdio.h>
#include <string.h>

#include "geophase.h"

int main(void) {
    GpSchedule *s = NULL;
    if (gp_schedule_named("H", "dyncorrected", &s) != GP_STATUS_OK) {
        fprintf(stderr, "build failed: %s\n", gp_last_error());
        return 1;
    }
    double f = 0.0;
    if (gp_gate_fidelity(s, 0.0, 0.0, &f) != GP_STATUS_OK || fabs(f - 1.0) > 1e-12) {
        fprintf(stderr, "fidelity %.17g\n", f);
        return 1;
    }
    char *json = NULL;
    if (gp_schedule_to_json(s, &json) != GP_STATUS_OK || strstr(json, "dyncorrected") == NULL) {
        return 1;
    }
    gp_string_free(json);
    gp_schedule_free(s);

    GpSchedule *bad = NULL;
    if (gp_schedule_named("Q", "singleloop", &bad) != GP_STATUS_INVALID_ARGUMENT || strlen(gp_last_error()) == 0) {
        return 1;
    }
    printf("%.12f\n", f);
    return 0;
}
