#include <stdio.h>
#include <string.h>
#include "jqf.h"

int main(void) {
    JqfParams p;
    if (jqf_params_default(&p) != JQF_STATUS_OK) return 10;

    JqfSystem *sys = NULL;
    if (jqf_system_new(&p, &sys) != JQF_STATUS_OK) return 11;

    double times[3] = {0.0, 50e-9, 100e-9};
    JqfTrajectory *traj = NULL;
    if (jqf_decay(sys, times, 3, &traj) != JQF_STATUS_OK) return 12;
    size_t n = jqf_trajectory_len(traj);
    double p1[3];
    if (n != 3 || jqf_trajectory_copy(traj, JQF_COLUMN_P1, p1, 3) != JQF_STATUS_OK) return 13;
    printf("%.12f\n", p1[2]);
    jqf_trajectory_free(traj);

    p.velocity = -1.0;
    JqfSystem *bad = NULL;
    if (jqf_system_new(&p, &bad) != JQF_STATUS_INVALID_PARAMETER || bad != NULL) return 14;
    const char *msg = jqf_last_error_message();
    if (msg == NULL || strstr(msg, "velocity") == NULL) return 15;

    jqf_system_free(sys);
    return 0;
}
