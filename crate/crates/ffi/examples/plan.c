#include <stdio.h>
#include "fleetcover.h"
int main(void) {
    FcScenario *sc = NULL; FcPlanResult *r = NULL;
    if (fc_scenario_bundled("cape", &sc) != FC_STATUS_OK) return 1;
    fc_scenario_set_robots(sc, 4);
    if (fc_plan(sc, &r) != FC_STATUS_OK) { printf("%s\n", fc_last_error_message()); return 2; }
    printf("robots %zu energy %.3f Wh\n", fc_result_robot_count(r), fc_result_total_energy_wh(r));
    if (fc_scenario_set_swath_width(sc, -1) != FC_STATUS_INVALID_ARGUMENT) return 3;
    printf("error: %s\n", fc_last_error_message());
    fc_result_free(r); fc_scenario_free(sc);
    return 0;
}
