#include <math.h>
#include <stdio.h>
#include "pfe.h"

#define CHECK(cond)                                                     \
    do {                                                                \
        if (!(cond)) {                                                  \
            const char *m = pfe_last_error_message();                   \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,      \
                    m ? m : "no error");                                \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    PfeThermo *thermo = NULL;
    CHECK(pfe_thermo_create_preset("planar-interface-ions", &thermo) == PFE_STATUS_OK);
    double rho[3] = {0.2, 0.4, 0.6};
    double mu[3];
    CHECK(pfe_thermo_chemical_potentials(thermo, rho, 3, 0.0, mu) == PFE_STATUS_OK);
    CHECK(isfinite(mu[0]) && isfinite(mu[1]) && isfinite(mu[2]));
    CHECK(pfe_thermo_chemical_potentials(thermo, rho, 1, 0.0, mu) == PFE_STATUS_INVALID_ARGUMENT);
    CHECK(pfe_last_error_message() != NULL);
    pfe_thermo_free(thermo);

    PfeSimulation *sim = NULL;
    CHECK(pfe_simulation_create_preset("planar-interface-neutral", 0.1, &sim) == PFE_STATUS_OK);
    PfeEnergy e0, e1;
    CHECK(pfe_simulation_energy(sim, &e0) == PFE_STATUS_OK);
    CHECK(pfe_simulation_run_until(sim, 0.005) == PFE_STATUS_OK);
    CHECK(pfe_simulation_energy(sim, &e1) == PFE_STATUS_OK);
    CHECK(e1.available <= e0.available);
    size_t n = pfe_simulation_cell_count(sim);
    double chi[4096];
    CHECK(n > 0 && n <= 4096);
    CHECK(pfe_simulation_copy_field(sim, PFE_FIELD_PHASE_FIELD, 0, chi, n) == PFE_STATUS_OK);
    CHECK(chi[0] < 0.0 && chi[n - 1] > 0.0);
    pfe_simulation_free(sim);

    CHECK(pfe_simulation_create_config("double_well.gamma = -1.0", 0.0, &sim) == PFE_STATUS_CONFIG_ERROR);
    printf("ok %s\n", pfe_version());
    return 0;
}
