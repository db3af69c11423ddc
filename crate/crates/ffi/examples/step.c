/* Step the default scenario and print the destroyed-patch count.
 *
 *   cargo build -p azpp-ffi --release
 *   cc crates/ffi/examples/step.c -Icrates/ffi/include \
 *      -Ltarget/release -lazpp_ffi -o step
 *   LD_LIBRARY_PATH=target/release ./step
 */
#include <stdio.h>

#include "azpp.h"

int main(void) {
    AzppModel *model = NULL;
    if (azpp_model_new("seed = 42\nn_ticks = 200\n", &model) != AZPP_STATUS_OK) {
        fprintf(stderr, "azpp: %s\n", azpp_last_error_message());
        return 1;
    }
    AzppGlobalMetrics g;
    while (azpp_model_step(model, &g) == AZPP_STATUS_OK) {
        if (g.n_attacks > 0)
            printf("tick %llu: %u attack(s), %llu destroyed\n", (unsigned long long)g.tick, g.n_attacks,
                   (unsigned long long)g.destroyed_count);
    }
    size_t n = 0;
    azpp_model_agent_count(model, &n);
    for (size_t i = 0; i < n; i++) {
        AzppAgentMetrics a;
        azpp_model_agent(model, i, &a);
        printf("agent %u: affect %.3f disposition %.3f at (%llu, %llu)\n", a.agent_id, a.affect, a.disposition,
               (unsigned long long)a.x, (unsigned long long)a.y);
    }
    azpp_model_free(model);
    return 0;
}
