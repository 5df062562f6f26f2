#include <math.h>
#include <stdio.h>
#include <string.h>

#include "boostcycle.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      const char *msg = bc_last_error_message();                      \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,          \
              msg ? msg : "no message");                              \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  BcPool *pool = NULL;
  CHECK(bc_pool_parse("-++\n+-+\n++-\n", &pool) == BC_STATUS_OK);

  BcTrace *trace = NULL;
  CHECK(bc_run(pool, "optimal", BC_MODE_FLOAT, 300, &trace) == BC_STATUS_OK);
  size_t len = 0;
  CHECK(bc_trace_len(trace, &len) == BC_STATUS_OK && len == 300);

  double w[3];
  CHECK(bc_trace_weights(trace, len, w, 3) == BC_STATUS_OK);
  CHECK(fabs(w[0] + w[1] + w[2] - 1.0) < 1e-12);

  BcCycleReport *report = NULL;
  CHECK(bc_detect_cycle(trace, NULL, &report) == BC_STATUS_OK && report);
  double mean = 0.0;
  bool nabla = false;
  CHECK(bc_cycle_summary(report, NULL, NULL, NULL, &mean, &nabla) == BC_STATUS_OK);
  CHECK(nabla && fabs(mean - (sqrt(5.0) - 1.0) / 2.0) < 1e-9);

  char *word = NULL;
  CHECK(bc_cycle_farey_word(report, &word) == BC_STATUS_OK && word);
  CHECK(strcmp(word, "R") == 0);
  bc_string_free(word);

  char *exact = NULL;
  double value = 0.0;
  CHECK(bc_farey_periodic_point("RL", &exact, &value) == BC_STATUS_OK);
  CHECK(fabs(value - (sqrt(2.0) - 1.0)) < 1e-15);
  bc_string_free(exact);

  CHECK(bc_run(pool, "bogus", BC_MODE_FLOAT, 3, &trace) == BC_STATUS_INVALID_ARGUMENT);
  CHECK(bc_last_error_message() != NULL);

  bc_cycle_free(report);
  bc_trace_free(trace);
  bc_pool_free(pool);
  printf("ok\n");
  return 0;
}
