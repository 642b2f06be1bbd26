#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gheat.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
              #cond);                                                 \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  double v = 0.0;
  CHECK(gheat_gaussian_tail(0.0, &v) == GHEAT_STATUS_OK);
  CHECK(fabs(v - 1.2533141373155003) < 1e-15);

  GheatFreeBoundary fb;
  CHECK(gheat_free_boundary_solve(1, 0.5, 1e-12, &fb) == GHEAT_STATUS_OK);
  CHECK(fabs(fb.c + 0.39082337020233618) < 1e-12);
  CHECK(fabs(fb.k - 0.49937869664373121) < 1e-12);

  GheatProfile *p = NULL;
  CHECK(gheat_profile_new(1, 0.5, &p) == GHEAT_STATUS_OK && p != NULL);
  CHECK(gheat_profile_eval(p, 0.0, 0, &v) == GHEAT_STATUS_OK);
  CHECK(fabs(v - fb.k) < 1e-14);
  CHECK(gheat_profile_eval(p, 0.0, 3, &v) == GHEAT_STATUS_DOMAIN);
  CHECK(strstr(gheat_last_error(), "order") != NULL);
  gheat_profile_free(p);

  CHECK(gheat_odd_moment(1, 2.0, 1.0, &v) == GHEAT_STATUS_DOMAIN);
  CHECK(gheat_scaled_tail(1.0, NULL) == GHEAT_STATUS_NULL_POINTER);

  printf("gheat %s ok\n", gheat_version());
  return 0;
}
