#include <stdio.h>
#include <string.h>
#include "homfly.h"

int main(void) {
    HomflyDiagram *d = NULL;
    if (homfly_diagram_from_pd("X[4,2,5,1], X[8,6,1,5], X[6,3,7,4], X[2,7,3,8]", &d) != HOMFLY_STATUS_OK) return 1;
    char *s = NULL;
    if (homfly_compute(d, HOMFLY_ALGORITHM_FPT, HOMFLY_RENDER_HUMAN, 0, &s) != HOMFLY_STATUS_OK) return 2;
    int bad = strcmp(s, "a^2 + a^-2 - z^2 - 1") != 0;
    printf("%s\n", s);
    homfly_string_free(s);
    homfly_diagram_free(d);
    if (bad) return 3;
    if (homfly_diagram_from_pd("X[1,2,3]", &d) != HOMFLY_STATUS_PARSE_ERROR || d != NULL) return 4;
    if (homfly_last_error() == NULL) return 5;
    return 0;
}
