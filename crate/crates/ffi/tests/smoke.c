#include <stdio.h>
#include <string.h>
#include "rcspkit.h"

static const char *NAE = "rel NAE 3 over 2\n0 0 1\n0 1 0\n0 1 1\n1 0 0\n1 0 1\n1 1 0\n";

int main(void) {
    RcspLanguage *lang = NULL;
    bool poly = true;
    if (rcsp_language_parse(NAE, &lang) != RCSP_STATUS_OK) return 1;
    if (rcsp_language_is_polynomial(lang, &poly) != RCSP_STATUS_OK || poly) return 2;
    rcsp_language_free(lang);

    RcspRelation *rel = NULL;
    if (rcsp_relation_parse("rel X 2 over 2\n0 0\n", "Y", &rel) != RCSP_STATUS_VALIDATION_ERROR) return 3;
    if (strlen(rcsp_last_error()) == 0) return 4;
    puts("ok");
    return 0;
}
