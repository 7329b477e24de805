#include <stdio.h>
#include <string.h>
#include "homlab.h"

int main(void) {
    HomlabGraph *c5 = NULL, *x = NULL;
    char *count = NULL;
    if (homlab_graph_parse("Dhc", &c5) != HOMLAB_STATUS_OK) return 1;
    if (homlab_hom_count(c5, c5, &count) != HOMLAB_STATUS_OK) return 2;
    if (strcmp(count, "10") != 0) return 3;
    homlab_string_free(count);
    size_t twist[] = {0};
    if (homlab_cfi(c5, twist, 1, &x) != HOMLAB_STATUS_OK) return 4;
    if (homlab_graph_order(x) != 10) return 5;
    if (homlab_graph_parse("not a graph", &x) == HOMLAB_STATUS_OK) return 6;
    if (strlen(homlab_last_error()) == 0) return 7;
    homlab_graph_free(x);
    homlab_graph_free(c5);
    puts("ok");
    return 0;
}
