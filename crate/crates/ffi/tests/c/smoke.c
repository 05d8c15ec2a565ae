#include <stdio.h>
#include <string.h>

#include "urysohn.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__,    \
                    __LINE__, #cond);                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    UrySpace *space = NULL;
    const char *json = "{\"n\":2,\"d\":[[\"0\",\"2/3\"],[\"2/3\",\"0\"]]}";
    CHECK(ury_space_from_json(json, &space) == URY_STATUS_OK);

    size_t n = 0;
    CHECK(ury_space_len(space, &n) == URY_STATUS_OK && n == 2);

    int64_t num = 0, den = 0;
    CHECK(ury_space_distance(space, 0, 1, &num, &den) == URY_STATUS_OK);
    CHECK(num == 2 && den == 3);
    CHECK(ury_space_distance(space, 0, 5, &num, &den) == URY_STATUS_OUT_OF_RANGE);
    char *msg = ury_last_error_message();
    CHECK(msg != NULL && strstr(msg, "out of range") != NULL);
    ury_string_free(msg);

    UrySpace *coarse = NULL;
    CHECK(ury_space_ceil(space, 2, &coarse) == URY_STATUS_OK);
    CHECK(ury_space_distance(coarse, 0, 1, &num, &den) == URY_STATUS_OK);
    CHECK(num == 1 && den == 1);
    ury_space_free(coarse);
    ury_space_free(space);

    UrySpace *built = NULL;
    int64_t closed = -1;
    CHECK(ury_build_approx("1/2,1", 6, 2, 0, 200, &built, &closed) == URY_STATUS_OK);
    CHECK(closed >= 0);
    size_t missing = 1;
    CHECK(ury_check_extension(built, NULL, 2, &missing) == URY_STATUS_OK);
    CHECK(missing == 0);
    char *out = NULL;
    CHECK(ury_space_to_json(built, &out) == URY_STATUS_OK && out[0] == '{');
    ury_string_free(out);
    ury_space_free(built);

    bool ok = true;
    CHECK(ury_four_values("2,4,7", &ok) == URY_STATUS_OK && !ok);

    CHECK(ury_space_len(NULL, &n) == URY_STATUS_NULL_POINTER);
    printf("ok %s\n", ury_version());
    return 0;
}
