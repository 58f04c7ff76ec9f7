/* Compiles the public header as C and drives a minimal train/predict cycle. */

#include <stdio.h>

#include "ctrboost/c_api.h"

int main(void) {
    const double x[] = {1, 2, 3, 4, 5, 6, 7, 8};
    const int32_t codes[] = {0, 1, 0, 1, 0, 1, -1, 1};
    const char* cats[] = {"a", "b"};
    const uint8_t y[] = {0, 0, 0, 0, 1, 1, 1, 1};
    ctb_column cols[2] = {{"x", CTB_COLUMN_NUMERICAL, x, NULL, NULL, 0},
                          {"c", CTB_COLUMN_CATEGORICAL, NULL, codes, cats, 2}};
    ctb_dataset* ds = NULL;
    ctb_model* model = NULL;
    const char* keys[] = {"n_trees", "min_child_weight"};
    const char* values[] = {"10", "0"};
    double p[8];
    int rc;

    if (ctb_api_version() != CTB_API_VERSION) return 1;
    rc = ctb_dataset_from_columns(cols, 2, 8, y, "y", &ds);
    if (rc == CTB_OK) rc = ctb_train(ds, NULL, keys, values, 2, &model);
    if (rc == CTB_OK) rc = ctb_predict(model, ds, p, 8);
    if (rc != CTB_OK) {
        fprintf(stderr, "%s: %s\n", ctb_status_name(rc), ctb_last_error());
        return 1;
    }
    if (!(p[0] < 0.5 && p[7] > 0.5)) return 1;
    ctb_model_free(model);
    ctb_dataset_free(ds);
    return ctb_dataset_free(ds) == CTB_ERR_INVALID_HANDLE ? 0 : 1;
}
