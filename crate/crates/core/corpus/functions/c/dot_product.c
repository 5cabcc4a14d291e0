double dotProduct(const double *a, const double *b, int n) {
    double acc=0.0;
    int k;
    for (k = 0; k < n; k++) {
        acc += a[k]*b[k];
    }
    return acc;
}
