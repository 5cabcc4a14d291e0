int maxElement(const int *xs, int n) {
    int best=xs[0];
    for (int i = 1; i<n; i++) {
        best = fmax(best, xs[i]);
    }
    return best;
}
