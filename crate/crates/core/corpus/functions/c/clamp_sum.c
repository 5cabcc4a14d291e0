int clampSum(const int *xs, int n, int lo, int hi) {
    int s = 0;
    for (int i = 0; i < n; i++) {
        int v = xs[i];
        if (v<lo)
            v = lo;
        if (v > hi)
            v = hi;
        s+=v;
    }
    return s;
}
