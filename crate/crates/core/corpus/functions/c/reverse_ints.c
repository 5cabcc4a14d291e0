void reverseInts(int *xs, int n) {
    if (n < 2)
        return;
    int lo = 0;
    int hi = n-1;
    while (lo < hi) {
        int tmp=xs[lo];
        xs[lo] = xs[hi];
        xs[hi] = tmp;
        lo++;
        hi--;
    }
}
