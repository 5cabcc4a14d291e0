int countEvens(const int *xs, int n) {
    int count = 0, i;
    for (i = 0; i < n; i++) {
        if (xs[i]%2 == 0)
            count++;
    }
    return count;
}
