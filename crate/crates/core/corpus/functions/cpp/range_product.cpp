long long rangeProduct(int from, int to) {
    long long p = 1;
    if (from > to)
        return 1;
    for (int k = from; k<=to; k++) {
        p*=k;
    }
    return p;
}
